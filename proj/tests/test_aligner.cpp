#include "dialectmt/aligner.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace dialectmt;
using testutil::TempDir;

namespace {

ParallelCorpus random_corpus(std::mt19937_64& rng, int pairs) {
  const std::vector<std::string> src_vocab{"a", "b", "c", "d", "e", "f"};
  const std::vector<std::string> tgt_vocab{"u", "v", "w", "x", "y", "z"};
  ParallelCorpus corpus;
  for (int n = 0; n < pairs; ++n) {
    Sentence s, t;
    int sl = 1 + int(rng() % 4), tl = 1 + int(rng() % 4);
    for (int i = 0; i < sl; ++i) s.tokens.emplace_back(src_vocab[rng() % src_vocab.size()]);
    for (int j = 0; j < tl; ++j) t.tokens.emplace_back(tgt_vocab[rng() % tgt_vocab.size()]);
    corpus.pairs.emplace_back(std::move(s), std::move(t));
  }
  return corpus;
}

AlignmentSet links(std::set<std::pair<int, int>> ls, int sl, int tl) {
  AlignmentSet a;
  a.links = std::move(ls);
  a.source_len = sl;
  a.target_len = tl;
  return a;
}

}  // namespace

TEST_CASE("em training raises corpus likelihood monotonically") {
  std::mt19937_64 rng(11);
  for (int c = 0; c < 5; ++c) {
    auto corpus = random_corpus(rng, 12);
    double prev = -std::numeric_limits<double>::infinity();
    for (int iters = 1; iters <= 10; ++iters) {
      auto table = train_ibm1(corpus, iters);
      double ll = corpus_log_likelihood(table, corpus);
      CHECK(ll >= prev - 1e-9);
      prev = ll;
    }
  }
}

TEST_CASE("em concentrates mass on the forced pair") {
  auto corpus = testutil::corpus({{"a b", "x y"}, {"a", "x"}});
  auto table = train_ibm1(corpus, 5);
  CHECK(table.lookup("x", "a") > 0.9);
}

TEST_CASE("translation distributions are normalized") {
  std::mt19937_64 rng(23);
  auto corpus = random_corpus(rng, 20);
  auto table = train_ibm1(corpus, 4);
  REQUIRE(!table.probs.empty());
  CHECK(table.probs.count(TranslationTable::kNull) == 1);
  for (const auto& [src, row] : table.probs) {
    double sum = 0.0;
    for (const auto& [tgt, p] : row) {
      CHECK(p >= 0.0);
      sum += p;
    }
    CAPTURE(src);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("lookup floors unseen events") {
  TranslationTable table;
  table.probs["a"]["x"] = 0.7;
  CHECK(table.lookup("x", "a") == 0.7);
  CHECK(table.lookup("y", "a") == TranslationTable::kFloor);
  CHECK(table.lookup("x", "nosuch") == TranslationTable::kFloor);
}

TEST_CASE("training rejects an empty corpus") {
  CHECK_THROWS_WITH_AS(train_ibm1(ParallelCorpus{}, 3),
                       "cannot train aligner on an empty corpus", DataError);
  CHECK_THROWS_AS(align_corpus(ParallelCorpus{}, 3), DataError);
}

TEST_CASE("viterbi picks argmax with null and position ties") {
  TranslationTable table;
  table.probs["a"]["x"] = 0.6;
  table.probs["b"]["x"] = 0.6;
  table.probs[TranslationTable::kNull]["x"] = 0.3;
  table.probs["a"]["y"] = 0.5;
  table.probs[TranslationTable::kNull]["y"] = 0.5;
  table.probs["b"]["z"] = 0.8;
  table.probs[TranslationTable::kNull]["z"] = 0.1;

  auto a = viterbi_align(table, testutil::sent("a b"), testutil::sent("x y z q"));
  CHECK(a.source_len == 2);
  CHECK(a.target_len == 4);
  // x: tie between a and b goes to the earlier position; y: null keeps the
  // tie, so no link; q: unseen everywhere, the floor ties toward null.
  CHECK(a.links == std::set<std::pair<int, int>>{{0, 0}, {1, 2}});
}

TEST_CASE("viterbi matches a brute-force argmax on trained tables") {
  std::mt19937_64 rng(31);
  auto corpus = random_corpus(rng, 15);
  auto table = train_ibm1(corpus, 3);
  for (const auto& [src, tgt] : corpus.pairs) {
    auto got = viterbi_align(table, src, tgt);
    std::set<std::pair<int, int>> want;
    for (int j = 0; j < int(tgt.size()); ++j) {
      double best = table.lookup(tgt.tokens[j].surface, TranslationTable::kNull);
      int best_i = -1;
      for (int i = 0; i < int(src.size()); ++i) {
        double p = table.lookup(tgt.tokens[j].surface, src.tokens[i].surface);
        if (p > best) {
          best = p;
          best_i = i;
        }
      }
      if (best_i >= 0) want.insert({best_i, j});
    }
    CHECK(got.links == want);
  }
}

TEST_CASE("grow-diag-final on hand-traced instances") {
  auto out1 = grow_diag_final(links({{0, 0}, {1, 1}}, 2, 2), links({{0, 0}}, 2, 2));
  CHECK(out1.links == std::set<std::pair<int, int>>{{0, 0}, {1, 1}});

  auto out2 = grow_diag_final(links({{0, 0}, {1, 1}}, 3, 2), links({{0, 0}, {2, 1}}, 3, 2));
  CHECK(out2.links == std::set<std::pair<int, int>>{{0, 0}, {1, 1}, {2, 1}});

  auto out3 = grow_diag_final(links({{0, 0}, {2, 1}}, 3, 2), links({{0, 0}, {0, 1}}, 3, 2));
  CHECK(out3.links == std::set<std::pair<int, int>>{{0, 0}, {0, 1}, {2, 1}});

  auto out4 = grow_diag_final(links({{0, 0}, {1, 1}, {3, 2}}, 4, 4),
                              links({{0, 0}, {1, 2}, {3, 3}}, 4, 4));
  CHECK(out4.links == std::set<std::pair<int, int>>{{0, 0}, {1, 1}, {1, 2}, {3, 2}, {3, 3}});
}

TEST_CASE("grow-diag-final stays between intersection and union") {
  std::mt19937_64 rng(47);
  for (int n = 0; n < 300; ++n) {
    int sl = 1 + int(rng() % 6), tl = 1 + int(rng() % 6);
    auto fwd = oracles::random_alignment(rng, sl, tl, 0.3);
    auto rev = oracles::random_alignment(rng, sl, tl, 0.3);
    auto out = grow_diag_final(fwd, rev);
    for (const auto& link : out.links) CHECK(bool(fwd.links.count(link) || rev.links.count(link)));
    for (const auto& link : fwd.links)
      if (rev.links.count(link)) CHECK(out.links.count(link) == 1);
  }
}

TEST_CASE("grow-diag-final matches the reference construction") {
  std::mt19937_64 rng(53);
  for (int n = 0; n < 500; ++n) {
    int sl = 1 + int(rng() % 5), tl = 1 + int(rng() % 5);
    double density = 0.15 + 0.1 * double(rng() % 5);
    auto fwd = oracles::random_alignment(rng, sl, tl, density);
    auto rev = oracles::random_alignment(rng, sl, tl, density);
    auto got = grow_diag_final(fwd, rev);
    auto want = oracles::grow_diag_final(fwd, rev);
    CAPTURE(n);
    CHECK(got.links == want.links);
  }
}

TEST_CASE("grow-diag-final rejects mismatched dimensions") {
  CHECK_THROWS_WITH_AS(grow_diag_final(links({}, 2, 2), links({}, 2, 3)),
                       "alignment dimension mismatch", DataError);
}

TEST_CASE("pharaoh files round-trip") {
  TempDir dir;
  std::vector<AlignmentSet> alignments{
      links({{0, 0}, {1, 2}}, 2, 3),
      links({{2, 1}}, 3, 2),
      links({}, 0, 0),
      links({{0, 1}, {0, 0}, {1, 1}}, 2, 2),
  };
  write_alignments(dir.file("a.align"), alignments);
  auto back = read_alignments(dir.file("a.align"));
  REQUIRE(back.size() == alignments.size());
  for (std::size_t k = 0; k < back.size(); ++k) {
    CAPTURE(k);
    CHECK(back[k].links == alignments[k].links);
  }
  CHECK(back[0].source_len == 2);
  CHECK(back[0].target_len == 3);

  auto text = testutil::read_file(dir.file("a.align"));
  CHECK(text == "0-0 1-2\n2-1\n\n0-0 0-1 1-1\n");
}

TEST_CASE("align_corpus symmetrizes every pair") {
  auto corpus = testutil::corpus({{"a b", "x y"}, {"a", "x"}, {"b c", "y z"}});
  auto alignments = align_corpus(corpus, 5);
  REQUIRE(alignments.size() == corpus.size());
  for (std::size_t k = 0; k < alignments.size(); ++k) {
    CHECK(alignments[k].source_len == int(corpus.pairs[k].first.size()));
    CHECK(alignments[k].target_len == int(corpus.pairs[k].second.size()));
    for (const auto& [i, j] : alignments[k].links) {
      CHECK(i >= 0);
      CHECK(i < alignments[k].source_len);
      CHECK(j >= 0);
      CHECK(j < alignments[k].target_len);
    }
  }
  // The anchored word pair comes out linked.
  CHECK(alignments[1].links.count({0, 0}) == 1);
  CHECK(align_corpus(corpus, 5) == alignments);
}
