#include "dialectmt/corpus.hpp"

#include <algorithm>
#include <set>

#include "doctest.h"
#include "test_util.hpp"

using namespace dialectmt;
using testutil::TempDir;
using testutil::write_file;

namespace {
// U+0622 U+0623 U+0625 U+0671 all collapse to bare alif U+0627,
// U+0649 to U+064A.
const std::string kAlifMadda = "\xD8\xA2";
const std::string kAlifHamzaAbove = "\xD8\xA3";
const std::string kAlifHamzaBelow = "\xD8\xA5";
const std::string kAlifWasla = "\xD9\xB1";
const std::string kBareAlif = "\xD8\xA7";
const std::string kAlifMaqsura = "\xD9\x89";
const std::string kYa = "\xD9\x8A";
const std::string kNun = "\xD9\x86";
}  // namespace

TEST_CASE("token clitic markers") {
  CHECK(Token("H+").is_clitic_prefix());
  CHECK_FALSE(Token("H+").is_clitic_suffix());
  CHECK(Token("+hA").is_clitic_suffix());
  CHECK_FALSE(Token("+hA").is_clitic_prefix());
  CHECK_FALSE(Token("plain").is_clitic_prefix());
  CHECK_FALSE(Token("plain").is_clitic_suffix());
  CHECK(Token("H+").stripped() == "H");
  CHECK(Token("+hA").stripped() == "hA");
  CHECK(Token("plain").stripped() == "plain");
  // A bare "+" is a plain token, not a marker.
  CHECK_FALSE(Token("+").is_clitic_prefix());
  CHECK_FALSE(Token("+").is_clitic_suffix());

  CHECK_THROWS_WITH_AS(Token(""), "empty token", DataError);
  CHECK_THROWS_WITH_AS(Token("a b"), "token contains whitespace: 'a b'", DataError);
  CHECK_THROWS_WITH_AS(Token("+x+"), "token carries both clitic markers: '+x+'", DataError);
}

TEST_CASE("sentence line round-trip") {
  Sentence s = sentence_from_line("w+ qAl +hA llrjl");
  CHECK(s.size() == 4);
  CHECK(s.surfaces() == std::vector<std::string>{"w+", "qAl", "+hA", "llrjl"});
  CHECK(sentence_to_line(s) == "w+ qAl +hA llrjl");
  CHECK(sentence_from_line("").empty());
  CHECK(sentence_from_line("  a   b ").surfaces() == std::vector<std::string>{"a", "b"});
}

TEST_CASE("normalize_text maps alif variants") {
  // The hamza-carrying alif in front of n-a becomes a bare alif.
  CHECK(normalize_text(kAlifHamzaAbove + kNun + kBareAlif) == kBareAlif + kNun + kBareAlif);
  for (const auto& variant : {kAlifMadda, kAlifHamzaAbove, kAlifHamzaBelow, kAlifWasla})
    CHECK(normalize_text(variant) == kBareAlif);
  CHECK(normalize_text(kAlifMaqsura) == kYa);
}

TEST_CASE("normalize_text canonicalizes whitespace and is idempotent") {
  CHECK(normalize_text("  a \t b  ") == "a b");
  CHECK(normalize_text("") == "");
  CHECK(normalize_text(" \t ") == "");
  for (const std::string& text : std::vector<std::string>{
           "  x   y ", kAlifMadda + " " + kAlifMaqsura, "plain text",
           "\tmixed " + kAlifHamzaBelow}) {
    std::string once = normalize_text(text);
    CHECK(normalize_text(once) == once);
  }
}

TEST_CASE("normalization map overrides") {
  NormalizationMap map;
  map.set(U'a', U'b');
  CHECK(normalize_text("aba", map) == "bbb");
  // Untouched map leaves everything alone.
  CHECK(normalize_text(kAlifHamzaAbove, NormalizationMap()) == kAlifHamzaAbove);

  TempDir dir;
  write_file(dir.file("map.tsv"), "0623\t0627\n# comment\n\n0649\t064A\n");
  auto loaded = NormalizationMap::from_file(dir.file("map.tsv"));
  CHECK(normalize_text(kAlifHamzaAbove + " " + kAlifMaqsura, loaded) == kBareAlif + " " + kYa);
  // The override replaces the standard table entirely.
  CHECK(normalize_text(kAlifMadda, loaded) == kAlifMadda);
}

TEST_CASE("read_lines_checked strips CR and rejects bad bytes") {
  TempDir dir;
  write_file(dir.file("crlf.txt"), "one\r\ntwo\nthree");
  auto lines = read_lines_checked(dir.file("crlf.txt"));
  CHECK(lines == std::vector<std::string>{"one", "two", "three"});

  write_file(dir.file("bad.txt"), "fine\nbroken \xFF here\n");
  CHECK_THROWS_WITH_AS(read_lines_checked(dir.file("bad.txt")),
                       (dir.file("bad.txt") + ": undecodable bytes on line 2").c_str(),
                       DataError);
  CHECK_THROWS_AS(read_lines_checked(dir.file("missing.txt")), DataError);
}

TEST_CASE("load_parallel drops blank pairs and checks counts") {
  TempDir dir;
  write_file(dir.file("a.src"), "s1\n\ns3\ns4\n");
  write_file(dir.file("a.tgt"), "t1\nt2\n\nt4\n");
  LoadReport report;
  auto corpus = load_parallel(dir.file("a.src"), dir.file("a.tgt"), false, &report);
  CHECK(corpus.size() == 2);
  CHECK(report.dropped_blank_pairs == 2);
  CHECK(corpus.pairs[0].first.surfaces() == std::vector<std::string>{"s1"});
  CHECK(corpus.pairs[1].second.surfaces() == std::vector<std::string>{"t4"});

  write_file(dir.file("short.tgt"), "t1\n");
  CHECK_THROWS_WITH_AS(load_parallel(dir.file("a.src"), dir.file("short.tgt"), false, nullptr),
                       "line count mismatch 4 vs 1", DataError);
}

TEST_CASE("load_parallel applies normalization when asked") {
  TempDir dir;
  write_file(dir.file("n.src"), kAlifHamzaAbove + kNun + kBareAlif + "\n");
  write_file(dir.file("n.tgt"), "x\n");
  auto plain = load_parallel(dir.file("n.src"), dir.file("n.tgt"), false, nullptr);
  CHECK(plain.pairs[0].first.surfaces()[0] == kAlifHamzaAbove + kNun + kBareAlif);
  auto normed = load_parallel(dir.file("n.src"), dir.file("n.tgt"), true, nullptr);
  CHECK(normed.pairs[0].first.surfaces()[0] == kBareAlif + kNun + kBareAlif);
}

TEST_CASE("sentence files round-trip") {
  TempDir dir;
  auto sentences = testutil::sents({"a b", "c", "d e f"});
  write_sentences(dir.file("mono.txt"), sentences);
  LoadReport report;
  auto back = load_sentences(dir.file("mono.txt"), false, &report);
  CHECK(back == sentences);
  CHECK(report.dropped_blank_pairs == 0);

  auto corpus = testutil::corpus({{"a b", "x"}, {"c", "y z"}});
  write_parallel(dir.file("p.src"), dir.file("p.tgt"), corpus);
  auto back2 = load_parallel(dir.file("p.src"), dir.file("p.tgt"), false, nullptr);
  CHECK(back2.pairs == corpus.pairs);
}

TEST_CASE("split_corpus partitions deterministically") {
  ParallelCorpus corpus;
  for (int i = 0; i < 1200; ++i) {
    std::string w = "w" + std::to_string(i);
    corpus.pairs.emplace_back(testutil::sent(w), testutil::sent(w + "t"));
  }
  SplitSizes sizes{800, 50, 150, 200};
  auto split = split_corpus(corpus, sizes, 7);
  CHECK(split.train.size() == 800);
  CHECK(split.tune.size() == 50);
  CHECK(split.dev.size() == 150);
  CHECK(split.test.size() == 200);

  // The four parts are disjoint and together are a permutation of the input.
  std::multiset<std::string> seen, expected;
  for (const auto& part : {split.train, split.tune, split.dev, split.test})
    for (const auto& [s, t] : part.pairs) seen.insert(sentence_to_line(s));
  for (const auto& [s, t] : corpus.pairs) expected.insert(sentence_to_line(s));
  CHECK(seen == expected);

  auto again = split_corpus(corpus, sizes, 7);
  CHECK(again.train.pairs == split.train.pairs);
  CHECK(again.test.pairs == split.test.pairs);
  auto other = split_corpus(corpus, sizes, 8);
  CHECK(other.train.pairs != split.train.pairs);

  // A partial split is allowed; an oversized one is not.
  auto partial = split_corpus(corpus, SplitSizes{10, 0, 0, 5}, 1);
  CHECK(partial.train.size() == 10);
  CHECK(partial.test.size() == 5);
  CHECK_THROWS_WITH_AS(split_corpus(corpus, SplitSizes{1200, 1, 0, 0}, 1),
                       "split sizes sum 1201 exceeds corpus size 1200", DataError);
}
