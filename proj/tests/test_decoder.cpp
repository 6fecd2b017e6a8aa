#include "dialectmt/decoder.hpp"

#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace dialectmt;
using testutil::TempDir;

namespace {

struct Spec {
  std::string src, tgt;
  double f = 0.5;  // value for all four conditional features
};

PhraseTable make_table(const std::vector<Spec>& specs) {
  PhraseTable t;
  t.schema = PhraseTable::kCoreSchema;
  for (const auto& s : specs)
    t.entries[{s.src, s.tgt}] =
        PhraseTableEntry{{s.f, s.f, s.f, s.f, std::exp(1.0)}, {}, 1, 1, 1};
  return t;
}

double dot(const LogLinearWeights& w, const std::map<std::string, double>& features) {
  double total = 0.0;
  for (const auto& [name, v] : features) total += w.get(name) * v;
  return total;
}

// 0.2 * sum of the four feature logs; phrase_penalty carries weight 0.
double table_part(double f) { return 0.2 * 4 * std::log(f); }

std::string flat(const DerivationResult& r) { return sentence_to_line(r.target); }

NGramLM tiny_lm(int order = 2) {
  std::vector<Sentence> corpus;
  for (int i = 0; i < 20; ++i) corpus.push_back(testutil::sent("y x"));
  corpus.push_back(testutil::sent("x y z"));
  corpus.push_back(testutil::sent("z"));
  return train_lm(corpus, order);
}

}  // namespace

TEST_CASE("single phrase derivation is scored feature by feature") {
  auto lm = tiny_lm();
  auto t = make_table({{"a", "x"}});
  auto w = default_weights({&t});

  auto results = decode_nbest(testutil::sent("a"), {&t}, lm, w);
  REQUIRE(results.size() == 1);
  const auto& r = results[0];
  CHECK(flat(r) == "x");
  CHECK(r.features.at("phi_st") == std::log(0.5));
  CHECK(r.features.at("lex_ts") == std::log(0.5));
  CHECK(r.features.at("phrase_penalty") == doctest::Approx(1.0));
  CHECK(r.features.at("word_penalty") == 1.0);
  CHECK(r.features.at("distortion") == 0.0);
  CHECK(r.features.count("oov") == 0);
  double lm_total = score_sequence(lm, {"x"});
  CHECK(r.features.at("lm") == doctest::Approx(lm_total).epsilon(1e-12));
  CHECK(r.score == doctest::Approx(table_part(0.5) + 0.5 * lm_total).epsilon(1e-12));
  CHECK(r.score == doctest::Approx(dot(w, r.features)).epsilon(1e-12));
}

TEST_CASE("reordering trades distortion against the language model") {
  auto lm = tiny_lm();  // strongly prefers "y x"
  auto t = make_table({{"a", "x"}, {"b", "y"}});
  auto w = default_weights({&t});
  auto sentence = testutil::sent("a b");

  // Covering b first costs jump 1, then jumping back to a costs 2.
  double reordered = 2 * table_part(0.5) + 0.5 * score_sequence(lm, {"y", "x"}) + 0.3 * -3;
  double monotone = 2 * table_part(0.5) + 0.5 * score_sequence(lm, {"x", "y"});
  REQUIRE(reordered > monotone);  // the construction must make reordering win

  DecoderOptions free;
  free.distortion_limit = -1;
  free.stack_size = 0;
  auto best = decode_nbest(sentence, {&t}, lm, w, free);
  CHECK(flat(best[0]) == "y x");
  CHECK(best[0].score == doctest::Approx(reordered).epsilon(1e-12));
  CHECK(best[0].features.at("distortion") == -3.0);

  DecoderOptions mono;
  mono.distortion_limit = 0;
  auto forced = decode_nbest(sentence, {&t}, lm, w, mono);
  CHECK(flat(forced[0]) == "x y");
  CHECK(forced[0].score == doctest::Approx(monotone).epsilon(1e-12));

  // A limit of 2 admits both jumps.
  DecoderOptions two;
  two.distortion_limit = 2;
  CHECK(flat(decode_nbest(sentence, {&t}, lm, w, two)[0]) == "y x");
}

TEST_CASE("nbest lists are deduplicated and sorted") {
  auto lm = tiny_lm();
  auto t = make_table({{"a", "x"}, {"b", "y"}});
  t.entries[{"a b", "x y"}] =
      PhraseTableEntry{{0.9, 0.9, 0.9, 0.9, std::exp(1.0)}, {{0, 0}, {1, 1}}, 1, 1, 1};
  auto w = default_weights({&t});

  DecoderOptions opts;
  opts.distortion_limit = -1;
  opts.stack_size = 0;
  opts.nbest = 10;
  auto results = decode_nbest(testutil::sent("a b"), {&t}, lm, w, opts);

  // Three derivations but only two distinct strings: the single-phrase
  // "x y" beats the split one and the split is dropped as a duplicate.
  REQUIRE(results.size() == 2);
  std::set<std::string> targets{flat(results[0]), flat(results[1])};
  CHECK(targets == std::set<std::string>{"x y", "y x"});
  CHECK(results[0].score >= results[1].score);

  double joint_xy = table_part(0.9) + 0.5 * score_sequence(lm, {"x", "y"});
  double reordered = 2 * table_part(0.5) + 0.5 * score_sequence(lm, {"y", "x"}) - 0.9;
  for (const auto& r : results) {
    double want = flat(r) == "x y" ? joint_xy : reordered;
    CHECK(r.score == doctest::Approx(want).epsilon(1e-12));
    CHECK(r.score == doctest::Approx(dot(w, r.features)).epsilon(1e-12));
  }
}

TEST_CASE("unknown tokens are copied through") {
  auto lm = tiny_lm();
  auto t = make_table({{"a", "x"}});
  auto w = default_weights({&t});

  auto solo = decode_nbest(testutil::sent("q"), {&t}, lm, w);
  REQUIRE(solo.size() == 1);
  CHECK(flat(solo[0]) == "q");
  CHECK(solo[0].features.at("oov") == 1.0);
  CHECK(solo[0].features.at("word_penalty") == 1.0);
  CHECK(solo[0].features.count("phi_st") == 0);
  double lm_total = score_sequence(lm, {"q"});
  CHECK(solo[0].score == doctest::Approx(-1.0 + 0.5 * lm_total).epsilon(1e-12));

  auto mixed = decode(testutil::sent("a q"), {&t}, lm, w);
  std::set<std::string> tokens;
  for (const auto& tok : mixed.tokens) tokens.insert(tok.surface);
  CHECK(tokens == std::set<std::string>{"q", "x"});
}

TEST_CASE("a token covered only by longer phrases still gets a copy option") {
  auto lm = tiny_lm();
  auto t = make_table({{"a b", "x y"}});
  auto w = default_weights({&t});

  DecoderOptions opts;
  opts.distortion_limit = -1;
  opts.stack_size = 0;
  opts.nbest = 10;
  auto results = decode_nbest(testutil::sent("a b"), {&t}, lm, w, opts);
  std::set<std::string> targets;
  for (const auto& r : results) targets.insert(flat(r));
  CHECK(targets == std::set<std::string>{"x y", "a b", "b a"});
}

TEST_CASE("tables act as a back-off list") {
  auto lm = tiny_lm();
  auto t1 = make_table({{"a", "x"}});
  auto t2 = make_table({{"b", "z"}});
  t2.entries[{"a", "y"}] = PhraseTableEntry{{0.9, 0.9, 0.9, 0.9, std::exp(1.0)}, {}, 1, 1, 1};
  auto w = default_weights({&t1, &t2});

  DecoderOptions opts;
  opts.nbest = 5;
  // The first table already covers "a", so its option is the only one; the
  // second table's higher-scoring alternative never enters the search.
  auto a = decode_nbest(testutil::sent("a"), {&t1, &t2}, lm, w, opts);
  REQUIRE(a.size() == 1);
  CHECK(flat(a[0]) == "x");
  CHECK(a[0].features.at("phi_st") == std::log(0.5));

  // Phrases absent from earlier tables fall through to later ones.
  auto b = decode_nbest(testutil::sent("b"), {&t1, &t2}, lm, w, opts);
  REQUIRE(b.size() == 1);
  CHECK(flat(b[0]) == "z");
}

TEST_CASE("missing weights fail loudly") {
  auto lm = tiny_lm();
  auto t = make_table({{"a", "x"}});
  LogLinearWeights empty;
  CHECK_THROWS_WITH_AS(decode(testutil::sent("a"), {&t}, lm, empty),
                       "no weight for feature 'phi_st'", DataError);
  LogLinearWeights partial;
  for (const auto& name : t.schema) partial.set(name, 0.1);
  CHECK_THROWS_WITH_AS(decode(testutil::sent("a"), {&t}, lm, partial),
                       "no weight for feature 'lm'", DataError);
}

TEST_CASE("default weights cover decoder features and every schema column") {
  auto t = make_table({{"a", "x"}});
  t.schema.push_back("morph_ws");
  for (auto& [key, entry] : t.entries) entry.features.push_back(0.5);
  auto w = default_weights({&t});
  CHECK(w.get("lm") == 0.5);
  CHECK(w.get("word_penalty") == 0.0);
  CHECK(w.get("distortion") == 0.3);
  CHECK(w.get("oov") == -1.0);
  CHECK(w.get("phi_st") == 0.2);
  CHECK(w.get("lex_st") == 0.2);
  CHECK(w.get("phi_ts") == 0.2);
  CHECK(w.get("lex_ts") == 0.2);
  CHECK(w.get("phrase_penalty") == 0.0);
  CHECK(w.get("morph_ws") == 0.0);
  CHECK(w.values.size() == 10);
}

TEST_CASE("empty input decodes to a single empty derivation") {
  auto lm = tiny_lm();
  auto t = make_table({{"a", "x"}});
  auto w = default_weights({&t});
  auto results = decode_nbest(Sentence{}, {&t}, lm, w);
  REQUIRE(results.size() == 1);
  CHECK(results[0].target.tokens.empty());
  CHECK(results[0].features.empty());
  CHECK(results[0].score == 0.0);
  CHECK(decode(Sentence{}, {&t}, lm, w).tokens.empty());
}

TEST_CASE("the no-translation baseline is the identity") {
  auto s = testutil::sent("w+ qAl +hA");
  CHECK(sentence_to_line(no_translation(s)) == "w+ qAl +hA");
  CHECK(no_translation(Sentence{}).tokens.empty());
}

TEST_CASE("unigram models use no sentence markers in decoding") {
  auto lm = tiny_lm(1);
  auto t = make_table({{"a", "x"}});
  auto w = default_weights({&t});
  auto results = decode_nbest(testutil::sent("a"), {&t}, lm, w);
  double lm_total = score_sequence(lm, {"x"});
  CHECK(results[0].features.at("lm") == doctest::Approx(lm_total).epsilon(1e-12));
  CHECK(results[0].score == doctest::Approx(table_part(0.5) + 0.5 * lm_total).epsilon(1e-12));
}

TEST_CASE("weights round-trip through files") {
  TempDir dir;
  LogLinearWeights w;
  w.set("lm", 0.5);
  w.set("oov", -1.0);
  w.set("phi_st", 0.25);
  write_weights(dir.file("w.tsv"), w);
  CHECK(testutil::read_file(dir.file("w.tsv")) == "lm\t0.5\noov\t-1\nphi_st\t0.25\n");
  CHECK(read_weights(dir.file("w.tsv")) == w);

  testutil::write_file(dir.file("hand.tsv"), "# comment\n\nlm\t0.5\r\noov\t-1\n");
  auto parsed = read_weights(dir.file("hand.tsv"));
  CHECK(parsed.values == std::map<std::string, double>{{"lm", 0.5}, {"oov", -1.0}});

  testutil::write_file(dir.file("bad.tsv"), "lm 0.5\n");
  CHECK_THROWS_WITH_AS(read_weights(dir.file("bad.tsv")),
                       (dir.file("bad.tsv") + ": line 1: expected feature<TAB>weight").c_str(),
                       DataError);
  CHECK_THROWS_WITH_AS(read_weights(dir.file("nope.tsv")),
                       ("cannot open file: " + dir.file("nope.tsv")).c_str(), DataError);
}

TEST_CASE("nbest files use the pipe-separated line format") {
  TempDir dir;
  DerivationResult r1;
  r1.target = testutil::sent("x y");
  r1.features = {{"lm", -1.5}, {"word_penalty", 2.0}};
  r1.score = 0.25;
  DerivationResult r2;
  r2.target = testutil::sent("z");
  r2.features = {{"oov", 1.0}};
  r2.score = -0.5;
  write_nbest(dir.file("nbest.txt"), {{r1, r2}, {DerivationResult{}}});
  CHECK(testutil::read_file(dir.file("nbest.txt")) ==
        "0 ||| x y ||| lm:-1.5 word_penalty:2 ||| 0.25\n"
        "0 ||| z ||| oov:1 ||| -0.5\n"
        "1 |||  |||  ||| 0\n");
}

namespace {

struct RandomSetup {
  PhraseTable t1, t2;
  NGramLM lm;
  LogLinearWeights weights;
};

RandomSetup random_setup(std::mt19937_64& rng, int order) {
  std::vector<std::string> svocab{"a", "b", "c", "d"};
  std::vector<std::string> tvocab{"x", "y", "z", "w"};
  std::uniform_real_distribution<double> feat(0.05, 1.0);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);

  auto random_phrase = [&](const std::vector<std::string>& vocab, int max_len) {
    int len = 1 + int(rng() % max_len);
    std::string p = vocab[rng() % vocab.size()];
    for (int k = 1; k < len; ++k) p += " " + vocab[rng() % vocab.size()];
    return p;
  };

  RandomSetup s;
  s.t1.schema = PhraseTable::kCoreSchema;
  s.t2.schema = PhraseTable::kCoreSchema;
  for (int e = 0; e < 12; ++e)
    s.t1.entries[{random_phrase(svocab, 2), random_phrase(tvocab, 3)}] = PhraseTableEntry{
        {feat(rng), feat(rng), feat(rng), feat(rng), std::exp(1.0)}, {}, 1, 1, 1};
  for (int e = 0; e < 18; ++e)
    s.t2.entries[{random_phrase(svocab, 2), random_phrase(tvocab, 2)}] = PhraseTableEntry{
        {feat(rng), feat(rng), feat(rng), feat(rng), std::exp(1.0)}, {}, 1, 1, 1};

  std::vector<Sentence> corpus;
  for (int i = 0; i < 30; ++i) corpus.push_back(testutil::sent(random_phrase(tvocab, 5)));
  s.lm = train_lm(corpus, order);

  s.weights = default_weights({&s.t1, &s.t2});
  for (auto& [name, v] : s.weights.values) v += jitter(rng);
  return s;
}

Sentence random_source(std::mt19937_64& rng, int max_len) {
  std::vector<std::string> vocab{"a", "b", "c", "d", "e"};  // e is usually unknown
  int len = 1 + int(rng() % max_len);
  Sentence s;
  for (int i = 0; i < len; ++i) s.tokens.emplace_back(vocab[rng() % vocab.size()]);
  return s;
}

}  // namespace

TEST_CASE("unbounded search matches exhaustive enumeration") {
  std::mt19937_64 rng(401);
  DecoderOptions opts;
  opts.distortion_limit = -1;
  opts.stack_size = 0;
  for (int order = 1; order <= 3; ++order) {
    auto setup = random_setup(rng, order);
    std::vector<const PhraseTable*> tables{&setup.t1, &setup.t2};
    for (int n = 0; n < 50; ++n) {
      auto sentence = random_source(rng, 6);
      auto results = decode_nbest(sentence, tables, setup.lm, setup.weights, opts);
      double want = oracles::best_decode_score(sentence, tables, setup.lm, setup.weights);
      CAPTURE(order);
      CAPTURE(sentence_to_line(sentence));
      CHECK(results[0].score == doctest::Approx(want).epsilon(1e-9));
      CHECK(results[0].score ==
            doctest::Approx(dot(setup.weights, results[0].features)).epsilon(1e-9));
      CHECK(results[0].features.at("lm") ==
            doctest::Approx(score_sequence(setup.lm, split_ws(flat(results[0]))))
                .epsilon(1e-9));
    }
  }
}

TEST_CASE("pruned and limited searches never beat the unbounded one") {
  std::mt19937_64 rng(409);
  DecoderOptions best;
  best.distortion_limit = -1;
  best.stack_size = 0;
  auto setup = random_setup(rng, 2);
  std::vector<const PhraseTable*> tables{&setup.t1, &setup.t2};
  for (int n = 0; n < 40; ++n) {
    auto sentence = random_source(rng, 6);
    double top = decode_nbest(sentence, tables, setup.lm, setup.weights, best)[0].score;
    for (int stack : {1, 3, 50}) {
      for (int limit : {0, 2, -1}) {
        DecoderOptions opts;
        opts.stack_size = stack;
        opts.distortion_limit = limit;
        auto got = decode_nbest(sentence, tables, setup.lm, setup.weights, opts);
        REQUIRE(!got.empty());
        CHECK(got[0].score <= top + 1e-9);
      }
    }
  }
}

TEST_CASE("nbest output is deterministic, sorted and consistent") {
  std::mt19937_64 rng(419);
  auto setup = random_setup(rng, 2);
  std::vector<const PhraseTable*> tables{&setup.t1, &setup.t2};
  DecoderOptions opts;
  opts.nbest = 8;
  opts.distortion_limit = 4;
  for (int n = 0; n < 25; ++n) {
    auto sentence = random_source(rng, 5);
    auto a = decode_nbest(sentence, tables, setup.lm, setup.weights, opts);
    auto b = decode_nbest(sentence, tables, setup.lm, setup.weights, opts);
    REQUIRE(a.size() == b.size());
    std::set<std::string> seen;
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(flat(a[i]) == flat(b[i]));
      CHECK(a[i].score == b[i].score);
      CHECK(seen.insert(flat(a[i])).second);  // no duplicate targets
      if (i > 0) CHECK(a[i].score <= a[i - 1].score + 1e-12);
      CHECK(a[i].score == doctest::Approx(dot(setup.weights, a[i].features)).epsilon(1e-9));
    }
  }
}
