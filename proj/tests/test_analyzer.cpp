#include "dialectmt/analyzer.hpp"

#include "doctest.h"
#include "test_util.hpp"

using namespace dialectmt;
using testutil::TempDir;
using testutil::write_file;

namespace {

const std::string kLexicon =
    "# surface\tsegments\tdef\tnum\tgen\tpos\tfreq\textended\n"
    "HyktbwhA\tH+ yktbw +hA\tna\tpl\tm\tverb\t10\taspect=imperfective\n"
    "AlktAb\tAl+ ktAb\tdef\tsg\tm\tnoun\t5\n"
    "ktb\tktb\tna\tna\tna\tverb\t3\n"
    "wqAl\tw+ qAl\tna\tsg\tm\tverb\t7\n"
    "xy\txy\tna\tna\tna\tnoun\t5\n"
    "xy\tx+ y\tna\tna\tna\tnoun\t5\n"
    "xy\txy\tindef\tsg\tf\tadj\t9\n";

AnalyzerLexicon load_sample(const TempDir& dir) {
  write_file(dir.file("lex.tsv"), kLexicon);
  return AnalyzerLexicon::load(dir.file("lex.tsv"));
}

}  // namespace

TEST_CASE("lexicon loads analyses with properties") {
  TempDir dir;
  auto lex = load_sample(dir);
  CHECK(lex.surface_count() == 5);

  const auto* entries = lex.find("HyktbwhA");
  REQUIRE(entries != nullptr);
  REQUIRE(entries->size() == 1);
  const auto& a = entries->front();
  CHECK(a.properties.number == Number::pl);
  CHECK(a.properties.gender == Gender::m);
  CHECK(a.properties.pos == "verb");
  CHECK(a.frequency == 10);
  CHECK(a.properties.extended.at("aspect") == "imperfective");
  CHECK(a.concatenated() == "HyktbwhA");

  CHECK(lex.extended_keys() == std::set<std::string>{"aspect"});
}

TEST_CASE("analyses rank by frequency then segmentation string") {
  TempDir dir;
  auto lex = load_sample(dir);
  const auto* xy = lex.find("xy");
  REQUIRE(xy != nullptr);
  REQUIRE(xy->size() == 3);
  CHECK(xy->at(0).frequency == 9);
  // Tie at 5: "x+ y" sorts before "xy".
  CHECK(xy->at(1).segments.size() == 2);
  CHECK(xy->at(2).segments.size() == 1);
}

TEST_CASE("lexicon rejects malformed lines") {
  TempDir dir;
  auto expect_error = [&](const std::string& line, const std::string& what) {
    write_file(dir.file("bad.tsv"), line + "\n");
    CHECK_THROWS_WITH_AS(AnalyzerLexicon::load(dir.file("bad.tsv")),
                         (dir.file("bad.tsv") + ": line 1: " + what).c_str(), DataError);
  };
  expect_error("a\tb\tna\tna\tna\tnoun",
               "expected at least 7 tab-separated fields");
  expect_error("a\ta\tna\tna\tna\tnoun\t1\tk=v\textra", "too many fields");
  expect_error("a b\ta\tna\tna\tna\tnoun\t1", "surface form contains whitespace");
  expect_error("a\ta\tboth\tna\tna\tnoun\t1", "bad definiteness value 'both'");
  expect_error("a\ta\tna\tmany\tna\tnoun\t1", "bad number value 'many'");
  expect_error("a\ta\tna\tna\tx\tnoun\t1", "bad gender value 'x'");
  expect_error("a\ta\tna\tna\tna\t\t1", "empty pos label");
  expect_error("a\ta\tna\tna\tna\tnoun\t-2", "negative frequency");
  expect_error("a\ta\tna\tna\tna\tnoun\tmany", "bad integer: 'many'");
  expect_error("a\ta\tna\tna\tna\tnoun\t1\tnoequals",
               "bad extended feature 'noequals'");
  expect_error("ab\tx+ y\tna\tna\tna\tnoun\t1",
               "lexicon entry for 'ab' does not concatenate back to the surface form "
               "(got 'xy')");
}

TEST_CASE("rewrite entries need the option") {
  TempDir dir;
  write_file(dir.file("rw.tsv"), "gonna\tgoing +to\tna\tna\tna\tverb\t1\n");
  CHECK_THROWS_AS(AnalyzerLexicon::load(dir.file("rw.tsv")), DataError);
  AnalyzerLexicon::Options opts;
  opts.allow_rewrites = true;
  auto lex = AnalyzerLexicon::load(dir.file("rw.tsv"), opts);
  REQUIRE(lex.find("gonna") != nullptr);
  CHECK(lex.find("gonna")->front().segments.size() == 2);
}

TEST_CASE("lexicon surfaces and segments are normalized on load") {
  TempDir dir;
  // Alif-hamza U+0623 in the file; lookups use the bare-alif form.
  write_file(dir.file("n.tsv"), "\xD8\xA3his\t\xD8\xA3+ his\tna\tna\tna\tnoun\t1\n");
  auto lex = AnalyzerLexicon::load(dir.file("n.tsv"));
  CHECK(lex.find("\xD8\xA3his") == nullptr);
  const auto* found = lex.find("\xD8\xA7his");
  REQUIRE(found != nullptr);
  CHECK(found->front().segments[0].surface == "\xD8\xA7+");
}

TEST_CASE("analyze falls back for unknown tokens") {
  TempDir dir;
  auto lex = load_sample(dir);
  auto analyses = analyze(lex, Token("unknown"));
  REQUIRE(analyses.size() == 1);
  CHECK(analyses[0].segments.size() == 1);
  CHECK(analyses[0].segments[0].surface == "unknown");
  CHECK(analyses[0].frequency == 0);
  CHECK(analyses[0].properties.core_key() == "na|na|na|na");
}

TEST_CASE("segment_d3 splits clitics off") {
  TempDir dir;
  auto lex = load_sample(dir);
  auto seg = segment_d3(lex, testutil::sent("HyktbwhA"));
  CHECK(sentence_to_line(seg) == "H+ yktbw +hA");
  auto mixed = segment_d3(lex, testutil::sent("wqAl AlktAb mystery"));
  CHECK(sentence_to_line(mixed) == "w+ qAl Al+ ktAb mystery");
}

TEST_CASE("detokenize joins clitic-marked tokens") {
  CHECK(sentence_to_line(detokenize(testutil::sent("H+ yktbw +hA"))) == "HyktbwhA");
  CHECK(sentence_to_line(detokenize(testutil::sent("w+ qAl Al+ ktAb"))) == "wqAl AlktAb");
  CHECK(sentence_to_line(detokenize(testutil::sent("plain words"))) == "plain words");
  CHECK(detokenize(Sentence()).empty());
  // Chained markers collapse into one surface word.
  CHECK(sentence_to_line(detokenize(testutil::sent("H+ x +hA"))) == "HxhA");

  CHECK_THROWS_WITH_AS(detokenize(testutil::sent("qAl w+")),
                       "dangling clitic prefix at position 1", DataError);
  CHECK_THROWS_WITH_AS(detokenize(testutil::sent("+hA qAl")),
                       "dangling clitic suffix at position 0", DataError);
}

TEST_CASE("detokenize inverts segmentation on lexicon surfaces") {
  TempDir dir;
  auto lex = load_sample(dir);
  for (const auto& [surface, analyses] : lex.entries()) {
    Sentence one = testutil::sent(surface);
    CHECK(detokenize(segment_d3(lex, one)) == one);
  }
  Sentence line = testutil::sent("HyktbwhA wqAl AlktAb ktb unseen");
  CHECK(detokenize(segment_d3(lex, line)) == line);
}

TEST_CASE("lexicon merge pools analyses") {
  TempDir dir;
  write_file(dir.file("a.tsv"), "w\tw\tna\tna\tna\tnoun\t2\n");
  write_file(dir.file("b.tsv"), "w\tw\tna\tsg\tf\tadj\t6\nv\tv\tna\tna\tna\tverb\t1\n");
  auto a = AnalyzerLexicon::load(dir.file("a.tsv"));
  auto b = AnalyzerLexicon::load(dir.file("b.tsv"));
  a.merge(b);
  CHECK(a.surface_count() == 2);
  REQUIRE(a.find("w") != nullptr);
  CHECK(a.find("w")->size() == 2);
  CHECK(a.find("w")->front().frequency == 6);  // re-ranked after merging
}

TEST_CASE("property sets serialize and order") {
  PropertySet p;
  p.definiteness = Definiteness::def;
  p.number = Number::sg;
  p.gender = Gender::m;
  p.pos = "noun";
  CHECK(p.core_key() == "def|sg|m|noun");
  CHECK(PropertySet{}.core_key() == "na|na|na|na");

  auto null = PropertySet::null_token();
  CHECK(null.is_null_token());
  CHECK(null.core_key() == "na|na|na|<null>");
  CHECK_FALSE(p.is_null_token());

  PropertySet q = p;
  q.extended["aspect"] = "x";
  CHECK(p < q);
  CHECK_FALSE(q < p);
  CHECK_FALSE(p == q);
}
