#ifndef DIALECTMT_ANALYZER_HPP
#define DIALECTMT_ANALYZER_HPP

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "dialectmt/corpus.hpp"

namespace dialectmt {

enum class Definiteness { def, indef, na };
enum class Number { sg, du, pl, na };
enum class Gender { m, f, na };

const char* to_string(Definiteness v);
const char* to_string(Number v);
const char* to_string(Gender v);
Definiteness definiteness_from_string(std::string_view s);
Number number_from_string(std::string_view s);
Gender gender_from_string(std::string_view s);

// Conjunction of the core morpho-syntactic features plus POS.  `na` marks
// a feature that does not apply to the word class, never a missing value.
// `extended` carries extra features (aspect, person, ...) used only when
// measuring feature consistency.
struct PropertySet {
  Definiteness definiteness = Definiteness::na;
  Number number = Number::na;
  Gender gender = Gender::na;
  std::string pos = "na";
  std::map<std::string, std::string> extended;

  // Stand-in properties for the null token that unaligned words link to.
  static PropertySet null_token();
  bool is_null_token() const { return pos == "<null>"; }

  std::string core_key() const;  // "def|sg|m|noun"

  bool operator==(const PropertySet& o) const;
  bool operator<(const PropertySet& o) const;
};

struct MorphAnalysis {
  std::vector<Token> segments;
  PropertySet properties;
  std::uint64_t frequency = 0;

  // Marker-stripped concatenation; must reproduce the analyzed surface.
  std::string concatenated() const;
};

class AnalyzerLexicon {
 public:
  struct Options {
    // When set, entries whose segment concatenation does not reproduce the
    // surface form are accepted (rewrite-style segmentation).  Off by
    // default: round-trip by concatenation is the point of this scheme.
    bool allow_rewrites = false;
  };

  AnalyzerLexicon() = default;
  explicit AnalyzerLexicon(Options opts) : opts_(opts) {}

  static AnalyzerLexicon load(const std::string& path);
  static AnalyzerLexicon load(const std::string& path, Options opts);

  void add(const std::string& surface, MorphAnalysis analysis);
  // Folds another lexicon's analyses into this one (used to pool the two
  // dialect lexicons when both sides are analyzed together).
  void merge(const AnalyzerLexicon& other);
  const std::vector<MorphAnalysis>* find(const std::string& surface) const;

  std::size_t surface_count() const { return entries_.size(); }
  const Options& options() const { return opts_; }
  const std::unordered_map<std::string, std::vector<MorphAnalysis>>& entries() const {
    return entries_;
  }
  // Every extended feature key any analysis mentions.
  std::set<std::string> extended_keys() const;

 private:
  std::unordered_map<std::string, std::vector<MorphAnalysis>> entries_;
  Options opts_;
};

// Ranked analyses for a token; unknown tokens get a single fallback
// analysis (unsegmented, all core features na, frequency 0).
std::vector<MorphAnalysis> analyze(const AnalyzerLexicon& lexicon, const Token& token);

// Replaces every token with the segments of its top-ranked analysis.
Sentence segment_d3(const AnalyzerLexicon& lexicon, const Sentence& sentence);

// Joins clitic-marked tokens back into surface words.
Sentence detokenize(const Sentence& sentence);

}  // namespace dialectmt

#endif
