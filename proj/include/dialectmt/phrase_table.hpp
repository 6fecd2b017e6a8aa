#ifndef DIALECTMT_PHRASE_TABLE_HPP
#define DIALECTMT_PHRASE_TABLE_HPP

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dialectmt/aligner.hpp"
#include "dialectmt/corpus.hpp"

namespace dialectmt {

// One phrase pair straight out of extraction, tokens kept separate and the
// alignment re-based to phrase-local indices.
struct PhrasePair {
  std::vector<std::string> source;
  std::vector<std::string> target;
  AlignmentSet internal_alignment;
  std::uint64_t count = 1;
};

// All consistent phrase pairs of one aligned sentence pair: every span pair
// that contains at least one link and is crossed by none, up to max_len
// tokens per side.  Unaligned boundary words extend the spans.
std::vector<PhrasePair> extract_phrases(const Sentence& src, const Sentence& tgt,
                                        const AlignmentSet& alignment, int max_len = 8);

// Aggregated extraction counts keyed by (source phrase, target phrase),
// phrases space-joined.  Internal alignments merge by keeping the variant
// extracted most often.
struct PhraseCounts {
  struct Cell {
    std::uint64_t count = 0;
    std::map<std::set<std::pair<int, int>>, std::uint64_t> alignment_votes;
    std::set<std::pair<int, int>> best_alignment() const;
  };
  std::map<std::pair<std::string, std::string>, Cell> cells;

  void add(const PhrasePair& pair);
  void add_all(const std::vector<PhrasePair>& pairs);
};

struct PhraseTableEntry {
  std::vector<double> features;  // parallel to the table schema
  std::set<std::pair<int, int>> alignment;
  double c_st = 0.0, c_s = 0.0, c_t = 0.0;

  bool operator==(const PhraseTableEntry&) const = default;
};

struct PhraseTable {
  std::vector<std::string> schema;
  std::map<std::pair<std::string, std::string>, PhraseTableEntry> entries;

  bool operator==(const PhraseTable&) const = default;

  static const std::vector<std::string> kCoreSchema;  // phi_st lex_st phi_ts lex_ts phrase_penalty

  std::size_t feature_index(const std::string& name) const;
  bool has_feature(const std::string& name) const;
  const PhraseTableEntry* find(const std::string& source, const std::string& target) const;

  // Appends a feature column, filling existing entries with `fill`.
  void add_feature(const std::string& name, double fill);
};

// Relative-frequency and lexical-weight scoring over aggregated counts.
// ttable_fwd holds t(target|source), ttable_rev t(source|target).
PhraseTable score_phrase_table(const PhraseCounts& counts, const TranslationTable& ttable_fwd,
                               const TranslationTable& ttable_rev);

// Lexical weight of one phrase pair in the target-given-source direction;
// unaligned target words fall back to the null word.
double lexical_weight(const std::vector<std::string>& source,
                      const std::vector<std::string>& target,
                      const std::set<std::pair<int, int>>& alignment,
                      const TranslationTable& ttable);

void write_phrase_table(const std::string& path, const PhraseTable& table);
PhraseTable read_phrase_table(const std::string& path);

// Drops entries whose source phrase cannot occur in any of the given
// sentences (decode-time table filtering).
PhraseTable filter_phrase_table(const PhraseTable& table,
                                const std::vector<Sentence>& sentences);

}  // namespace dialectmt

#endif
