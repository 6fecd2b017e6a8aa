#ifndef DIALECTMT_CORPUS_HPP
#define DIALECTMT_CORPUS_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dialectmt/text_util.hpp"

namespace dialectmt {

// A single space-delimited token.  A trailing '+' marks a clitic that
// attaches to the following token ("H+"), a leading '+' one that attaches
// to the preceding token ("+hA").  A token may carry at most one marker.
struct Token {
  std::string surface;

  Token() = default;
  explicit Token(std::string s);

  bool is_clitic_prefix() const;
  bool is_clitic_suffix() const;
  // Surface with the clitic marker removed.
  std::string stripped() const;

  bool operator==(const Token& other) const { return surface == other.surface; }
};

struct Sentence {
  std::vector<Token> tokens;

  Sentence() = default;
  explicit Sentence(std::vector<Token> t) : tokens(std::move(t)) {}

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  std::vector<std::string> surfaces() const;

  bool operator==(const Sentence& other) const { return tokens == other.tokens; }
};

Sentence sentence_from_line(std::string_view line);
std::string sentence_to_line(const Sentence& sentence);

struct ParallelCorpus {
  std::vector<std::pair<Sentence, Sentence>> pairs;
  std::pair<std::string, std::string> side_labels{"src", "tgt"};

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
};

struct DataSplit {
  ParallelCorpus train, tune, dev, test;
};

struct SplitSizes {
  std::size_t train = 0, tune = 0, dev = 0, test = 0;
  std::size_t total() const { return train + tune + dev + test; }
};

// Codepoint-to-codepoint rewriting applied before any other processing.
// The default collapses the common alif variants to bare alif and
// alif-maqsura to ya; an override table (TSV: two hex codepoints per line)
// can replace the map entirely.
class NormalizationMap {
 public:
  static NormalizationMap standard();
  static NormalizationMap from_file(const std::string& path);

  void set(char32_t from, char32_t to);
  std::string apply(std::string_view text) const;

 private:
  std::vector<std::pair<char32_t, char32_t>> map_;
};

// Canonicalizes orthographic variants and whitespace: maps alif variants
// U+0622/U+0623/U+0625/U+0671 to U+0627 and U+0649 to U+064A, collapses
// whitespace runs to single spaces, and trims the ends.  Idempotent.
std::string normalize_text(std::string_view raw);
std::string normalize_text(std::string_view raw, const NormalizationMap& map);

struct LoadReport {
  std::size_t dropped_blank_pairs = 0;
};

// Reads a text file line by line, stripping CR and rejecting invalid UTF-8.
std::vector<std::string> read_lines_checked(const std::string& path);

// Reads a line-aligned sentence pair file set.  Line i of each file becomes
// pair i; pairs where either line is blank are dropped and counted.
ParallelCorpus load_parallel(const std::string& src_path, const std::string& tgt_path,
                             bool normalize, LoadReport* report = nullptr);

// Monolingual variant of load_parallel: blank lines dropped.
std::vector<Sentence> load_sentences(const std::string& path, bool normalize,
                                     LoadReport* report = nullptr);

void write_sentences(const std::string& path, const std::vector<Sentence>& sentences);
void write_parallel(const std::string& src_path, const std::string& tgt_path,
                    const ParallelCorpus& corpus);

// Deterministic shuffle under `seed`, then contiguous partition in the
// order train/tune/dev/test.
DataSplit split_corpus(const ParallelCorpus& corpus, const SplitSizes& sizes,
                       std::uint64_t seed);

}  // namespace dialectmt

#endif
