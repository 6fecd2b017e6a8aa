#ifndef DIALECTMT_LM_HPP
#define DIALECTMT_LM_HPP

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dialectmt/corpus.hpp"

namespace dialectmt {

// Backoff n-gram model in ARPA form: probabilities and backoff weights in
// log10 space, one table per order.
struct NGramLM {
  static constexpr const char* kBos = "<s>";
  static constexpr const char* kEos = "</s>";
  static constexpr const char* kUnk = "<unk>";
  // Placeholder for events of probability zero (the start marker).
  static constexpr double kLogZero = -99.0;

  struct Entry {
    double log10_prob = 0.0;
    double log10_backoff = 0.0;
    bool has_backoff = false;

    bool operator==(const Entry&) const = default;
  };

  int order = 0;
  // tables[k-1]: space-joined k-gram -> entry
  std::vector<std::unordered_map<std::string, Entry>> tables;
  std::unordered_set<std::string> vocabulary;  // unigrams incl. markers and <unk>

  // log10 P(word | context) with the backoff chain; out-of-vocabulary
  // words (in either role) are mapped to the unknown symbol.
  double cond_log10(const std::vector<std::string>& context, const std::string& word) const;
};

// Interpolated Kneser-Ney with a single fixed discount; sentence markers
// are used for order >= 2.  The unigram discount mass becomes the unknown
// word's probability.
NGramLM train_lm(const std::vector<Sentence>& corpus, int order,
                 double discount = 0.75);

// Total log10 probability of the token sequence with sentence markers
// (order >= 2); unknown words score as the unknown symbol.
double score_sequence(const NGramLM& lm, const std::vector<std::string>& tokens);

void write_arpa(const std::string& path, const NGramLM& lm);
NGramLM read_arpa(const std::string& path);

}  // namespace dialectmt

#endif
