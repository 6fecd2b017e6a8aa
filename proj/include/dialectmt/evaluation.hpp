#ifndef DIALECTMT_EVALUATION_HPP
#define DIALECTMT_EVALUATION_HPP

#include <array>
#include <unordered_set>
#include <vector>

#include "dialectmt/corpus.hpp"

namespace dialectmt {

struct BleuReport {
  double score = 0.0;  // 0..100
  std::array<double, 4> ngram_precisions{};
  double brevity_penalty = 1.0;
  std::size_t hyp_length = 0;
  std::size_t ref_length = 0;
};

// Corpus-level single-reference BLEU, n <= 4, unsmoothed.
BleuReport bleu(const std::vector<Sentence>& hypotheses,
                const std::vector<Sentence>& references);

// Add-one smoothed sentence BLEU; only the weight tuner uses this, as a
// tie-breaking secondary objective.
double smoothed_sentence_bleu(const Sentence& hypothesis, const Sentence& reference);

// Percentage of test source tokens not covered by the vocabulary (union of
// translation-table source unigrams).
double oov_rate(const std::vector<Sentence>& test_source,
                const std::unordered_set<std::string>& known_vocabulary);

}  // namespace dialectmt

#endif
