#ifndef DIALECTMT_ALIGNER_HPP
#define DIALECTMT_ALIGNER_HPP

#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dialectmt/corpus.hpp"

namespace dialectmt {

// Word translation probabilities t(target|source) from IBM Model 1,
// including a null source word for targets with no real counterpart.
struct TranslationTable {
  static const std::string kNull;

  // probs[source][target] = t(target|source)
  std::unordered_map<std::string, std::unordered_map<std::string, double>> probs;
  // Probability that a target word aligns to the null word; real source
  // positions share the remaining mass uniformly.
  double null_alignment_prob = 0.08;

  // Floor for unseen events.
  static constexpr double kFloor = 1e-10;

  double lookup(const std::string& target, const std::string& source) const;
};

// Word alignment links for one sentence pair, 0-indexed (source, target).
struct AlignmentSet {
  std::set<std::pair<int, int>> links;
  int source_len = 0;
  int target_len = 0;

  bool operator==(const AlignmentSet& o) const {
    return links == o.links && source_len == o.source_len && target_len == o.target_len;
  }
};

// EM training from uniform initialization; the null word is prepended to
// every source sentence with fixed alignment probability null_prob.
TranslationTable train_ibm1(const ParallelCorpus& corpus, int iterations,
                            double null_prob = 0.08);

// Log-likelihood of the corpus under the table's alignment model; the
// quantity EM makes non-decreasing.
double corpus_log_likelihood(const TranslationTable& table, const ParallelCorpus& corpus);

// Links every target word to its most probable source word; null wins
// ties, then smaller source positions.
AlignmentSet viterbi_align(const TranslationTable& table, const Sentence& src,
                           const Sentence& tgt);

// Symmetrizes two directional alignments: intersection, diagonal growth
// over union links, then a final pass per direction.
AlignmentSet grow_diag_final(const AlignmentSet& fwd, const AlignmentSet& rev);

// Pharaoh "i-j" format, one sentence pair per line, links sorted.
void write_alignments(const std::string& path, const std::vector<AlignmentSet>& alignments);
std::vector<AlignmentSet> read_alignments(const std::string& path);

// Convenience: trains both directions and symmetrizes every pair.
std::vector<AlignmentSet> align_corpus(const ParallelCorpus& corpus, int iterations,
                                       double null_prob = 0.08);

}  // namespace dialectmt

#endif
