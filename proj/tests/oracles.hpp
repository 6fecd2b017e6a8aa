#ifndef DIALECTMT_TESTS_ORACLES_HPP
#define DIALECTMT_TESTS_ORACLES_HPP

// Reference implementations coded independently of the library, against
// which the production algorithms are checked. These favor directness over
// speed: quantifier definitions, dense matrices, exhaustive enumeration.

#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dialectmt/aligner.hpp"
#include "dialectmt/analyzer.hpp"
#include "dialectmt/corpus.hpp"
#include "dialectmt/decoder.hpp"
#include "dialectmt/lm.hpp"
#include "dialectmt/morph.hpp"
#include "dialectmt/phrase_table.hpp"

namespace oracles {

// Every consistent phrase pair by the quantifier definition: at least one
// link inside the span pair, and no link with exactly one endpoint inside.
// Encoded as "src ||| tgt ||| sorted local links" strings for set-exact
// comparison; the production output is canonicalized the same way.
std::multiset<std::string> extract(const dialectmt::Sentence& src,
                                   const dialectmt::Sentence& tgt,
                                   const dialectmt::AlignmentSet& alignment, int max_len);

std::string canonical_phrase_pair(const dialectmt::PhrasePair& pp);

// The published grow-diag-final pseudocode over dense boolean matrices:
// intersection, neighborhood growth to fixpoint, then a final pass per
// direction (forward first).
dialectmt::AlignmentSet grow_diag_final(const dialectmt::AlignmentSet& fwd,
                                        const dialectmt::AlignmentSet& rev);

// Triple loop over pivot positions.
std::set<std::pair<int, int>> compose(const dialectmt::AlignmentSet& a_sp,
                                      const dialectmt::AlignmentSet& a_pt);

// Connected-link fractions counted by pairwise scanning.
std::pair<double, double> connectivity(const dialectmt::AlignmentSet& a_sp,
                                       const dialectmt::AlignmentSet& a_pt, double epsilon);

// Eq.-style constraint scores recomputed with flat loops over the
// inventories, the smallest serialized pair winning ties.
dialectmt::ConstraintScores constraint_scores(const std::vector<std::string>& source,
                                              const std::vector<std::string>& target,
                                              const std::set<std::pair<int, int>>& composed,
                                              const dialectmt::TypePropertyInventory& inventory,
                                              const dialectmt::PropertyDistribution& dist);

// Best achievable model score by enumerating every segmentation, ordering
// and option choice; distortion unlimited. Mirrors the decoder's documented
// option construction (back-off table list, OOV copy-through).
double best_decode_score(const dialectmt::Sentence& sentence,
                         const std::vector<const dialectmt::PhraseTable*>& tables,
                         const dialectmt::NGramLM& lm,
                         const dialectmt::LogLinearWeights& weights);

// Sum of P(w|h) over the model vocabulary.
double history_prob_sum(const dialectmt::NGramLM& lm, const std::vector<std::string>& history);

// Uniformly random link set over an sl x tl grid.
dialectmt::AlignmentSet random_alignment(std::mt19937_64& rng, int sl, int tl,
                                         double density);

}  // namespace oracles

#endif
