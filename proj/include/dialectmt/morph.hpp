#ifndef DIALECTMT_MORPH_HPP
#define DIALECTMT_MORPH_HPP

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dialectmt/aligner.hpp"
#include "dialectmt/analyzer.hpp"
#include "dialectmt/phrase_table.hpp"

namespace dialectmt {

// The four core features without any extended annotations; distributions
// and MLE selection work on these, consistency measurement on the full set.
PropertySet core_properties(const PropertySet& p);

// Value of one named feature ("definiteness", "number", "gender", "pos",
// or an extended key); absent extended keys read as "na".
std::string feature_value(const PropertySet& p, const std::string& feature);

// Per surface type, every property set its lexicon analyses produced over
// the given corpora.  Unknown types fall back to the all-na singleton.
struct TypePropertyInventory {
  std::map<std::string, std::set<PropertySet>> sets;

  const std::set<PropertySet>& get(const std::string& surface) const;
  static const std::set<PropertySet>& all_na();
};

TypePropertyInventory build_property_inventory(
    const std::vector<const std::vector<Sentence>*>& corpora, const AnalyzerLexicon& lexicon);

// Directional conditionals between aligned property sets, estimated from
// linked token pairs plus null-token pairs for unaligned tokens.
struct PropertyDistribution {
  std::map<std::pair<PropertySet, PropertySet>, double> joint;  // counts (src set, tgt set)
  std::map<PropertySet, double> src_totals, tgt_totals;
  double epsilon = 1e-6;

  double p_src_given_tgt(const PropertySet& s, const PropertySet& t) const;
  double p_tgt_given_src(const PropertySet& t, const PropertySet& s) const;
};

PropertyDistribution estimate_property_distributions(
    const ParallelCorpus& train, const std::vector<AlignmentSet>& alignments,
    const AnalyzerLexicon& lexicon);

// Percentage of alignment links preserving the feature's value (na counts
// as a value; null-augmented pairs are not links and do not participate).
double measure_feature_consistency(const ParallelCorpus& train,
                                   const std::vector<AlignmentSet>& alignments,
                                   const AnalyzerLexicon& lexicon,
                                   const std::string& feature);

// Features a lexicon can be measured on: the four core ones, then every
// extended key it mentions, sorted.
std::vector<std::string> consistency_features(const AnalyzerLexicon& lexicon);

enum class MleDirection { source_given_target, target_given_source };

// Property-set pair maximizing the directional conditional over the two
// types' inventories; ties go to the lexicographically smallest serialized
// pair.
std::pair<PropertySet, PropertySet> mle_property_pair(const std::string& i_type,
                                                      const std::string& j_type,
                                                      MleDirection direction,
                                                      const TypePropertyInventory& inventory,
                                                      const PropertyDistribution& dist);

struct ConstraintScores {
  double w_s = 0.0;
  double w_t = 0.0;
};

// Eq.-style constraint scores for one phrase pair: average MLE conditional
// probability over alignment links, with unaligned tokens paired to the
// null token, normalized by the augmented link counts.
ConstraintScores morph_constraint_scores(const std::vector<std::string>& source,
                                         const std::vector<std::string>& target,
                                         const std::set<std::pair<int, int>>& composed,
                                         const TypePropertyInventory& inventory,
                                         const PropertyDistribution& dist);

// Appends `morph_ws morph_wt` columns; entries without an internal
// alignment receive the epsilon floor on both.
PhraseTable annotate_phrase_table(const PhraseTable& table,
                                  const TypePropertyInventory& inventory,
                                  const PropertyDistribution& dist);

}  // namespace dialectmt

#endif
