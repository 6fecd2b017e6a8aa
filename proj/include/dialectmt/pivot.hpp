#ifndef DIALECTMT_PIVOT_HPP
#define DIALECTMT_PIVOT_HPP

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dialectmt/aligner.hpp"
#include "dialectmt/phrase_table.hpp"

namespace dialectmt {

// One triangulated phrase pair with its best-supporting pivot evidence.
struct PivotedEntry {
  std::string source, target;
  std::set<std::string> pivot_support;
  AlignmentSet a_sp, a_pt;  // phrase-internal, via the best pivot
  AlignmentSet composed;    // source<->target join of a_sp and a_pt
  double conn_s = 0.0, conn_t = 0.0;
};

// Relation join through pivot positions: (i,j) iff some pivot position k
// has (i,k) in a_sp and (k,j) in a_pt.
AlignmentSet compose_alignment(const AlignmentSet& a_sp, const AlignmentSet& a_pt);

// Fraction of links on each side that chain through the pivot, floored at
// epsilon so downstream log-linear features stay finite.
std::pair<double, double> connectivity_scores(const AlignmentSet& a_sp,
                                              const AlignmentSet& a_pt,
                                              double epsilon = 1e-4);

enum class PivotCombine { sum, max };
PivotCombine pivot_combine_from_string(std::string_view s);
const char* to_string(PivotCombine c);

// Joins a source->pivot table with a pivot->target table on shared pivot
// phrases.  Probability features are marginalized over the pivots (sum or
// max of products); connectivity features and the composed alignment come
// from the pivot maximizing conn_s + conn_t.  Appends `conn_s conn_t` to
// the core schema.  An empty join yields an empty table, not an error.
PhraseTable triangulate(const PhraseTable& table_sp, const PhraseTable& table_pt,
                        PivotCombine combine = PivotCombine::sum, double epsilon = 1e-4,
                        std::vector<PivotedEntry>* details = nullptr);

}  // namespace dialectmt

#endif
