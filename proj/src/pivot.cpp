#include "dialectmt/pivot.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace dialectmt {

AlignmentSet compose_alignment(const AlignmentSet& a_sp, const AlignmentSet& a_pt) {
  if (a_sp.target_len != a_pt.source_len)
    throw DataError("pivot length mismatch: " + std::to_string(a_sp.target_len) + " vs " +
                    std::to_string(a_pt.source_len));
  AlignmentSet out;
  out.source_len = a_sp.source_len;
  out.target_len = a_pt.target_len;
  for (const auto& [i, k] : a_sp.links)
    for (const auto& [k2, j] : a_pt.links)
      if (k == k2) out.links.insert({i, j});
  return out;
}

std::pair<double, double> connectivity_scores(const AlignmentSet& a_sp,
                                              const AlignmentSet& a_pt, double epsilon) {
  if (a_sp.target_len != a_pt.source_len)
    throw DataError("pivot length mismatch: " + std::to_string(a_sp.target_len) + " vs " +
                    std::to_string(a_pt.source_len));
  if (a_sp.links.empty() || a_pt.links.empty())
    throw DataError("connectivity requires non-empty alignments on both sides");
  std::set<int> sp_pivots, pt_pivots;
  for (const auto& [i, k] : a_sp.links) sp_pivots.insert(k);
  for (const auto& [k, j] : a_pt.links) pt_pivots.insert(k);
  std::size_t s_connected = 0, t_connected = 0;
  for (const auto& [i, k] : a_sp.links)
    if (pt_pivots.count(k)) ++s_connected;
  for (const auto& [k, j] : a_pt.links)
    if (sp_pivots.count(k)) ++t_connected;
  double cs = static_cast<double>(s_connected) / static_cast<double>(a_sp.links.size());
  double ct = static_cast<double>(t_connected) / static_cast<double>(a_pt.links.size());
  return {std::max(cs, epsilon), std::max(ct, epsilon)};
}

PivotCombine pivot_combine_from_string(std::string_view s) {
  if (s == "sum") return PivotCombine::sum;
  if (s == "max") return PivotCombine::max;
  throw DataError("bad pivot combine mode '" + std::string(s) + "' (expected sum or max)");
}

const char* to_string(PivotCombine c) {
  return c == PivotCombine::sum ? "sum" : "max";
}

namespace {

AlignmentSet entry_alignment(const std::string& src, const std::string& tgt,
                             const PhraseTableEntry& entry) {
  AlignmentSet a;
  a.source_len = static_cast<int>(split_ws(src).size());
  a.target_len = static_cast<int>(split_ws(tgt).size());
  for (const auto& [i, j] : entry.alignment) {
    if (i < 0 || i >= a.source_len || j < 0 || j >= a.target_len)
      throw DataError("phrase-internal alignment out of bounds for '" + src + "' -> '" +
                      tgt + "'");
    a.links.insert({i, j});
  }
  return a;
}

}  // namespace

PhraseTable triangulate(const PhraseTable& table_sp, const PhraseTable& table_pt,
                        PivotCombine combine, double epsilon,
                        std::vector<PivotedEntry>* details) {
  std::size_t sp_idx[4] = {table_sp.feature_index("phi_st"), table_sp.feature_index("lex_st"),
                           table_sp.feature_index("phi_ts"), table_sp.feature_index("lex_ts")};
  std::size_t pt_idx[4] = {table_pt.feature_index("phi_st"), table_pt.feature_index("lex_st"),
                           table_pt.feature_index("phi_ts"), table_pt.feature_index("lex_ts")};

  // Regroup the source->pivot table by pivot phrase; entries of the
  // pivot->target table already sit grouped by pivot (its source side).
  // Both sides are iterated in key order, a sort-merge join in memory.
  std::map<std::string, std::vector<std::pair<std::string, const PhraseTableEntry*>>> by_pivot;
  for (const auto& [key, entry] : table_sp.entries)
    by_pivot[key.second].emplace_back(key.first, &entry);

  struct Acc {
    double feats[4] = {0, 0, 0, 0};
    bool first = true;
    PivotedEntry detail;
    double best_conn_sum = -1.0;
  };
  std::map<std::pair<std::string, std::string>, Acc> acc;

  for (auto pt_it = table_pt.entries.begin(); pt_it != table_pt.entries.end();) {
    const std::string& pivot = pt_it->first.first;
    auto group_end = pt_it;
    while (group_end != table_pt.entries.end() && group_end->first.first == pivot)
      ++group_end;
    auto sp_group = by_pivot.find(pivot);
    if (sp_group != by_pivot.end()) {
      for (const auto& [src, sp_entry] : sp_group->second) {
        AlignmentSet a_sp = entry_alignment(src, pivot, *sp_entry);
        for (auto it = pt_it; it != group_end; ++it) {
          const std::string& tgt = it->first.second;
          const PhraseTableEntry& pt_entry = it->second;
          AlignmentSet a_pt = entry_alignment(pivot, tgt, pt_entry);
          auto& cell = acc[{src, tgt}];
          for (int f = 0; f < 4; ++f) {
            double product = sp_entry->features[sp_idx[f]] * pt_entry.features[pt_idx[f]];
            if (combine == PivotCombine::sum)
              cell.feats[f] += product;
            else
              cell.feats[f] = std::max(cell.feats[f], product);
          }
          double cs = epsilon, ct = epsilon;
          if (!a_sp.links.empty() && !a_pt.links.empty()) {
            auto conn = connectivity_scores(a_sp, a_pt, epsilon);
            cs = conn.first;
            ct = conn.second;
          }
          cell.detail.pivot_support.insert(pivot);
          if (cell.first || cs + ct > cell.best_conn_sum) {
            cell.best_conn_sum = cs + ct;
            cell.detail.source = src;
            cell.detail.target = tgt;
            cell.detail.a_sp = a_sp;
            cell.detail.a_pt = a_pt;
            cell.detail.composed = compose_alignment(a_sp, a_pt);
            cell.detail.conn_s = cs;
            cell.detail.conn_t = ct;
            cell.first = false;
          }
        }
      }
    }
    pt_it = group_end;
  }

  PhraseTable out;
  out.schema = PhraseTable::kCoreSchema;
  out.schema.push_back("conn_s");
  out.schema.push_back("conn_t");
  for (auto& [key, cell] : acc) {
    PhraseTableEntry entry;
    entry.features = {cell.feats[0], cell.feats[1], cell.feats[2], cell.feats[3],
                      std::exp(1.0), cell.detail.conn_s, cell.detail.conn_t};
    entry.alignment = cell.detail.composed.links;
    out.entries.emplace(key, std::move(entry));
    if (details) details->push_back(std::move(cell.detail));
  }
  return out;
}

}  // namespace dialectmt
