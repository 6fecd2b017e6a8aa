#include "dialectmt/morph.hpp"

#include <algorithm>

namespace dialectmt {

PropertySet core_properties(const PropertySet& p) {
  PropertySet out = p;
  out.extended.clear();
  return out;
}

std::string feature_value(const PropertySet& p, const std::string& feature) {
  if (feature == "definiteness") return to_string(p.definiteness);
  if (feature == "number") return to_string(p.number);
  if (feature == "gender") return to_string(p.gender);
  if (feature == "pos") return p.pos;
  auto it = p.extended.find(feature);
  return it == p.extended.end() ? "na" : it->second;
}

const std::set<PropertySet>& TypePropertyInventory::all_na() {
  static const std::set<PropertySet> fallback = {PropertySet{}};
  return fallback;
}

const std::set<PropertySet>& TypePropertyInventory::get(const std::string& surface) const {
  auto it = sets.find(surface);
  return it == sets.end() ? all_na() : it->second;
}

TypePropertyInventory build_property_inventory(
    const std::vector<const std::vector<Sentence>*>& corpora,
    const AnalyzerLexicon& lexicon) {
  TypePropertyInventory inv;
  for (const auto* corpus : corpora) {
    for (const auto& sent : *corpus) {
      for (const auto& tok : sent.tokens) {
        if (inv.sets.count(tok.surface)) continue;
        const auto* analyses = lexicon.find(tok.surface);
        if (!analyses) continue;  // unknown types use the all-na fallback
        auto& dst = inv.sets[tok.surface];
        for (const auto& a : *analyses) dst.insert(core_properties(a.properties));
      }
    }
  }
  return inv;
}

namespace {

PropertySet top_properties(const AnalyzerLexicon& lexicon, const Token& token) {
  return core_properties(analyze(lexicon, token).front().properties);
}

void check_aligned(const ParallelCorpus& train, const std::vector<AlignmentSet>& alignments) {
  if (train.size() != alignments.size())
    throw DataError("alignment count " + std::to_string(alignments.size()) +
                    " does not match corpus size " + std::to_string(train.size()));
  for (std::size_t k = 0; k < alignments.size(); ++k) {
    if (alignments[k].source_len != static_cast<int>(train.pairs[k].first.size()) ||
        alignments[k].target_len != static_cast<int>(train.pairs[k].second.size()))
      throw DataError("alignment dimensions do not match sentence pair " + std::to_string(k));
  }
}

}  // namespace

double PropertyDistribution::p_src_given_tgt(const PropertySet& s,
                                             const PropertySet& t) const {
  auto it = joint.find({s, t});
  if (it == joint.end()) return epsilon;
  return it->second / tgt_totals.at(t);
}

double PropertyDistribution::p_tgt_given_src(const PropertySet& t,
                                             const PropertySet& s) const {
  auto it = joint.find({s, t});
  if (it == joint.end()) return epsilon;
  return it->second / src_totals.at(s);
}

PropertyDistribution estimate_property_distributions(
    const ParallelCorpus& train, const std::vector<AlignmentSet>& alignments,
    const AnalyzerLexicon& lexicon) {
  check_aligned(train, alignments);
  PropertyDistribution dist;
  const PropertySet null_set = PropertySet::null_token();
  for (std::size_t k = 0; k < train.size(); ++k) {
    const auto& [src, tgt] = train.pairs[k];
    const auto& links = alignments[k].links;
    std::vector<bool> src_linked(src.size(), false), tgt_linked(tgt.size(), false);
    for (const auto& [i, j] : links) {
      src_linked[i] = true;
      tgt_linked[j] = true;
      auto key = std::make_pair(top_properties(lexicon, src.tokens[i]),
                                top_properties(lexicon, tgt.tokens[j]));
      dist.joint[key] += 1.0;
    }
    for (std::size_t i = 0; i < src.size(); ++i)
      if (!src_linked[i]) dist.joint[{top_properties(lexicon, src.tokens[i]), null_set}] += 1.0;
    for (std::size_t j = 0; j < tgt.size(); ++j)
      if (!tgt_linked[j]) dist.joint[{null_set, top_properties(lexicon, tgt.tokens[j])}] += 1.0;
  }
  for (const auto& [key, c] : dist.joint) {
    dist.src_totals[key.first] += c;
    dist.tgt_totals[key.second] += c;
  }
  return dist;
}

double measure_feature_consistency(const ParallelCorpus& train,
                                   const std::vector<AlignmentSet>& alignments,
                                   const AnalyzerLexicon& lexicon,
                                   const std::string& feature) {
  check_aligned(train, alignments);
  bool known = feature == "definiteness" || feature == "number" || feature == "gender" ||
               feature == "pos";
  if (!known) {
    for (const auto& f : consistency_features(lexicon))
      if (f == feature) known = true;
  }
  if (!known) throw DataError("unknown feature '" + feature + "'");

  std::size_t total = 0, preserved = 0;
  for (std::size_t k = 0; k < train.size(); ++k) {
    const auto& [src, tgt] = train.pairs[k];
    for (const auto& [i, j] : alignments[k].links) {
      ++total;
      auto sp = analyze(lexicon, src.tokens[i]).front().properties;
      auto tp = analyze(lexicon, tgt.tokens[j]).front().properties;
      if (feature_value(sp, feature) == feature_value(tp, feature)) ++preserved;
    }
  }
  if (total == 0) throw DataError("no alignment links to measure");
  return 100.0 * static_cast<double>(preserved) / static_cast<double>(total);
}

std::vector<std::string> consistency_features(const AnalyzerLexicon& lexicon) {
  std::vector<std::string> out = {"definiteness", "number", "gender", "pos"};
  for (const auto& key : lexicon.extended_keys()) out.push_back(key);
  return out;
}

namespace {

struct MlePick {
  PropertySet p, q;
  double prob = -1.0;
};

// Argmax of prob(p, q) over the cartesian product, ties resolved toward
// the smallest (serialized p, serialized q).
template <typename Prob>
MlePick argmax_pair(const std::set<PropertySet>& ps, const std::set<PropertySet>& qs,
                    Prob&& prob) {
  MlePick best;
  std::pair<std::string, std::string> best_key;
  for (const auto& p : ps) {
    for (const auto& q : qs) {
      double v = prob(p, q);
      std::pair<std::string, std::string> key{p.core_key(), q.core_key()};
      if (v > best.prob || (v == best.prob && key < best_key)) {
        best = {p, q, v};
        best_key = key;
      }
    }
  }
  return best;
}

}  // namespace

std::pair<PropertySet, PropertySet> mle_property_pair(const std::string& i_type,
                                                      const std::string& j_type,
                                                      MleDirection direction,
                                                      const TypePropertyInventory& inventory,
                                                      const PropertyDistribution& dist) {
  const auto& ps = inventory.get(i_type);
  const auto& qs = inventory.get(j_type);
  MlePick pick;
  if (direction == MleDirection::source_given_target)
    pick = argmax_pair(ps, qs,
                       [&](const PropertySet& p, const PropertySet& q) {
                         return dist.p_src_given_tgt(p, q);
                       });
  else
    pick = argmax_pair(ps, qs,
                       [&](const PropertySet& p, const PropertySet& q) {
                         return dist.p_tgt_given_src(q, p);
                       });
  return {pick.p, pick.q};
}

ConstraintScores morph_constraint_scores(const std::vector<std::string>& source,
                                         const std::vector<std::string>& target,
                                         const std::set<std::pair<int, int>>& composed,
                                         const TypePropertyInventory& inventory,
                                         const PropertyDistribution& dist) {
  const std::set<PropertySet> null_only = {PropertySet::null_token()};
  std::vector<bool> src_linked(source.size(), false), tgt_linked(target.size(), false);
  for (const auto& [i, j] : composed) {
    src_linked[i] = true;
    tgt_linked[j] = true;
  }

  // Source side: every link plus a null pair per unaligned source token.
  double sum_s = 0.0;
  std::size_t a_count = 0;
  for (const auto& [i, j] : composed) {
    auto pick = argmax_pair(inventory.get(source[i]), inventory.get(target[j]),
                            [&](const PropertySet& p, const PropertySet& q) {
                              return dist.p_src_given_tgt(p, q);
                            });
    sum_s += pick.prob;
    ++a_count;
  }
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (src_linked[i]) continue;
    auto pick = argmax_pair(inventory.get(source[i]), null_only,
                            [&](const PropertySet& p, const PropertySet& q) {
                              return dist.p_src_given_tgt(p, q);
                            });
    sum_s += pick.prob;
    ++a_count;
  }

  // Target side, symmetric.
  double sum_t = 0.0;
  std::size_t b_count = 0;
  for (const auto& [i, j] : composed) {
    auto pick = argmax_pair(inventory.get(source[i]), inventory.get(target[j]),
                            [&](const PropertySet& p, const PropertySet& q) {
                              return dist.p_tgt_given_src(q, p);
                            });
    sum_t += pick.prob;
    ++b_count;
  }
  for (std::size_t j = 0; j < target.size(); ++j) {
    if (tgt_linked[j]) continue;
    auto pick = argmax_pair(null_only, inventory.get(target[j]),
                            [&](const PropertySet& p, const PropertySet& q) {
                              return dist.p_tgt_given_src(q, p);
                            });
    sum_t += pick.prob;
    ++b_count;
  }

  ConstraintScores scores;
  scores.w_s = a_count > 0 ? sum_s / static_cast<double>(a_count) : dist.epsilon;
  scores.w_t = b_count > 0 ? sum_t / static_cast<double>(b_count) : dist.epsilon;
  return scores;
}

PhraseTable annotate_phrase_table(const PhraseTable& table,
                                  const TypePropertyInventory& inventory,
                                  const PropertyDistribution& dist) {
  PhraseTable out = table;
  out.add_feature("morph_ws", dist.epsilon);
  out.add_feature("morph_wt", dist.epsilon);
  std::size_t ws_idx = out.feature_index("morph_ws");
  std::size_t wt_idx = out.feature_index("morph_wt");
  for (auto& [key, entry] : out.entries) {
    if (entry.alignment.empty()) continue;  // no evidence, keep the floor
    auto scores = morph_constraint_scores(split_ws(key.first), split_ws(key.second),
                                          entry.alignment, inventory, dist);
    entry.features[ws_idx] = scores.w_s;
    entry.features[wt_idx] = scores.w_t;
  }
  return out;
}

}  // namespace dialectmt
