#include "dialectmt/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace dialectmt {

double LogLinearWeights::get(const std::string& name) const {
  auto it = values.find(name);
  if (it == values.end()) throw DataError("no weight for feature '" + name + "'");
  return it->second;
}

void write_weights(const std::string& path, const LogLinearWeights& weights) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  for (const auto& [name, w] : weights.values)
    out << name << '\t' << format_double(w) << '\n';
}

LogLinearWeights read_weights(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  LogLinearWeights weights;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string body = strip(line);
    if (body.empty() || body[0] == '#') continue;
    auto cols = split_char(line, '\t');
    if (cols.size() != 2)
      throw DataError(path + ": line " + std::to_string(lineno) +
                      ": expected feature<TAB>weight");
    weights.values[strip(cols[0])] = parse_double(strip(cols[1]));
  }
  return weights;
}

LogLinearWeights default_weights(const std::vector<const PhraseTable*>& tables) {
  LogLinearWeights w;
  w.set("lm", 0.5);
  w.set("word_penalty", 0.0);
  w.set("distortion", 0.3);
  w.set("oov", -1.0);
  for (const auto* table : tables) {
    for (const auto& name : table->schema) {
      if (w.has(name)) continue;
      if (name == "phi_st" || name == "lex_st" || name == "phi_ts" || name == "lex_ts")
        w.set(name, 0.2);
      else
        w.set(name, 0.0);
    }
  }
  return w;
}

Sentence no_translation(const Sentence& sentence) { return sentence; }

namespace {

constexpr double kLogFloor = 1e-12;  // keeps table-feature logs finite

struct Option {
  int begin = 0, end = 0;  // source span [begin, end)
  std::vector<std::string> target;
  std::map<std::string, double> feature_totals;
  double static_score = 0.0;  // dot(weights, feature_totals)
  double lm_isolated = 0.0;   // phrase scored without outside context
};

struct Hyp {
  std::vector<bool> coverage;
  std::vector<std::string> lm_context;
  int end_pos = -1;
  double score = 0.0;
  double future = 0.0;
  std::vector<std::string> target;
  std::map<std::string, double> totals;
};

std::string state_key(const Hyp& h) {
  std::string key;
  key.reserve(h.coverage.size() + 24);
  for (bool b : h.coverage) key.push_back(b ? '1' : '0');
  key.push_back('|');
  key += std::to_string(h.end_pos);
  key.push_back('|');
  key += join(h.lm_context, " ");
  return key;
}

// Search state per stack: recombined hypotheses keyed by state, each state
// keeping its best few derivations (more than one only for n-best lists).
using Stack = std::map<std::string, std::vector<Hyp>>;

bool better(const Hyp& a, const Hyp& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.target < b.target;
}

void insert_hyp(Stack& stack, Hyp&& h, std::size_t per_state) {
  auto& list = stack[state_key(h)];
  auto pos = std::upper_bound(list.begin(), list.end(), h,
                              [](const Hyp& a, const Hyp& b) { return better(a, b); });
  list.insert(pos, std::move(h));
  if (list.size() > per_state) list.pop_back();
}

void prune_stack(Stack& stack, int stack_size) {
  if (stack_size <= 0 || stack.size() <= static_cast<std::size_t>(stack_size)) return;
  std::vector<std::pair<double, const std::string*>> ranked;
  ranked.reserve(stack.size());
  for (const auto& [key, list] : stack)
    ranked.emplace_back(list.front().score + list.front().future, &key);
  std::nth_element(ranked.begin(), ranked.begin() + stack_size - 1, ranked.end(),
                   [](const auto& a, const auto& b) {
                     if (a.first != b.first) return a.first > b.first;
                     return *a.second < *b.second;
                   });
  double cutoff = ranked[stack_size - 1].first;
  const std::string& cutoff_key = *ranked[stack_size - 1].second;
  for (auto it = stack.begin(); it != stack.end();) {
    double v = it->second.front().score + it->second.front().future;
    bool keep = v > cutoff || (v == cutoff && !(cutoff_key < it->first));
    it = keep ? std::next(it) : stack.erase(it);
  }
}

double lm_increment(const NGramLM& lm, std::vector<std::string>& context,
                    const std::vector<std::string>& words) {
  double total = 0.0;
  for (const auto& w : words) {
    total += lm.cond_log10(context, w);
    context.push_back(w);
  }
  return total;
}

}  // namespace

std::vector<DerivationResult> decode_nbest(const Sentence& sentence,
                                           const std::vector<const PhraseTable*>& tables,
                                           const NGramLM& lm, const LogLinearWeights& weights,
                                           const DecoderOptions& options) {
  // Weight coverage is checked up front so misconfiguration fails loudly.
  for (const auto* table : tables)
    for (const auto& name : table->schema) (void)weights.get(name);
  const double w_lm = weights.get("lm");
  const double w_wp = weights.get("word_penalty");
  const double w_dist = weights.get("distortion");
  const double w_oov = weights.get("oov");

  const int n = static_cast<int>(sentence.size());
  if (n == 0) return {DerivationResult{}};

  int max_span = 1;
  for (const auto* table : tables)
    for (const auto& [key, entry] : table->entries)
      max_span = std::max(max_span, static_cast<int>(split_ws(key.first).size()));

  // Translation options per span, tables consulted as a back-off list.
  std::vector<std::vector<std::vector<Option>>> options_for(n);
  for (int i = 0; i < n; ++i) options_for[i].resize(n + 1);
  auto phrase_of = [&](int i, int j) {
    std::string p = sentence.tokens[i].surface;
    for (int k = i + 1; k < j; ++k) {
      p += ' ';
      p += sentence.tokens[k].surface;
    }
    return p;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j <= std::min(n, i + max_span); ++j) {
      std::string src = phrase_of(i, j);
      for (const auto* table : tables) {
        auto it = table->entries.lower_bound({src, std::string()});
        bool found = false;
        for (; it != table->entries.end() && it->first.first == src; ++it) {
          Option opt;
          opt.begin = i;
          opt.end = j;
          opt.target = split_ws(it->first.second);
          for (std::size_t f = 0; f < table->schema.size(); ++f)
            opt.feature_totals[table->schema[f]] =
                std::log(std::max(it->second.features[f], kLogFloor));
          opt.feature_totals["word_penalty"] = static_cast<double>(opt.target.size());
          opt.static_score = 0.0;
          for (const auto& [name, v] : opt.feature_totals)
            opt.static_score += weights.get(name) * v;
          std::vector<std::string> scratch;
          opt.lm_isolated = lm_increment(lm, scratch, opt.target);
          options_for[i][j].push_back(std::move(opt));
          found = true;
        }
        if (found) break;
      }
      if (j == i + 1 && options_for[i][j].empty()) {
        Option oov;
        oov.begin = i;
        oov.end = j;
        oov.target = {sentence.tokens[i].surface};
        oov.feature_totals["oov"] = 1.0;
        oov.feature_totals["word_penalty"] = 1.0;
        oov.static_score = w_oov + w_wp;
        std::vector<std::string> scratch;
        oov.lm_isolated = lm_increment(lm, scratch, oov.target);
        options_for[i][j].push_back(std::move(oov));
      }
    }
  }

  // Future costs: best static+LM score per span, combined over splits.
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> fc(n, std::vector<double>(n + 1, kNegInf));
  for (int len = 1; len <= n; ++len) {
    for (int i = 0; i + len <= n; ++i) {
      int j = i + len;
      double best = kNegInf;
      if (len <= max_span)
        for (const auto& opt : options_for[i][j])
          best = std::max(best, opt.static_score + w_lm * opt.lm_isolated);
      for (int k = i + 1; k < j; ++k)
        if (fc[i][k] > kNegInf && fc[k][j] > kNegInf)
          best = std::max(best, fc[i][k] + fc[k][j]);
      fc[i][j] = best;
    }
  }
  auto future_of = [&](const std::vector<bool>& coverage) {
    double total = 0.0;
    int i = 0;
    while (i < n) {
      if (coverage[i]) {
        ++i;
        continue;
      }
      int j = i;
      while (j < n && !coverage[j]) ++j;
      total += fc[i][j];
      i = j;
    }
    return total;
  };

  const std::size_t per_state = static_cast<std::size_t>(std::max(1, options.nbest));
  const int lm_ctx = std::max(0, lm.order - 1);
  auto search = [&](int distortion_limit) {
    std::vector<Stack> stacks(n + 1);
    Hyp init;
    init.coverage.assign(n, false);
    if (lm.order >= 2) init.lm_context.push_back(NGramLM::kBos);
    init.future = future_of(init.coverage);
    insert_hyp(stacks[0], std::move(init), per_state);

    for (int covered = 0; covered < n; ++covered) {
      prune_stack(stacks[covered], options.stack_size);
      for (const auto& [key, list] : stacks[covered]) {
        for (const Hyp& h : list) {
          for (int i = 0; i < n; ++i) {
            if (h.coverage[i]) continue;
            int jump = std::abs(i - (h.end_pos + 1));
            if (distortion_limit >= 0 && jump > distortion_limit) continue;
            for (int j = i + 1; j <= std::min(n, i + max_span); ++j) {
              if (h.coverage[j - 1]) break;  // span must be fully uncovered
              for (const auto& opt : options_for[i][j]) {
                Hyp next = h;
                for (int k = i; k < j; ++k) next.coverage[k] = true;
                double inc = lm_increment(lm, next.lm_context, opt.target);
                if (static_cast<int>(next.lm_context.size()) > lm_ctx)
                  next.lm_context.erase(
                      next.lm_context.begin(),
                      next.lm_context.end() - lm_ctx);
                next.end_pos = j - 1;
                next.score = h.score + opt.static_score + w_lm * inc +
                             w_dist * (-static_cast<double>(jump));
                next.future = future_of(next.coverage);
                next.target.insert(next.target.end(), opt.target.begin(), opt.target.end());
                for (const auto& [name, v] : opt.feature_totals) next.totals[name] += v;
                next.totals["lm"] += inc;
                next.totals["distortion"] += -static_cast<double>(jump);
                insert_hyp(stacks[covered + j - i], std::move(next), per_state);
              }
            }
          }
        }
      }
    }
    return stacks[n];
  };

  Stack complete = search(options.distortion_limit);
  if (complete.empty() && options.distortion_limit >= 0) complete = search(-1);

  std::vector<Hyp> finals;
  for (auto& [key, list] : complete) {
    for (Hyp& h : list) {
      if (lm.order >= 2) {
        double eos = lm.cond_log10(h.lm_context, NGramLM::kEos);
        h.score += w_lm * eos;
        h.totals["lm"] += eos;
      }
      finals.push_back(std::move(h));
    }
  }
  std::sort(finals.begin(), finals.end(), better);

  std::vector<DerivationResult> results;
  std::set<std::string> seen_targets;
  for (auto& h : finals) {
    std::string flat = join(h.target, " ");
    if (!seen_targets.insert(flat).second) continue;
    DerivationResult r;
    for (const auto& w : h.target) r.target.tokens.emplace_back(w);
    r.features = std::move(h.totals);
    r.score = h.score;
    results.push_back(std::move(r));
    if (results.size() >= static_cast<std::size_t>(std::max(1, options.nbest))) break;
  }
  return results;
}

Sentence decode(const Sentence& sentence, const std::vector<const PhraseTable*>& tables,
                const NGramLM& lm, const LogLinearWeights& weights,
                const DecoderOptions& options) {
  DecoderOptions opts = options;
  opts.nbest = 1;
  auto results = decode_nbest(sentence, tables, lm, weights, opts);
  return results.front().target;
}

void write_nbest(const std::string& path,
                 const std::vector<std::vector<DerivationResult>>& lists) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  for (std::size_t sent = 0; sent < lists.size(); ++sent) {
    for (const auto& r : lists[sent]) {
      out << sent << " ||| " << sentence_to_line(r.target) << " ||| ";
      bool first = true;
      for (const auto& [name, v] : r.features) {
        if (!first) out << ' ';
        out << name << ':' << format_double(v);
        first = false;
      }
      out << " ||| " << format_double(r.score) << '\n';
    }
  }
}

}  // namespace dialectmt
