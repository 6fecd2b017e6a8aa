#include "dialectmt/lm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

namespace dialectmt {

namespace {

std::string first_token(const std::string& gram) {
  auto sp = gram.find(' ');
  return sp == std::string::npos ? gram : gram.substr(0, sp);
}

std::string drop_first(const std::string& gram) {
  auto sp = gram.find(' ');
  return sp == std::string::npos ? std::string() : gram.substr(sp + 1);
}

std::string drop_last(const std::string& gram) {
  auto sp = gram.rfind(' ');
  return sp == std::string::npos ? std::string() : gram.substr(0, sp);
}

std::string last_token(const std::string& gram) {
  auto sp = gram.rfind(' ');
  return sp == std::string::npos ? gram : gram.substr(sp + 1);
}

}  // namespace

NGramLM train_lm(const std::vector<Sentence>& corpus, int order, double discount) {
  if (order < 1) throw DataError("LM order must be >= 1");
  if (corpus.empty()) throw DataError("cannot train LM on an empty corpus");
  if (!(discount > 0.0 && discount < 1.0))
    throw DataError("LM discount must be in (0, 1)");
  const int n = order;
  const double D = discount;

  // Raw window counts per order.
  std::vector<std::map<std::string, std::uint64_t>> raw(n);
  for (const auto& sent : corpus) {
    std::vector<std::string> stream;
    stream.reserve(sent.size() + 2);
    if (n >= 2) stream.push_back(NGramLM::kBos);
    for (const auto& t : sent.tokens) stream.push_back(t.surface);
    if (n >= 2) stream.push_back(NGramLM::kEos);
    for (int k = 1; k <= n; ++k) {
      for (std::size_t s = 0; s + k <= stream.size(); ++s) {
        std::string gram = stream[s];
        for (int d = 1; d < k; ++d) {
          gram += ' ';
          gram += stream[s + d];
        }
        ++raw[k - 1][gram];
      }
    }
  }

  // Adjusted counts: raw at the top order, continuation counts below,
  // except that grams led by the start marker keep raw counts (nothing can
  // precede the start marker) and the start marker itself is never a
  // predicted event.
  std::vector<std::map<std::string, std::uint64_t>> adj(n);
  adj[n - 1] = raw[n - 1];
  for (int k = n - 1; k >= 1; --k) {
    for (const auto& [gram, c] : raw[k]) {
      (void)c;
      ++adj[k - 1][drop_first(gram)];
    }
    for (const auto& [gram, c] : raw[k - 1]) {
      if (k >= 2 && first_token(gram) == NGramLM::kBos) adj[k - 1][gram] = c;
    }
    adj[k - 1].erase(NGramLM::kBos);
  }

  // Interpolated probabilities bottom-up; per-history normalizers.
  std::vector<std::map<std::string, double>> pint(n);
  std::vector<std::map<std::string, double>> bow(n);  // backoff per history

  double uni_total = 0.0;
  for (const auto& [w, a] : adj[0]) uni_total += static_cast<double>(a);
  if (uni_total <= 0.0) throw DataError("LM training corpus has no events");
  double uni_types = static_cast<double>(adj[0].size());
  for (const auto& [w, a] : adj[0])
    pint[0][w] = std::max(static_cast<double>(a) - D, 0.0) / uni_total;
  pint[0][NGramLM::kUnk] = D * uni_types / uni_total;

  for (int k = 2; k <= n; ++k) {
    std::map<std::string, double> hist_total;
    std::map<std::string, double> hist_types;
    for (const auto& [gram, a] : adj[k - 1]) {
      std::string h = drop_last(gram);
      hist_total[h] += static_cast<double>(a);
      hist_types[h] += 1.0;
    }
    for (const auto& [h, total] : hist_total)
      bow[k - 2][h] = D * hist_types[h] / total;
    for (const auto& [gram, a] : adj[k - 1]) {
      std::string h = drop_last(gram);
      std::string lower = drop_first(gram);
      double f = std::max(static_cast<double>(a) - D, 0.0) / hist_total[h];
      auto it = pint[k - 2].find(lower);
      double p_lower = it != pint[k - 2].end() ? it->second : pint[0][NGramLM::kUnk];
      pint[k - 1][gram] = f + bow[k - 2][h] * p_lower;
    }
  }

  NGramLM lm;
  lm.order = n;
  lm.tables.resize(n);
  for (int k = 1; k <= n; ++k) {
    for (const auto& [gram, p] : pint[k - 1]) {
      NGramLM::Entry e;
      e.log10_prob = p > 0.0 ? std::log10(p) : NGramLM::kLogZero;
      if (k < n) {
        auto it = bow[k - 1].find(gram);
        if (it != bow[k - 1].end()) {
          e.log10_backoff = std::log10(it->second);
          e.has_backoff = true;
        }
      }
      lm.tables[k - 1][gram] = e;
    }
  }
  // The start marker gets a placeholder probability but keeps its backoff.
  if (n >= 2) {
    NGramLM::Entry e;
    e.log10_prob = NGramLM::kLogZero;
    auto it = bow[0].find(NGramLM::kBos);
    if (it != bow[0].end()) {
      e.log10_backoff = std::log10(it->second);
      e.has_backoff = true;
    }
    lm.tables[0][NGramLM::kBos] = e;
  }
  for (const auto& [w, e] : lm.tables[0]) lm.vocabulary.insert(w);
  return lm;
}

double NGramLM::cond_log10(const std::vector<std::string>& context,
                           const std::string& word) const {
  auto canon = [&](const std::string& w) -> const std::string& {
    static const std::string unk = kUnk;
    return vocabulary.count(w) ? w : unk;
  };
  std::vector<std::string> ctx;
  std::size_t start = context.size() > static_cast<std::size_t>(order - 1)
                          ? context.size() - (order - 1)
                          : 0;
  for (std::size_t i = start; i < context.size(); ++i) ctx.push_back(canon(context[i]));
  const std::string w = canon(word);

  double backoff_sum = 0.0;
  for (;;) {
    std::string gram = join(ctx, " ");
    if (!gram.empty()) gram += ' ';
    gram += w;
    const auto& table = tables[ctx.size()];
    auto it = table.find(gram);
    if (it != table.end()) return backoff_sum + it->second.log10_prob;
    if (ctx.empty()) return backoff_sum + tables[0].at(std::string(kUnk)).log10_prob;
    auto hist = tables[ctx.size() - 1].find(join(ctx, " "));
    if (hist != tables[ctx.size() - 1].end() && hist->second.has_backoff)
      backoff_sum += hist->second.log10_backoff;
    ctx.erase(ctx.begin());
  }
}

double score_sequence(const NGramLM& lm, const std::vector<std::string>& tokens) {
  double total = 0.0;
  if (lm.order == 1) {
    for (const auto& w : tokens) total += lm.cond_log10({}, w);
    return total;
  }
  std::vector<std::string> context{NGramLM::kBos};
  for (const auto& w : tokens) {
    total += lm.cond_log10(context, w);
    context.push_back(w);
  }
  total += lm.cond_log10(context, NGramLM::kEos);
  return total;
}

void write_arpa(const std::string& path, const NGramLM& lm) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  out << "\\data\\\n";
  for (int k = 1; k <= lm.order; ++k)
    out << "ngram " << k << '=' << lm.tables[k - 1].size() << '\n';
  out << '\n';
  for (int k = 1; k <= lm.order; ++k) {
    out << '\\' << k << "-grams:\n";
    std::vector<std::pair<std::string, NGramLM::Entry>> rows(lm.tables[k - 1].begin(),
                                                             lm.tables[k - 1].end());
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [gram, e] : rows) {
      out << format_double(e.log10_prob) << '\t' << gram;
      if (e.has_backoff) out << '\t' << format_double(e.log10_backoff);
      out << '\n';
    }
    out << '\n';
  }
  out << "\\end\\\n";
}

NGramLM read_arpa(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  NGramLM lm;
  std::string line;
  std::size_t lineno = 0;
  auto where = [&] { return path + ": line " + std::to_string(lineno); };
  auto next_line = [&](std::string& dst) {
    if (!std::getline(in, dst)) return false;
    ++lineno;
    if (!dst.empty() && dst.back() == '\r') dst.pop_back();
    return true;
  };

  bool saw_data = false;
  std::vector<std::size_t> declared;
  while (next_line(line)) {
    if (strip(line) == "\\data\\") {
      saw_data = true;
      break;
    }
    if (!strip(line).empty()) throw DataError(where() + ": expected \\data\\ header");
  }
  if (!saw_data) throw DataError(path + ": missing \\data\\ header");
  while (next_line(line)) {
    std::string body = strip(line);
    if (body.empty()) break;
    if (body.rfind("ngram ", 0) != 0) throw DataError(where() + ": bad count line");
    auto eq = body.find('=');
    if (eq == std::string::npos) throw DataError(where() + ": bad count line");
    long long k = parse_int(strip(body.substr(6, eq - 6)));
    long long c = parse_int(strip(body.substr(eq + 1)));
    if (k != static_cast<long long>(declared.size()) + 1 || c < 0)
      throw DataError(where() + ": bad count line");
    declared.push_back(static_cast<std::size_t>(c));
  }
  if (declared.empty()) throw DataError(path + ": no ngram counts declared");
  lm.order = static_cast<int>(declared.size());
  lm.tables.resize(lm.order);

  int current = 0;
  while (next_line(line)) {
    std::string body = strip(line);
    if (body.empty()) continue;
    if (body == "\\end\\") {
      current = -1;
      break;
    }
    if (body[0] == '\\' && body.back() == ':') {
      auto dash = body.find("-grams:");
      if (dash == std::string::npos) throw DataError(where() + ": bad section header");
      current = static_cast<int>(parse_int(body.substr(1, dash - 1)));
      if (current < 1 || current > lm.order)
        throw DataError(where() + ": section order out of range");
      continue;
    }
    if (current == 0) throw DataError(where() + ": entry before any section");
    auto fields = split_char(line, '\t');
    if (fields.size() != 2 && fields.size() != 3)
      throw DataError(where() + ": expected 2 or 3 tab-separated fields");
    NGramLM::Entry e;
    e.log10_prob = parse_double(strip(fields[0]));
    if (fields.size() == 3) {
      e.log10_backoff = parse_double(strip(fields[2]));
      e.has_backoff = true;
    }
    std::string gram = join(split_ws(fields[1]), " ");
    if (gram.empty()) throw DataError(where() + ": empty ngram");
    if (split_ws(gram).size() != static_cast<std::size_t>(current))
      throw DataError(where() + ": ngram length does not match section");
    lm.tables[current - 1][gram] = e;
  }
  if (current != -1) throw DataError(path + ": missing \\end\\ marker");
  for (int k = 1; k <= lm.order; ++k)
    if (lm.tables[k - 1].size() != declared[k - 1])
      throw DataError(path + ": declared " + std::to_string(declared[k - 1]) + " " +
                      std::to_string(k) + "-grams, found " +
                      std::to_string(lm.tables[k - 1].size()));
  for (const auto& [w, e] : lm.tables[0]) lm.vocabulary.insert(w);
  if (!lm.vocabulary.count(NGramLM::kUnk))
    throw DataError(path + ": model lacks the unknown word symbol");
  return lm;
}

}  // namespace dialectmt
