#include "dialectmt/evaluation.hpp"

#include <cmath>
#include <map>
#include <string>

namespace dialectmt {

namespace {

std::map<std::string, std::size_t> ngram_counts(const std::vector<std::string>& words,
                                                std::size_t n) {
  std::map<std::string, std::size_t> counts;
  if (words.size() < n) return counts;
  for (std::size_t start = 0; start + n <= words.size(); ++start) {
    std::string gram = words[start];
    for (std::size_t d = 1; d < n; ++d) {
      gram += ' ';
      gram += words[start + d];
    }
    ++counts[gram];
  }
  return counts;
}

}  // namespace

BleuReport bleu(const std::vector<Sentence>& hypotheses,
                const std::vector<Sentence>& references) {
  if (hypotheses.size() != references.size())
    throw DataError("hypothesis count " + std::to_string(hypotheses.size()) +
                    " does not match reference count " + std::to_string(references.size()));
  if (hypotheses.empty()) throw DataError("empty evaluation set");

  BleuReport report;
  std::array<std::size_t, 4> clipped{}, total{};
  for (std::size_t s = 0; s < hypotheses.size(); ++s) {
    auto hyp = hypotheses[s].surfaces();
    auto ref = references[s].surfaces();
    report.hyp_length += hyp.size();
    report.ref_length += ref.size();
    for (std::size_t n = 1; n <= 4; ++n) {
      auto hyp_counts = ngram_counts(hyp, n);
      auto ref_counts = ngram_counts(ref, n);
      for (const auto& [gram, c] : hyp_counts) {
        total[n - 1] += c;
        auto it = ref_counts.find(gram);
        if (it != ref_counts.end()) clipped[n - 1] += std::min(c, it->second);
      }
    }
  }

  bool zero_precision = false;
  double log_sum = 0.0;
  for (std::size_t n = 0; n < 4; ++n) {
    double p = total[n] > 0 ? static_cast<double>(clipped[n]) / total[n] : 0.0;
    report.ngram_precisions[n] = p;
    if (p <= 0.0)
      zero_precision = true;
    else
      log_sum += std::log(p);
  }
  if (report.hyp_length == 0) {
    report.brevity_penalty = 0.0;
    report.score = 0.0;
    return report;
  }
  report.brevity_penalty =
      report.hyp_length < report.ref_length
          ? std::exp(1.0 - static_cast<double>(report.ref_length) / report.hyp_length)
          : 1.0;
  report.score =
      zero_precision ? 0.0 : 100.0 * report.brevity_penalty * std::exp(log_sum / 4.0);
  return report;
}

double smoothed_sentence_bleu(const Sentence& hypothesis, const Sentence& reference) {
  auto hyp = hypothesis.surfaces();
  auto ref = reference.surfaces();
  if (hyp.empty()) return 0.0;
  double log_sum = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    auto hyp_counts = ngram_counts(hyp, n);
    auto ref_counts = ngram_counts(ref, n);
    std::size_t clipped = 0, total = 0;
    for (const auto& [gram, c] : hyp_counts) {
      total += c;
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) clipped += std::min(c, it->second);
    }
    log_sum += std::log((clipped + 1.0) / (total + 1.0));
  }
  double bp = hyp.size() < ref.size()
                  ? std::exp(1.0 - static_cast<double>(ref.size()) / hyp.size())
                  : 1.0;
  return 100.0 * bp * std::exp(log_sum / 4.0);
}

double oov_rate(const std::vector<Sentence>& test_source,
                const std::unordered_set<std::string>& known_vocabulary) {
  std::size_t total = 0, unknown = 0;
  for (const auto& s : test_source) {
    for (const auto& t : s.tokens) {
      ++total;
      if (!known_vocabulary.count(t.surface)) ++unknown;
    }
  }
  if (total == 0) throw DataError("empty test set");
  return 100.0 * static_cast<double>(unknown) / static_cast<double>(total);
}

}  // namespace dialectmt
