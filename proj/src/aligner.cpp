#include "dialectmt/aligner.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace dialectmt {

const std::string TranslationTable::kNull = "<NULL>";

double TranslationTable::lookup(const std::string& target, const std::string& source) const {
  auto row = probs.find(source);
  if (row == probs.end()) return kFloor;
  auto cell = row->second.find(target);
  if (cell == row->second.end()) return kFloor;
  return cell->second;
}

namespace {

void check_training_inputs(const ParallelCorpus& corpus, int iterations, double null_prob) {
  if (corpus.empty()) throw DataError("cannot train aligner on an empty corpus");
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (!(null_prob > 0.0 && null_prob < 1.0))
    throw std::invalid_argument("null_prob must be in (0, 1)");
}

}  // namespace

TranslationTable train_ibm1(const ParallelCorpus& corpus, int iterations, double null_prob) {
  check_training_inputs(corpus, iterations, null_prob);
  TranslationTable table;
  table.null_alignment_prob = null_prob;

  // Uniform over co-occurring targets (null co-occurs with everything).
  for (const auto& [src, tgt] : corpus.pairs) {
    for (const auto& t : tgt.tokens) {
      auto& null_row = table.probs[TranslationTable::kNull];
      null_row.emplace(t.surface, 0.0);
      for (const auto& s : src.tokens) table.probs[s.surface].emplace(t.surface, 0.0);
    }
  }
  for (auto& [src_word, row] : table.probs) {
    double uniform = 1.0 / static_cast<double>(row.size());
    for (auto& [tgt_word, p] : row) p = uniform;
  }

  for (int iter = 0; iter < iterations; ++iter) {
    std::unordered_map<std::string, std::unordered_map<std::string, double>> counts;
    std::unordered_map<std::string, double> totals;
    for (const auto& [src, tgt] : corpus.pairs) {
      double real_weight = (1.0 - null_prob) / static_cast<double>(src.size());
      for (const auto& t : tgt.tokens) {
        double null_mass = null_prob * table.lookup(t.surface, TranslationTable::kNull);
        double denom = null_mass;
        for (const auto& s : src.tokens)
          denom += real_weight * table.lookup(t.surface, s.surface);
        counts[TranslationTable::kNull][t.surface] += null_mass / denom;
        totals[TranslationTable::kNull] += null_mass / denom;
        for (const auto& s : src.tokens) {
          double delta = real_weight * table.lookup(t.surface, s.surface) / denom;
          counts[s.surface][t.surface] += delta;
          totals[s.surface] += delta;
        }
      }
    }
    for (auto& [src_word, row] : table.probs) {
      double total = totals[src_word];
      for (auto& [tgt_word, p] : row)
        p = total > 0.0 ? counts[src_word][tgt_word] / total : 0.0;
    }
  }
  return table;
}

double corpus_log_likelihood(const TranslationTable& table, const ParallelCorpus& corpus) {
  double ll = 0.0;
  for (const auto& [src, tgt] : corpus.pairs) {
    double real_weight =
        (1.0 - table.null_alignment_prob) / static_cast<double>(src.size());
    for (const auto& t : tgt.tokens) {
      double p = table.null_alignment_prob * table.lookup(t.surface, TranslationTable::kNull);
      for (const auto& s : src.tokens)
        p += real_weight * table.lookup(t.surface, s.surface);
      ll += std::log(p);
    }
  }
  return ll;
}

AlignmentSet viterbi_align(const TranslationTable& table, const Sentence& src,
                           const Sentence& tgt) {
  AlignmentSet out;
  out.source_len = static_cast<int>(src.size());
  out.target_len = static_cast<int>(tgt.size());
  for (int j = 0; j < out.target_len; ++j) {
    const std::string& t = tgt.tokens[j].surface;
    // Null first so it keeps ties, then earlier source positions.
    double best = table.lookup(t, TranslationTable::kNull);
    int best_i = -1;
    for (int i = 0; i < out.source_len; ++i) {
      double p = table.lookup(t, src.tokens[i].surface);
      if (p > best) {
        best = p;
        best_i = i;
      }
    }
    if (best_i >= 0) out.links.insert({best_i, j});
  }
  return out;
}

AlignmentSet grow_diag_final(const AlignmentSet& fwd, const AlignmentSet& rev) {
  if (fwd.source_len != rev.source_len || fwd.target_len != rev.target_len)
    throw DataError("alignment dimension mismatch");
  const int sl = fwd.source_len, tl = fwd.target_len;

  std::set<std::pair<int, int>> uni;
  uni.insert(fwd.links.begin(), fwd.links.end());
  uni.insert(rev.links.begin(), rev.links.end());

  AlignmentSet out;
  out.source_len = sl;
  out.target_len = tl;
  std::vector<bool> src_aligned(sl, false), tgt_aligned(tl, false);
  auto add = [&](int i, int j) {
    out.links.insert({i, j});
    src_aligned[i] = true;
    tgt_aligned[j] = true;
  };

  for (const auto& link : fwd.links)
    if (rev.links.count(link)) add(link.first, link.second);

  static const int kNeighbors[8][2] = {{-1, 0}, {0, -1}, {1, 0}, {0, 1},
                                       {-1, -1}, {-1, 1}, {1, -1}, {1, 1}};
  bool added = true;
  while (added) {
    added = false;
    for (int i = 0; i < sl; ++i) {
      for (int j = 0; j < tl; ++j) {
        if (!out.links.count({i, j})) continue;
        for (const auto& d : kNeighbors) {
          int ni = i + d[0], nj = j + d[1];
          if (ni < 0 || ni >= sl || nj < 0 || nj >= tl) continue;
          if (out.links.count({ni, nj})) continue;
          if ((!src_aligned[ni] || !tgt_aligned[nj]) && uni.count({ni, nj})) {
            add(ni, nj);
            added = true;
          }
        }
      }
    }
  }

  auto final_pass = [&](const AlignmentSet& dir) {
    for (int i = 0; i < sl; ++i)
      for (int j = 0; j < tl; ++j)
        if ((!src_aligned[i] || !tgt_aligned[j]) && dir.links.count({i, j})) add(i, j);
  };
  final_pass(fwd);
  final_pass(rev);
  return out;
}

void write_alignments(const std::string& path, const std::vector<AlignmentSet>& alignments) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  for (const auto& a : alignments) {
    bool first = true;
    for (const auto& [i, j] : a.links) {
      if (!first) out << ' ';
      out << i << '-' << j;
      first = false;
    }
    out << '\n';
  }
}

std::vector<AlignmentSet> read_alignments(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::vector<AlignmentSet> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    AlignmentSet a;
    for (const auto& piece : split_ws(line)) {
      auto dash = piece.find('-');
      if (dash == std::string::npos || dash == 0 || dash + 1 == piece.size())
        throw DataError(path + ": line " + std::to_string(lineno) + ": bad link '" + piece +
                        "'");
      long long i = 0, j = 0;
      try {
        i = parse_int(piece.substr(0, dash));
        j = parse_int(piece.substr(dash + 1));
      } catch (const DataError&) {
        throw DataError(path + ": line " + std::to_string(lineno) + ": bad link '" + piece +
                        "'");
      }
      if (i < 0 || j < 0)
        throw DataError(path + ": line " + std::to_string(lineno) + ": negative index");
      a.links.insert({static_cast<int>(i), static_cast<int>(j)});
      a.source_len = std::max(a.source_len, static_cast<int>(i) + 1);
      a.target_len = std::max(a.target_len, static_cast<int>(j) + 1);
    }
    out.push_back(std::move(a));
  }
  return out;
}

std::vector<AlignmentSet> align_corpus(const ParallelCorpus& corpus, int iterations,
                                       double null_prob) {
  TranslationTable fwd_table = train_ibm1(corpus, iterations, null_prob);
  ParallelCorpus reversed;
  reversed.pairs.reserve(corpus.size());
  for (const auto& [src, tgt] : corpus.pairs) reversed.pairs.emplace_back(tgt, src);
  TranslationTable rev_table = train_ibm1(reversed, iterations, null_prob);

  std::vector<AlignmentSet> out;
  out.reserve(corpus.size());
  for (const auto& [src, tgt] : corpus.pairs) {
    AlignmentSet fwd = viterbi_align(fwd_table, src, tgt);
    AlignmentSet rev_as_fwd;
    rev_as_fwd.source_len = fwd.source_len;
    rev_as_fwd.target_len = fwd.target_len;
    AlignmentSet rev = viterbi_align(rev_table, tgt, src);
    for (const auto& [j, i] : rev.links) rev_as_fwd.links.insert({i, j});
    out.push_back(grow_diag_final(fwd, rev_as_fwd));
  }
  return out;
}

}  // namespace dialectmt
