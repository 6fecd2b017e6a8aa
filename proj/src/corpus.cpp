#include "dialectmt/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

namespace dialectmt {

namespace {

void validate_token_surface(const std::string& s) {
  if (s.empty()) throw DataError("empty token");
  for (char c : s) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r')
      throw DataError("token contains whitespace: '" + s + "'");
  }
  bool prefix = s.size() > 1 && s.back() == '+';
  bool suffix = s.size() > 1 && s.front() == '+';
  if (prefix && suffix)
    throw DataError("token carries both clitic markers: '" + s + "'");
}

}  // namespace

Token::Token(std::string s) : surface(std::move(s)) {
  validate_token_surface(surface);
}

bool Token::is_clitic_prefix() const {
  return surface.size() > 1 && surface.back() == '+';
}

bool Token::is_clitic_suffix() const {
  return surface.size() > 1 && surface.front() == '+';
}

std::string Token::stripped() const {
  if (is_clitic_prefix()) return surface.substr(0, surface.size() - 1);
  if (is_clitic_suffix()) return surface.substr(1);
  return surface;
}

std::vector<std::string> Sentence::surfaces() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(t.surface);
  return out;
}

Sentence sentence_from_line(std::string_view line) {
  Sentence s;
  for (auto& piece : split_ws(line)) s.tokens.emplace_back(std::move(piece));
  return s;
}

std::string sentence_to_line(const Sentence& sentence) {
  return join(sentence.surfaces(), " ");
}

NormalizationMap NormalizationMap::standard() {
  NormalizationMap m;
  m.set(U'آ', U'ا');
  m.set(U'أ', U'ا');
  m.set(U'إ', U'ا');
  m.set(U'ٱ', U'ا');
  m.set(U'ى', U'ي');
  return m;
}

NormalizationMap NormalizationMap::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open normalization table: " + path);
  NormalizationMap m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string body = strip(line);
    if (body.empty() || body[0] == '#') continue;
    auto cols = split_char(body, '\t');
    if (cols.size() != 2)
      throw DataError("normalization table line " + std::to_string(lineno) +
                      ": expected two tab-separated codepoints");
    auto parse_cp = [&](const std::string& field) -> char32_t {
      std::string hex = field;
      if (hex.rfind("U+", 0) == 0 || hex.rfind("u+", 0) == 0) hex = hex.substr(2);
      unsigned long v = 0;
      try {
        std::size_t used = 0;
        v = std::stoul(hex, &used, 16);
        if (used != hex.size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw DataError("normalization table line " + std::to_string(lineno) +
                        ": bad codepoint '" + field + "'");
      }
      if (v > 0x10FFFF)
        throw DataError("normalization table line " + std::to_string(lineno) +
                        ": codepoint out of range");
      return static_cast<char32_t>(v);
    };
    m.set(parse_cp(cols[0]), parse_cp(cols[1]));
  }
  return m;
}

void NormalizationMap::set(char32_t from, char32_t to) {
  for (auto& e : map_) {
    if (e.first == from) {
      e.second = to;
      return;
    }
  }
  map_.emplace_back(from, to);
}

std::string NormalizationMap::apply(std::string_view text) const {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    char32_t cp = decode_utf8(text, pos);
    for (const auto& e : map_) {
      if (e.first == cp) {
        cp = e.second;
        break;
      }
    }
    append_utf8(out, cp);
  }
  return out;
}

namespace {

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_space = true;  // leading whitespace trimmed
  for (char c : text) {
    bool ws = c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
    if (ws) {
      in_space = true;
    } else {
      if (in_space && !out.empty()) out.push_back(' ');
      out.push_back(c);
      in_space = false;
    }
  }
  return out;
}

}  // namespace

std::string normalize_text(std::string_view raw, const NormalizationMap& map) {
  return collapse_whitespace(map.apply(raw));
}

std::string normalize_text(std::string_view raw) {
  static const NormalizationMap kStandard = NormalizationMap::standard();
  return normalize_text(raw, kStandard);
}

std::vector<std::string> read_lines_checked(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t bad = 0;
    if (!validate_utf8(line, &bad))
      throw DataError(path + ": undecodable bytes on line " +
                      std::to_string(lines.size() + 1));
    lines.push_back(std::move(line));
  }
  return lines;
}

ParallelCorpus load_parallel(const std::string& src_path, const std::string& tgt_path,
                             bool normalize, LoadReport* report) {
  auto src_lines = read_lines_checked(src_path);
  auto tgt_lines = read_lines_checked(tgt_path);
  if (src_lines.size() != tgt_lines.size())
    throw DataError("line count mismatch " + std::to_string(src_lines.size()) + " vs " +
                    std::to_string(tgt_lines.size()));
  ParallelCorpus corpus;
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < src_lines.size(); ++i) {
    std::string s = normalize ? normalize_text(src_lines[i]) : collapse_whitespace(src_lines[i]);
    std::string t = normalize ? normalize_text(tgt_lines[i]) : collapse_whitespace(tgt_lines[i]);
    if (s.empty() || t.empty()) {
      ++dropped;
      continue;
    }
    corpus.pairs.emplace_back(sentence_from_line(s), sentence_from_line(t));
  }
  if (report) report->dropped_blank_pairs = dropped;
  return corpus;
}

std::vector<Sentence> load_sentences(const std::string& path, bool normalize,
                                     LoadReport* report) {
  auto lines = read_lines_checked(path);
  std::vector<Sentence> out;
  std::size_t dropped = 0;
  for (const auto& raw : lines) {
    std::string body = normalize ? normalize_text(raw) : collapse_whitespace(raw);
    if (body.empty()) {
      ++dropped;
      continue;
    }
    out.push_back(sentence_from_line(body));
  }
  if (report) report->dropped_blank_pairs = dropped;
  return out;
}

void write_sentences(const std::string& path, const std::vector<Sentence>& sentences) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  for (const auto& s : sentences) out << sentence_to_line(s) << '\n';
}

void write_parallel(const std::string& src_path, const std::string& tgt_path,
                    const ParallelCorpus& corpus) {
  std::ofstream src(src_path, std::ios::binary);
  if (!src) throw DataError("cannot write file: " + src_path);
  std::ofstream tgt(tgt_path, std::ios::binary);
  if (!tgt) throw DataError("cannot write file: " + tgt_path);
  for (const auto& [s, t] : corpus.pairs) {
    src << sentence_to_line(s) << '\n';
    tgt << sentence_to_line(t) << '\n';
  }
}

DataSplit split_corpus(const ParallelCorpus& corpus, const SplitSizes& sizes,
                       std::uint64_t seed) {
  if (sizes.total() > corpus.size())
    throw DataError("split sizes sum " + std::to_string(sizes.total()) +
                    " exceeds corpus size " + std::to_string(corpus.size()));
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  // Fisher-Yates with explicit modular draws so the permutation depends only
  // on the seed, not on library internals.
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  DataSplit split;
  split.train.side_labels = corpus.side_labels;
  split.tune.side_labels = corpus.side_labels;
  split.dev.side_labels = corpus.side_labels;
  split.test.side_labels = corpus.side_labels;
  std::size_t pos = 0;
  auto take = [&](ParallelCorpus& dst, std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) dst.pairs.push_back(corpus.pairs[order[pos++]]);
  };
  take(split.train, sizes.train);
  take(split.tune, sizes.tune);
  take(split.dev, sizes.dev);
  take(split.test, sizes.test);
  return split;
}

}  // namespace dialectmt
