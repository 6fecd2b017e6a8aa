#include "dialectmt/phrase_table.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <unordered_set>

namespace dialectmt {

const std::vector<std::string> PhraseTable::kCoreSchema = {
    "phi_st", "lex_st", "phi_ts", "lex_ts", "phrase_penalty"};

std::vector<PhrasePair> extract_phrases(const Sentence& src, const Sentence& tgt,
                                        const AlignmentSet& alignment, int max_len) {
  const int sl = static_cast<int>(src.size());
  const int tl = static_cast<int>(tgt.size());
  if (alignment.source_len != sl || alignment.target_len != tl)
    throw DataError("alignment dimensions do not match sentence pair");
  if (max_len < 1) throw std::invalid_argument("max_len must be >= 1");

  std::vector<bool> tgt_aligned(tl, false);
  for (const auto& [i, j] : alignment.links) tgt_aligned[j] = true;

  std::vector<PhrasePair> out;
  auto emit = [&](int i1, int i2, int j1, int j2) {
    PhrasePair pp;
    for (int i = i1; i <= i2; ++i) pp.source.push_back(src.tokens[i].surface);
    for (int j = j1; j <= j2; ++j) pp.target.push_back(tgt.tokens[j].surface);
    pp.internal_alignment.source_len = i2 - i1 + 1;
    pp.internal_alignment.target_len = j2 - j1 + 1;
    for (const auto& [i, j] : alignment.links)
      if (i1 <= i && i <= i2 && j1 <= j && j <= j2)
        pp.internal_alignment.links.insert({i - i1, j - j1});
    out.push_back(std::move(pp));
  };

  for (int i1 = 0; i1 < sl; ++i1) {
    for (int i2 = i1; i2 < sl && i2 - i1 < max_len; ++i2) {
      // minimal target span covering all links out of [i1, i2]
      int j_min = tl, j_max = -1;
      for (const auto& [i, j] : alignment.links) {
        if (i1 <= i && i <= i2) {
          j_min = std::min(j_min, j);
          j_max = std::max(j_max, j);
        }
      }
      if (j_max < 0) continue;
      bool crossed = false;
      for (const auto& [i, j] : alignment.links) {
        if (j_min <= j && j <= j_max && (i < i1 || i > i2)) {
          crossed = true;
          break;
        }
      }
      if (crossed) continue;
      // widen over unaligned boundary words on the target side
      for (int j1 = j_min; j1 >= 0 && (j1 == j_min || !tgt_aligned[j1]); --j1) {
        if (j_max - j1 >= max_len) break;
        for (int j2 = j_max; j2 < tl && (j2 == j_max || !tgt_aligned[j2]); ++j2) {
          if (j2 - j1 >= max_len) break;
          emit(i1, i2, j1, j2);
        }
      }
    }
  }
  return out;
}

std::set<std::pair<int, int>> PhraseCounts::Cell::best_alignment() const {
  const std::set<std::pair<int, int>>* best = nullptr;
  std::uint64_t best_votes = 0;
  for (const auto& [links, votes] : alignment_votes) {
    if (best == nullptr || votes > best_votes) {
      best = &links;
      best_votes = votes;
    }
  }
  return best ? *best : std::set<std::pair<int, int>>{};
}

void PhraseCounts::add(const PhrasePair& pair) {
  auto key = std::make_pair(join(pair.source, " "), join(pair.target, " "));
  auto& cell = cells[std::move(key)];
  cell.count += pair.count;
  cell.alignment_votes[pair.internal_alignment.links] += pair.count;
}

void PhraseCounts::add_all(const std::vector<PhrasePair>& pairs) {
  for (const auto& p : pairs) add(p);
}

std::size_t PhraseTable::feature_index(const std::string& name) const {
  for (std::size_t k = 0; k < schema.size(); ++k)
    if (schema[k] == name) return k;
  throw DataError("phrase table has no feature '" + name + "'");
}

bool PhraseTable::has_feature(const std::string& name) const {
  return std::find(schema.begin(), schema.end(), name) != schema.end();
}

const PhraseTableEntry* PhraseTable::find(const std::string& source,
                                          const std::string& target) const {
  auto it = entries.find({source, target});
  return it == entries.end() ? nullptr : &it->second;
}

void PhraseTable::add_feature(const std::string& name, double fill) {
  if (has_feature(name)) throw DataError("phrase table already has feature '" + name + "'");
  schema.push_back(name);
  for (auto& [key, entry] : entries) entry.features.push_back(fill);
}

double lexical_weight(const std::vector<std::string>& source,
                      const std::vector<std::string>& target,
                      const std::set<std::pair<int, int>>& alignment,
                      const TranslationTable& ttable) {
  double weight = 1.0;
  for (std::size_t j = 0; j < target.size(); ++j) {
    double sum = 0.0;
    int n = 0;
    for (const auto& [i, jj] : alignment) {
      if (jj == static_cast<int>(j)) {
        sum += ttable.lookup(target[j], source[i]);
        ++n;
      }
    }
    if (n == 0)
      weight *= ttable.lookup(target[j], TranslationTable::kNull);
    else
      weight *= sum / n;
  }
  return weight;
}

PhraseTable score_phrase_table(const PhraseCounts& counts, const TranslationTable& ttable_fwd,
                               const TranslationTable& ttable_rev) {
  if (counts.cells.empty()) throw DataError("no phrase pairs to score");
  std::map<std::string, std::uint64_t> src_totals, tgt_totals;
  for (const auto& [key, cell] : counts.cells) {
    src_totals[key.first] += cell.count;
    tgt_totals[key.second] += cell.count;
  }
  PhraseTable table;
  table.schema = PhraseTable::kCoreSchema;
  for (const auto& [key, cell] : counts.cells) {
    const auto& [src, tgt] = key;
    auto src_tokens = split_ws(src);
    auto tgt_tokens = split_ws(tgt);
    auto align = cell.best_alignment();
    std::set<std::pair<int, int>> align_rev;
    for (const auto& [i, j] : align) align_rev.insert({j, i});

    PhraseTableEntry entry;
    entry.alignment = align;
    entry.c_st = static_cast<double>(cell.count);
    entry.c_s = static_cast<double>(src_totals[src]);
    entry.c_t = static_cast<double>(tgt_totals[tgt]);
    double phi_st = entry.c_st / entry.c_t;
    double phi_ts = entry.c_st / entry.c_s;
    double lex_st = lexical_weight(tgt_tokens, src_tokens, align_rev, ttable_rev);
    double lex_ts = lexical_weight(src_tokens, tgt_tokens, align, ttable_fwd);
    entry.features = {phi_st, lex_st, phi_ts, lex_ts, std::exp(1.0)};
    table.entries.emplace(key, std::move(entry));
  }
  return table;
}

namespace {

constexpr const char* kFieldSep = " ||| ";

std::string links_to_string(const std::set<std::pair<int, int>>& links) {
  std::string out;
  for (const auto& [i, j] : links) {
    if (!out.empty()) out += ' ';
    out += std::to_string(i);
    out += '-';
    out += std::to_string(j);
  }
  return out;
}

std::set<std::pair<int, int>> links_from_string(const std::string& text,
                                                const std::string& where) {
  std::set<std::pair<int, int>> links;
  for (const auto& piece : split_ws(text)) {
    auto dash = piece.find('-');
    if (dash == std::string::npos || dash == 0 || dash + 1 == piece.size())
      throw DataError(where + ": bad alignment link '" + piece + "'");
    links.insert({static_cast<int>(parse_int(piece.substr(0, dash))),
                  static_cast<int>(parse_int(piece.substr(dash + 1)))});
  }
  return links;
}

}  // namespace

void write_phrase_table(const std::string& path, const PhraseTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  out << "# features: " << join(table.schema, " ") << '\n';
  for (const auto& [key, entry] : table.entries) {
    if (entry.features.size() != table.schema.size())
      throw DataError("entry feature count does not match schema");
    for (const auto& phrase : {key.first, key.second})
      for (const auto& tok : split_ws(phrase))
        if (tok == "|||")
          throw DataError("phrase token '|||' collides with the field separator");
    std::vector<std::string> feats;
    feats.reserve(entry.features.size());
    for (double f : entry.features) feats.push_back(format_double(f));
    out << key.first << kFieldSep << key.second << kFieldSep << join(feats, " ")
        << kFieldSep << links_to_string(entry.alignment) << kFieldSep
        << format_double(entry.c_st) << ' ' << format_double(entry.c_s) << ' '
        << format_double(entry.c_t) << '\n';
  }
}

PhraseTable read_phrase_table(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  PhraseTable table;
  bool have_schema = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto where = [&] { return path + ": line " + std::to_string(lineno); };
    if (line[0] == '#') {
      const std::string marker = "# features:";
      if (!have_schema && line.rfind(marker, 0) == 0) {
        table.schema = split_ws(line.substr(marker.size()));
        if (table.schema.empty()) throw DataError(where() + ": empty feature schema");
        have_schema = true;
      }
      continue;
    }
    if (!have_schema)
      throw DataError(where() + ": entry before '# features:' header");
    auto fields = split_sep(line, kFieldSep);
    if (fields.size() != 5)
      throw DataError(where() + ": expected 5 '|||'-separated fields, got " +
                      std::to_string(fields.size()));
    PhraseTableEntry entry;
    auto feat_strs = split_ws(fields[2]);
    if (feat_strs.size() != table.schema.size())
      throw DataError(where() + ": feature count " + std::to_string(feat_strs.size()) +
                      " does not match schema size " + std::to_string(table.schema.size()));
    for (const auto& fs : feat_strs) entry.features.push_back(parse_double(fs));
    entry.alignment = links_from_string(fields[3], where());
    auto count_strs = split_ws(fields[4]);
    if (count_strs.size() != 3)
      throw DataError(where() + ": expected 3 counts");
    entry.c_st = parse_double(count_strs[0]);
    entry.c_s = parse_double(count_strs[1]);
    entry.c_t = parse_double(count_strs[2]);
    std::string src = strip(fields[0]), tgt = strip(fields[1]);
    if (src.empty() || tgt.empty()) throw DataError(where() + ": empty phrase");
    auto [it, inserted] = table.entries.emplace(std::make_pair(src, tgt), std::move(entry));
    if (!inserted) throw DataError(where() + ": duplicate entry '" + src + "' -> '" + tgt + "'");
  }
  if (!have_schema) throw DataError(path + ": missing '# features:' header");
  return table;
}

PhraseTable filter_phrase_table(const PhraseTable& table,
                                const std::vector<Sentence>& sentences) {
  std::size_t max_src_len = 0;
  for (const auto& [key, entry] : table.entries)
    max_src_len = std::max(max_src_len, split_ws(key.first).size());
  std::unordered_set<std::string> ngrams;
  for (const auto& s : sentences) {
    auto words = s.surfaces();
    for (std::size_t start = 0; start < words.size(); ++start) {
      std::string gram;
      for (std::size_t len = 1; len <= max_src_len && start + len <= words.size(); ++len) {
        if (len > 1) gram += ' ';
        gram += words[start + len - 1];
        ngrams.insert(gram);
      }
    }
  }
  PhraseTable out;
  out.schema = table.schema;
  for (const auto& [key, entry] : table.entries)
    if (ngrams.count(key.first)) out.entries.emplace(key, entry);
  return out;
}

}  // namespace dialectmt
