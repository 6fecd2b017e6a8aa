#include "dialectmt/analyzer.hpp"

#include <algorithm>
#include <fstream>
#include <tuple>

namespace dialectmt {

const char* to_string(Definiteness v) {
  switch (v) {
    case Definiteness::def: return "def";
    case Definiteness::indef: return "indef";
    case Definiteness::na: return "na";
  }
  return "na";
}

const char* to_string(Number v) {
  switch (v) {
    case Number::sg: return "sg";
    case Number::du: return "du";
    case Number::pl: return "pl";
    case Number::na: return "na";
  }
  return "na";
}

const char* to_string(Gender v) {
  switch (v) {
    case Gender::m: return "m";
    case Gender::f: return "f";
    case Gender::na: return "na";
  }
  return "na";
}

Definiteness definiteness_from_string(std::string_view s) {
  if (s == "def") return Definiteness::def;
  if (s == "indef") return Definiteness::indef;
  if (s == "na") return Definiteness::na;
  throw DataError("bad definiteness value '" + std::string(s) + "'");
}

Number number_from_string(std::string_view s) {
  if (s == "sg") return Number::sg;
  if (s == "du") return Number::du;
  if (s == "pl") return Number::pl;
  if (s == "na") return Number::na;
  throw DataError("bad number value '" + std::string(s) + "'");
}

Gender gender_from_string(std::string_view s) {
  if (s == "m") return Gender::m;
  if (s == "f") return Gender::f;
  if (s == "na") return Gender::na;
  throw DataError("bad gender value '" + std::string(s) + "'");
}

PropertySet PropertySet::null_token() {
  PropertySet p;
  p.pos = "<null>";
  return p;
}

std::string PropertySet::core_key() const {
  std::string out = to_string(definiteness);
  out += '|';
  out += to_string(number);
  out += '|';
  out += to_string(gender);
  out += '|';
  out += pos;
  return out;
}

bool PropertySet::operator==(const PropertySet& o) const {
  return definiteness == o.definiteness && number == o.number && gender == o.gender &&
         pos == o.pos && extended == o.extended;
}

bool PropertySet::operator<(const PropertySet& o) const {
  return std::tie(definiteness, number, gender, pos, extended) <
         std::tie(o.definiteness, o.number, o.gender, o.pos, o.extended);
}

std::string MorphAnalysis::concatenated() const {
  std::string out;
  for (const auto& seg : segments) out += seg.stripped();
  return out;
}

namespace {

// Descending frequency, ties toward the lexicographically smaller
// segmentation string so ranking is reproducible.
bool analysis_rank_less(const MorphAnalysis& a, const MorphAnalysis& b) {
  if (a.frequency != b.frequency) return a.frequency > b.frequency;
  std::string sa, sb;
  for (const auto& t : a.segments) {
    if (!sa.empty()) sa += ' ';
    sa += t.surface;
  }
  for (const auto& t : b.segments) {
    if (!sb.empty()) sb += ' ';
    sb += t.surface;
  }
  return sa < sb;
}

}  // namespace

void AnalyzerLexicon::add(const std::string& surface, MorphAnalysis analysis) {
  if (surface.empty()) throw DataError("lexicon surface form is empty");
  if (analysis.segments.empty())
    throw DataError("lexicon entry for '" + surface + "' has no segments");
  if (!opts_.allow_rewrites && analysis.concatenated() != surface)
    throw DataError("lexicon entry for '" + surface +
                    "' does not concatenate back to the surface form (got '" +
                    analysis.concatenated() + "')");
  auto& list = entries_[surface];
  list.push_back(std::move(analysis));
  std::stable_sort(list.begin(), list.end(), analysis_rank_less);
}

void AnalyzerLexicon::merge(const AnalyzerLexicon& other) {
  for (const auto& [surface, analyses] : other.entries())
    for (const auto& a : analyses) add(surface, a);
}

const std::vector<MorphAnalysis>* AnalyzerLexicon::find(const std::string& surface) const {
  auto it = entries_.find(surface);
  return it == entries_.end() ? nullptr : &it->second;
}

std::set<std::string> AnalyzerLexicon::extended_keys() const {
  std::set<std::string> keys;
  for (const auto& [surface, analyses] : entries_)
    for (const auto& a : analyses)
      for (const auto& [k, v] : a.properties.extended) keys.insert(k);
  return keys;
}

AnalyzerLexicon AnalyzerLexicon::load(const std::string& path) { return load(path, Options{}); }

AnalyzerLexicon AnalyzerLexicon::load(const std::string& path, Options opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open lexicon: " + path);
  AnalyzerLexicon lex(opts);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string body = strip(line);
    if (body.empty() || body[0] == '#') continue;
    auto cols = split_char(line, '\t');
    auto fail = [&](const std::string& what) -> DataError {
      return DataError(path + ": line " + std::to_string(lineno) + ": " + what);
    };
    if (cols.size() < 7) throw fail("expected at least 7 tab-separated fields");
    if (cols.size() > 8) throw fail("too many fields");
    std::string surface = normalize_text(cols[0]);
    if (surface.empty()) throw fail("empty surface form");
    if (surface.find(' ') != std::string::npos) throw fail("surface form contains whitespace");
    MorphAnalysis ma;
    try {
      for (auto& piece : split_ws(normalize_text(cols[1]))) ma.segments.emplace_back(std::move(piece));
      if (ma.segments.empty()) throw DataError("empty segmentation");
      ma.properties.definiteness = definiteness_from_string(strip(cols[2]));
      ma.properties.number = number_from_string(strip(cols[3]));
      ma.properties.gender = gender_from_string(strip(cols[4]));
      ma.properties.pos = strip(cols[5]);
      if (ma.properties.pos.empty()) throw DataError("empty pos label");
      long long freq = parse_int(strip(cols[6]));
      if (freq < 0) throw DataError("negative frequency");
      ma.frequency = static_cast<std::uint64_t>(freq);
      if (cols.size() == 8) {
        for (const auto& kv : split_char(cols[7], ';')) {
          std::string item = strip(kv);
          if (item.empty()) continue;
          auto eq = item.find('=');
          if (eq == std::string::npos || eq == 0)
            throw DataError("bad extended feature '" + item + "'");
          ma.properties.extended[item.substr(0, eq)] = item.substr(eq + 1);
        }
      }
      lex.add(surface, std::move(ma));
    } catch (const DataError& e) {
      throw fail(e.what());
    }
  }
  return lex;
}

std::vector<MorphAnalysis> analyze(const AnalyzerLexicon& lexicon, const Token& token) {
  if (const auto* found = lexicon.find(token.surface)) return *found;
  MorphAnalysis fallback;
  fallback.segments.push_back(token);
  return {fallback};
}

Sentence segment_d3(const AnalyzerLexicon& lexicon, const Sentence& sentence) {
  Sentence out;
  for (const auto& token : sentence.tokens) {
    const auto analyses = analyze(lexicon, token);
    for (const auto& seg : analyses.front().segments) out.tokens.push_back(seg);
  }
  return out;
}

Sentence detokenize(const Sentence& sentence) {
  const auto& toks = sentence.tokens;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks[i].is_clitic_prefix() && i + 1 == toks.size())
      throw DataError("dangling clitic prefix at position " + std::to_string(i));
    if (toks[i].is_clitic_suffix() && i == 0)
      throw DataError("dangling clitic suffix at position " + std::to_string(i));
  }
  Sentence out;
  std::string buffer;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    buffer += toks[i].stripped();
    bool join_next = toks[i].is_clitic_prefix() ||
                     (i + 1 < toks.size() && toks[i + 1].is_clitic_suffix());
    if (!join_next) {
      out.tokens.emplace_back(std::move(buffer));
      buffer.clear();
    }
  }
  return out;
}

}  // namespace dialectmt
