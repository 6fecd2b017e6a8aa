#include "dialectmt/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include <json.hpp>

#include "dialectmt/aligner.hpp"
#include "dialectmt/evaluation.hpp"
#include "dialectmt/morph.hpp"
#include "dialectmt/text_util.hpp"

namespace dialectmt {
namespace {

using nlohmann::json;

constexpr double kE = 2.718281828459045;

std::string fmt(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

ParallelCorpus reversed(const ParallelCorpus& c) {
    ParallelCorpus r;
    r.side_labels = {c.side_labels.second, c.side_labels.first};
    for (const auto& [s, t] : c.pairs) r.pairs.emplace_back(t, s);
    return r;
}

std::vector<Sentence> side(const ParallelCorpus& c, bool target) {
    std::vector<Sentence> out;
    out.reserve(c.size());
    for (const auto& [s, t] : c.pairs) out.push_back(target ? t : s);
    return out;
}

std::vector<Sentence> segment_all(const AnalyzerLexicon& lex, const std::vector<Sentence>& in) {
    std::vector<Sentence> out;
    out.reserve(in.size());
    for (const auto& s : in) out.push_back(segment_d3(lex, s));
    return out;
}

ParallelCorpus segment_pair(const AnalyzerLexicon& lex_s, const AnalyzerLexicon& lex_t,
                            const ParallelCorpus& raw) {
    ParallelCorpus seg;
    seg.side_labels = raw.side_labels;
    for (const auto& [s, t] : raw.pairs)
        seg.pairs.emplace_back(segment_d3(lex_s, s), segment_d3(lex_t, t));
    return seg;
}

// Symmetrized alignments from freshly trained models in both directions.
std::vector<AlignmentSet> align_with(const TranslationTable& fwd, const TranslationTable& rev,
                                     const ParallelCorpus& corpus) {
    std::vector<AlignmentSet> out;
    out.reserve(corpus.size());
    for (const auto& [s, t] : corpus.pairs) {
        AlignmentSet f = viterbi_align(fwd, s, t);
        AlignmentSet rv = viterbi_align(rev, t, s);
        AlignmentSet r;
        r.source_len = f.source_len;
        r.target_len = f.target_len;
        for (const auto& [j, i] : rv.links) r.links.insert({i, j});
        out.push_back(grow_diag_final(f, r));
    }
    return out;
}

struct DirectParts {
    ParallelCorpus seg;
    std::vector<AlignmentSet> alignments;
    PhraseTable table;
};

DirectParts build_direct_parts(const ParallelCorpus& raw, const AnalyzerLexicon& lex_s,
                               const AnalyzerLexicon& lex_t, int em_iterations, int max_len) {
    DirectParts parts;
    parts.seg = segment_pair(lex_s, lex_t, raw);
    TranslationTable fwd = train_ibm1(parts.seg, em_iterations);
    TranslationTable rev = train_ibm1(reversed(parts.seg), em_iterations);
    parts.alignments = align_with(fwd, rev, parts.seg);
    PhraseCounts counts;
    for (std::size_t i = 0; i < parts.seg.size(); ++i)
        counts.add_all(extract_phrases(parts.seg.pairs[i].first, parts.seg.pairs[i].second,
                                       parts.alignments[i], max_len));
    parts.table = score_phrase_table(counts, fwd, rev);
    return parts;
}

// Stage runner bound to one config; loads everything lazily and records the
// data classes it touches.
struct Builder {
    const SystemConfig& cfg;
    DataTracker* tracker;
    AnalyzerLexicon lex_src, lex_tgt;

    Builder(const SystemConfig& c, DataTracker* t) : cfg(c), tracker(t) {
        if (!cfg.lexicon_src.empty()) lex_src = AnalyzerLexicon::load(cfg.lexicon_src);
        if (!cfg.lexicon_tgt.empty()) lex_tgt = AnalyzerLexicon::load(cfg.lexicon_tgt);
    }

    void note(DataClass c) {
        if (tracker) tracker->note(c);
    }
    bool persist() const { return !cfg.output_dir.empty(); }
    std::string artifact(const std::string& name) const { return cfg.output_dir + "/" + name; }

    ParallelCorpus require_pair(const std::string& a, const std::string& b, DataClass cls,
                                const char* fields) const {
        if (a.empty() || b.empty())
            throw DataError(std::string("system '") + to_string(cfg.kind) + "' requires " +
                            to_string(cls) + " training data: set " + fields);
        return load_parallel(a, b, cfg.normalize);
    }

    ParallelCorpus load_train() {
        auto c = require_pair(cfg.train_src, cfg.train_tgt, DataClass::parallel,
                              "train_src and train_tgt");
        note(DataClass::parallel);
        return c;
    }

    std::pair<ParallelCorpus, ParallelCorpus> load_pivot_pairs() {
        auto sp = require_pair(cfg.pivot_sp_src, cfg.pivot_sp_piv, DataClass::pivot,
                               "pivot_sp_src and pivot_sp_piv");
        auto pt = require_pair(cfg.pivot_pt_piv, cfg.pivot_pt_tgt, DataClass::pivot,
                               "pivot_pt_piv and pivot_pt_tgt");
        note(DataClass::pivot);
        return {std::move(sp), std::move(pt)};
    }

    std::pair<std::vector<Sentence>, std::vector<Sentence>> load_mono() {
        if (cfg.mono_src.empty() && cfg.mono_tgt.empty())
            throw DataError(std::string("system '") + to_string(cfg.kind) + "' requires " +
                            "monolingual training data: set mono_src and/or mono_tgt");
        std::vector<Sentence> ms, mt;
        for (const auto& p : cfg.mono_src)
            for (auto& s : load_sentences(p, cfg.normalize)) ms.push_back(std::move(s));
        for (const auto& p : cfg.mono_tgt)
            for (auto& s : load_sentences(p, cfg.normalize)) mt.push_back(std::move(s));
        note(DataClass::monolingual);
        return {std::move(ms), std::move(mt)};
    }

    DirectParts direct_parts(const ParallelCorpus& raw, bool reversed_sides,
                             const std::string& name) {
        DirectParts parts =
            build_direct_parts(raw, reversed_sides ? lex_tgt : lex_src,
                               reversed_sides ? lex_src : lex_tgt, cfg.em_iterations,
                               cfg.max_phrase_len);
        if (persist()) {
            write_alignments(artifact(name + ".align"), parts.alignments);
            write_phrase_table(artifact(name + ".table"), parts.table);
        }
        return parts;
    }

    // Triangulated table through the bridge; forward builds source->target,
    // reverse target->source.
    PhraseTable pivot_table(const ParallelCorpus& sp_raw, const ParallelCorpus& pt_raw,
                            bool reverse, const std::string& name) {
        AnalyzerLexicon none;
        PhraseTable first, second;
        if (!reverse) {
            first = build_direct_parts(sp_raw, lex_src, none, cfg.em_iterations,
                                       cfg.max_phrase_len)
                        .table;
            second = build_direct_parts(pt_raw, none, lex_tgt, cfg.em_iterations,
                                        cfg.max_phrase_len)
                         .table;
        } else {
            first = build_direct_parts(reversed(pt_raw), lex_tgt, none, cfg.em_iterations,
                                       cfg.max_phrase_len)
                        .table;
            second = build_direct_parts(reversed(sp_raw), none, lex_src, cfg.em_iterations,
                                        cfg.max_phrase_len)
                         .table;
        }
        PhraseTable tri =
            triangulate(first, second, cfg.pivot_combine, cfg.connectivity_epsilon);
        if (persist()) write_phrase_table(artifact(name + ".table"), tri);
        return tri;
    }

    PhraseTable morph_annotated(const PhraseTable& pivot, const DirectParts& direct) {
        AnalyzerLexicon merged = lex_src;
        merged.merge(lex_tgt);
        std::vector<Sentence> src_side = side(direct.seg, false);
        std::vector<Sentence> tgt_side = side(direct.seg, true);
        TypePropertyInventory inventory =
            build_property_inventory({&src_side, &tgt_side}, merged);
        PropertyDistribution dist =
            estimate_property_distributions(direct.seg, direct.alignments, merged);
        PhraseTable annotated = annotate_phrase_table(pivot, inventory, dist);
        if (persist()) write_phrase_table(artifact("pivot_morph.table"), annotated);
        return annotated;
    }
};

NGramLM lm_over(const std::vector<Sentence>& sentences, int order) {
    return train_lm(sentences, order);
}

void finish_system(TrainedSystem& sys, const SystemConfig& cfg, const Builder& b) {
    sys.decoder_options.distortion_limit = cfg.distortion_limit;
    sys.decoder_options.stack_size = cfg.stack_size;
    sys.weights = default_weights(sys.table_ptrs());
    if (cfg.tune && sys.translates && !cfg.tune_src.empty() && !cfg.tune_tgt.empty()) {
        ParallelCorpus tune_set = load_parallel(cfg.tune_src, cfg.tune_tgt, cfg.normalize);
        sys.weights =
            tune_weights(sys, tune_set, cfg.tune_restarts, cfg.tune_iterations, cfg.seed);
    }
    if (!cfg.output_dir.empty() && sys.translates) {
        std::filesystem::create_directories(cfg.output_dir);
        write_weights(b.artifact("weights.tsv"), sys.weights);
        write_arpa(b.artifact("lm.arpa"), sys.lm);
    }
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

const std::vector<double>& tuning_grid() {
    static const std::vector<double> g = {-2,   -1,  -0.5, -0.3, -0.2, -0.1, 0,
                                          0.1,  0.2, 0.3,  0.5,  1,    2};
    return g;
}

struct TuneObjective {
    double corpus = -1.0;
    double mean_sentence = -1.0;
};

bool objective_better(const TuneObjective& a, const TuneObjective& b) {
    if (a.corpus != b.corpus) return a.corpus > b.corpus;
    return a.mean_sentence > b.mean_sentence;
}

}  // namespace

SystemKind system_kind_from_string(std::string_view s) {
    if (s == "no_translation") return SystemKind::no_translation;
    if (s == "direct") return SystemKind::direct;
    if (s == "synthetic") return SystemKind::synthetic;
    if (s == "phrase_pivot") return SystemKind::phrase_pivot;
    if (s == "dir_pp") return SystemKind::dir_pp;
    if (s == "dir_pp_morph") return SystemKind::dir_pp_morph;
    if (s == "synthetic_dir_pp") return SystemKind::synthetic_dir_pp;
    throw DataError("unknown system kind '" + std::string(s) + "'");
}

const char* to_string(SystemKind k) {
    switch (k) {
        case SystemKind::no_translation: return "no_translation";
        case SystemKind::direct: return "direct";
        case SystemKind::synthetic: return "synthetic";
        case SystemKind::phrase_pivot: return "phrase_pivot";
        case SystemKind::dir_pp: return "dir_pp";
        case SystemKind::dir_pp_morph: return "dir_pp_morph";
        case SystemKind::synthetic_dir_pp: return "synthetic_dir_pp";
    }
    return "?";
}

const char* to_string(DataClass c) {
    switch (c) {
        case DataClass::parallel: return "parallel";
        case DataClass::monolingual: return "monolingual";
        case DataClass::pivot: return "pivot";
    }
    return "?";
}

std::set<DataClass> required_data(SystemKind kind) {
    switch (kind) {
        case SystemKind::no_translation: return {};
        case SystemKind::direct: return {DataClass::parallel};
        case SystemKind::synthetic: return {DataClass::parallel, DataClass::monolingual};
        case SystemKind::phrase_pivot: return {DataClass::pivot};
        case SystemKind::dir_pp:
        case SystemKind::dir_pp_morph: return {DataClass::parallel, DataClass::pivot};
        case SystemKind::synthetic_dir_pp:
            return {DataClass::parallel, DataClass::monolingual, DataClass::pivot};
    }
    return {};
}

SystemConfig SystemConfig::from_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open config: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_text(text, path);
}

SystemConfig SystemConfig::from_json_text(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(origin + ": bad JSON: " + e.what());
    }
    if (!j.is_object()) throw DataError(origin + ": config must be a JSON object");

    SystemConfig cfg;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "system") cfg.kind = system_kind_from_string(value.get<std::string>());
            else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
            else if (key == "output_dir") cfg.output_dir = value.get<std::string>();
            else if (key == "train_src") cfg.train_src = value.get<std::string>();
            else if (key == "train_tgt") cfg.train_tgt = value.get<std::string>();
            else if (key == "tune_src") cfg.tune_src = value.get<std::string>();
            else if (key == "tune_tgt") cfg.tune_tgt = value.get<std::string>();
            else if (key == "dev_src") cfg.dev_src = value.get<std::string>();
            else if (key == "dev_tgt") cfg.dev_tgt = value.get<std::string>();
            else if (key == "test_src") cfg.test_src = value.get<std::string>();
            else if (key == "test_tgt") cfg.test_tgt = value.get<std::string>();
            else if (key == "mono_src") cfg.mono_src = value.get<std::vector<std::string>>();
            else if (key == "mono_tgt") cfg.mono_tgt = value.get<std::vector<std::string>>();
            else if (key == "pivot_sp_src") cfg.pivot_sp_src = value.get<std::string>();
            else if (key == "pivot_sp_piv") cfg.pivot_sp_piv = value.get<std::string>();
            else if (key == "pivot_pt_piv") cfg.pivot_pt_piv = value.get<std::string>();
            else if (key == "pivot_pt_tgt") cfg.pivot_pt_tgt = value.get<std::string>();
            else if (key == "lexicon_src") cfg.lexicon_src = value.get<std::string>();
            else if (key == "lexicon_tgt") cfg.lexicon_tgt = value.get<std::string>();
            else if (key == "lm_order") cfg.lm_order = value.get<int>();
            else if (key == "max_phrase_len") cfg.max_phrase_len = value.get<int>();
            else if (key == "em_iterations") cfg.em_iterations = value.get<int>();
            else if (key == "distortion_limit") cfg.distortion_limit = value.get<int>();
            else if (key == "stack_size") cfg.stack_size = value.get<int>();
            else if (key == "connectivity_epsilon")
                cfg.connectivity_epsilon = value.get<double>();
            else if (key == "pivot_combine")
                cfg.pivot_combine = pivot_combine_from_string(value.get<std::string>());
            else if (key == "tune") cfg.tune = value.get<bool>();
            else if (key == "tune_restarts") cfg.tune_restarts = value.get<int>();
            else if (key == "tune_iterations") cfg.tune_iterations = value.get<int>();
            else if (key == "normalize") cfg.normalize = value.get<bool>();
            else throw DataError(origin + ": unknown config key '" + key + "'");
        }
    } catch (const json::type_error& e) {
        throw DataError(origin + ": bad config value: " + e.what());
    }
    return cfg;
}

std::string SystemConfig::to_json_text() const {
    json j;
    j["system"] = to_string(kind);
    j["seed"] = seed;
    j["output_dir"] = output_dir;
    j["train_src"] = train_src;
    j["train_tgt"] = train_tgt;
    j["tune_src"] = tune_src;
    j["tune_tgt"] = tune_tgt;
    j["dev_src"] = dev_src;
    j["dev_tgt"] = dev_tgt;
    j["test_src"] = test_src;
    j["test_tgt"] = test_tgt;
    j["mono_src"] = mono_src;
    j["mono_tgt"] = mono_tgt;
    j["pivot_sp_src"] = pivot_sp_src;
    j["pivot_sp_piv"] = pivot_sp_piv;
    j["pivot_pt_piv"] = pivot_pt_piv;
    j["pivot_pt_tgt"] = pivot_pt_tgt;
    j["lexicon_src"] = lexicon_src;
    j["lexicon_tgt"] = lexicon_tgt;
    j["lm_order"] = lm_order;
    j["max_phrase_len"] = max_phrase_len;
    j["em_iterations"] = em_iterations;
    j["distortion_limit"] = distortion_limit;
    j["stack_size"] = stack_size;
    j["connectivity_epsilon"] = connectivity_epsilon;
    j["pivot_combine"] = to_string(pivot_combine);
    j["tune"] = tune;
    j["tune_restarts"] = tune_restarts;
    j["tune_iterations"] = tune_iterations;
    j["normalize"] = normalize;
    return j.dump();
}

std::vector<const PhraseTable*> TrainedSystem::table_ptrs() const {
    std::vector<const PhraseTable*> out;
    for (const auto& t : tables) out.push_back(&t);
    return out;
}

std::unordered_set<std::string> TrainedSystem::source_vocabulary() const {
    std::unordered_set<std::string> vocab;
    for (const auto& t : tables)
        for (const auto& [key, entry] : t.entries)
            for (const auto& tok : split_ws(key.first)) vocab.insert(std::string(tok));
    return vocab;
}

PhraseTable combine_fill_up(const PhraseTable& primary, const PhraseTable& secondary) {
    if (primary.has_feature("provenance") || secondary.has_feature("provenance"))
        throw DataError("table already carries a provenance feature");

    PhraseTable out;
    out.schema = primary.schema;
    for (const auto& f : secondary.schema)
        if (std::find(out.schema.begin(), out.schema.end(), f) == out.schema.end())
            out.schema.push_back(f);
    out.schema.push_back("provenance");

    auto map_entry = [&](const PhraseTable& from, const PhraseTableEntry& e, double provenance) {
        PhraseTableEntry n;
        n.features.assign(out.schema.size(), 1.0);
        for (std::size_t k = 0; k + 1 < out.schema.size(); ++k) {
            if (from.has_feature(out.schema[k]))
                n.features[k] = e.features[from.feature_index(out.schema[k])];
        }
        n.features.back() = provenance;
        n.alignment = e.alignment;
        n.c_st = e.c_st;
        n.c_s = e.c_s;
        n.c_t = e.c_t;
        return n;
    };

    std::set<std::string> primary_sources;
    for (const auto& [key, e] : primary.entries) {
        primary_sources.insert(key.first);
        out.entries.emplace(key, map_entry(primary, e, 1.0));
    }
    for (const auto& [key, e] : secondary.entries)
        if (!primary_sources.count(key.first))
            out.entries.emplace(key, map_entry(secondary, e, kE));
    return out;
}

TrainedSystem run_system(const SystemConfig& config, DataTracker* tracker) {
    Builder b(config, tracker);
    if (!config.output_dir.empty()) std::filesystem::create_directories(config.output_dir);

    TrainedSystem sys;
    sys.kind = config.kind;
    sys.lexicon_src = b.lex_src;
    sys.lexicon_tgt = b.lex_tgt;

    switch (config.kind) {
        case SystemKind::no_translation: {
            sys.translates = false;
            break;
        }
        case SystemKind::direct: {
            ParallelCorpus train = b.load_train();
            DirectParts parts = b.direct_parts(train, false, "direct");
            sys.tables = {std::move(parts.table)};
            sys.lm = lm_over(side(parts.seg, true), config.lm_order);
            sys.translates = true;
            break;
        }
        case SystemKind::phrase_pivot: {
            auto [sp, pt] = b.load_pivot_pairs();
            sys.tables = {b.pivot_table(sp, pt, false, "pivot")};
            sys.lm = lm_over(segment_all(b.lex_tgt, side(pt, true)), config.lm_order);
            sys.translates = true;
            break;
        }
        case SystemKind::dir_pp:
        case SystemKind::dir_pp_morph: {
            ParallelCorpus train = b.load_train();
            DirectParts parts = b.direct_parts(train, false, "direct");
            auto [sp, pt] = b.load_pivot_pairs();
            PhraseTable pivot = b.pivot_table(sp, pt, false, "pivot");
            if (config.kind == SystemKind::dir_pp_morph)
                pivot = b.morph_annotated(pivot, parts);
            PhraseTable combined = combine_fill_up(parts.table, pivot);
            if (b.persist()) write_phrase_table(b.artifact("combined.table"), combined);
            sys.tables = {std::move(combined)};
            sys.lm = lm_over(side(parts.seg, true), config.lm_order);
            sys.translates = true;
            break;
        }
        case SystemKind::synthetic:
        case SystemKind::synthetic_dir_pp: {
            ParallelCorpus base = b.load_train();
            auto [mono_s, mono_t] = b.load_mono();

            TrainedSystem fwd, inv;
            fwd.translates = inv.translates = true;
            fwd.lexicon_src = b.lex_src;
            fwd.lexicon_tgt = b.lex_tgt;
            inv.lexicon_src = b.lex_tgt;
            inv.lexicon_tgt = b.lex_src;
            fwd.decoder_options.distortion_limit = config.distortion_limit;
            fwd.decoder_options.stack_size = config.stack_size;
            inv.decoder_options = fwd.decoder_options;

            DirectParts fparts = b.direct_parts(base, false, "fabricator_fwd");
            DirectParts iparts = b.direct_parts(reversed(base), true, "fabricator_inv");
            if (config.kind == SystemKind::synthetic) {
                fwd.tables = {std::move(fparts.table)};
                inv.tables = {std::move(iparts.table)};
            } else {
                auto [sp, pt] = b.load_pivot_pairs();
                fwd.tables = {
                    combine_fill_up(fparts.table, b.pivot_table(sp, pt, false, "pivot_fwd"))};
                inv.tables = {
                    combine_fill_up(iparts.table, b.pivot_table(sp, pt, true, "pivot_inv"))};
            }
            fwd.lm = lm_over(side(fparts.seg, true), config.lm_order);
            inv.lm = lm_over(side(fparts.seg, false), config.lm_order);
            fwd.weights = default_weights(fwd.table_ptrs());
            inv.weights = default_weights(inv.table_ptrs());

            ParallelCorpus synth = synthesize_parallel(fwd, inv, mono_s, mono_t, base);
            if (b.persist())
                write_parallel(b.artifact("synthetic.src"), b.artifact("synthetic.tgt"), synth);

            DirectParts parts = b.direct_parts(synth, false, "synthetic");
            sys.tables = {std::move(parts.table)};
            sys.lm = lm_over(side(parts.seg, true), config.lm_order);
            sys.translates = true;
            break;
        }
    }

    finish_system(sys, config, b);
    return sys;
}

std::vector<Sentence> translate_corpus(const TrainedSystem& system,
                                       const std::vector<Sentence>& raw_source) {
    return translate_corpus(system, raw_source, system.weights);
}

std::vector<Sentence> translate_corpus(const TrainedSystem& system,
                                       const std::vector<Sentence>& raw_source,
                                       const LogLinearWeights& weights) {
    if (!system.translates) return raw_source;
    std::vector<const PhraseTable*> tables = system.table_ptrs();
    std::vector<Sentence> out;
    out.reserve(raw_source.size());
    for (const auto& raw : raw_source) {
        Sentence seg = segment_d3(system.lexicon_src, raw);
        Sentence dec = decode(seg, tables, system.lm, weights, system.decoder_options);
        // A copied-through clitic at the edge would dangle; strip its marker.
        if (!dec.tokens.empty() && dec.tokens.front().is_clitic_suffix())
            dec.tokens.front() = Token(dec.tokens.front().stripped());
        if (!dec.tokens.empty() && dec.tokens.back().is_clitic_prefix())
            dec.tokens.back() = Token(dec.tokens.back().stripped());
        out.push_back(detokenize(dec));
    }
    return out;
}

ParallelCorpus synthesize_parallel(const TrainedSystem& fwd, const TrainedSystem& inv,
                                   const std::vector<Sentence>& mono_src,
                                   const std::vector<Sentence>& mono_tgt,
                                   const ParallelCorpus& base) {
    ParallelCorpus out = base;
    std::vector<Sentence> fwd_out = translate_corpus(fwd, mono_src);
    for (std::size_t i = 0; i < mono_src.size(); ++i)
        out.pairs.emplace_back(mono_src[i], fwd_out[i]);
    std::vector<Sentence> inv_out = translate_corpus(inv, mono_tgt);
    for (std::size_t i = 0; i < mono_tgt.size(); ++i)
        out.pairs.emplace_back(inv_out[i], mono_tgt[i]);
    return out;
}

LogLinearWeights tune_weights(const TrainedSystem& system, const ParallelCorpus& tune_set,
                              int restarts, int iterations, std::uint64_t seed) {
    if (tune_set.empty()) throw DataError("cannot tune on an empty tune set");
    if (restarts < 1) throw DataError("tuning needs at least one restart");
    if (iterations < 1) throw DataError("tuning needs at least one iteration");
    if (!system.translates) return system.weights;

    std::vector<Sentence> srcs = side(tune_set, false);
    std::vector<Sentence> refs = side(tune_set, true);

    auto evaluate = [&](const LogLinearWeights& w) {
        std::vector<Sentence> hyps = translate_corpus(system, srcs, w);
        TuneObjective obj;
        obj.corpus = bleu(hyps, refs).score;
        double sum = 0.0;
        for (std::size_t i = 0; i < hyps.size(); ++i)
            sum += smoothed_sentence_bleu(hyps[i], refs[i]);
        obj.mean_sentence = sum / static_cast<double>(hyps.size());
        return obj;
    };

    const std::vector<double>& grid = tuning_grid();
    std::vector<std::string> names;
    for (const auto& [name, v] : system.weights.values) names.push_back(name);

    std::mt19937_64 rng(seed);
    LogLinearWeights best;
    TuneObjective best_obj;
    for (int r = 0; r < restarts; ++r) {
        LogLinearWeights w = system.weights;
        if (r > 0)
            for (const auto& name : names) w.set(name, grid[rng() % grid.size()]);
        TuneObjective obj = evaluate(w);
        for (int it = 0; it < iterations; ++it) {
            for (const auto& name : names) {
                for (double g : grid) {
                    if (g == w.get(name)) continue;
                    LogLinearWeights cand = w;
                    cand.set(name, g);
                    TuneObjective cobj = evaluate(cand);
                    if (objective_better(cobj, obj)) {
                        w = std::move(cand);
                        obj = cobj;
                    }
                }
            }
        }
        if (r == 0 || objective_better(obj, best_obj)) {
            best = std::move(w);
            best_obj = obj;
        }
    }
    return best;
}

SystemScore evaluate_system(const TrainedSystem& system, const SystemConfig& config) {
    if (config.dev_src.empty() || config.dev_tgt.empty() || config.test_src.empty() ||
        config.test_tgt.empty())
        throw DataError("evaluation requires dev_src, dev_tgt, test_src and test_tgt");

    ParallelCorpus dev = load_parallel(config.dev_src, config.dev_tgt, config.normalize);
    ParallelCorpus test = load_parallel(config.test_src, config.test_tgt, config.normalize);

    SystemScore score;
    score.model = to_string(system.kind);
    score.has_oov = system.translates;

    auto run_split = [&](const ParallelCorpus& split, double& bleu_out, double& oov_out) {
        std::vector<Sentence> srcs = side(split, false);
        std::vector<Sentence> refs = side(split, true);
        bleu_out = bleu(translate_corpus(system, srcs), refs).score;
        if (system.translates)
            oov_out = oov_rate(segment_all(system.lexicon_src, srcs),
                               system.source_vocabulary());
    };
    run_split(dev, score.dev_bleu, score.dev_oov);
    run_split(test, score.test_bleu, score.test_oov);
    return score;
}

std::string render_report(const std::vector<SystemScore>& rows, const std::string& hash,
                          std::uint64_t seed) {
    std::string out = "# config_hash=" + hash + " seed=" + std::to_string(seed) + "\n";
    out += "Model\tDev\tDev OOV\tTest\tTest OOV\n";
    for (const auto& r : rows) {
        out += r.model + "\t" + fmt(r.dev_bleu, 2) + "\t" +
               (r.has_oov ? fmt(r.dev_oov, 1) : std::string("N/A")) + "\t" +
               fmt(r.test_bleu, 2) + "\t" +
               (r.has_oov ? fmt(r.test_oov, 1) : std::string("N/A")) + "\n";
    }
    return out;
}

void write_report(const std::string& path, const std::vector<SystemScore>& rows,
                  const std::string& hash, std::uint64_t seed) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << render_report(rows, hash, seed);
}

void write_scores_json(const std::string& path, const std::vector<SystemScore>& rows,
                       const std::string& hash, std::uint64_t seed) {
    json j;
    j["config_hash"] = hash;
    j["seed"] = seed;
    j["rows"] = json::array();
    for (const auto& r : rows) {
        json row;
        row["model"] = r.model;
        row["dev_bleu"] = r.dev_bleu;
        row["test_bleu"] = r.test_bleu;
        if (r.has_oov) {
            row["dev_oov"] = r.dev_oov;
            row["test_oov"] = r.test_oov;
        } else {
            row["dev_oov"] = nullptr;
            row["test_oov"] = nullptr;
        }
        j["rows"].push_back(std::move(row));
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    out << j.dump(2) << '\n';
}

std::vector<SystemScore> read_scores_json(const std::string& path, std::string* hash,
                                          std::uint64_t* seed) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open scores: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw DataError(path + ": bad JSON: " + e.what());
    }
    try {
        if (hash) *hash = j.at("config_hash").get<std::string>();
        if (seed) *seed = j.at("seed").get<std::uint64_t>();
        std::vector<SystemScore> rows;
        for (const auto& row : j.at("rows")) {
            SystemScore r;
            r.model = row.at("model").get<std::string>();
            r.dev_bleu = row.at("dev_bleu").get<double>();
            r.test_bleu = row.at("test_bleu").get<double>();
            r.has_oov = !row.at("dev_oov").is_null();
            if (r.has_oov) {
                r.dev_oov = row.at("dev_oov").get<double>();
                r.test_oov = row.at("test_oov").get<double>();
            }
            rows.push_back(std::move(r));
        }
        return rows;
    } catch (const json::exception& e) {
        throw DataError(path + ": bad scores file: " + e.what());
    }
}

std::string config_hash(const SystemConfig& config) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(config.to_json_text())));
    return buf;
}

std::vector<std::pair<std::string, double>> measure_consistency(const SystemConfig& config) {
    if (config.train_src.empty() || config.train_tgt.empty())
        throw DataError("consistency measurement requires train_src and train_tgt");
    AnalyzerLexicon merged;
    if (!config.lexicon_src.empty()) merged = AnalyzerLexicon::load(config.lexicon_src);
    if (!config.lexicon_tgt.empty()) merged.merge(AnalyzerLexicon::load(config.lexicon_tgt));

    ParallelCorpus raw = load_parallel(config.train_src, config.train_tgt, config.normalize);
    ParallelCorpus seg = segment_pair(merged, merged, raw);
    TranslationTable fwd = train_ibm1(seg, config.em_iterations);
    TranslationTable rev = train_ibm1(reversed(seg), config.em_iterations);
    std::vector<AlignmentSet> alignments = align_with(fwd, rev, seg);

    std::vector<std::pair<std::string, double>> out;
    for (const auto& feature : consistency_features(merged))
        out.emplace_back(feature, measure_feature_consistency(seg, alignments, merged, feature));
    return out;
}

}  // namespace dialectmt
