#include "dialectmt/toygen.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "dialectmt/aligner.hpp"
#include "dialectmt/analyzer.hpp"
#include "dialectmt/corpus.hpp"
#include "dialectmt/morph.hpp"
#include "dialectmt/text_util.hpp"

namespace dialectmt {
namespace {

using nlohmann::json;

// Affix inventory of one dialect.  Stems are CVCVC over the letter sets, so
// no stem starts with a vowel or with the conjunction letter; that keeps
// every inflected surface uniquely parseable and the lexicon unambiguous.
struct DialectShape {
    std::string consonants, vowels;
    std::string def_prefix;     // attached, unsegmented
    std::string fem_suffix;     // attached, unsegmented
    std::string plural_suffix;  // attached, unsegmented
    std::string object_suffix;  // enclitic, segmented off
    std::string conj_prefix;    // proclitic, segmented off
};

const DialectShape kSourceShape{"bdfgklmnrstz", "aiu", "il", "a", "een", "u", "w"};
const DialectShape kTargetShape{"bdgjklmnqrtz", "eio", "el", "e", "at", "o", "f"};

struct Lemma {
    std::string stem_src, stem_tgt, bridge;
    std::string pos_src, pos_tgt;
    Gender gen_src = Gender::na, gen_tgt = Gender::na;
    std::string asp_src, asp_tgt;  // verbs only
    bool heldout = false;
};

bool bern(std::mt19937_64& rng, double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return (rng() >> 11) * (1.0 / 9007199254740992.0) < p;
}

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return rng() % n; }

bool nominal(const std::string& pos) { return pos == "noun" || pos == "adj"; }

std::string make_stem(std::mt19937_64& rng, const DialectShape& d) {
    std::string s;
    for (int i = 0; i < 5; ++i) {
        const std::string& set = (i % 2 == 0) ? d.consonants : d.vowels;
        s += set[pick(rng, set.size())];
    }
    return s;
}

std::string make_bridge_word(std::mt19937_64& rng) {
    std::string s;
    for (int i = 0; i < 4; ++i) s += static_cast<char>('a' + pick(rng, 26));
    return s;
}

std::string draw_pos(std::mt19937_64& rng) {
    std::size_t r = pick(rng, 100);
    if (r < 45) return "noun";
    if (r < 75) return "verb";
    if (r < 90) return "adj";
    return "prep";
}

// One lemma occurrence on one side: raw surface plus its segmentation.
struct Piece {
    std::string raw;
    std::vector<std::string> segs;
    int core = 0;  // index of the stem-bearing segment
    int obj = -1;  // index of the object enclitic, if any
};

Piece realize(const Lemma& lm, const DialectShape& d, bool target_side, bool def, bool pl,
              bool obj, bool conj) {
    const std::string& pos = target_side ? lm.pos_tgt : lm.pos_src;
    Gender gen = target_side ? lm.gen_tgt : lm.gen_src;
    std::string core = target_side ? lm.stem_tgt : lm.stem_src;
    if (nominal(pos) && gen == Gender::f) core += d.fem_suffix;
    if (pos == "noun" && pl) core += d.plural_suffix;
    if (nominal(pos) && def) core = d.def_prefix + core;

    Piece p;
    p.raw = core;
    p.segs = {core};
    if (pos == "verb" && obj) {
        p.raw += d.object_suffix;
        p.segs.push_back("+" + d.object_suffix);
        p.obj = 1;
    }
    if (conj) {
        p.raw = d.conj_prefix + p.raw;
        p.segs.insert(p.segs.begin(), d.conj_prefix + "+");
        p.core = 1;
        if (p.obj >= 0) p.obj = 2;
    }
    return p;
}

PropertySet props_for(const Lemma& lm, bool target_side, bool def, bool pl) {
    const std::string& pos = target_side ? lm.pos_tgt : lm.pos_src;
    PropertySet ps;
    ps.pos = pos;
    if (nominal(pos)) {
        ps.definiteness = def ? Definiteness::def : Definiteness::indef;
        ps.gender = target_side ? lm.gen_tgt : lm.gen_src;
    }
    if (pos == "noun") ps.number = pl ? Number::pl : Number::sg;
    if (pos == "verb") ps.extended["aspect"] = target_side ? lm.asp_tgt : lm.asp_src;
    return ps;
}

// Feature draw for one sentence slot, source realization first, then the
// target realization with the planted keep probabilities applied.
struct Slot {
    const Lemma* lm = nullptr;
    bool conj = false;
    bool def_s = false, pl_s = false, obj_s = false;
    bool def_t = false, pl_t = false, obj_t = false;
};

Slot draw_slot(std::mt19937_64& rng, const Lemma& lm, const ToyParams& pr) {
    Slot s;
    s.lm = &lm;
    s.conj = bern(rng, pr.p_conj);
    s.def_s = nominal(lm.pos_src) && bern(rng, pr.p_definite);
    s.pl_s = lm.pos_src == "noun" && bern(rng, pr.p_plural);
    s.obj_s = lm.pos_src == "verb" && bern(rng, pr.p_object);

    if (nominal(lm.pos_tgt))
        s.def_t = nominal(lm.pos_src) ? (bern(rng, pr.keep_definiteness) ? s.def_s : !s.def_s)
                                      : bern(rng, pr.p_definite);
    if (lm.pos_tgt == "noun")
        s.pl_t = lm.pos_src == "noun" ? (bern(rng, pr.keep_number) ? s.pl_s : !s.pl_s)
                                      : bern(rng, pr.p_plural);
    if (lm.pos_tgt == "verb")
        s.obj_t = lm.pos_src == "verb" ? (bern(rng, pr.keep_object) ? s.obj_s : !s.obj_s)
                                       : bern(rng, pr.p_object);
    return s;
}

std::vector<std::string> bridge_tokens(std::mt19937_64& rng, const Lemma& lm, bool def, bool pl,
                                       bool obj, bool conj, double mark_rate) {
    std::vector<std::string> out;
    if (conj) out.push_back("and");
    if (def && bern(rng, mark_rate)) out.push_back("the");
    out.push_back(pl && bern(rng, mark_rate) ? lm.bridge + "s" : lm.bridge);
    if (obj && bern(rng, mark_rate)) out.push_back("it");
    return out;
}

struct BuiltPair {
    std::vector<std::string> src_raw, tgt_raw;
    std::vector<std::string> src_seg, tgt_seg;
    std::set<std::pair<int, int>> gold;
};

BuiltPair build_pair(const std::vector<Slot>& slots) {
    BuiltPair bp;
    for (const Slot& s : slots) {
        Piece a = realize(*s.lm, kSourceShape, false, s.def_s, s.pl_s, s.obj_s, s.conj);
        Piece b = realize(*s.lm, kTargetShape, true, s.def_t, s.pl_t, s.obj_t, s.conj);
        int off_a = static_cast<int>(bp.src_seg.size());
        int off_b = static_cast<int>(bp.tgt_seg.size());
        bp.gold.insert({off_a + a.core, off_b + b.core});
        if (s.conj) bp.gold.insert({off_a, off_b});
        if (a.obj >= 0 && b.obj >= 0) bp.gold.insert({off_a + a.obj, off_b + b.obj});
        bp.src_raw.push_back(a.raw);
        bp.tgt_raw.push_back(b.raw);
        bp.src_seg.insert(bp.src_seg.end(), a.segs.begin(), a.segs.end());
        bp.tgt_seg.insert(bp.tgt_seg.end(), b.segs.begin(), b.segs.end());
    }
    return bp;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    for (const auto& l : lines) out << l << '\n';
}

std::string join_raw(const std::vector<std::string>& toks) { return join(toks, " "); }

}  // namespace

ToyMeta generate_toy_data(const ToyParams& params) {
    if (params.out_dir.empty()) throw DataError("toy generator needs an output directory");
    if (params.vocab_size < 20) throw DataError("toy vocabulary must have at least 20 lemmas");
    if (params.n_heldout < 0 || params.n_heldout >= params.vocab_size / 2)
        throw DataError("held-out lemma count must be below half the vocabulary");
    if (params.min_len < 1 || params.max_len < params.min_len)
        throw DataError("bad toy sentence length bounds");

    std::mt19937_64 rng(params.seed);

    // Lemma table.  Stems and bridge words are unique per side.
    std::vector<Lemma> lemmas(params.vocab_size);
    std::set<std::string> seen_src, seen_tgt, seen_bridge{"the", "and", "it"};
    for (auto& lm : lemmas) {
        do lm.stem_src = make_stem(rng, kSourceShape);
        while (!seen_src.insert(lm.stem_src).second);
        do lm.stem_tgt = make_stem(rng, kTargetShape);
        while (!seen_tgt.insert(lm.stem_tgt).second);
        do lm.bridge = make_bridge_word(rng);
        while (!seen_bridge.insert(lm.bridge).second);

        lm.pos_src = draw_pos(rng);
        if (bern(rng, params.keep_pos)) {
            lm.pos_tgt = lm.pos_src;
        } else {
            std::vector<std::string> others;
            for (const char* p : {"noun", "verb", "adj", "prep"})
                if (p != lm.pos_src) others.push_back(p);
            lm.pos_tgt = others[pick(rng, others.size())];
        }
        if (nominal(lm.pos_src)) lm.gen_src = bern(rng, 0.5) ? Gender::f : Gender::m;
        if (nominal(lm.pos_tgt))
            lm.gen_tgt = nominal(lm.pos_src)
                             ? (bern(rng, params.keep_gender)
                                    ? lm.gen_src
                                    : (lm.gen_src == Gender::f ? Gender::m : Gender::f))
                             : (bern(rng, 0.5) ? Gender::f : Gender::m);
        if (lm.pos_src == "verb") lm.asp_src = bern(rng, 0.5) ? "perf" : "imperf";
        if (lm.pos_tgt == "verb")
            lm.asp_tgt = lm.pos_src == "verb"
                             ? (bern(rng, params.keep_aspect) ? lm.asp_src
                                                              : (lm.asp_src == "perf" ? "imperf"
                                                                                      : "perf"))
                             : (bern(rng, 0.5) ? "perf" : "imperf");
    }

    // Held-out choice mirrors the corpus splitter's shuffle.
    std::vector<std::size_t> order(lemmas.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[rng() % i]);
    std::vector<const Lemma*> regular, heldout;
    for (std::size_t k = 0; k < order.size(); ++k) {
        Lemma& lm = lemmas[order[k]];
        lm.heldout = k < static_cast<std::size_t>(params.n_heldout);
        (lm.heldout ? heldout : regular).push_back(&lm);
    }

    // Lexicons: every reachable surface variant of every lemma, both sides.
    AnalyzerLexicon lex_src, lex_tgt;
    std::vector<std::string> lines_src, lines_tgt;
    auto emit = [](AnalyzerLexicon& lex, std::vector<std::string>& lines, const Lemma& lm,
                   const DialectShape& shape, bool target_side) {
        const std::string& pos = target_side ? lm.pos_tgt : lm.pos_src;
        for (int def = 0; def <= (nominal(pos) ? 1 : 0); ++def)
            for (int pl = 0; pl <= (pos == "noun" ? 1 : 0); ++pl)
                for (int obj = 0; obj <= (pos == "verb" ? 1 : 0); ++obj)
                    for (int conj = 0; conj <= 1; ++conj) {
                        Piece p = realize(lm, shape, target_side, def, pl, obj, conj);
                        PropertySet ps = props_for(lm, target_side, def, pl);
                        MorphAnalysis ma;
                        for (const auto& s : p.segs) ma.segments.emplace_back(s);
                        ma.properties = ps;
                        ma.frequency = conj ? 40 : 100;
                        lex.add(p.raw, ma);
                        std::string ext;
                        for (const auto& [k, v] : ps.extended)
                            ext += (ext.empty() ? "" : ";") + k + "=" + v;
                        std::string line = p.raw + "\t" + join(p.segs, " ") + "\t" +
                                           to_string(ps.definiteness) + "\t" +
                                           to_string(ps.number) + "\t" + to_string(ps.gender) +
                                           "\t" + ps.pos + "\t" +
                                           std::to_string(ma.frequency);
                        if (!ext.empty()) line += "\t" + ext;
                        lines.push_back(line);
                    }
    };
    for (const Lemma& lm : lemmas) {
        emit(lex_src, lines_src, lm, kSourceShape, false);
        emit(lex_tgt, lines_tgt, lm, kTargetShape, true);
    }
    std::sort(lines_src.begin(), lines_src.end());
    std::sort(lines_tgt.begin(), lines_tgt.end());

    auto draw_lemma = [&](double heldout_rate) -> const Lemma* {
        if (!heldout.empty() && bern(rng, heldout_rate)) return heldout[pick(rng, heldout.size())];
        return regular[pick(rng, regular.size())];
    };
    auto draw_len = [&]() {
        return params.min_len +
               static_cast<int>(pick(rng, params.max_len - params.min_len + 1));
    };

    auto build_split = [&](int n, double heldout_rate, std::vector<std::string>& src_lines,
                           std::vector<std::string>& tgt_lines,
                           std::vector<BuiltPair>* keep = nullptr) {
        for (int i = 0; i < n; ++i) {
            std::vector<Slot> slots;
            int len = draw_len();
            for (int k = 0; k < len; ++k) slots.push_back(draw_slot(rng, *draw_lemma(heldout_rate), params));
            BuiltPair bp = build_pair(slots);
            src_lines.push_back(join_raw(bp.src_raw));
            tgt_lines.push_back(join_raw(bp.tgt_raw));
            if (keep) keep->push_back(std::move(bp));
        }
    };

    std::vector<BuiltPair> train_pairs;
    std::vector<std::string> train_src, train_tgt, tune_src, tune_tgt, dev_src, dev_tgt,
        test_src, test_tgt;
    build_split(params.n_train, 0.0, train_src, train_tgt, &train_pairs);
    build_split(params.n_tune, 0.0, tune_src, tune_tgt);
    build_split(params.n_dev, params.heldout_rate, dev_src, dev_tgt);
    build_split(params.n_test, params.heldout_rate, test_src, test_tgt);

    // Bridge corpora.  The source-bridge side realizes source-dialect
    // features; the bridge-target side draws fresh features, so the two
    // corpora are independent texts that only share the bridge vocabulary.
    std::vector<std::string> sp_src, sp_piv, pt_piv, pt_tgt;
    std::set<const Lemma*> covered_sp, covered_pt;
    auto build_sp_sentence = [&](const std::vector<const Lemma*>& forced) {
        std::vector<std::string> a_toks;
        std::vector<std::string> p_toks;
        int len = std::max(draw_len(), static_cast<int>(forced.size()));
        for (int k = 0; k < len; ++k) {
            const Lemma* lm = k < static_cast<int>(forced.size())
                                  ? forced[k]
                                  : draw_lemma(params.pivot_heldout_rate);
            covered_sp.insert(lm);
            bool conj = bern(rng, params.p_conj);
            bool def = nominal(lm->pos_src) && bern(rng, params.p_definite);
            bool pl = lm->pos_src == "noun" && bern(rng, params.p_plural);
            bool obj = lm->pos_src == "verb" && bern(rng, params.p_object);
            a_toks.push_back(realize(*lm, kSourceShape, false, def, pl, obj, conj).raw);
            for (auto& t : bridge_tokens(rng, *lm, def, pl, obj, conj, params.bridge_mark_rate))
                p_toks.push_back(std::move(t));
        }
        sp_src.push_back(join_raw(a_toks));
        sp_piv.push_back(join_raw(p_toks));
    };
    auto build_pt_sentence = [&](const std::vector<const Lemma*>& forced) {
        std::vector<std::string> p_toks;
        std::vector<std::string> b_toks;
        int len = std::max(draw_len(), static_cast<int>(forced.size()));
        for (int k = 0; k < len; ++k) {
            const Lemma* lm = k < static_cast<int>(forced.size())
                                  ? forced[k]
                                  : draw_lemma(params.pivot_heldout_rate);
            covered_pt.insert(lm);
            bool conj = bern(rng, params.p_conj);
            bool def = nominal(lm->pos_tgt) && bern(rng, params.p_definite);
            bool pl = lm->pos_tgt == "noun" && bern(rng, params.p_plural);
            bool obj = lm->pos_tgt == "verb" && bern(rng, params.p_object);
            for (auto& t : bridge_tokens(rng, *lm, def, pl, obj, conj, params.bridge_mark_rate))
                p_toks.push_back(std::move(t));
            b_toks.push_back(realize(*lm, kTargetShape, true, def, pl, obj, conj).raw);
        }
        pt_piv.push_back(join_raw(p_toks));
        pt_tgt.push_back(join_raw(b_toks));
    };
    for (int i = 0; i < params.n_pivot_sp; ++i) build_sp_sentence({});
    for (int i = 0; i < params.n_pivot_pt; ++i) build_pt_sentence({});

    // Every held-out lemma must be reachable through the bridge, or the
    // out-of-vocabulary recovery story falls apart; append what is missing.
    std::vector<const Lemma*> missing;
    for (const Lemma* lm : heldout)
        if (!covered_sp.count(lm)) missing.push_back(lm);
    for (std::size_t i = 0; i < missing.size(); i += 3)
        build_sp_sentence({missing.begin() + i,
                           missing.begin() + std::min(i + 3, missing.size())});
    missing.clear();
    for (const Lemma* lm : heldout)
        if (!covered_pt.count(lm)) missing.push_back(lm);
    for (std::size_t i = 0; i < missing.size(); i += 3)
        build_pt_sentence({missing.begin() + i,
                           missing.begin() + std::min(i + 3, missing.size())});

    // Self-check: every emitted raw token must analyze on its own side.
    auto check_side = [](const AnalyzerLexicon& lex,
                         const std::vector<const std::vector<std::string>*>& files) {
        for (const auto* lines : files)
            for (const auto& line : *lines)
                for (const auto& tok : split_ws(line))
                    if (!lex.find(std::string(tok)))
                        throw DataError("toy self-check failed: no analysis for '" +
                                        std::string(tok) + "'");
    };
    check_side(lex_src, {&train_src, &tune_src, &dev_src, &test_src, &sp_src});
    check_side(lex_tgt, {&train_tgt, &tune_tgt, &dev_tgt, &test_tgt, &pt_tgt});

    // Record what the planted keep-rates produced, measured on the gold
    // alignments with the same consistency measure the pipeline uses.
    AnalyzerLexicon merged = lex_src;
    merged.merge(lex_tgt);
    ParallelCorpus seg_train;
    std::vector<AlignmentSet> gold;
    for (const BuiltPair& bp : train_pairs) {
        Sentence s, t;
        for (const auto& x : bp.src_seg) s.tokens.emplace_back(x);
        for (const auto& x : bp.tgt_seg) t.tokens.emplace_back(x);
        seg_train.pairs.emplace_back(std::move(s), std::move(t));
        AlignmentSet a;
        a.links = bp.gold;
        a.source_len = static_cast<int>(bp.src_seg.size());
        a.target_len = static_cast<int>(bp.tgt_seg.size());
        gold.push_back(std::move(a));
    }

    ToyMeta meta;
    for (const auto& feature : consistency_features(merged))
        meta.planted_rates[feature] =
            measure_feature_consistency(seg_train, gold, merged, feature);
    meta.keep_params = {{"definiteness", params.keep_definiteness},
                        {"number", params.keep_number},
                        {"gender", params.keep_gender},
                        {"pos", params.keep_pos},
                        {"aspect", params.keep_aspect},
                        {"object", params.keep_object}};
    for (const Lemma* lm : heldout) meta.heldout_stems_src.push_back(lm->stem_src);
    std::sort(meta.heldout_stems_src.begin(), meta.heldout_stems_src.end());
    meta.train_size = static_cast<int>(train_src.size());
    meta.tune_size = static_cast<int>(tune_src.size());
    meta.dev_size = static_cast<int>(dev_src.size());
    meta.test_size = static_cast<int>(test_src.size());
    meta.pivot_sp_size = static_cast<int>(sp_src.size());
    meta.pivot_pt_size = static_cast<int>(pt_piv.size());

    std::filesystem::create_directories(params.out_dir);
    auto at = [&](const char* name) { return params.out_dir + "/" + name; };
    write_lines(at("train.src"), train_src);
    write_lines(at("train.tgt"), train_tgt);
    write_lines(at("tune.src"), tune_src);
    write_lines(at("tune.tgt"), tune_tgt);
    write_lines(at("dev.src"), dev_src);
    write_lines(at("dev.tgt"), dev_tgt);
    write_lines(at("test.src"), test_src);
    write_lines(at("test.tgt"), test_tgt);
    write_lines(at("pivot_sp.src"), sp_src);
    write_lines(at("pivot_sp.piv"), sp_piv);
    write_lines(at("pivot_pt.piv"), pt_piv);
    write_lines(at("pivot_pt.tgt"), pt_tgt);
    write_lines(at("lexicon_src.tsv"), lines_src);
    write_lines(at("lexicon_tgt.tsv"), lines_tgt);
    write_alignments(at("train.gold.align"), gold);

    json j;
    j["seed"] = params.seed;
    j["planted_rates"] = meta.planted_rates;
    j["keep_params"] = meta.keep_params;
    j["heldout_stems_src"] = meta.heldout_stems_src;
    j["sizes"] = {{"train", meta.train_size},   {"tune", meta.tune_size},
                  {"dev", meta.dev_size},       {"test", meta.test_size},
                  {"pivot_sp", meta.pivot_sp_size}, {"pivot_pt", meta.pivot_pt_size}};
    std::ofstream mj(at("meta.json"), std::ios::binary);
    if (!mj) throw DataError("cannot write " + at("meta.json"));
    mj << j.dump(2) << '\n';

    return meta;
}

}  // namespace dialectmt
