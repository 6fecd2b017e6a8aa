// Command line front end: one subcommand per pipeline operation plus `run`,
// which executes a whole experiment from a JSON config.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dialectmt/aligner.hpp"
#include "dialectmt/analyzer.hpp"
#include "dialectmt/corpus.hpp"
#include "dialectmt/decoder.hpp"
#include "dialectmt/evaluation.hpp"
#include "dialectmt/lm.hpp"
#include "dialectmt/morph.hpp"
#include "dialectmt/phrase_table.hpp"
#include "dialectmt/pipeline.hpp"
#include "dialectmt/pivot.hpp"
#include "dialectmt/text_util.hpp"
#include "dialectmt/toygen.hpp"

namespace {

using namespace dialectmt;
using nlohmann::json;

std::string fmt(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
    return buf;
}

void write_lines_to(const std::string& path, const std::vector<std::string>& lines) {
    if (path.empty() || path == "-") {
        for (const auto& l : lines) std::cout << l << '\n';
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    for (const auto& l : lines) out << l << '\n';
}

std::vector<Sentence> read_sentences_raw(const std::string& path) {
    std::vector<Sentence> out;
    for (const auto& line : read_lines_checked(path)) out.push_back(sentence_from_line(line));
    return out;
}

AnalyzerLexicon load_lexicon_opt(const std::string& path) {
    return path.empty() ? AnalyzerLexicon() : AnalyzerLexicon::load(path);
}

std::vector<PhraseTable> load_tables(const std::vector<std::string>& paths) {
    std::vector<PhraseTable> tables;
    for (const auto& p : paths) tables.push_back(read_phrase_table(p));
    return tables;
}

TrainedSystem assemble_system(const std::vector<std::string>& table_paths,
                              const std::string& lm_path, const std::string& weights_path,
                              const std::string& lex_src, const std::string& lex_tgt,
                              int distortion_limit, int stack_size) {
    TrainedSystem sys;
    sys.translates = true;
    sys.tables = load_tables(table_paths);
    sys.lm = read_arpa(lm_path);
    sys.weights =
        weights_path.empty() ? default_weights(sys.table_ptrs()) : read_weights(weights_path);
    sys.lexicon_src = load_lexicon_opt(lex_src);
    sys.lexicon_tgt = load_lexicon_opt(lex_tgt);
    sys.decoder_options.distortion_limit = distortion_limit;
    sys.decoder_options.stack_size = stack_size;
    return sys;
}

// Symmetrized alignments with models trained on the spot; several
// subcommands need this when no alignment file is supplied.
std::vector<AlignmentSet> align_fresh(const ParallelCorpus& corpus, int iterations) {
    return align_corpus(corpus, iterations);
}

ParallelCorpus segment_both(const AnalyzerLexicon& lex_s, const AnalyzerLexicon& lex_t,
                            const ParallelCorpus& raw) {
    ParallelCorpus seg;
    seg.side_labels = raw.side_labels;
    for (const auto& [s, t] : raw.pairs)
        seg.pairs.emplace_back(segment_d3(lex_s, s), segment_d3(lex_t, t));
    return seg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phrase-based translation between close dialects"};
    app.require_subcommand(1);

    std::optional<std::uint64_t> global_seed;
    app.add_option("--seed", global_seed, "random seed for any stochastic step");

    // ---- normalize ----
    auto* c_norm = app.add_subcommand("normalize", "canonicalize orthography and whitespace");
    c_norm->fallthrough();
    std::string n_in, n_out, n_map;
    c_norm->add_option("--in", n_in, "input text")->required();
    c_norm->add_option("--out", n_out, "output text (default stdout)");
    c_norm->add_option("--map", n_map, "codepoint map TSV replacing the default");
    c_norm->callback([&] {
        NormalizationMap map =
            n_map.empty() ? NormalizationMap::standard() : NormalizationMap::from_file(n_map);
        std::vector<std::string> out;
        for (const auto& line : read_lines_checked(n_in))
            out.push_back(normalize_text(line, map));
        write_lines_to(n_out, out);
    });

    // ---- segment ----
    auto* c_seg = app.add_subcommand("segment", "split clitics off with a lexicon");
    c_seg->fallthrough();
    std::string s_in, s_out, s_lex;
    c_seg->add_option("--in", s_in)->required();
    c_seg->add_option("--out", s_out, "output text (default stdout)");
    c_seg->add_option("--lexicon", s_lex, "analyzer lexicon TSV")->required();
    c_seg->callback([&] {
        AnalyzerLexicon lex = AnalyzerLexicon::load(s_lex);
        std::vector<std::string> out;
        for (const auto& line : read_lines_checked(s_in))
            out.push_back(sentence_to_line(segment_d3(lex, sentence_from_line(line))));
        write_lines_to(s_out, out);
    });

    // ---- detok ----
    auto* c_detok = app.add_subcommand("detok", "rejoin clitic-marked tokens");
    c_detok->fallthrough();
    std::string d_in, d_out;
    c_detok->add_option("--in", d_in)->required();
    c_detok->add_option("--out", d_out, "output text (default stdout)");
    c_detok->callback([&] {
        std::vector<std::string> out;
        for (const auto& line : read_lines_checked(d_in))
            out.push_back(sentence_to_line(detokenize(sentence_from_line(line))));
        write_lines_to(d_out, out);
    });

    // ---- align ----
    auto* c_align = app.add_subcommand("align", "word-align a parallel corpus");
    c_align->fallthrough();
    std::string a_src, a_tgt, a_out;
    int a_iters = 5;
    double a_null = 0.08;
    bool a_norm = true;
    c_align->add_option("--src", a_src)->required();
    c_align->add_option("--tgt", a_tgt)->required();
    c_align->add_option("--out", a_out, "alignment file")->required();
    c_align->add_option("--iterations", a_iters, "EM iterations");
    c_align->add_option("--null-prob", a_null, "null alignment probability");
    c_align->add_flag("--normalize,!--no-normalize", a_norm, "normalize text first");
    c_align->callback([&] {
        ParallelCorpus corpus = load_parallel(a_src, a_tgt, a_norm);
        write_alignments(a_out, align_corpus(corpus, a_iters, a_null));
    });

    // ---- extract ----
    auto* c_ext = app.add_subcommand("extract", "extract and score a phrase table");
    c_ext->fallthrough();
    std::string e_src, e_tgt, e_align, e_out;
    int e_maxlen = 8, e_iters = 5;
    bool e_norm = true;
    c_ext->add_option("--src", e_src)->required();
    c_ext->add_option("--tgt", e_tgt)->required();
    c_ext->add_option("--align", e_align, "alignment file")->required();
    c_ext->add_option("--out", e_out, "phrase table")->required();
    c_ext->add_option("--max-len", e_maxlen, "maximum phrase length");
    c_ext->add_option("--iterations", e_iters, "EM iterations for lexical weights");
    c_ext->add_flag("--normalize,!--no-normalize", e_norm, "normalize text first");
    c_ext->callback([&] {
        ParallelCorpus corpus = load_parallel(e_src, e_tgt, e_norm);
        std::vector<AlignmentSet> alignments = read_alignments(e_align);
        if (alignments.size() != corpus.size())
            throw DataError("alignment count " + std::to_string(alignments.size()) +
                            " does not match corpus size " + std::to_string(corpus.size()));
        PhraseCounts counts;
        for (std::size_t i = 0; i < corpus.size(); ++i)
            counts.add_all(extract_phrases(corpus.pairs[i].first, corpus.pairs[i].second,
                                           alignments[i], e_maxlen));
        ParallelCorpus rev;
        for (const auto& [s, t] : corpus.pairs) rev.pairs.emplace_back(t, s);
        PhraseTable table = score_phrase_table(counts, train_ibm1(corpus, e_iters),
                                               train_ibm1(rev, e_iters));
        write_phrase_table(e_out, table);
    });

    // ---- lm-train ----
    auto* c_lm = app.add_subcommand("lm-train", "train a Kneser-Ney language model");
    c_lm->fallthrough();
    std::string l_in, l_out;
    int l_order = 5;
    double l_discount = 0.75;
    bool l_norm = true;
    c_lm->add_option("--in", l_in, "training text")->required();
    c_lm->add_option("--out", l_out, "ARPA file")->required();
    c_lm->add_option("--order", l_order);
    c_lm->add_option("--discount", l_discount);
    c_lm->add_flag("--normalize,!--no-normalize", l_norm, "normalize text first");
    c_lm->callback([&] {
        write_arpa(l_out, train_lm(load_sentences(l_in, l_norm), l_order, l_discount));
    });

    // ---- pivot ----
    auto* c_piv = app.add_subcommand("pivot", "triangulate two phrase tables");
    c_piv->fallthrough();
    std::string p_sp, p_pt, p_out, p_combine = "sum";
    double p_eps = 1e-4;
    c_piv->add_option("--sp", p_sp, "source-bridge phrase table")->required();
    c_piv->add_option("--pt", p_pt, "bridge-target phrase table")->required();
    c_piv->add_option("--out", p_out, "triangulated table")->required();
    c_piv->add_option("--combine", p_combine, "sum or max");
    c_piv->add_option("--epsilon", p_eps, "connectivity floor");
    c_piv->callback([&] {
        PhraseTable sp = read_phrase_table(p_sp);
        PhraseTable pt = read_phrase_table(p_pt);
        write_phrase_table(p_out,
                           triangulate(sp, pt, pivot_combine_from_string(p_combine), p_eps));
    });

    // ---- morph-annotate ----
    auto* c_morph = app.add_subcommand("morph-annotate",
                                       "append morphological constraint features to a table");
    c_morph->fallthrough();
    std::string m_table, m_out, m_src, m_tgt, m_lex_s, m_lex_t, m_align;
    int m_iters = 5;
    bool m_norm = true;
    c_morph->add_option("--table", m_table, "phrase table to annotate")->required();
    c_morph->add_option("--out", m_out)->required();
    c_morph->add_option("--src", m_src, "training source text")->required();
    c_morph->add_option("--tgt", m_tgt, "training target text")->required();
    c_morph->add_option("--lexicon-src", m_lex_s)->required();
    c_morph->add_option("--lexicon-tgt", m_lex_t)->required();
    c_morph->add_option("--align", m_align, "alignment file (default: align internally)");
    c_morph->add_option("--iterations", m_iters, "EM iterations when aligning internally");
    c_morph->add_flag("--normalize,!--no-normalize", m_norm, "normalize text first");
    c_morph->callback([&] {
        AnalyzerLexicon merged = AnalyzerLexicon::load(m_lex_s);
        merged.merge(AnalyzerLexicon::load(m_lex_t));
        ParallelCorpus seg =
            segment_both(merged, merged, load_parallel(m_src, m_tgt, m_norm));
        std::vector<AlignmentSet> alignments =
            m_align.empty() ? align_fresh(seg, m_iters) : read_alignments(m_align);
        std::vector<Sentence> src_side, tgt_side;
        for (const auto& [s, t] : seg.pairs) {
            src_side.push_back(s);
            tgt_side.push_back(t);
        }
        TypePropertyInventory inventory =
            build_property_inventory({&src_side, &tgt_side}, merged);
        PropertyDistribution dist = estimate_property_distributions(seg, alignments, merged);
        write_phrase_table(m_out,
                           annotate_phrase_table(read_phrase_table(m_table), inventory, dist));
    });

    // ---- consistency ----
    auto* c_cons = app.add_subcommand("consistency",
                                      "measure cross-dialect feature consistency");
    c_cons->fallthrough();
    std::string co_config, co_src, co_tgt, co_lex_s, co_lex_t, co_out;
    int co_iters = 0;
    c_cons->add_option("--config", co_config, "JSON config supplying paths");
    c_cons->add_option("--src", co_src, "training source text");
    c_cons->add_option("--tgt", co_tgt, "training target text");
    c_cons->add_option("--lexicon-src", co_lex_s);
    c_cons->add_option("--lexicon-tgt", co_lex_t);
    c_cons->add_option("--em-iterations", co_iters);
    c_cons->add_option("--out", co_out, "TSV output (default stdout)");
    c_cons->callback([&] {
        SystemConfig cfg =
            co_config.empty() ? SystemConfig{} : SystemConfig::from_json_file(co_config);
        if (!co_src.empty()) cfg.train_src = co_src;
        if (!co_tgt.empty()) cfg.train_tgt = co_tgt;
        if (!co_lex_s.empty()) cfg.lexicon_src = co_lex_s;
        if (!co_lex_t.empty()) cfg.lexicon_tgt = co_lex_t;
        if (co_iters > 0) cfg.em_iterations = co_iters;
        std::vector<std::string> out;
        for (const auto& [feature, pct] : measure_consistency(cfg))
            out.push_back(feature + "\t" + fmt(pct, 2));
        write_lines_to(co_out, out);
    });

    // ---- combine ----
    auto* c_comb = app.add_subcommand("combine", "back-off combination of two phrase tables");
    c_comb->fallthrough();
    std::string cb_primary, cb_secondary, cb_out;
    c_comb->add_option("--primary", cb_primary)->required();
    c_comb->add_option("--secondary", cb_secondary)->required();
    c_comb->add_option("--out", cb_out)->required();
    c_comb->callback([&] {
        write_phrase_table(cb_out, combine_fill_up(read_phrase_table(cb_primary),
                                                   read_phrase_table(cb_secondary)));
    });

    // ---- tune ----
    auto* c_tune = app.add_subcommand("tune", "tune log-linear weights on a parallel set");
    c_tune->fallthrough();
    std::vector<std::string> t_tables;
    std::string t_lm, t_weights, t_src, t_tgt, t_lex_s, t_lex_t, t_out;
    int t_restarts = 2, t_iterations = 1, t_dist = 6, t_stack = 100;
    bool t_norm = true;
    c_tune->add_option("--table", t_tables, "phrase tables, back-off order")->required();
    c_tune->add_option("--lm", t_lm, "ARPA language model")->required();
    c_tune->add_option("--tune-src", t_src)->required();
    c_tune->add_option("--tune-tgt", t_tgt)->required();
    c_tune->add_option("--weights", t_weights, "starting weights (default: built-in)");
    c_tune->add_option("--lexicon-src", t_lex_s);
    c_tune->add_option("--lexicon-tgt", t_lex_t);
    c_tune->add_option("--out", t_out, "tuned weights TSV")->required();
    c_tune->add_option("--restarts", t_restarts);
    c_tune->add_option("--iterations", t_iterations);
    c_tune->add_option("--distortion-limit", t_dist);
    c_tune->add_option("--stack-size", t_stack);
    c_tune->add_flag("--normalize,!--no-normalize", t_norm, "normalize text first");
    c_tune->callback([&] {
        TrainedSystem sys =
            assemble_system(t_tables, t_lm, t_weights, t_lex_s, t_lex_t, t_dist, t_stack);
        ParallelCorpus tune_set = load_parallel(t_src, t_tgt, t_norm);
        LogLinearWeights tuned = tune_weights(sys, tune_set, t_restarts, t_iterations,
                                              global_seed.value_or(42));
        write_weights(t_out, tuned);
    });

    // ---- decode ----
    auto* c_dec = app.add_subcommand("decode", "translate text");
    c_dec->fallthrough();
    std::vector<std::string> dc_tables;
    std::string dc_in, dc_lm, dc_weights, dc_lex_s, dc_out;
    int dc_nbest = 1, dc_dist = 6, dc_stack = 100;
    c_dec->add_option("--in", dc_in, "source text")->required();
    c_dec->add_option("--table", dc_tables, "phrase tables, back-off order")->required();
    c_dec->add_option("--lm", dc_lm, "ARPA language model")->required();
    c_dec->add_option("--weights", dc_weights, "weights TSV (default: built-in)");
    c_dec->add_option("--lexicon-src", dc_lex_s, "segment input and detokenize output");
    c_dec->add_option("--out", dc_out, "output (default stdout; required for --nbest > 1)");
    c_dec->add_option("--nbest", dc_nbest, "derivations per sentence");
    c_dec->add_option("--distortion-limit", dc_dist);
    c_dec->add_option("--stack-size", dc_stack);
    c_dec->callback([&] {
        TrainedSystem sys =
            assemble_system(dc_tables, dc_lm, dc_weights, dc_lex_s, "", dc_dist, dc_stack);
        std::vector<Sentence> input = read_sentences_raw(dc_in);
        if (dc_nbest > 1) {
            if (dc_out.empty())
                throw std::invalid_argument("--nbest > 1 needs --out");
            sys.decoder_options.nbest = dc_nbest;
            std::vector<std::vector<DerivationResult>> lists;
            for (const auto& raw : input) {
                Sentence seg = segment_d3(sys.lexicon_src, raw);
                lists.push_back(decode_nbest(seg, sys.table_ptrs(), sys.lm, sys.weights,
                                             sys.decoder_options));
            }
            write_nbest(dc_out, lists);
            return;
        }
        std::vector<std::string> out;
        for (const auto& s : translate_corpus(sys, input))
            out.push_back(sentence_to_line(s));
        write_lines_to(dc_out, out);
    });

    // ---- bleu ----
    auto* c_bleu = app.add_subcommand("bleu", "corpus BLEU of hypotheses against references");
    c_bleu->fallthrough();
    std::string b_hyp, b_ref;
    c_bleu->add_option("--hyp", b_hyp)->required();
    c_bleu->add_option("--ref", b_ref)->required();
    c_bleu->callback([&] {
        BleuReport report = bleu(read_sentences_raw(b_hyp), read_sentences_raw(b_ref));
        std::cout << "BLEU = " << fmt(report.score, 2) << '\n';
        std::cout << "precisions =";
        for (double p : report.ngram_precisions) std::cout << ' ' << fmt(100.0 * p, 2);
        std::cout << '\n';
        std::cout << "brevity_penalty = " << fmt(report.brevity_penalty, 4) << '\n';
        std::cout << "hyp_length = " << report.hyp_length
                  << " ref_length = " << report.ref_length << '\n';
    });

    // ---- oov ----
    auto* c_oov = app.add_subcommand("oov", "out-of-vocabulary rate against phrase tables");
    c_oov->fallthrough();
    std::vector<std::string> o_tables;
    std::string o_test, o_lex;
    c_oov->add_option("--test", o_test, "test source text")->required();
    c_oov->add_option("--table", o_tables, "phrase tables")->required();
    c_oov->add_option("--lexicon-src", o_lex, "segment the test text first");
    c_oov->callback([&] {
        TrainedSystem sys;
        sys.translates = true;
        sys.tables = load_tables(o_tables);
        AnalyzerLexicon lex = load_lexicon_opt(o_lex);
        std::vector<Sentence> test;
        for (const auto& s : load_sentences(o_test, true))
            test.push_back(segment_d3(lex, s));
        std::cout << "OOV = " << fmt(oov_rate(test, sys.source_vocabulary()), 2) << '\n';
    });

    // ---- synthesize ----
    auto* c_syn = app.add_subcommand("synthesize",
                                     "fabricate parallel data from monolingual text");
    c_syn->fallthrough();
    std::vector<std::string> sy_fwd_tables, sy_inv_tables, sy_mono_src, sy_mono_tgt;
    std::string sy_fwd_lm, sy_inv_lm, sy_fwd_w, sy_inv_w;
    std::string sy_base_src, sy_base_tgt, sy_lex_s, sy_lex_t, sy_out_src, sy_out_tgt;
    int sy_dist = 6, sy_stack = 100;
    bool sy_norm = true;
    c_syn->add_option("--fwd-table", sy_fwd_tables, "forward system tables")->required();
    c_syn->add_option("--fwd-lm", sy_fwd_lm)->required();
    c_syn->add_option("--fwd-weights", sy_fwd_w);
    c_syn->add_option("--inv-table", sy_inv_tables, "inverse system tables")->required();
    c_syn->add_option("--inv-lm", sy_inv_lm)->required();
    c_syn->add_option("--inv-weights", sy_inv_w);
    c_syn->add_option("--base-src", sy_base_src)->required();
    c_syn->add_option("--base-tgt", sy_base_tgt)->required();
    c_syn->add_option("--mono-src", sy_mono_src, "source-dialect monolingual text");
    c_syn->add_option("--mono-tgt", sy_mono_tgt, "target-dialect monolingual text");
    c_syn->add_option("--lexicon-src", sy_lex_s);
    c_syn->add_option("--lexicon-tgt", sy_lex_t);
    c_syn->add_option("--out-src", sy_out_src)->required();
    c_syn->add_option("--out-tgt", sy_out_tgt)->required();
    c_syn->add_option("--distortion-limit", sy_dist);
    c_syn->add_option("--stack-size", sy_stack);
    c_syn->add_flag("--normalize,!--no-normalize", sy_norm, "normalize text first");
    c_syn->callback([&] {
        TrainedSystem fwd = assemble_system(sy_fwd_tables, sy_fwd_lm, sy_fwd_w, sy_lex_s,
                                            sy_lex_t, sy_dist, sy_stack);
        TrainedSystem inv = assemble_system(sy_inv_tables, sy_inv_lm, sy_inv_w, sy_lex_t,
                                            sy_lex_s, sy_dist, sy_stack);
        ParallelCorpus base = load_parallel(sy_base_src, sy_base_tgt, sy_norm);
        std::vector<Sentence> mono_s, mono_t;
        for (const auto& p : sy_mono_src)
            for (auto& s : load_sentences(p, sy_norm)) mono_s.push_back(std::move(s));
        for (const auto& p : sy_mono_tgt)
            for (auto& s : load_sentences(p, sy_norm)) mono_t.push_back(std::move(s));
        ParallelCorpus synth = synthesize_parallel(fwd, inv, mono_s, mono_t, base);
        write_parallel(sy_out_src, sy_out_tgt, synth);
    });

    // ---- toygen ----
    auto* c_toy = app.add_subcommand("toygen", "generate a synthetic dialect-pair corpus");
    c_toy->fallthrough();
    ToyParams toy;
    c_toy->add_option("--out", toy.out_dir, "output directory")->required();
    c_toy->add_option("--vocab", toy.vocab_size);
    c_toy->add_option("--train", toy.n_train);
    c_toy->add_option("--tune", toy.n_tune);
    c_toy->add_option("--dev", toy.n_dev);
    c_toy->add_option("--test", toy.n_test);
    c_toy->add_option("--pivot-sp", toy.n_pivot_sp);
    c_toy->add_option("--pivot-pt", toy.n_pivot_pt);
    c_toy->add_option("--heldout", toy.n_heldout);
    c_toy->add_option("--keep-definiteness", toy.keep_definiteness);
    c_toy->add_option("--keep-number", toy.keep_number);
    c_toy->add_option("--keep-gender", toy.keep_gender);
    c_toy->add_option("--keep-pos", toy.keep_pos);
    c_toy->add_option("--keep-aspect", toy.keep_aspect);
    c_toy->callback([&] {
        toy.seed = global_seed.value_or(toy.seed);
        ToyMeta meta = generate_toy_data(toy);
        for (const auto& [feature, pct] : meta.planted_rates)
            std::cout << feature << '\t' << fmt(pct, 2) << '\n';
    });

    // ---- run ----
    auto* c_run = app.add_subcommand("run", "train and evaluate systems from a config");
    c_run->fallthrough();
    std::string r_config, r_outdir;
    std::vector<std::string> r_systems, r_sets;
    c_run->add_option("--config", r_config, "JSON experiment config");
    c_run->add_option("--system", r_systems, "system kind(s) to run, overriding the config");
    c_run->add_option("--set", r_sets, "override a config entry as key=value");
    c_run->add_option("--out-dir", r_outdir, "artifact directory, overriding the config");
    c_run->callback([&] {
        json base = json::object();
        if (!r_config.empty()) {
            std::ifstream in(r_config, std::ios::binary);
            if (!in) throw DataError("cannot open config: " + r_config);
            try {
                in >> base;
            } catch (const json::parse_error& e) {
                throw DataError(r_config + ": bad JSON: " + e.what());
            }
            if (!base.is_object()) throw DataError(r_config + ": config must be a JSON object");
        }
        for (const auto& kv : r_sets) {
            auto pos = kv.find('=');
            if (pos == std::string::npos || pos == 0)
                throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
            std::string key = kv.substr(0, pos), value = kv.substr(pos + 1);
            try {
                base[key] = json::parse(value);
            } catch (const json::parse_error&) {
                base[key] = value;
            }
        }
        SystemConfig cfg = SystemConfig::from_json_text(
            base.dump(), r_config.empty() ? "config" : r_config);
        if (global_seed) cfg.seed = *global_seed;
        if (!r_outdir.empty()) cfg.output_dir = r_outdir;

        std::vector<SystemKind> kinds;
        for (const auto& name : r_systems) kinds.push_back(system_kind_from_string(name));
        if (kinds.empty()) kinds.push_back(cfg.kind);

        bool evaluate = !cfg.dev_src.empty() && !cfg.test_src.empty();
        std::vector<SystemScore> rows;
        for (SystemKind kind : kinds) {
            SystemConfig one = cfg;
            one.kind = kind;
            if (!cfg.output_dir.empty())
                one.output_dir = cfg.output_dir + "/" + to_string(kind);
            DataTracker tracker;
            TrainedSystem sys = run_system(one, &tracker);
            std::cerr << "trained " << to_string(kind) << " (data:";
            for (DataClass c : tracker.used) std::cerr << ' ' << to_string(c);
            std::cerr << ")\n";
            if (evaluate) rows.push_back(evaluate_system(sys, one));
        }
        if (evaluate) {
            std::string hash = config_hash(cfg);
            std::cout << render_report(rows, hash, cfg.seed);
            if (!cfg.output_dir.empty()) {
                write_report(cfg.output_dir + "/report.tsv", rows, hash, cfg.seed);
                write_scores_json(cfg.output_dir + "/scores.json", rows, hash, cfg.seed);
            }
        }
    });

    // ---- report ----
    auto* c_rep = app.add_subcommand("report", "re-emit the experiment report from saved scores");
    c_rep->fallthrough();
    std::string rp_scores, rp_out;
    c_rep->add_option("--scores", rp_scores, "scores.json from a run")->required();
    c_rep->add_option("--out", rp_out, "report TSV (default stdout)");
    c_rep->callback([&] {
        std::string hash;
        std::uint64_t seed = 0;
        std::vector<SystemScore> rows = read_scores_json(rp_scores, &hash, &seed);
        if (rp_out.empty())
            std::cout << render_report(rows, hash, seed);
        else
            write_report(rp_out, rows, hash, seed);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
