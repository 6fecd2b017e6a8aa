#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "dialectmt/aligner.hpp"
#include "dialectmt/analyzer.hpp"
#include "dialectmt/corpus.hpp"
#include "dialectmt/evaluation.hpp"
#include "dialectmt/lm.hpp"
#include "dialectmt/pipeline.hpp"
#include "dialectmt/text_util.hpp"
#include "dialectmt/toygen.hpp"

namespace py = pybind11;
using namespace dialectmt;

namespace {

std::vector<Sentence> to_sentences(const std::vector<std::string>& lines) {
    std::vector<Sentence> out;
    out.reserve(lines.size());
    for (const auto& line : lines) out.push_back(sentence_from_line(line));
    return out;
}

std::vector<std::string> to_lines(const std::vector<Sentence>& sentences) {
    std::vector<std::string> out;
    out.reserve(sentences.size());
    for (const auto& s : sentences) out.push_back(sentence_to_line(s));
    return out;
}

ParallelCorpus to_corpus(const std::vector<std::string>& src,
                         const std::vector<std::string>& tgt) {
    if (src.size() != tgt.size())
        throw DataError("side sizes differ: " + std::to_string(src.size()) + " vs " +
                        std::to_string(tgt.size()));
    ParallelCorpus corpus;
    for (std::size_t i = 0; i < src.size(); ++i)
        corpus.pairs.push_back({sentence_from_line(src[i]), sentence_from_line(tgt[i])});
    return corpus;
}

std::string pharaoh_line(const AlignmentSet& a) {
    std::string out;
    for (const auto& [i, j] : a.links) {
        if (!out.empty()) out += ' ';
        out += std::to_string(i) + "-" + std::to_string(j);
    }
    return out;
}

SystemConfig config_from_json(const std::string& text) {
    return SystemConfig::from_json_text(text, "config");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "dialect-to-dialect phrase translation toolkit";

    py::register_exception<DataError>(m, "DataError");

    m.def(
        "normalize", [](const std::string& line) { return normalize_text(line); },
        py::arg("line"));

    m.def(
        "detokenize",
        [](const std::string& line) {
            return sentence_to_line(detokenize(sentence_from_line(line)));
        },
        py::arg("line"));

    py::class_<AnalyzerLexicon>(m, "Lexicon")
        .def_static(
            "load", [](const std::string& path) { return AnalyzerLexicon::load(path); },
            py::arg("path"))
        .def_property_readonly("size", &AnalyzerLexicon::surface_count)
        .def(
            "segment",
            [](const AnalyzerLexicon& lex, const std::string& line) {
                return sentence_to_line(segment_d3(lex, sentence_from_line(line)));
            },
            py::arg("line"))
        .def("__repr__", [](const AnalyzerLexicon& lex) {
            return "<Lexicon with " + std::to_string(lex.surface_count()) + " surface forms>";
        });

    m.def(
        "align",
        [](const std::vector<std::string>& source, const std::vector<std::string>& target,
           int iterations) {
            auto alignments = align_corpus(to_corpus(source, target), iterations);
            std::vector<std::string> out;
            out.reserve(alignments.size());
            for (const auto& a : alignments) out.push_back(pharaoh_line(a));
            return out;
        },
        py::arg("source"), py::arg("target"), py::arg("iterations") = 5);

    py::class_<BleuReport>(m, "BleuReport")
        .def_readonly("score", &BleuReport::score)
        .def_readonly("brevity_penalty", &BleuReport::brevity_penalty)
        .def_readonly("hyp_length", &BleuReport::hyp_length)
        .def_readonly("ref_length", &BleuReport::ref_length)
        .def_property_readonly("precisions",
                               [](const BleuReport& r) {
                                   return std::vector<double>(r.ngram_precisions.begin(),
                                                              r.ngram_precisions.end());
                               })
        .def("__repr__", [](const BleuReport& r) {
            return "<BleuReport score=" + format_double(r.score) + ">";
        });

    m.def(
        "bleu",
        [](const std::vector<std::string>& hypotheses, const std::vector<std::string>& references) {
            return bleu(to_sentences(hypotheses), to_sentences(references));
        },
        py::arg("hypotheses"), py::arg("references"));

    py::class_<NGramLM>(m, "LanguageModel")
        .def_static(
            "train",
            [](const std::vector<std::string>& lines, int order, double discount) {
                return train_lm(to_sentences(lines), order, discount);
            },
            py::arg("lines"), py::arg("order") = 3, py::arg("discount") = 0.75)
        .def_static("read_arpa", &read_arpa, py::arg("path"))
        .def(
            "write_arpa",
            [](const NGramLM& lm, const std::string& path) { write_arpa(path, lm); },
            py::arg("path"))
        .def_readonly("order", &NGramLM::order)
        .def_property_readonly("vocabulary_size",
                               [](const NGramLM& lm) { return lm.vocabulary.size(); })
        .def(
            "score",
            [](const NGramLM& lm, const std::string& line) {
                return score_sequence(lm, split_ws(line));
            },
            py::arg("line"))
        .def("__repr__", [](const NGramLM& lm) {
            return "<LanguageModel order=" + std::to_string(lm.order) + ">";
        });

    py::class_<TrainedSystem>(m, "Translator")
        .def_property_readonly("kind",
                               [](const TrainedSystem& s) { return std::string(to_string(s.kind)); })
        .def_readonly("translates", &TrainedSystem::translates)
        .def(
            "translate",
            [](const TrainedSystem& sys, const std::vector<std::string>& lines) {
                return to_lines(translate_corpus(sys, to_sentences(lines)));
            },
            py::arg("lines"))
        .def("__repr__", [](const TrainedSystem& s) {
            return std::string("<Translator kind=") + to_string(s.kind) + ">";
        });

    m.def(
        "build_system",
        [](const std::string& config_json) { return run_system(config_from_json(config_json)); },
        py::arg("config_json"));

    py::class_<SystemScore>(m, "SystemScore")
        .def_readonly("model", &SystemScore::model)
        .def_readonly("dev_bleu", &SystemScore::dev_bleu)
        .def_readonly("test_bleu", &SystemScore::test_bleu)
        .def_readonly("dev_oov", &SystemScore::dev_oov)
        .def_readonly("test_oov", &SystemScore::test_oov)
        .def_readonly("has_oov", &SystemScore::has_oov)
        .def("__repr__", [](const SystemScore& s) {
            return "<SystemScore " + s.model + " dev=" + format_double(s.dev_bleu) +
                   " test=" + format_double(s.test_bleu) + ">";
        });

    m.def(
        "run_experiment",
        [](const std::string& config_json) {
            SystemConfig cfg = config_from_json(config_json);
            TrainedSystem sys = run_system(cfg);
            return evaluate_system(sys, cfg);
        },
        py::arg("config_json"));

    m.def(
        "measure_consistency",
        [](const std::string& config_json) {
            return measure_consistency(config_from_json(config_json));
        },
        py::arg("config_json"));

    m.def(
        "generate_toy",
        [](const std::string& out_dir, std::uint64_t seed, int vocab_size, int n_train,
           int n_tune, int n_dev, int n_test, int n_pivot_sp, int n_pivot_pt) {
            ToyParams p;
            p.out_dir = out_dir;
            p.seed = seed;
            p.vocab_size = vocab_size;
            p.n_train = n_train;
            p.n_tune = n_tune;
            p.n_dev = n_dev;
            p.n_test = n_test;
            p.n_pivot_sp = n_pivot_sp;
            p.n_pivot_pt = n_pivot_pt;
            ToyMeta meta = generate_toy_data(p);
            py::dict out;
            out["planted_rates"] = meta.planted_rates;
            out["keep_params"] = meta.keep_params;
            out["heldout_stems_src"] = meta.heldout_stems_src;
            py::dict sizes;
            sizes["train"] = meta.train_size;
            sizes["tune"] = meta.tune_size;
            sizes["dev"] = meta.dev_size;
            sizes["test"] = meta.test_size;
            sizes["pivot_sp"] = meta.pivot_sp_size;
            sizes["pivot_pt"] = meta.pivot_pt_size;
            out["sizes"] = sizes;
            return out;
        },
        py::arg("out_dir"), py::arg("seed") = 42, py::arg("vocab_size") = 500,
        py::arg("n_train") = 1000, py::arg("n_tune") = 100, py::arg("n_dev") = 200,
        py::arg("n_test") = 200, py::arg("n_pivot_sp") = 2000, py::arg("n_pivot_pt") = 1000);

    m.def(
        "config_hash",
        [](const std::string& config_json) { return config_hash(config_from_json(config_json)); },
        py::arg("config_json"));
}
