#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "dialectmt/analyzer.hpp"
#include "dialectmt/corpus.hpp"
#include "dialectmt/decoder.hpp"
#include "dialectmt/lm.hpp"
#include "dialectmt/phrase_table.hpp"
#include "dialectmt/pivot.hpp"

namespace dialectmt {

enum class SystemKind {
    no_translation,
    direct,
    synthetic,
    phrase_pivot,
    dir_pp,
    dir_pp_morph,
    synthetic_dir_pp,
};

SystemKind system_kind_from_string(std::string_view s);
const char* to_string(SystemKind k);

// Everything one experiment needs: file locations, model hyperparameters,
// and the system variant to assemble. Loadable from a JSON file; individual
// fields can then be overridden from the command line.
struct SystemConfig {
    SystemKind kind = SystemKind::direct;
    std::uint64_t seed = 42;
    std::string output_dir;

    std::string train_src, train_tgt;
    std::string tune_src, tune_tgt;
    std::string dev_src, dev_tgt;
    std::string test_src, test_tgt;
    std::vector<std::string> mono_src, mono_tgt;
    std::string pivot_sp_src, pivot_sp_piv;  // source dialect <-> bridge
    std::string pivot_pt_piv, pivot_pt_tgt;  // bridge <-> target dialect
    std::string lexicon_src, lexicon_tgt;

    int lm_order = 5;
    int max_phrase_len = 8;
    int em_iterations = 5;
    int distortion_limit = 6;
    int stack_size = 100;
    double connectivity_epsilon = 1e-4;
    PivotCombine pivot_combine = PivotCombine::sum;
    bool tune = true;
    int tune_restarts = 2;
    int tune_iterations = 1;
    bool normalize = true;

    static SystemConfig from_json_file(const std::string& path);
    static SystemConfig from_json_text(const std::string& text, const std::string& origin);
    // Canonical serialization; hashed into experiment reports.
    std::string to_json_text() const;
};

// Which broad classes of training data a run actually read. Tuning and
// evaluation sets are experiment apparatus and deliberately not tracked.
enum class DataClass { parallel, monolingual, pivot };

const char* to_string(DataClass c);

struct DataTracker {
    std::set<DataClass> used;
    void note(DataClass c) { used.insert(c); }
    bool saw(DataClass c) const { return used.count(c) != 0; }
};

// The data classes a system kind is allowed and required to consume.
std::set<DataClass> required_data(SystemKind kind);

// A ready-to-decode translation system.
struct TrainedSystem {
    SystemKind kind = SystemKind::direct;
    bool translates = false;  // false only for the do-nothing baseline
    std::vector<PhraseTable> tables;
    NGramLM lm;
    LogLinearWeights weights;
    AnalyzerLexicon lexicon_src, lexicon_tgt;
    DecoderOptions decoder_options;

    std::vector<const PhraseTable*> table_ptrs() const;
    // Union of source-side unigrams across all tables.
    std::unordered_set<std::string> source_vocabulary() const;
};

// Builds the system the config describes, persisting intermediate artifacts
// under config.output_dir when set. `tracker` (optional) records the data
// classes consumed.
TrainedSystem run_system(const SystemConfig& config, DataTracker* tracker = nullptr);

// Raw text in, raw text out: segments with the source lexicon, decodes,
// detokenizes. The baseline system copies input to output.
std::vector<Sentence> translate_corpus(const TrainedSystem& system,
                                       const std::vector<Sentence>& raw_source);
std::vector<Sentence> translate_corpus(const TrainedSystem& system,
                                       const std::vector<Sentence>& raw_source,
                                       const LogLinearWeights& weights);

// Back-off combination: secondary entries join only when their source
// phrase is absent from the primary table. A provenance feature marks the
// origin (1 primary, e secondary); features one side lacks fill with 1.
PhraseTable combine_fill_up(const PhraseTable& primary, const PhraseTable& secondary);

// base plus forward-translated source monolingual text plus back-translated
// target monolingual text; sizes add exactly.
ParallelCorpus synthesize_parallel(const TrainedSystem& fwd, const TrainedSystem& inv,
                                   const std::vector<Sentence>& mono_src,
                                   const std::vector<Sentence>& mono_tgt,
                                   const ParallelCorpus& base);

// Random-restart coordinate ascent: each restart cycles the features,
// line-searching every weight over a fixed grid against corpus BLEU on the
// tune set (mean smoothed sentence BLEU breaks ties). Restart 0 starts from
// system.weights, so the result never scores below them. Deterministic
// under seed.
LogLinearWeights tune_weights(const TrainedSystem& system, const ParallelCorpus& tune_set,
                              int restarts, int iterations, std::uint64_t seed);

struct SystemScore {
    std::string model;
    double dev_bleu = 0.0, test_bleu = 0.0;
    double dev_oov = 0.0, test_oov = 0.0;
    bool has_oov = true;  // the baseline has no tables to be out of
};

// Decodes dev and test and scores BLEU plus out-of-vocabulary rates against
// the system's phrase tables.
SystemScore evaluate_system(const TrainedSystem& system, const SystemConfig& config);

// One row per system; regenerating the TSV from the same rows is
// byte-identical.
std::string render_report(const std::vector<SystemScore>& rows, const std::string& config_hash,
                          std::uint64_t seed);
void write_report(const std::string& path, const std::vector<SystemScore>& rows,
                  const std::string& config_hash, std::uint64_t seed);

// Round-trippable row storage so `report` can re-emit without re-running.
void write_scores_json(const std::string& path, const std::vector<SystemScore>& rows,
                       const std::string& config_hash, std::uint64_t seed);
std::vector<SystemScore> read_scores_json(const std::string& path, std::string* config_hash,
                                          std::uint64_t* seed);

// FNV-1a over the canonical config serialization.
std::string config_hash(const SystemConfig& config);

// Consistency percentages for every measurable feature: aligns the
// segmented training corpus and compares analyses across links.
std::vector<std::pair<std::string, double>> measure_consistency(const SystemConfig& config);

}  // namespace dialectmt
