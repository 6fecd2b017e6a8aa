#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace dialectmt {

// Knobs for the synthetic two-dialect corpus generator. The generator builds a
// latent lemma vocabulary, realizes each lemma as related-but-distinct surface
// forms in two dialects plus a third "bridge" language, and plants controlled
// feature-preservation rates between the two dialects.
struct ToyParams {
    std::uint64_t seed = 42;
    int vocab_size = 500;

    int n_train = 1000;
    int n_tune = 100;
    int n_dev = 200;
    int n_test = 200;
    int n_pivot_sp = 2000;  // source dialect <-> bridge
    int n_pivot_pt = 1000;  // bridge <-> target dialect

    int min_len = 4;  // lemmas per sentence
    int max_len = 9;

    // Lemmas excluded from train/tune but present in dev/test and the bridge
    // corpora; these become the recoverable out-of-vocabulary mass.
    int n_heldout = 40;
    double heldout_rate = 0.08;        // dev/test slot probability
    double pivot_heldout_rate = 0.15;  // bridge corpora slot probability

    // Per-occurrence realization probabilities (source dialect).
    double p_definite = 0.4;
    double p_plural = 0.3;
    double p_object = 0.3;
    double p_conj = 0.15;

    // Probability that the bridge language overtly marks a feature. Values
    // below 1 make the bridge lossy, so triangulated phrase pairs mix
    // morphological realizations.
    double bridge_mark_rate = 0.5;

    // Probability that the target side preserves each feature of the source
    // realization. definiteness/number/object apply per occurrence;
    // gender/pos/aspect are resampled per lemma.
    double keep_definiteness = 0.92;
    double keep_number = 0.88;
    double keep_object = 0.90;
    double keep_gender = 0.85;
    double keep_pos = 0.97;
    double keep_aspect = 0.55;

    std::string out_dir;
};

// What the generator measured on its own output: feature -> percentage of
// gold alignment links whose analyses agree, computed with the same
// consistency measure the pipeline later applies to learned alignments.
struct ToyMeta {
    std::map<std::string, double> planted_rates;
    std::map<std::string, double> keep_params;
    std::vector<std::string> heldout_stems_src;
    int train_size = 0;
    int tune_size = 0;
    int dev_size = 0;
    int test_size = 0;
    int pivot_sp_size = 0;
    int pivot_pt_size = 0;
};

// Writes train/tune/dev/test.{src,tgt}, pivot_sp.{src,piv}, pivot_pt.{piv,tgt},
// lexicon_src.tsv, lexicon_tgt.tsv, train.gold.align (segmented space) and
// meta.json into params.out_dir. Throws DataError when the parameters cannot
// produce a usable corpus.
ToyMeta generate_toy_data(const ToyParams& params);

}  // namespace dialectmt
