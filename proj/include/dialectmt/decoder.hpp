#ifndef DIALECTMT_DECODER_HPP
#define DIALECTMT_DECODER_HPP

#include <map>
#include <string>
#include <vector>

#include "dialectmt/corpus.hpp"
#include "dialectmt/lm.hpp"
#include "dialectmt/phrase_table.hpp"

namespace dialectmt {

struct LogLinearWeights {
  std::map<std::string, double> values;

  double get(const std::string& name) const;
  bool has(const std::string& name) const { return values.count(name) != 0; }
  void set(const std::string& name, double w) { values[name] = w; }

  bool operator==(const LogLinearWeights&) const = default;
};

void write_weights(const std::string& path, const LogLinearWeights& weights);
LogLinearWeights read_weights(const std::string& path);

// Weight defaults covering every schema feature of the given tables plus
// the decoder's own features (lm, word_penalty, distortion, oov).
LogLinearWeights default_weights(const std::vector<const PhraseTable*>& tables);

struct DecoderOptions {
  int distortion_limit = 6;  // negative = unlimited, 0 = monotone
  int stack_size = 100;      // <= 0 = unbounded
  int nbest = 1;
};

// One complete derivation: target tokens, per-feature totals (log domain
// for table features and the LM, plain counts otherwise), and the
// log-linear score, which equals dot(weights, features).
struct DerivationResult {
  Sentence target;
  std::map<std::string, double> features;
  double score = 0.0;
};

// Stack decoding with histogram pruning and recombination on (coverage,
// LM state, end position).  Tables act as a back-off list: the first one
// holding a source phrase supplies its options.  Source tokens with no
// single-token option are copied through with the `oov` feature set.
std::vector<DerivationResult> decode_nbest(const Sentence& sentence,
                                           const std::vector<const PhraseTable*>& tables,
                                           const NGramLM& lm, const LogLinearWeights& weights,
                                           const DecoderOptions& options = {});

Sentence decode(const Sentence& sentence, const std::vector<const PhraseTable*>& tables,
                const NGramLM& lm, const LogLinearWeights& weights,
                const DecoderOptions& options = {});

// The do-nothing baseline.
Sentence no_translation(const Sentence& sentence);

void write_nbest(const std::string& path,
                 const std::vector<std::vector<DerivationResult>>& lists);

}  // namespace dialectmt

#endif
