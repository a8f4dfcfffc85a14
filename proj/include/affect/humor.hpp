#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "affect/audio.hpp"
#include "affect/embedding.hpp"
#include "affect/layers.hpp"
#include "affect/train.hpp"
#include "affect/wav.hpp"

namespace affect {

// One dialog turn. `audio_usable` is cleared when laughter trimming consumes
// the whole span; such turns keep their text but contribute a zero audio
// encoding.
struct Utterance {
  std::vector<std::string> tokens;
  std::string speaker;
  double start_s = 0.0;
  double end_s = 0.0;
  AudioSegment audio;
  bool is_punchline = false;
  bool audio_usable = true;
  std::string text;       // original caption text
  std::size_t index = 0;  // position within the episode
};

// Punchline detector sizes: language CNN 100 maps / window 5 / tanh, audio
// CNN 50 maps / window 3 / relu behind two stacked per-frame embedding
// layers, LSTM hidden 100, dropout 0.7 on the concatenated feature vector,
// context window length k.
struct HumorNetConfig {
  std::size_t lang_hidden = 100;
  std::size_t lang_window = 5;
  Act lang_act = Act::kTanh;
  std::size_t audio_hidden = 50;
  std::size_t audio_window = 3;
  Act audio_act = Act::kRelu;
  std::size_t lstm_hidden = 100;
  double dropout = 0.7;
  std::size_t k = 3;
  bool use_audio = true;
  bool use_speaker = true;
};

void validate(const HumorNetConfig& cfg);

// How context is summarized: the LSTM over language encodings, or the
// shifted baseline that concatenates the k encodings directly. With k == 1
// both reduce to the same single-utterance network.
enum class HumorVariant { kLstm, kShifted };

struct ExtraFeatures {
  double avg_word_length = 0.0;
  double sentence_length = 0.0;
  std::vector<double> length_deltas;   // k-1 entries, zero-filled
  std::vector<double> speaker_onehot;  // roster + OOV slot; empty if disabled
  double speaking_rate = 0.0;          // seconds per token

  Tensor to_tensor() const;
};

// `history` lists the previous utterances of the context window oldest
// first; length_deltas[i] compares against the utterance i+1 positions back
// (nearest previous first), zero where the history is shorter.
ExtraFeatures extra_features(const Utterance& u,
                             const std::vector<const Utterance*>& history,
                             const std::vector<std::string>& roster,
                             std::size_t k, bool use_speaker);

struct AudioEncoder {
  EmbeddingLayer emb1, emb2;  // stacked per-frame layers
  NgramConv conv;
};

// A context window is k slots ending at the classified utterance; null slots
// are padding (dialog shorter than k, or non-speech turns) and are encoded
// by the model's learned sentinel.
struct HumorExample {
  std::vector<const Utterance*> window;
  bool label = false;
};

struct HumorModel {
  HumorNetConfig cfg;
  HumorVariant variant = HumorVariant::kLstm;
  EmbeddingTable table;  // OOV tokens resolve to hash-seeded vectors
  std::vector<std::string> roster;

  NgramConv lang_conv;
  AudioEncoder audio_enc;  // allocated when use_audio
  LstmCell lstm;           // allocated when k > 1 and variant == kLstm
  NodePtr sentinel;        // learned empty-slot encoding; allocated when k > 1
  DenseHead head;

  Normalizer frame_norm;
  bool frame_norm_ready = false;
  Normalizer extras_norm;
  bool extras_norm_ready = false;

  Rng dropout_rng{0};

  std::vector<NodePtr> params() const;
  NodePtr loss_forward(const HumorExample& ex);  // training mode: dropout on
  double predict_positive(const HumorExample& ex);
};

HumorModel build_humor_model(const HumorNetConfig& cfg, HumorVariant variant,
                             EmbeddingTable table,
                             std::vector<std::string> roster, Rng& rng,
                             std::uint64_t dropout_seed);

// Sentence encoding: embedding rows (zero-padded to the filter window) →
// convolution → max-pool over token positions.
NodePtr encode_language_node(const NgramConv& cnn,
                             const std::vector<std::string>& tokens,
                             const EmbeddingTable& table);
Tensor encode_language(const NgramConv& cnn,
                       const std::vector<std::string>& tokens,
                       const EmbeddingTable& table);

// Frame features → two stacked embedding layers → convolution → max-pool.
// Empty audio raises EmptyInputError; `norm` (when non-null) standardizes
// frames first.
NodePtr encode_audio_node(const AudioEncoder& enc, const AudioSegment& seg,
                          const Normalizer* norm);
Tensor encode_audio(const AudioEncoder& enc, const AudioSegment& seg,
                    const Normalizer* norm = nullptr);

// Inference-mode probability that the window's last utterance is a
// punchline. Window length must equal cfg.k; variant must match the model.
double classify_punchline(HumorModel& model,
                          const std::vector<const Utterance*>& window);
double classify_punchline_shifted(HumorModel& model,
                                  const std::vector<const Utterance*>& window);

// The k slots ending at dialog[t], front-padded with nulls; non-speech turns
// (empty token lists) also become nulls.
std::vector<const Utterance*> context_window(
    const std::vector<Utterance>& dialog, std::size_t t, std::size_t k);

// One example per speech turn (empty-token turns are skipped as targets).
std::vector<HumorExample> make_humor_examples(
    const std::vector<Utterance>& dialog, std::size_t k);

struct HumorTrainOutcome {
  TrainResult train;
  Metrics test;
};

HumorTrainOutcome train_humor(HumorModel& model,
                              const Split<HumorExample>& split,
                              const TrainConfig& tc);

struct CrossCorpusReport {
  Metrics metrics;
  bool self_evaluation = false;
};

// Cross-corpus evaluation requires the speaker-identity feature disabled
// (rosters do not transfer); testing on a training corpus is flagged.
CrossCorpusReport evaluate_cross_corpus(
    HumorModel& model, const std::vector<HumorExample>& test,
    const std::string& test_corpus,
    const std::vector<std::string>& train_corpora);

// Fraction of punchlines at most `gap` utterances after the previous one,
// over consecutive punchline pairs; 0 when fewer than two punchlines.
double punchline_within(const std::vector<Utterance>& dialog,
                        std::size_t gap = 5);

}  // namespace affect
