#pragma once

#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "affect/audio.hpp"
#include "affect/embedding.hpp"
#include "affect/layers.hpp"
#include "affect/train.hpp"
#include "affect/wav.hpp"

namespace affect {

// Multichannel sentence CNN: per-height full-row convolutions with
// max-over-time pooling on two embedding channels (one static, one
// fine-tuned), optionally joined by an acoustic channel over frame features,
// all concatenated into a dense softmax head.
struct SentimentCnnConfig {
  std::vector<std::size_t> heights = {3, 4, 5};
  std::size_t maps = 100;
  bool bichannel = false;  // adds the audio channel
};

void validate(const SentimentCnnConfig& cfg);

struct SentimentExample {
  std::vector<std::string> tokens;
  bool label = false;
  AudioSegment audio;  // consulted only by bichannel models
};

struct SentimentModel {
  SentimentCnnConfig cfg;

  // Static channel: lookups are constants, OOV tokens map to zero rows, the
  // table never receives gradients.
  EmbeddingTable static_table;

  // Fine-tuned channel: one trainable matrix over the static vocabulary plus
  // any training-corpus extras; rows for the extras start at the same
  // hash-seeded vectors OOV lookups produce, so unseen tokens at inference
  // time are consistent with what training would have initialized.
  std::vector<std::string> ft_tokens;
  std::unordered_map<std::string, std::size_t> ft_index;
  NodePtr ft_matrix;

  std::vector<NgramConv> static_convs;  // one per filter height
  std::vector<NgramConv> ft_convs;

  // Audio channel (bichannel only): standardized frame features through a
  // height-3 relu convolution and max-pool.
  NgramConv audio_conv;
  Normalizer frame_norm;
  bool frame_norm_ready = false;

  DenseHead head;

  std::vector<NodePtr> params() const;
  NodePtr loss_forward(const SentimentExample& ex);
  double predict_positive(const SentimentExample& ex);
};

// `extra_vocab` lists training-corpus tokens absent from the static table;
// they join the fine-tuned matrix with hash-seeded rows.
SentimentModel build_sentiment_model(const SentimentCnnConfig& cfg,
                                     EmbeddingTable static_table,
                                     const std::vector<std::string>& extra_vocab,
                                     Rng& rng);

double classify_sentiment(SentimentModel& model,
                          const std::vector<std::string>& tokens);

// Joint text+audio path; either input missing raises ConfigError.
double classify_sentiment_bichannel(SentimentModel& model,
                                    const std::vector<std::string>& tokens,
                                    const AudioSegment& seg);

struct SentimentTrainOutcome {
  TrainResult train;
  Metrics test;
};

SentimentTrainOutcome train_sentiment(SentimentModel& model,
                                      const Split<SentimentExample>& split,
                                      const TrainConfig& tc);

// (positive hits - negative hits) / max(total hits, 1) over exact token
// membership.
double lexicon_polarity(const std::vector<std::string>& tokens,
                        const std::unordered_set<std::string>& positive,
                        const std::unordered_set<std::string>& negative);

}  // namespace affect
