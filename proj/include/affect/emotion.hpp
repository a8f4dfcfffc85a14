#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "affect/audio.hpp"
#include "affect/layers.hpp"
#include "affect/train.hpp"
#include "affect/wav.hpp"

namespace affect {

// The six modeled emotion categories; each gets an independent binary model.
inline constexpr std::array<std::string_view, 6> kEmotionCategories = {
    "criticism", "anxiety", "anger", "loneliness", "happiness", "sadness"};

bool is_emotion_category(const std::string& name);
std::vector<std::string> emotion_category_list();

// One-filter CNN over raw samples: overlapping windows of `window` samples
// every `step` samples, one convolution stage (affine + activation per
// window), max-pool over time, dense softmax over {negative, positive}.
// Defaults follow the real-time design point: at 8 kHz, 200 samples = 25 ms
// windows shifted by 50 samples (~6 ms).
struct EmotionCnnConfig {
  std::size_t window = 200;
  std::size_t step = 50;
  std::size_t hidden = 64;
  Act activation = Act::kRelu;
  std::uint32_t sample_rate = 8000;
};

void validate(const EmotionCnnConfig& cfg);

using EmotionExample = Labeled<AudioSegment>;

struct LabeledSegment {
  AudioSegment segment;
  std::string category;
};

struct EmotionModel {
  EmotionCnnConfig cfg;
  std::string category;
  EmbeddingLayer conv;  // the single convolution stage, applied per window
  DenseHead head;
  // Scalar standardization of raw samples, fit on the training split.
  double norm_mean = 0.0;
  double norm_std = 1.0;

  std::vector<NodePtr> params() const;
  NodePtr loss_forward(const EmotionExample& ex);
  // Positive-class probability for a segment already at cfg.sample_rate.
  double predict_positive(const EmotionExample& ex);
};

EmotionModel build_emotion_model(const EmotionCnnConfig& cfg,
                                 const std::string& category, Rng& rng);

// Stacks overlapping windows as matrix rows: floor((N - window)/step) + 1
// rows for N >= window, one zero-padded row otherwise.
Tensor emotion_windows(const std::vector<double>& samples, std::size_t window,
                       std::size_t step);

// Resamples to the model's rate when needed, then runs the forward pass.
// Empty audio raises EmptyInputError.
double predict_emotion(EmotionModel& model, const AudioSegment& seg);

// Balanced one-vs-rest task over the six categories (see make_binary_task).
Split<EmotionExample> make_emotion_task(
    const std::vector<LabeledSegment>& corpus,
    const std::string& positive_category, std::uint64_t seed);

struct EmotionTrainOutcome {
  TrainResult train;
  Metrics test;
};

// Fits input statistics on the training split, trains with early stopping,
// and reports metrics on the test split.
EmotionTrainOutcome train_emotion(EmotionModel& model,
                                  const Split<EmotionExample>& split,
                                  const TrainConfig& tc);

}  // namespace affect
