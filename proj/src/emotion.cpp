#include "affect/emotion.hpp"

#include <cmath>

#include "affect/errors.hpp"

namespace affect {

bool is_emotion_category(const std::string& name) {
  for (std::string_view c : kEmotionCategories) {
    if (c == name) return true;
  }
  return false;
}

std::vector<std::string> emotion_category_list() {
  return {kEmotionCategories.begin(), kEmotionCategories.end()};
}

void validate(const EmotionCnnConfig& cfg) {
  if (cfg.window == 0 || cfg.step == 0 || cfg.step > cfg.window) {
    throw ConfigError("emotion: require 0 < step <= window");
  }
  if (cfg.hidden == 0) throw ConfigError("emotion: hidden size must be >= 1");
  if (cfg.sample_rate == 0) throw ConfigError("emotion: sample_rate must be > 0");
}

Tensor emotion_windows(const std::vector<double>& samples, std::size_t window,
                       std::size_t step) {
  const std::size_t n = samples.size();
  if (n < window) {
    Tensor x = Tensor::zeros({1, window});
    for (std::size_t i = 0; i < n; ++i) x.data[i] = samples[i];
    return x;
  }
  const std::size_t count = (n - window) / step + 1;
  Tensor x = Tensor::zeros({count, window});
  for (std::size_t t = 0; t < count; ++t) {
    for (std::size_t i = 0; i < window; ++i) {
      x(t, i) = samples[t * step + i];
    }
  }
  return x;
}

EmotionModel build_emotion_model(const EmotionCnnConfig& cfg,
                                 const std::string& category, Rng& rng) {
  validate(cfg);
  if (!is_emotion_category(category)) {
    throw ConfigError("emotion: unknown category '" + category + "'");
  }
  EmotionModel model;
  model.cfg = cfg;
  model.category = category;
  model.conv =
      make_embedding_layer(cfg.hidden, cfg.window, cfg.activation, rng, "conv");
  model.head = make_dense_head(2, cfg.hidden, rng, "head");
  return model;
}

namespace {

NodePtr emotion_probs(const EmotionModel& m, const std::vector<double>& samples) {
  std::vector<double> normalized(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    normalized[i] = (samples[i] - m.norm_mean) / m.norm_std;
  }
  const NodePtr x =
      make_const(emotion_windows(normalized, m.cfg.window, m.cfg.step));
  const NodePtr h = g_rowwise_affine(m.conv.W, m.conv.b, x, m.conv.f);
  const NodePtr pooled = g_maxpool_rows(h);
  return g_softmax(head_logits(m.head, pooled));
}

}  // namespace

std::vector<NodePtr> EmotionModel::params() const {
  return {conv.W, conv.b, head.W, head.b};
}

NodePtr EmotionModel::loss_forward(const EmotionExample& ex) {
  if (ex.item.samples.empty()) {
    throw EmptyInputError("emotion: empty audio segment");
  }
  return g_cross_entropy(emotion_probs(*this, ex.item.samples),
                         ex.label ? 1 : 0);
}

double EmotionModel::predict_positive(const EmotionExample& ex) {
  if (ex.item.samples.empty()) {
    throw EmptyInputError("emotion: empty audio segment");
  }
  return emotion_probs(*this, ex.item.samples)->value.data[1];
}

double predict_emotion(EmotionModel& model, const AudioSegment& seg) {
  if (seg.samples.empty()) {
    throw EmptyInputError("predict_emotion: empty audio segment");
  }
  EmotionExample ex;
  ex.item = seg.sample_rate == model.cfg.sample_rate
                ? seg
                : resample(seg, model.cfg.sample_rate);
  return model.predict_positive(ex);
}

Split<EmotionExample> make_emotion_task(
    const std::vector<LabeledSegment>& corpus,
    const std::string& positive_category, std::uint64_t seed) {
  std::vector<LabeledSegment> items = corpus;
  Split<Labeled<LabeledSegment>> raw = make_binary_task(
      items, [](const LabeledSegment& s) { return s.category; },
      positive_category, emotion_category_list(), seed);
  Split<EmotionExample> out;
  const auto convert = [](const std::vector<Labeled<LabeledSegment>>& in,
                          std::vector<EmotionExample>& dst) {
    dst.reserve(in.size());
    for (const auto& x : in) dst.push_back({x.item.segment, x.label});
  };
  convert(raw.train, out.train);
  convert(raw.dev, out.dev);
  convert(raw.test, out.test);
  return out;
}

EmotionTrainOutcome train_emotion(EmotionModel& model,
                                  const Split<EmotionExample>& split,
                                  const TrainConfig& tc) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const EmotionExample& ex : split.train) {
    for (double v : ex.item.samples) sum += v;
    n += ex.item.samples.size();
  }
  if (n == 0) throw ConfigError("train_emotion: training split has no audio");
  model.norm_mean = sum / static_cast<double>(n);
  double var = 0.0;
  for (const EmotionExample& ex : split.train) {
    for (double v : ex.item.samples) {
      const double d = v - model.norm_mean;
      var += d * d;
    }
  }
  model.norm_std = std::sqrt(var / static_cast<double>(n));
  if (model.norm_std < 1e-8) model.norm_std = 1e-8;

  EmotionTrainOutcome outcome;
  outcome.train = train(model, split, tc);
  outcome.test = split.test.empty() ? Metrics{} : evaluate(model, split.test);
  return outcome;
}

}  // namespace affect
