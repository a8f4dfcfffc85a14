#include <cmath>
#include <string>
#include <vector>

#include "affect/emotion.hpp"
#include "affect/errors.hpp"
#include "affect/rng.hpp"
#include "doctest.h"

using namespace affect;

namespace {

constexpr double kPi = 3.14159265358979323846;

AudioSegment tone(double hz, std::size_t n, std::uint32_t rate,
                  double amplitude) {
  AudioSegment seg;
  seg.sample_rate = rate;
  for (std::size_t i = 0; i < n; ++i) {
    seg.samples.push_back(amplitude * std::sin(2.0 * kPi * hz * i / rate));
  }
  return seg;
}

}  // namespace

TEST_SUITE("emotion") {

TEST_CASE("category registry") {
  CHECK(is_emotion_category("anger"));
  CHECK(is_emotion_category("loneliness"));
  CHECK_FALSE(is_emotion_category("joy"));
  CHECK(emotion_category_list().size() == 6);
}

TEST_CASE("config validation") {
  EmotionCnnConfig ok;
  CHECK_NOTHROW(validate(ok));
  EmotionCnnConfig bad = ok;
  bad.step = 0;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = ok;
  bad.step = bad.window + 1;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = ok;
  bad.hidden = 0;
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = ok;
  bad.sample_rate = 0;
  CHECK_THROWS_AS(validate(bad), ConfigError);
}

TEST_CASE("window stacking matches the frame-count formula") {
  std::vector<double> samples(1000, 0.5);
  const Tensor X = emotion_windows(samples, 200, 100);
  CHECK(X.rows() == 9);  // floor((1000-200)/100)+1
  CHECK(X.cols() == 200);

  std::vector<double> tiny(30, 1.0);
  const Tensor padded = emotion_windows(tiny, 200, 100);
  REQUIRE(padded.rows() == 1);
  CHECK(padded(0, 29) == 1.0);
  CHECK(padded(0, 30) == 0.0);
  CHECK(padded(0, 199) == 0.0);

  // Empty audio is treated as silence: one all-zero window.
  const Tensor empty = emotion_windows({}, 200, 100);
  REQUIRE(empty.rows() == 1);
  CHECK(empty(0, 0) == 0.0);
  CHECK(empty(0, 199) == 0.0);
}

TEST_CASE("model builder wires one conv stage and a two-class head") {
  EmotionCnnConfig cfg;
  cfg.window = 40;
  cfg.step = 20;
  cfg.hidden = 8;
  Rng rng(13);
  EmotionModel model = build_emotion_model(cfg, "anger", rng);
  CHECK(model.category == "anger");
  CHECK(model.params().size() == 4);  // conv W/b + head W/b
  CHECK(model.conv.W->value.rows() == 8);
  CHECK(model.conv.W->value.cols() == 40);
  CHECK(model.head.W->value.rows() == 2);
  CHECK(model.head.W->value.cols() == 8);

  CHECK_THROWS_AS(build_emotion_model(cfg, "boredom", rng), ConfigError);
}

TEST_CASE("prediction is a probability and loss is finite") {
  EmotionCnnConfig cfg;
  cfg.window = 40;
  cfg.step = 20;
  cfg.hidden = 6;
  Rng rng(14);
  EmotionModel model = build_emotion_model(cfg, "happiness", rng);

  EmotionExample ex{tone(440.0, 400, 8000, 0.5), true};
  const double p = model.predict_positive(ex);
  CHECK(p > 0.0);
  CHECK(p < 1.0);
  const NodePtr loss = model.loss_forward(ex);
  CHECK(std::isfinite(loss->value(0)));
  CHECK(loss->value(0) > 0.0);

  EmotionExample empty{{}, false};
  empty.item.sample_rate = 8000;
  CHECK_THROWS_AS(model.predict_positive(empty), EmptyInputError);
}

TEST_CASE("predict_emotion resamples to the model rate") {
  EmotionCnnConfig cfg;
  cfg.window = 40;
  cfg.step = 20;
  cfg.hidden = 6;
  Rng rng(15);
  EmotionModel model = build_emotion_model(cfg, "sadness", rng);

  const AudioSegment at16k = tone(300.0, 1600, 16000, 0.5);
  const AudioSegment at8k = resample(at16k, 8000);
  const double via_helper = predict_emotion(model, at16k);
  EmotionExample ex{at8k, false};
  const double direct = model.predict_positive(ex);
  CHECK(via_helper == doctest::Approx(direct).epsilon(1e-12));

  AudioSegment empty;
  empty.sample_rate = 8000;
  CHECK_THROWS_AS(predict_emotion(model, empty), EmptyInputError);
}

TEST_CASE("one-vs-rest task construction balances the classes") {
  std::vector<LabeledSegment> corpus;
  for (int i = 0; i < 12; ++i) {
    corpus.push_back({tone(200.0, 300, 8000, 0.5), "anger"});
  }
  for (int i = 0; i < 20; ++i) {
    corpus.push_back({tone(800.0, 300, 8000, 0.5), "happiness"});
  }
  const Split<EmotionExample> split = make_emotion_task(corpus, "anger", 21);
  std::size_t total = 0, positives = 0;
  for (const auto* part : {&split.train, &split.dev, &split.test}) {
    for (const auto& ex : *part) {
      ++total;
      if (ex.label) ++positives;
    }
  }
  CHECK(total == 24);
  CHECK(positives == 12);

  CHECK_THROWS_AS(make_emotion_task(corpus, "boredom", 21), ConfigError);
}

TEST_CASE("training fits input statistics and returns test metrics") {
  std::vector<LabeledSegment> corpus;
  for (int i = 0; i < 16; ++i) {
    corpus.push_back({tone(250.0, 240, 8000, 0.9), "anger"});
    corpus.push_back({tone(2000.0, 240, 8000, 0.2), "happiness"});
  }
  const Split<EmotionExample> split = make_emotion_task(corpus, "anger", 3);

  EmotionCnnConfig cfg;
  cfg.window = 80;
  cfg.step = 40;
  cfg.hidden = 6;
  Rng rng(16);
  EmotionModel model = build_emotion_model(cfg, "anger", rng);

  TrainConfig tc;
  tc.learning_rate = 0.05;
  tc.momentum = 0.5;
  tc.max_epochs = 15;
  tc.patience = 15;
  tc.batch_size = 8;
  tc.seed = 4;
  const EmotionTrainOutcome outcome = train_emotion(model, split, tc);

  CHECK(model.norm_std > 0.0);
  CHECK(model.norm_std != 1.0);  // statistics actually fit
  CHECK(!outcome.train.log.empty());
  CHECK(outcome.test.accuracy >= 0.0);
  CHECK(outcome.test.accuracy <= 1.0);
}

}  // TEST_SUITE
