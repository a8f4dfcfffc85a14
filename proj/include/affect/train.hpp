#pragma once

#include <chrono>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "affect/errors.hpp"
#include "affect/graph.hpp"
#include "affect/rng.hpp"
#include "affect/tensor.hpp"

namespace affect {

struct TrainConfig {
  double learning_rate = 1e-5;
  double momentum = 0.9;
  std::size_t max_epochs = 100;
  std::size_t patience = 5;  // epochs without dev improvement before stopping
  std::uint64_t seed = 1;
  std::size_t batch_size = 16;
};

void validate(const TrainConfig& cfg);

template <typename T>
struct Split {
  std::vector<T> train, dev, test;
};

struct Metrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Binary metrics on the positive class; undefined ratios (empty denominator)
// are reported as 0.
Metrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t tn,
                            std::size_t fn);

double f1_score(double precision, double recall);

// One line per epoch: `epoch,train_loss,dev_error,elapsed_ms`. Everything but
// elapsed_ms is deterministic given the seed; elapsed_ms is wall clock.
struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double dev_error = 0.0;
  std::int64_t elapsed_ms = 0;
};

std::string epoch_log_line(const EpochRecord& r);

// v ← momentum·v − lr·g ; p ← p + v
void sgd_momentum_step(std::vector<Tensor>& params,
                       const std::vector<Tensor>& grads,
                       std::vector<Tensor>& velocity, const TrainConfig& cfg);

// Same update applied to tape parameters (gradients live on the nodes),
// with grads scaled by `grad_scale` (1/batch size).
void sgd_momentum_step(const std::vector<NodePtr>& params,
                       std::vector<Tensor>& velocity, const TrainConfig& cfg,
                       double grad_scale);

// Per-feature standardization. Statistics are computed once on the training
// set (population std, floored at 1e-8 so constant features map to zero) and
// reapplied unchanged everywhere else.
struct Normalizer {
  Tensor mean;
  Tensor std_dev;

  Tensor apply(const Tensor& x) const;
};

Normalizer fit_normalizer(const std::vector<Tensor>& examples);
Normalizer normalize_dataset(std::vector<Tensor>& examples);  // in place

// The documented shuffle (used everywhere a seeded order is needed so that
// expected outputs can be derived outside this codebase):
//   for i = n-1 down to 1: j = rng.next_below(i+1); swap(a[i], a[j])
template <typename T>
void fisher_yates(std::vector<T>& a, Rng& rng) {
  for (std::size_t i = a.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(a[i - 1], a[j]);
  }
}

// dev/test sizes for an 80/10/10 split of n items: floor(n/10) each when
// n >= 10; 1/1 (best-effort, flagged) when 3 <= n < 10; 0/0 below that.
struct SplitCounts {
  std::size_t dev = 0;
  std::size_t test = 0;
  bool best_effort = false;
};

SplitCounts split_counts(std::size_t n);

// Shuffles items and carves dev = first dev-count, test = next test-count,
// train = remainder.
template <typename T>
Split<T> split_80_10_10(std::vector<T> items, Rng& rng,
                        bool* best_effort = nullptr) {
  fisher_yates(items, rng);
  const SplitCounts counts = split_counts(items.size());
  if (best_effort) *best_effort = counts.best_effort;
  Split<T> out;
  std::size_t at = 0;
  for (std::size_t i = 0; i < counts.dev; ++i) out.dev.push_back(items[at++]);
  for (std::size_t i = 0; i < counts.test; ++i)
    out.test.push_back(items[at++]);
  while (at < items.size()) out.train.push_back(items[at++]);
  return out;
}

template <typename Item>
struct Labeled {
  Item item;
  bool label = false;
};

// Balanced binary task: positives are the items of `positive_category`,
// negatives a uniform seeded draw (without replacement) from the remaining
// items at a 1:1 ratio, then an 80/10/10 shuffle-split. Unknown categories,
// an empty positive class, and too few negatives are configuration errors.
template <typename Item, typename CategoryFn>
Split<Labeled<Item>> make_binary_task(
    const std::vector<Item>& items, CategoryFn category_of,
    const std::string& positive_category,
    const std::vector<std::string>& valid_categories, std::uint64_t seed) {
  const auto known = [&](const std::string& c) {
    for (const std::string& v : valid_categories)
      if (v == c) return true;
    return false;
  };
  if (!known(positive_category)) {
    throw ConfigError("make_binary_task: unknown category '" +
                      positive_category + "'");
  }
  std::vector<Labeled<Item>> positives;
  std::vector<Item> others;
  for (const Item& item : items) {
    const std::string c = category_of(item);
    if (!known(c)) {
      throw ConfigError("make_binary_task: item labeled with unknown "
                        "category '" +
                        c + "'");
    }
    if (c == positive_category) {
      positives.push_back({item, true});
    } else {
      others.push_back(item);
    }
  }
  if (positives.empty()) {
    throw ConfigError("make_binary_task: no items of category '" +
                      positive_category + "'");
  }
  if (others.size() < positives.size()) {
    throw ConfigError(
        "make_binary_task: cannot reach a 1:1 ratio; " +
        std::to_string(positives.size()) + " positives but only " +
        std::to_string(others.size()) + " candidate negatives");
  }
  Rng rng(seed);
  fisher_yates(others, rng);
  std::vector<Labeled<Item>> combined = positives;
  for (std::size_t i = 0; i < positives.size(); ++i) {
    combined.push_back({others[i], false});
  }
  return split_80_10_10(std::move(combined), rng);
}

// A trainable model builds a fresh scalar-loss tape per labeled example and
// predicts the positive-class probability with dropout disabled.
template <typename M, typename Ex>
concept TrainableModel = requires(M m, const Ex& ex) {
  { m.params() } -> std::convertible_to<std::vector<NodePtr>>;
  { m.loss_forward(ex) } -> std::convertible_to<NodePtr>;
  { m.predict_positive(ex) } -> std::convertible_to<double>;
};

template <typename Ex>
concept LabeledExample = requires(const Ex& ex) {
  { ex.label } -> std::convertible_to<bool>;
};

template <typename M, typename Ex>
  requires TrainableModel<M, Ex> && LabeledExample<Ex>
Metrics evaluate(M& model, const std::vector<Ex>& examples) {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (const Ex& ex : examples) {
    const bool predicted = model.predict_positive(ex) >= 0.5;
    const bool actual = ex.label;
    if (predicted && actual) ++tp;
    else if (predicted && !actual) ++fp;
    else if (!predicted && !actual) ++tn;
    else ++fn;
  }
  return metrics_from_counts(tp, fp, tn, fn);
}

struct TrainResult {
  std::vector<EpochRecord> log;
  std::size_t best_epoch = 0;
  double best_dev_error = std::numeric_limits<double>::infinity();
};

// Mini-batch momentum SGD with early stopping: stops once the dev error has
// not improved for `patience` consecutive epochs (or at max_epochs) and
// restores the parameters of the best dev epoch before returning.
template <typename M, typename Ex>
  requires TrainableModel<M, Ex> && LabeledExample<Ex>
TrainResult train(M& model, const Split<Ex>& split, const TrainConfig& cfg) {
  validate(cfg);
  if (split.train.empty() || split.dev.empty()) {
    throw ConfigError("train: empty train or dev split");
  }

  std::vector<NodePtr> params = model.params();
  std::vector<Tensor> velocity;
  velocity.reserve(params.size());
  for (const auto& p : params) velocity.push_back(Tensor::zeros(p->value.shape));

  Rng rng(cfg.seed);
  std::vector<std::size_t> order(split.train.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  TrainResult result;
  std::vector<Tensor> best_params;
  best_params.reserve(params.size());
  for (const auto& p : params) best_params.push_back(p->value);
  result.best_epoch = 0;
  std::size_t epochs_since_improvement = 0;

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    fisher_yates(order, rng);

    double loss_sum = 0.0;
    std::size_t at = 0;
    while (at < order.size()) {
      const std::size_t batch_end =
          std::min(at + cfg.batch_size, order.size());
      zero_grads(params);
      for (std::size_t i = at; i < batch_end; ++i) {
        NodePtr root = model.loss_forward(split.train[order[i]]);
        backward(root);
        loss_sum += root->value.data[0];
      }
      sgd_momentum_step(params, velocity, cfg,
                        1.0 / static_cast<double>(batch_end - at));
      at = batch_end;
    }

    std::size_t dev_wrong = 0;
    for (const Ex& ex : split.dev) {
      const bool predicted = model.predict_positive(ex) >= 0.5;
      if (predicted != static_cast<bool>(ex.label)) ++dev_wrong;
    }
    const double dev_error =
        static_cast<double>(dev_wrong) / static_cast<double>(split.dev.size());

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / static_cast<double>(split.train.size());
    rec.dev_error = dev_error;
    rec.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
    result.log.push_back(rec);

    if (dev_error < result.best_dev_error) {
      result.best_dev_error = dev_error;
      result.best_epoch = epoch;
      for (std::size_t i = 0; i < params.size(); ++i)
        best_params[i] = params[i]->value;
      epochs_since_improvement = 0;
    } else {
      ++epochs_since_improvement;
      if (epochs_since_improvement >= cfg.patience) break;
    }
  }

  for (std::size_t i = 0; i < params.size(); ++i)
    params[i]->value = best_params[i];
  return result;
}

}  // namespace affect
