#include "affect/train.hpp"

#include <cmath>
#include <cstdio>

namespace affect {

void validate(const TrainConfig& cfg) {
  if (!(cfg.learning_rate > 0.0)) {
    throw ConfigError("train: learning_rate must be positive");
  }
  if (cfg.momentum < 0.0 || cfg.momentum >= 1.0) {
    throw ConfigError("train: momentum must lie in [0, 1)");
  }
  if (cfg.max_epochs == 0) throw ConfigError("train: max_epochs must be >= 1");
  if (cfg.patience == 0) throw ConfigError("train: patience must be >= 1");
  if (cfg.batch_size == 0) throw ConfigError("train: batch_size must be >= 1");
}

Metrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t tn,
                            std::size_t fn) {
  Metrics m;
  const std::size_t total = tp + fp + tn + fn;
  if (total == 0) throw EmptyInputError("metrics_from_counts: no examples");
  m.accuracy = static_cast<double>(tp + tn) / static_cast<double>(total);
  m.precision =
      (tp + fp) ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  m.recall =
      (tp + fn) ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  m.f1 = f1_score(m.precision, m.recall);
  return m;
}

double f1_score(double precision, double recall) {
  const double denom = precision + recall;
  return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

std::string epoch_log_line(const EpochRecord& r) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g,%lld", r.epoch,
                r.train_loss, r.dev_error,
                static_cast<long long>(r.elapsed_ms));
  return buf;
}

void sgd_momentum_step(std::vector<Tensor>& params,
                       const std::vector<Tensor>& grads,
                       std::vector<Tensor>& velocity, const TrainConfig& cfg) {
  if (params.size() != grads.size() || params.size() != velocity.size()) {
    throw DimensionError("sgd_momentum_step: params/grads/velocity disagree");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = params[i];
    const Tensor& g = grads[i];
    Tensor& v = velocity[i];
    if (!p.same_shape(g) || !p.same_shape(v)) {
      throw DimensionError("sgd_momentum_step: shape mismatch between " +
                           shape_str(p) + " and " + shape_str(g));
    }
    for (std::size_t k = 0; k < p.data.size(); ++k) {
      v.data[k] = cfg.momentum * v.data[k] - cfg.learning_rate * g.data[k];
      p.data[k] += v.data[k];
    }
  }
}

void sgd_momentum_step(const std::vector<NodePtr>& params,
                       std::vector<Tensor>& velocity, const TrainConfig& cfg,
                       double grad_scale) {
  if (params.size() != velocity.size()) {
    throw DimensionError("sgd_momentum_step: params/velocity disagree");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& p = params[i]->value;
    const Tensor& g = params[i]->grad;
    Tensor& v = velocity[i];
    for (std::size_t k = 0; k < p.data.size(); ++k) {
      v.data[k] =
          cfg.momentum * v.data[k] - cfg.learning_rate * grad_scale * g.data[k];
      p.data[k] += v.data[k];
    }
  }
}

Tensor Normalizer::apply(const Tensor& x) const {
  if (!x.same_shape(mean)) {
    throw DimensionError("Normalizer: input " + shape_str(x) +
                         " does not match statistics " + shape_str(mean));
  }
  Tensor out = x;
  for (std::size_t i = 0; i < out.data.size(); ++i) {
    out.data[i] = (out.data[i] - mean.data[i]) / std_dev.data[i];
  }
  return out;
}

Normalizer fit_normalizer(const std::vector<Tensor>& examples) {
  if (examples.size() < 2) {
    throw ConfigError("fit_normalizer: need at least 2 examples");
  }
  const Tensor& first = examples.front();
  for (const Tensor& t : examples) {
    if (!t.same_shape(first)) {
      throw DimensionError("fit_normalizer: mixed shapes " + shape_str(first) +
                           " and " + shape_str(t));
    }
  }
  const double n = static_cast<double>(examples.size());
  Normalizer norm;
  norm.mean = Tensor::zeros(first.shape);
  norm.std_dev = Tensor::zeros(first.shape);
  for (const Tensor& t : examples) {
    for (std::size_t i = 0; i < t.data.size(); ++i)
      norm.mean.data[i] += t.data[i];
  }
  for (double& m : norm.mean.data) m /= n;
  for (const Tensor& t : examples) {
    for (std::size_t i = 0; i < t.data.size(); ++i) {
      const double d = t.data[i] - norm.mean.data[i];
      norm.std_dev.data[i] += d * d;
    }
  }
  for (double& s : norm.std_dev.data) {
    s = std::sqrt(s / n);
    if (s < 1e-8) s = 1e-8;
  }
  return norm;
}

Normalizer normalize_dataset(std::vector<Tensor>& examples) {
  Normalizer norm = fit_normalizer(examples);
  for (Tensor& t : examples) t = norm.apply(t);
  return norm;
}

SplitCounts split_counts(std::size_t n) {
  SplitCounts c;
  if (n >= 10) {
    c.dev = n / 10;
    c.test = n / 10;
  } else if (n >= 3) {
    c.dev = 1;
    c.test = 1;
    c.best_effort = true;
  } else {
    c.best_effort = true;
  }
  return c;
}

}  // namespace affect
