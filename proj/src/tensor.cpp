#include "affect/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "affect/errors.hpp"

namespace affect {

namespace {

std::size_t shape_numel(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return shape.empty() ? 0 : n;
}

void check_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(op) + ": shape " + shape_str(a) +
                         " does not conform with " + shape_str(b));
  }
}

}  // namespace

Tensor Tensor::zeros(std::vector<std::size_t> shape) {
  Tensor t;
  t.data.assign(shape_numel(shape), 0.0);
  t.shape = std::move(shape);
  return t;
}

Tensor Tensor::vec(std::vector<double> values) {
  Tensor t;
  t.shape = {values.size()};
  t.data = std::move(values);
  return t;
}

Tensor Tensor::mat(std::size_t rows, std::size_t cols,
                   std::vector<double> values) {
  if (values.size() != rows * cols) {
    throw DimensionError("mat: " + std::to_string(values.size()) +
                         " values cannot fill (" + std::to_string(rows) + "x" +
                         std::to_string(cols) + ")");
  }
  Tensor t;
  t.shape = {rows, cols};
  t.data = std::move(values);
  return t;
}

std::size_t Tensor::rows() const {
  if (rank() != 2)
    throw DimensionError("rows: tensor " + shape_str(*this) + " is not rank 2");
  return shape[0];
}

std::size_t Tensor::cols() const {
  if (rank() != 2)
    throw DimensionError("cols: tensor " + shape_str(*this) + " is not rank 2");
  return shape[1];
}

std::string shape_str(const Tensor& t) {
  std::string s = "(";
  for (std::size_t i = 0; i < t.shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(t.shape[i]);
  }
  return s + ")";
}

Tensor add(const Tensor& a, const Tensor& b) {
  check_same_shape("add", a, b);
  Tensor out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] += b.data[i];
  return out;
}

void add_inplace(Tensor& a, const Tensor& b) {
  check_same_shape("add", a, b);
  for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += b.data[i];
}

void axpy_inplace(Tensor& a, double s, const Tensor& b) {
  check_same_shape("axpy", a, b);
  for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += s * b.data[i];
}

Tensor sub(const Tensor& a, const Tensor& b) {
  check_same_shape("sub", a, b);
  Tensor out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] -= b.data[i];
  return out;
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
  check_same_shape("hadamard", a, b);
  Tensor out = a;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= b.data[i];
  return out;
}

Tensor scale(const Tensor& a, double s) {
  Tensor out = a;
  for (double& v : out.data) v *= s;
  return out;
}

double dot(const Tensor& a, const Tensor& b) {
  check_same_shape("dot", a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) acc += a.data[i] * b.data[i];
  return acc;
}

Tensor matvec(const Tensor& W, const Tensor& x) {
  if (W.rank() != 2 || x.rank() != 1 || W.cols() != x.numel()) {
    throw DimensionError("matvec: shape " + shape_str(W) +
                         " does not conform with " + shape_str(x));
  }
  Tensor out = Tensor::zeros({W.rows()});
  const std::size_t m = W.rows(), n = W.cols();
  for (std::size_t i = 0; i < m; ++i) {
    double acc = 0.0;
    const double* row = &W.data[i * n];
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * x.data[j];
    out.data[i] = acc;
  }
  return out;
}

Tensor matvec_transposed(const Tensor& W, const Tensor& y) {
  if (W.rank() != 2 || y.rank() != 1 || W.rows() != y.numel()) {
    throw DimensionError("matvec_transposed: shape " + shape_str(W) +
                         " does not conform with " + shape_str(y));
  }
  Tensor out = Tensor::zeros({W.cols()});
  const std::size_t m = W.rows(), n = W.cols();
  for (std::size_t i = 0; i < m; ++i) {
    const double yi = y.data[i];
    const double* row = &W.data[i * n];
    for (std::size_t j = 0; j < n; ++j) out.data[j] += row[j] * yi;
  }
  return out;
}

void add_outer(Tensor& W, const Tensor& u, const Tensor& v) {
  if (W.rank() != 2 || u.rank() != 1 || v.rank() != 1 ||
      W.rows() != u.numel() || W.cols() != v.numel()) {
    throw DimensionError("add_outer: shape " + shape_str(W) +
                         " does not conform with " + shape_str(u) + " x " +
                         shape_str(v));
  }
  const std::size_t m = W.rows(), n = W.cols();
  for (std::size_t i = 0; i < m; ++i) {
    double* row = &W.data[i * n];
    const double ui = u.data[i];
    for (std::size_t j = 0; j < n; ++j) row[j] += ui * v.data[j];
  }
}

Tensor affine(const Tensor& W, const Tensor& x, const Tensor& b) {
  if (b.rank() != 1 || W.rank() != 2 || W.rows() != b.numel()) {
    throw DimensionError("affine: shape " + shape_str(W) +
                         " does not conform with bias " + shape_str(b));
  }
  Tensor out = matvec(W, x);
  add_inplace(out, b);
  return out;
}

const char* act_name(Act a) {
  switch (a) {
    case Act::kLinear: return "linear";
    case Act::kSigmoid: return "sigmoid";
    case Act::kTanh: return "tanh";
    case Act::kRelu: return "relu";
  }
  return "?";
}

Act act_from_name(const std::string& name) {
  if (name == "linear") return Act::kLinear;
  if (name == "sigmoid") return Act::kSigmoid;
  if (name == "tanh") return Act::kTanh;
  if (name == "relu") return Act::kRelu;
  throw ConfigError("unknown activation '" + name + "'");
}

double act_apply(double x, Act a) {
  switch (a) {
    case Act::kLinear: return x;
    case Act::kSigmoid: return 1.0 / (1.0 + std::exp(-x));
    case Act::kTanh: return std::tanh(x);
    case Act::kRelu: return x > 0.0 ? x : 0.0;
  }
  return x;
}

double act_grad_from_y(double y, Act a) {
  switch (a) {
    case Act::kLinear: return 1.0;
    case Act::kSigmoid: return y * (1.0 - y);
    case Act::kTanh: return 1.0 - y * y;
    case Act::kRelu: return y > 0.0 ? 1.0 : 0.0;
  }
  return 1.0;
}

Tensor act_apply(const Tensor& x, Act a) {
  Tensor out = x;
  for (double& v : out.data) v = act_apply(v, a);
  return out;
}

Tensor softmax(const Tensor& v) {
  if (v.rank() != 1 || v.numel() == 0) {
    throw DimensionError("softmax: expected non-empty rank-1 input, got " +
                         shape_str(v));
  }
  const double mx = *std::max_element(v.data.begin(), v.data.end());
  Tensor out = v;
  double sum = 0.0;
  for (double& e : out.data) {
    e = std::exp(e - mx);
    sum += e;
  }
  for (double& e : out.data) e /= sum;
  return out;
}

double cross_entropy(const Tensor& probs, std::size_t target) {
  if (target >= probs.numel()) {
    throw IndexError("cross_entropy: target " + std::to_string(target) +
                     " out of range for " + shape_str(probs));
  }
  return -std::log(std::max(probs.data[target], 1e-12));
}

Tensor random_uniform(std::vector<std::size_t> shape, double lo, double hi,
                      Rng& rng) {
  Tensor t = Tensor::zeros(std::move(shape));
  for (double& v : t.data) v = rng.next_uniform(lo, hi);
  return t;
}

}  // namespace affect
