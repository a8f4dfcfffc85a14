#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "affect/rng.hpp"

namespace affect {

// Dense row-major tensor of doubles. Rank 1 and 2 cover everything the
// models need; the shape vector stays general so callers can carry e.g.
// (frames x dims) blocks around without extra types.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;

  static Tensor zeros(std::vector<std::size_t> shape);
  static Tensor vec(std::vector<double> values);
  static Tensor mat(std::size_t rows, std::size_t cols,
                    std::vector<double> values);

  std::size_t numel() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  // rank-2 accessors; rank checked in debug-style asserts only on the
  // shaped constructors, bounds are the caller's job on the hot path.
  std::size_t rows() const;
  std::size_t cols() const;

  double& operator()(std::size_t i) { return data[i]; }
  double operator()(std::size_t i) const { return data[i]; }
  double& operator()(std::size_t i, std::size_t j) {
    return data[i * cols() + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data[i * cols() + j];
  }
};

// "(3x4)" / "(7)" — used in every DimensionError message so mismatches name
// both shapes.
std::string shape_str(const Tensor& t);

Tensor add(const Tensor& a, const Tensor& b);
void add_inplace(Tensor& a, const Tensor& b);
void axpy_inplace(Tensor& a, double s, const Tensor& b);  // a += s*b
Tensor sub(const Tensor& a, const Tensor& b);
Tensor hadamard(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
double dot(const Tensor& a, const Tensor& b);

// W (m x n) * x (n) -> (m)
Tensor matvec(const Tensor& W, const Tensor& x);
// W^T (n x m) * y (m) -> (n); used by backward passes.
Tensor matvec_transposed(const Tensor& W, const Tensor& y);
// W += u v^T
void add_outer(Tensor& W, const Tensor& u, const Tensor& v);

// W*x + b with full shape conformance checks.
Tensor affine(const Tensor& W, const Tensor& x, const Tensor& b);

// Elementwise nonlinearities. Gradients are expressed in terms of the
// activation *output* y, which is what the tape stores:
//   sigmoid: y*(1-y)   tanh: 1-y^2   relu: y>0 ? 1 : 0 (0 at the kink)
enum class Act { kLinear, kSigmoid, kTanh, kRelu };

const char* act_name(Act a);
Act act_from_name(const std::string& name);
double act_apply(double x, Act a);
double act_grad_from_y(double y, Act a);
Tensor act_apply(const Tensor& x, Act a);

// Numerically stable softmax over a rank-1 tensor (max subtracted before
// exponentiation). Output sums to 1 and preserves the argmax.
Tensor softmax(const Tensor& v);

// -log(probs[target]) with probabilities floored at 1e-12 so a confidently
// wrong model yields a large finite loss instead of inf.
double cross_entropy(const Tensor& probs, std::size_t target);

Tensor random_uniform(std::vector<std::size_t> shape, double lo, double hi,
                      Rng& rng);

}  // namespace affect
