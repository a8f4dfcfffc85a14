#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "affect/tensor.hpp"

namespace affect {

// Reverse-mode autodiff over a dynamically built tape.
//
// Every forward operation allocates a Node holding its output value and a
// closure that, given this node's gradient, accumulates into the parents'
// gradients. backward() walks the tape from a scalar root in reverse
// topological order. Parameters are long-lived leaf nodes whose .grad
// persists across tapes (zeroed explicitly by the optimizer); interior nodes
// are rebuilt on every forward pass with freshly zeroed gradients.
struct Node {
  Tensor value;
  Tensor grad;  // same shape as value
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void()> backprop;  // no-op for leaves
  bool requires_grad = true;
  std::string name;  // set for parameters; used in gradient-check reports
};

using NodePtr = std::shared_ptr<Node>;

// Leaf constructors.
NodePtr make_param(Tensor value, std::string name);
NodePtr make_const(Tensor value);  // requires_grad = false, grads not tracked

void zero_grad(const NodePtr& n);
void zero_grads(const std::vector<NodePtr>& params);

// Runs the backward sweep from a scalar root, accumulating += into every
// reachable node's grad (so per-example calls within a mini-batch sum up).
void backward(const NodePtr& root);

// Tracks whether a forward pass has been recorded so that a stray backward
// call fails loudly instead of silently reusing a stale tape.
class Tape {
 public:
  void record(NodePtr root);
  void backward();  // state error when nothing recorded / already consumed
  const NodePtr& root() const { return root_; }

 private:
  NodePtr root_;
  bool armed_ = false;
};

// ---- operations ------------------------------------------------------------

NodePtr g_add(const NodePtr& a, const NodePtr& b);
NodePtr g_hadamard(const NodePtr& a, const NodePtr& b);
NodePtr g_scale(const NodePtr& a, double s);
NodePtr g_act(const NodePtr& x, Act f);
NodePtr g_matvec(const NodePtr& W, const NodePtr& x);
NodePtr g_affine(const NodePtr& W, const NodePtr& x, const NodePtr& b);
NodePtr g_concat(const std::vector<NodePtr>& parts);  // rank-1 concatenation
NodePtr g_sum(const NodePtr& x);                      // scalar Σ elements

// Row t of a rank-2 node as a rank-1 node.
NodePtr g_row(const NodePtr& X, std::size_t t);

// Stacks rank-1 embedding rows E[idx[0]], ..., E[idx[T-1]] into (T x d);
// backward scatters into the selected rows of E.
NodePtr g_gather_rows(const NodePtr& E, const std::vector<std::size_t>& idx);

// Stacks equal-length vector nodes as the rows of a matrix node.
NodePtr g_stack_rows(const std::vector<NodePtr>& rows);

// Position-wise dense layer over the rows of X (T x d_in) -> (T x d_out):
// row_i = f(W row_i + b).
NodePtr g_rowwise_affine(const NodePtr& W, const NodePtr& b, const NodePtr& X,
                         Act f);

// Centered convolution over the rows of X (T x d_in) -> (T x d_out) with an
// odd window c and zero-row padding beyond the ends: output row i applies
// f(W · concat(rows i-c/2 .. i+c/2) + b). Length-preserving.
NodePtr g_conv_centered(const NodePtr& W, const NodePtr& b, const NodePtr& X,
                        std::size_t c, Act f);

// Valid n-gram convolution: output row i (0 <= i <= T-h) applies
// f(W · concat(rows i .. i+h-1) + b), giving (T-h+1 x d_out). Requires T >= h.
NodePtr g_conv_ngram(const NodePtr& W, const NodePtr& b, const NodePtr& X,
                     std::size_t h, Act f);

// Per-column max over the rows of X (T x d) -> (d). Gradient flows to the
// first row attaining each column's max (deterministic tie-break).
NodePtr g_maxpool_rows(const NodePtr& X);

// Elementwise x ⊙ mask with a fixed (pre-scaled) dropout mask.
NodePtr g_dropout(const NodePtr& x, Tensor mask);

NodePtr g_softmax(const NodePtr& logits);
// -log(max(probs[label], 1e-12)) as a scalar node.
NodePtr g_cross_entropy(const NodePtr& probs, std::size_t label);

}  // namespace affect
