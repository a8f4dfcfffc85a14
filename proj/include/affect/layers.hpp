#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "affect/graph.hpp"
#include "affect/rng.hpp"
#include "affect/tensor.hpp"

namespace affect {

// Uniform init in ±sqrt(6/(fan_in+fan_out)); biases start at zero.
Tensor glorot_uniform(std::size_t fan_out, std::size_t fan_in,
                      std::vector<std::size_t> shape, Rng& rng);

// Stacks T rank-1 tensors of equal dimension into a (T x d) tensor.
Tensor stack_rows(const std::vector<Tensor>& rows);
std::vector<Tensor> unstack_rows(const Tensor& X);

// ---- embedding layer: row_i -> f(W row_i + b) ------------------------------

struct EmbeddingLayer {
  NodePtr W;  // (d_out x d_in)
  NodePtr b;  // (d_out)
  Act f = Act::kTanh;

  std::size_t out_dim() const { return W->value.rows(); }
  std::vector<NodePtr> params() const { return {W, b}; }
};

EmbeddingLayer make_embedding_layer(std::size_t d_out, std::size_t d_in, Act f,
                                    Rng& rng, const std::string& name);

NodePtr embed_node(const EmbeddingLayer& layer, const NodePtr& X);
std::vector<Tensor> embed_forward(const EmbeddingLayer& layer,
                                  const std::vector<Tensor>& xs);

// ---- centered convolution (odd window, zero padding, length-preserving) ----

struct ConvLayer {
  NodePtr W;       // (d_out x c*d_in)
  NodePtr b;       // (d_out)
  std::size_t c = 1;  // odd window size
  Act f = Act::kTanh;

  std::size_t out_dim() const { return W->value.rows(); }
  std::vector<NodePtr> params() const { return {W, b}; }
};

ConvLayer make_conv_layer(std::size_t d_out, std::size_t d_in, std::size_t c,
                          Act f, Rng& rng, const std::string& name);

NodePtr conv_node(const ConvLayer& layer, const NodePtr& X);
std::vector<Tensor> conv_forward(const ConvLayer& layer,
                                 const std::vector<Tensor>& xs);

// ---- valid n-gram convolution ----------------------------------------------
// Slides a height-h filter over full rows without padding: (T x d_in) ->
// (T-h+1 x d_out). Sentence and frame encoders pad their inputs up to h rows
// before calling, so every admissible input yields at least one position.

struct NgramConv {
  NodePtr W;  // (maps x h*d_in)
  NodePtr b;  // (maps)
  std::size_t h = 3;
  Act f = Act::kTanh;

  std::size_t out_dim() const { return W->value.rows(); }
  std::vector<NodePtr> params() const { return {W, b}; }
};

NgramConv make_ngram_conv(std::size_t maps, std::size_t d_in, std::size_t h,
                          Act f, Rng& rng, const std::string& name);

NodePtr ngram_node(const NgramConv& layer, const NodePtr& X);

// ---- max-over-time pooling ---------------------------------------------------

Tensor maxpool_time(const std::vector<Tensor>& xs);

// ---- LSTM cell ---------------------------------------------------------------
// i = σ(Wix x + Wih h + bi)        f = σ(Wfx x + Wfh h + bf)
// o = σ(Wox x + Woh h + bo)        s = tanh(Wsx x + Wsh h + bs)
// c_t = f ⊙ c_{t-1} + i ⊙ s        h_t = tanh(c_t) ⊙ o

struct LstmCell {
  NodePtr Wix, Wih, bi;
  NodePtr Wfx, Wfh, bf;
  NodePtr Wox, Woh, bo;
  NodePtr Wsx, Wsh, bs;
  std::size_t hidden = 0;

  std::vector<NodePtr> params() const {
    return {Wix, Wih, bi, Wfx, Wfh, bf, Wox, Woh, bo, Wsx, Wsh, bs};
  }
};

LstmCell make_lstm_cell(std::size_t hidden, std::size_t input, Rng& rng,
                        const std::string& name);

struct LstmState {
  NodePtr h;
  NodePtr c;
};

LstmState lstm_step_node(const LstmCell& cell, const NodePtr& x,
                         const LstmState& prev);

std::pair<Tensor, Tensor> lstm_step(const LstmCell& cell, const Tensor& x,
                                    const Tensor& h_prev,
                                    const Tensor& c_prev);

// Test-only entry point: overrides the listed gate activations with fixed
// values instead of computing them from parameters. The production path
// never injects gates.
struct ForcedGates {
  std::optional<double> i, f, o;
};

std::pair<Tensor, Tensor> lstm_step_forced(const LstmCell& cell,
                                           const Tensor& x,
                                           const Tensor& h_prev,
                                           const Tensor& c_prev,
                                           const ForcedGates& forced);

// ---- dropout -----------------------------------------------------------------

enum class DropoutMode { kTrain, kInfer };

struct DropoutSpec {
  double rate = 0.0;  // probability of zeroing; must be in [0, 1)
  DropoutMode mode = DropoutMode::kInfer;
};

struct DropoutResult {
  Tensor y;
  Tensor mask;  // 1 for kept elements, 0 for dropped
};

// Inverted dropout: kept elements scaled by 1/(1-rate) in train mode so the
// expected activation matches inference, which applies no scaling at all.
DropoutResult dropout_forward(const DropoutSpec& spec, const Tensor& x,
                              Rng& rng);

// Pre-scaled mask (0 or 1/(1-rate)) for use with g_dropout on the tape.
Tensor dropout_mask(const DropoutSpec& spec, const std::vector<std::size_t>& shape,
                    Rng& rng);

// ---- dense + softmax head ------------------------------------------------------

struct DenseHead {
  NodePtr W;  // (classes x d_in)
  NodePtr b;  // (classes)

  std::vector<NodePtr> params() const { return {W, b}; }
};

DenseHead make_dense_head(std::size_t classes, std::size_t d_in, Rng& rng,
                          const std::string& name);

NodePtr head_logits(const DenseHead& head, const NodePtr& x);

// ---- gradient checking ---------------------------------------------------------

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;  // "name[flat_index]" of the worst scalar
};

// Compares the tape gradient of build_loss() against central finite
// differences for every scalar in params. build_loss must construct the loss
// from scratch on each call (it is invoked 2·N+3 times) and must be
// deterministic: the checker replays it and rejects a network whose loss
// moves between identical calls (e.g. live dropout).
GradCheckResult grad_check(const std::function<NodePtr()>& build_loss,
                           const std::vector<NodePtr>& params, double eps);

}  // namespace affect
