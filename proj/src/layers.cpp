#include "affect/layers.hpp"

#include <cmath>

#include "affect/errors.hpp"

namespace affect {

Tensor glorot_uniform(std::size_t fan_out, std::size_t fan_in,
                      std::vector<std::size_t> shape, Rng& rng) {
  const double r = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  return random_uniform(std::move(shape), -r, r, rng);
}

Tensor stack_rows(const std::vector<Tensor>& rows) {
  if (rows.empty()) throw EmptyInputError("stack_rows: empty sequence");
  const std::size_t d = rows[0].numel();
  Tensor X = Tensor::zeros({rows.size(), d});
  for (std::size_t t = 0; t < rows.size(); ++t) {
    if (rows[t].rank() != 1 || rows[t].numel() != d) {
      throw DimensionError("stack_rows: element " + std::to_string(t) +
                           " has shape " + shape_str(rows[t]) +
                           " but expected (" + std::to_string(d) + ")");
    }
    std::copy(rows[t].data.begin(), rows[t].data.end(),
              X.data.begin() + static_cast<std::ptrdiff_t>(t * d));
  }
  return X;
}

std::vector<Tensor> unstack_rows(const Tensor& X) {
  const std::size_t T = X.rows(), d = X.cols();
  std::vector<Tensor> rows(T);
  for (std::size_t t = 0; t < T; ++t) {
    rows[t] = Tensor::zeros({d});
    std::copy_n(X.data.begin() + static_cast<std::ptrdiff_t>(t * d), d,
                rows[t].data.begin());
  }
  return rows;
}

EmbeddingLayer make_embedding_layer(std::size_t d_out, std::size_t d_in, Act f,
                                    Rng& rng, const std::string& name) {
  if (d_out == 0) throw ConfigError("embedding layer output dimension is 0");
  EmbeddingLayer layer;
  layer.W = make_param(glorot_uniform(d_out, d_in, {d_out, d_in}, rng),
                       name + ".W");
  layer.b = make_param(Tensor::zeros({d_out}), name + ".b");
  layer.f = f;
  return layer;
}

NodePtr embed_node(const EmbeddingLayer& layer, const NodePtr& X) {
  if (X->value.rows() == 0) throw EmptyInputError("embed: empty sequence");
  return g_rowwise_affine(layer.W, layer.b, X, layer.f);
}

std::vector<Tensor> embed_forward(const EmbeddingLayer& layer,
                                  const std::vector<Tensor>& xs) {
  if (xs.empty()) throw EmptyInputError("embed: empty sequence");
  return unstack_rows(embed_node(layer, make_const(stack_rows(xs)))->value);
}

ConvLayer make_conv_layer(std::size_t d_out, std::size_t d_in, std::size_t c,
                          Act f, Rng& rng, const std::string& name) {
  if (c < 1 || c % 2 == 0) {
    throw ConfigError("convolution window must be odd, got " +
                      std::to_string(c));
  }
  ConvLayer layer;
  layer.W = make_param(
      glorot_uniform(d_out, c * d_in, {d_out, c * d_in}, rng), name + ".W");
  layer.b = make_param(Tensor::zeros({d_out}), name + ".b");
  layer.c = c;
  layer.f = f;
  return layer;
}

NodePtr conv_node(const ConvLayer& layer, const NodePtr& X) {
  return g_conv_centered(layer.W, layer.b, X, layer.c, layer.f);
}

std::vector<Tensor> conv_forward(const ConvLayer& layer,
                                 const std::vector<Tensor>& xs) {
  if (xs.empty()) throw EmptyInputError("conv: empty sequence");
  return unstack_rows(conv_node(layer, make_const(stack_rows(xs)))->value);
}

NgramConv make_ngram_conv(std::size_t maps, std::size_t d_in, std::size_t h,
                          Act f, Rng& rng, const std::string& name) {
  if (h < 1) throw ConfigError("n-gram filter height must be >= 1");
  if (maps == 0) throw ConfigError("n-gram conv needs at least one map");
  NgramConv layer;
  layer.W = make_param(glorot_uniform(maps, h * d_in, {maps, h * d_in}, rng),
                       name + ".W");
  layer.b = make_param(Tensor::zeros({maps}), name + ".b");
  layer.h = h;
  layer.f = f;
  return layer;
}

NodePtr ngram_node(const NgramConv& layer, const NodePtr& X) {
  return g_conv_ngram(layer.W, layer.b, X, layer.h, layer.f);
}

Tensor maxpool_time(const std::vector<Tensor>& xs) {
  if (xs.empty()) throw EmptyInputError("maxpool: empty sequence");
  return g_maxpool_rows(make_const(stack_rows(xs)))->value;
}

LstmCell make_lstm_cell(std::size_t hidden, std::size_t input, Rng& rng,
                        const std::string& name) {
  if (hidden == 0) throw ConfigError("lstm hidden size is 0");
  LstmCell cell;
  cell.hidden = hidden;
  auto wx = [&](const char* gate) {
    return make_param(glorot_uniform(hidden, input, {hidden, input}, rng),
                      name + ".W" + gate + "x");
  };
  auto wh = [&](const char* gate) {
    return make_param(glorot_uniform(hidden, hidden, {hidden, hidden}, rng),
                      name + ".W" + gate + "h");
  };
  auto bias = [&](const char* gate) {
    return make_param(Tensor::zeros({hidden}), name + ".b" + gate);
  };
  cell.Wix = wx("i"); cell.Wih = wh("i"); cell.bi = bias("i");
  cell.Wfx = wx("f"); cell.Wfh = wh("f"); cell.bf = bias("f");
  cell.Wox = wx("o"); cell.Woh = wh("o"); cell.bo = bias("o");
  cell.Wsx = wx("s"); cell.Wsh = wh("s"); cell.bs = bias("s");
  return cell;
}

namespace {

NodePtr gate_preact(const NodePtr& Wx, const NodePtr& Wh, const NodePtr& b,
                    const NodePtr& x, const NodePtr& h) {
  return g_add(g_matvec(Wx, x), g_affine(Wh, h, b));
}

}  // namespace

LstmState lstm_step_node(const LstmCell& cell, const NodePtr& x,
                         const LstmState& prev) {
  auto i = g_act(gate_preact(cell.Wix, cell.Wih, cell.bi, x, prev.h),
                 Act::kSigmoid);
  auto f = g_act(gate_preact(cell.Wfx, cell.Wfh, cell.bf, x, prev.h),
                 Act::kSigmoid);
  auto o = g_act(gate_preact(cell.Wox, cell.Woh, cell.bo, x, prev.h),
                 Act::kSigmoid);
  auto s = g_act(gate_preact(cell.Wsx, cell.Wsh, cell.bs, x, prev.h),
                 Act::kTanh);
  auto c = g_add(g_hadamard(f, prev.c), g_hadamard(i, s));
  auto h = g_hadamard(g_act(c, Act::kTanh), o);
  return {h, c};
}

std::pair<Tensor, Tensor> lstm_step(const LstmCell& cell, const Tensor& x,
                                    const Tensor& h_prev,
                                    const Tensor& c_prev) {
  if (h_prev.numel() != cell.hidden || c_prev.numel() != cell.hidden) {
    throw DimensionError("lstm_step: state " + shape_str(h_prev) + "/" +
                         shape_str(c_prev) + " does not conform with hidden (" +
                         std::to_string(cell.hidden) + ")");
  }
  LstmState prev{make_const(h_prev), make_const(c_prev)};
  LstmState out = lstm_step_node(cell, make_const(x), prev);
  return {out.h->value, out.c->value};
}

std::pair<Tensor, Tensor> lstm_step_forced(const LstmCell& cell,
                                           const Tensor& x,
                                           const Tensor& h_prev,
                                           const Tensor& c_prev,
                                           const ForcedGates& forced) {
  auto preact = [&](const NodePtr& Wx, const NodePtr& Wh, const NodePtr& b) {
    Tensor p = matvec(Wx->value, x);
    add_inplace(p, affine(Wh->value, h_prev, b->value));
    return p;
  };
  auto gate = [&](const NodePtr& Wx, const NodePtr& Wh, const NodePtr& b,
                  const std::optional<double>& force) {
    if (force) {
      Tensor g = Tensor::zeros({cell.hidden});
      for (double& v : g.data) v = *force;
      return g;
    }
    return act_apply(preact(Wx, Wh, b), Act::kSigmoid);
  };
  const Tensor i = gate(cell.Wix, cell.Wih, cell.bi, forced.i);
  const Tensor f = gate(cell.Wfx, cell.Wfh, cell.bf, forced.f);
  const Tensor o = gate(cell.Wox, cell.Woh, cell.bo, forced.o);
  const Tensor s = act_apply(preact(cell.Wsx, cell.Wsh, cell.bs), Act::kTanh);
  Tensor c = add(hadamard(f, c_prev), hadamard(i, s));
  Tensor h = hadamard(act_apply(c, Act::kTanh), o);
  return {std::move(h), std::move(c)};
}

DropoutResult dropout_forward(const DropoutSpec& spec, const Tensor& x,
                              Rng& rng) {
  if (spec.rate < 0.0 || spec.rate >= 1.0) {
    throw ConfigError("dropout rate must be in [0, 1), got " +
                      std::to_string(spec.rate));
  }
  DropoutResult out;
  if (spec.mode == DropoutMode::kInfer || spec.rate == 0.0) {
    out.y = x;
    out.mask = Tensor::zeros(x.shape);
    for (double& v : out.mask.data) v = 1.0;
    return out;
  }
  const double keep_scale = 1.0 / (1.0 - spec.rate);
  out.mask = Tensor::zeros(x.shape);
  out.y = Tensor::zeros(x.shape);
  for (std::size_t k = 0; k < x.data.size(); ++k) {
    if (rng.next_double() >= spec.rate) {
      out.mask.data[k] = 1.0;
      out.y.data[k] = x.data[k] * keep_scale;
    }
  }
  return out;
}

Tensor dropout_mask(const DropoutSpec& spec,
                    const std::vector<std::size_t>& shape, Rng& rng) {
  if (spec.rate < 0.0 || spec.rate >= 1.0) {
    throw ConfigError("dropout rate must be in [0, 1), got " +
                      std::to_string(spec.rate));
  }
  Tensor mask = Tensor::zeros(shape);
  if (spec.mode == DropoutMode::kInfer || spec.rate == 0.0) {
    for (double& v : mask.data) v = 1.0;
    return mask;
  }
  const double keep_scale = 1.0 / (1.0 - spec.rate);
  for (double& v : mask.data) {
    v = rng.next_double() >= spec.rate ? keep_scale : 0.0;
  }
  return mask;
}

DenseHead make_dense_head(std::size_t classes, std::size_t d_in, Rng& rng,
                          const std::string& name) {
  if (classes < 2) throw ConfigError("dense head needs at least 2 classes");
  DenseHead head;
  head.W = make_param(glorot_uniform(classes, d_in, {classes, d_in}, rng),
                      name + ".W");
  head.b = make_param(Tensor::zeros({classes}), name + ".b");
  return head;
}

NodePtr head_logits(const DenseHead& head, const NodePtr& x) {
  return g_affine(head.W, x, head.b);
}

GradCheckResult grad_check(const std::function<NodePtr()>& build_loss,
                           const std::vector<NodePtr>& params, double eps) {
  if (eps <= 0.0) throw ConfigError("grad_check: eps must be positive");

  const double probe1 = build_loss()->value.data[0];
  const double probe2 = build_loss()->value.data[0];
  if (probe1 != probe2) {
    throw ConfigError(
        "grad_check: network is not deterministic (two identical forward "
        "passes disagree); disable dropout or fix the seed");
  }

  zero_grads(params);
  backward(build_loss());
  std::vector<Tensor> analytic;
  analytic.reserve(params.size());
  for (const auto& p : params) analytic.push_back(p->grad);

  GradCheckResult result;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Tensor& v = params[pi]->value;
    for (std::size_t k = 0; k < v.data.size(); ++k) {
      const double saved = v.data[k];
      v.data[k] = saved + eps;
      const double lp = build_loss()->value.data[0];
      v.data[k] = saved - eps;
      const double lm = build_loss()->value.data[0];
      v.data[k] = saved;
      const double numeric = (lp - lm) / (2.0 * eps);
      const double a = analytic[pi].data[k];
      const double rel = std::abs(a - numeric) /
                         std::max({std::abs(a), std::abs(numeric), 1e-8});
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst_param =
            params[pi]->name + "[" + std::to_string(k) + "]";
      }
    }
  }
  return result;
}

}  // namespace affect
