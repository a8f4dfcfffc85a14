#include "affect/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <utility>

#include "affect/emotion.hpp"
#include "affect/errors.hpp"
#include "affect/graph.hpp"
#include "affect/humor.hpp"
#include "affect/rng.hpp"
#include "affect/sentiment.hpp"
#include "affect/tensor.hpp"

namespace affect {

namespace {

// Identity forward whose backward multiplies the upstream gradient by
// `factor`. Used only as the gradcheck negative control: with factor != 1 the
// analytic gradients disagree with finite differences while the loss value —
// and therefore the determinism probe — is untouched.
NodePtr corrupt_backward(const NodePtr& x, double factor) {
  auto n = std::make_shared<Node>();
  n->value = x->value;
  n->parents = {x};
  n->requires_grad = x->requires_grad;
  if (n->requires_grad) n->grad = Tensor::zeros(n->value.shape);
  Node* self = n.get();
  Node* px = x.get();
  n->backprop = [self, px, factor] {
    if (px->requires_grad) axpy_inplace(px->grad, factor, self->grad);
  };
  return n;
}

Tensor random_mat(std::size_t rows, std::size_t cols, Rng& rng) {
  return random_uniform({rows, cols}, -0.8, 0.8, rng);
}

struct Case {
  std::function<NodePtr()> build_loss;
  std::vector<NodePtr> params;
};

Case embedding_case() {
  Rng rng(101);
  auto layer = make_embedding_layer(3, 4, Act::kTanh, rng, "embedding");
  auto X = make_const(random_mat(2, 4, rng));
  return {[=] { return g_sum(embed_node(layer, X)); }, layer.params()};
}

Case conv_case() {
  Rng rng(102);
  auto layer = make_conv_layer(3, 4, 3, Act::kTanh, rng, "conv");
  auto X = make_const(random_mat(5, 4, rng));
  return {[=] { return g_sum(conv_node(layer, X)); }, layer.params()};
}

Case ngram_case() {
  Rng rng(103);
  auto layer = make_ngram_conv(4, 3, 2, Act::kTanh, rng, "ngram_conv");
  auto X = make_const(random_mat(5, 3, rng));
  return {[=] { return g_sum(g_maxpool_rows(ngram_node(layer, X))); },
          layer.params()};
}

Case lstm_case() {
  Rng rng(104);
  auto cell = make_lstm_cell(3, 2, rng, "lstm");
  auto x1 = make_const(random_uniform({2}, -0.8, 0.8, rng));
  auto x2 = make_const(random_uniform({2}, -0.8, 0.8, rng));
  return {[=] {
            LstmState s{make_const(Tensor::zeros({3})),
                        make_const(Tensor::zeros({3}))};
            s = lstm_step_node(cell, x1, s);
            s = lstm_step_node(cell, x2, s);
            return g_sum(s.h);
          },
          cell.params()};
}

Case dense_softmax_case() {
  Rng rng(105);
  auto head = make_dense_head(3, 4, rng, "dense_softmax");
  auto x = make_const(random_uniform({4}, -0.8, 0.8, rng));
  return {[=] {
            return g_cross_entropy(g_softmax(head_logits(head, x)), 1);
          },
          head.params()};
}

Case emotion_case() {
  Rng rng(106);
  EmotionCnnConfig cfg;
  cfg.window = 8;
  cfg.step = 4;
  cfg.hidden = 5;
  cfg.activation = Act::kRelu;
  auto model = std::make_shared<EmotionModel>(
      build_emotion_model(cfg, "happiness", rng));
  AudioSegment seg;
  seg.sample_rate = cfg.sample_rate;
  for (int i = 0; i < 30; ++i) seg.samples.push_back(rng.next_uniform(-1, 1));
  EmotionExample ex{seg, true};
  return {[=] { return model->loss_forward(ex); }, model->params()};
}

Case sentiment_case() {
  Rng rng(107);
  EmbeddingTable table;
  table.dim = 5;
  for (const char* t : {"alpha", "beta", "gamma", "delta", "epsilon", "zeta"}) {
    table.index.emplace(t, table.tokens.size());
    table.tokens.emplace_back(t);
    table.vectors.push_back(random_uniform({5}, -0.5, 0.5, rng));
  }
  SentimentCnnConfig cfg;
  cfg.heights = {2, 3};
  cfg.maps = 4;
  auto model = std::make_shared<SentimentModel>(
      build_sentiment_model(cfg, std::move(table), {"eta"}, rng));
  // "omega" is absent from the fine-tuned vocabulary, so the pass covers the
  // hash-seeded constant row next to trainable rows.
  SentimentExample ex;
  ex.tokens = {"alpha", "gamma", "eta", "omega", "beta"};
  ex.label = true;
  return {[=] { return model->loss_forward(ex); }, model->params()};
}

Case humor_case() {
  Rng rng(108);
  EmbeddingTable table;
  table.dim = 4;
  for (const char* t : {"alpha", "beta", "gamma", "delta", "epsilon"}) {
    table.index.emplace(t, table.tokens.size());
    table.tokens.emplace_back(t);
    table.vectors.push_back(random_uniform({4}, -0.5, 0.5, rng));
  }
  HumorNetConfig cfg;
  cfg.lang_hidden = 6;
  cfg.lang_window = 2;
  cfg.audio_hidden = 4;
  cfg.audio_window = 2;
  cfg.lstm_hidden = 5;
  cfg.dropout = 0.0;  // the checker requires a deterministic forward pass
  cfg.k = 2;
  auto model = std::make_shared<HumorModel>(
      build_humor_model(cfg, HumorVariant::kLstm, std::move(table),
                        {"alice", "bob"}, rng, 0));

  auto utterances = std::make_shared<std::vector<Utterance>>(2);
  Utterance& u1 = (*utterances)[0];
  u1.tokens = {"alpha", "beta"};
  u1.speaker = "alice";
  u1.start_s = 0.0;
  u1.end_s = 0.5;
  u1.audio.sample_rate = 8000;
  for (int i = 0; i < 400; ++i) u1.audio.samples.push_back(rng.next_uniform(-0.8, 0.8));
  u1.index = 0;
  Utterance& u2 = (*utterances)[1];
  u2.tokens = {"gamma", "mystery"};  // OOV token: hash-seeded embedding row
  u2.speaker = "bob";
  u2.start_s = 0.5;
  u2.end_s = 1.1;
  u2.audio.sample_rate = 8000;
  for (int i = 0; i < 480; ++i) u2.audio.samples.push_back(rng.next_uniform(-0.8, 0.8));
  u2.index = 1;
  u2.is_punchline = true;

  return {[=] {
            HumorExample ex{{&(*utterances)[0], &(*utterances)[1]}, true};
            return model->loss_forward(ex);
          },
          model->params()};
}

Case build_case(const std::string& layer) {
  if (layer == "embedding") return embedding_case();
  if (layer == "conv") return conv_case();
  if (layer == "ngram_conv") return ngram_case();
  if (layer == "lstm") return lstm_case();
  if (layer == "dense_softmax") return dense_softmax_case();
  if (layer == "pipeline_emotion") return emotion_case();
  if (layer == "pipeline_sentiment") return sentiment_case();
  if (layer == "pipeline_humor") return humor_case();
  throw ConfigError("gradcheck: unknown layer '" + layer + "'");
}

}  // namespace

std::vector<std::string> gradcheck_layers() {
  return {"embedding",        "conv",
          "ngram_conv",       "lstm",
          "dense_softmax",    "pipeline_emotion",
          "pipeline_sentiment", "pipeline_humor"};
}

GradCheckReport run_gradcheck(const GradCheckOptions& opt) {
  if (opt.epsilon <= 0.0) throw ConfigError("gradcheck: epsilon must be > 0");
  if (opt.threshold <= 0.0) {
    throw ConfigError("gradcheck: threshold must be > 0");
  }
  const std::vector<std::string> layers = gradcheck_layers();
  const bool faulting = !opt.inject_fault.empty() && opt.inject_fault != "none";
  if (faulting && std::find(layers.begin(), layers.end(), opt.inject_fault) ==
                      layers.end()) {
    throw ConfigError("gradcheck: inject_fault names unknown layer '" +
                      opt.inject_fault + "'");
  }

  GradCheckReport report;
  report.epsilon = opt.epsilon;
  report.threshold = opt.threshold;
  report.pass = true;
  for (const std::string& layer : layers) {
    Case c = build_case(layer);
    std::function<NodePtr()> build = c.build_loss;
    if (faulting && layer == opt.inject_fault) {
      build = [inner = c.build_loss] { return corrupt_backward(inner(), 1.5); };
    }
    GradCheckRow row;
    row.layer = layer;
    row.result = grad_check(build, c.params, opt.epsilon);
    row.pass = row.result.max_rel_error < opt.threshold;
    if (!row.pass) {
      report.pass = false;
      if (row.result.max_rel_error > report.worst_error) {
        report.worst_error = row.result.max_rel_error;
        report.worst_layer = layer;
        report.worst_param = row.result.worst_param;
      }
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string GradCheckReport::render() const {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-20s %-14s %s\n", "layer",
                "max_rel_error", "worst_parameter");
  out += line;
  for (const GradCheckRow& row : rows) {
    std::snprintf(line, sizeof line, "%-20s %-14.3e %s\n", row.layer.c_str(),
                  row.result.max_rel_error, row.result.worst_param.c_str());
    out += line;
  }
  if (pass) {
    std::snprintf(line, sizeof line,
                  "gradcheck: PASS (%zu/%zu layers within %g, epsilon %g)\n",
                  rows.size(), rows.size(), threshold, epsilon);
  } else {
    std::snprintf(line, sizeof line,
                  "gradcheck: FAIL — %s exceeds %g (max_rel_error %.3e at "
                  "%s)\n",
                  worst_layer.c_str(), threshold, worst_error,
                  worst_param.c_str());
  }
  out += line;
  return out;
}

}  // namespace affect
