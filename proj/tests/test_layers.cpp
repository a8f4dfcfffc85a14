#include <cmath>
#include <cstdlib>
#include <vector>

#include "affect/errors.hpp"
#include "affect/graph.hpp"
#include "affect/layers.hpp"
#include "affect/rng.hpp"
#include "affect/tensor.hpp"
#include "doctest.h"

using namespace affect;

TEST_SUITE("layers") {

TEST_CASE("glorot init respects the fan bound and the seed") {
  Rng rng(3);
  const double bound = std::sqrt(6.0 / (10 + 20));
  const Tensor W = glorot_uniform(10, 20, {10, 20}, rng);
  for (double v : W.data) {
    CHECK(v >= -bound);
    CHECK(v < bound);
  }
  Rng rng2(3);
  CHECK(glorot_uniform(10, 20, {10, 20}, rng2).data == W.data);
}

TEST_CASE("stack/unstack rows round trip") {
  const std::vector<Tensor> rows = {Tensor::vec({1, 2}), Tensor::vec({3, 4}),
                                    Tensor::vec({5, 6})};
  const Tensor X = stack_rows(rows);
  CHECK(X.rows() == 3);
  CHECK(X.cols() == 2);
  const std::vector<Tensor> back = unstack_rows(X);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) CHECK(back[i].data == rows[i].data);
  CHECK_THROWS_AS(stack_rows({Tensor::vec({1}), Tensor::vec({1, 2})}),
                  DimensionError);
  CHECK_THROWS_AS(stack_rows({}), EmptyInputError);
}

TEST_CASE("embedding layer applies f(Wx+b) per row") {
  Rng rng(4);
  auto layer = make_embedding_layer(2, 3, Act::kLinear, rng, "emb");
  CHECK(layer.out_dim() == 2);
  CHECK(layer.W->name == "emb.W");
  CHECK(layer.b->name == "emb.b");
  // Bias starts at zero, so the op reduces to a matrix product.
  auto X = make_const(Tensor::mat(2, 3, {1, 0, 0, 0, 1, 0}));
  auto Y = embed_node(layer, X);
  CHECK(Y->value.rows() == 2);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(Y->value(0, j) == doctest::Approx(layer.W->value(j, 0)));
    CHECK(Y->value(1, j) == doctest::Approx(layer.W->value(j, 1)));
  }
  const std::vector<Tensor> ys =
      embed_forward(layer, {Tensor::vec({1, 0, 0}), Tensor::vec({0, 1, 0})});
  CHECK(ys.size() == 2);
  CHECK(ys[0].data[0] == doctest::Approx(Y->value(0, 0)));
}

TEST_CASE("conv layer demands an odd window") {
  Rng rng(5);
  CHECK_THROWS_AS(make_conv_layer(2, 3, 2, Act::kTanh, rng, "c"), ConfigError);
  CHECK_THROWS_AS(make_conv_layer(2, 3, 0, Act::kTanh, rng, "c"), ConfigError);
  auto layer = make_conv_layer(2, 3, 3, Act::kTanh, rng, "c");
  auto X = make_const(random_uniform({4, 3}, -1, 1, rng));
  auto Y = conv_node(layer, X);
  CHECK(Y->value.rows() == 4);  // length-preserving
  CHECK(Y->value.cols() == 2);
  const std::vector<Tensor> ys = conv_forward(layer, unstack_rows(X->value));
  CHECK(ys.size() == 4);
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(ys[t](j) == doctest::Approx(Y->value(t, j)));
    }
  }
}

TEST_CASE("ngram conv output length is T-h+1") {
  Rng rng(6);
  auto layer = make_ngram_conv(4, 3, 2, Act::kTanh, rng, "ng");
  auto X = make_const(random_uniform({5, 3}, -1, 1, rng));
  auto Y = ngram_node(layer, X);
  CHECK(Y->value.rows() == 4);
  CHECK(Y->value.cols() == 4);
}

TEST_CASE("maxpool_time reduces a sequence to per-feature maxima") {
  const Tensor m = maxpool_time(
      {Tensor::vec({1, 9}), Tensor::vec({5, 2}), Tensor::vec({3, 3})});
  CHECK(m.data == std::vector<double>{5, 9});
  CHECK_THROWS_AS(maxpool_time({}), EmptyInputError);
}

TEST_CASE("lstm step matches a scalar hand computation") {
  // hidden=1, input=1: every weight is a scalar, so the cell reduces to
  // textbook arithmetic we can replicate inline.
  Rng rng(7);
  auto cell = make_lstm_cell(1, 1, rng, "cell");
  const double wix = cell.Wix->value(0), wih = cell.Wih->value(0);
  const double wfx = cell.Wfx->value(0), wfh = cell.Wfh->value(0);
  const double wox = cell.Wox->value(0), woh = cell.Woh->value(0);
  const double wsx = cell.Wsx->value(0), wsh = cell.Wsh->value(0);
  const double x = 0.3, h0 = -0.2, c0 = 0.4;
  auto sigmoid = [](double v) { return 1.0 / (1.0 + std::exp(-v)); };
  const double i = sigmoid(wix * x + wih * h0);
  const double f = sigmoid(wfx * x + wfh * h0);
  const double o = sigmoid(wox * x + woh * h0);
  const double s = std::tanh(wsx * x + wsh * h0);
  const double c1 = f * c0 + i * s;
  const double h1 = std::tanh(c1) * o;

  const auto [h, c] = lstm_step(cell, Tensor::vec({x}), Tensor::vec({h0}),
                                Tensor::vec({c0}));
  CHECK(c(0) == doctest::Approx(c1).epsilon(1e-12));
  CHECK(h(0) == doctest::Approx(h1).epsilon(1e-12));

  CHECK_THROWS_AS(
      lstm_step(cell, Tensor::vec({x}), Tensor::vec({1, 2}), Tensor::vec({c0})),
      DimensionError);
}

TEST_CASE("forced gates isolate the cell-state algebra") {
  Rng rng(8);
  auto cell = make_lstm_cell(4, 3, rng, "cell");
  const Tensor x = random_uniform({3}, -1, 1, rng);
  const Tensor h0 = random_uniform({4}, -1, 1, rng);
  const Tensor c0 = random_uniform({4}, -1, 1, rng);

  SUBCASE("i=0, f=1 keeps the cell state exactly") {
    const auto [h, c] = lstm_step_forced(cell, x, h0, c0, {0.0, 1.0, {}});
    for (std::size_t j = 0; j < 4; ++j) CHECK(c(j) == c0(j));
  }
  SUBCASE("f=0 writes exactly i ⊙ s") {
    const auto [h, c] = lstm_step_forced(cell, x, h0, c0, {{}, 0.0, {}});
    // Recompute i and s with the same primitives the cell uses.
    Tensor pi = matvec(cell.Wix->value, x);
    add_inplace(pi, affine(cell.Wih->value, h0, cell.bi->value));
    const Tensor i = act_apply(pi, Act::kSigmoid);
    Tensor ps = matvec(cell.Wsx->value, x);
    add_inplace(ps, affine(cell.Wsh->value, h0, cell.bs->value));
    const Tensor s = act_apply(ps, Act::kTanh);
    for (std::size_t j = 0; j < 4; ++j) CHECK(c(j) == i(j) * s(j));
  }
  SUBCASE("o=0 silences the hidden state exactly") {
    const auto [h, c] = lstm_step_forced(cell, x, h0, c0, {{}, {}, 0.0});
    for (std::size_t j = 0; j < 4; ++j) CHECK(h(j) == 0.0);
  }
  SUBCASE("no forcing reproduces the production step") {
    const auto [hf, cf] = lstm_step_forced(cell, x, h0, c0, {});
    const auto [h, c] = lstm_step(cell, x, h0, c0);
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(hf(j) == doctest::Approx(h(j)).epsilon(1e-12));
      CHECK(cf(j) == doctest::Approx(c(j)).epsilon(1e-12));
    }
  }
}

TEST_CASE("dropout scales kept activations and zeroes dropped ones") {
  Rng rng(9);
  const Tensor x = Tensor::vec(std::vector<double>(1000, 1.0));

  DropoutSpec infer{0.7, DropoutMode::kInfer};
  const DropoutResult passthrough = dropout_forward(infer, x, rng);
  CHECK(passthrough.y.data == x.data);

  DropoutSpec train{0.7, DropoutMode::kTrain};
  const DropoutResult dropped = dropout_forward(train, x, rng);
  std::size_t kept = 0;
  for (std::size_t k = 0; k < x.numel(); ++k) {
    if (dropped.mask(k) == 1.0) {
      ++kept;
      CHECK(dropped.y(k) == doctest::Approx(1.0 / 0.3));
    } else {
      CHECK(dropped.mask(k) == 0.0);
      CHECK(dropped.y(k) == 0.0);
    }
  }
  // ~30% kept; allow a generous band for 1000 draws.
  CHECK(kept > 200);
  CHECK(kept < 400);

  DropoutSpec bad{1.0, DropoutMode::kTrain};
  CHECK_THROWS_AS(dropout_forward(bad, x, rng), ConfigError);

  const Tensor mask = dropout_mask(train, {1000}, rng);
  for (double v : mask.data) {
    CHECK((v == 0.0 || v == doctest::Approx(1.0 / 0.3)));
  }
}

TEST_CASE("dense head produces logits per class") {
  Rng rng(10);
  auto head = make_dense_head(2, 3, rng, "head");
  auto x = make_const(Tensor::vec({1.0, -1.0, 0.5}));
  auto logits = head_logits(head, x);
  CHECK(logits->value.numel() == 2);
}

TEST_CASE("grad_check rejects a nondeterministic forward pass") {
  Rng rng(20);
  auto p = make_param(Tensor::vec({1.0}), "p");
  auto noisy_rng = std::make_shared<Rng>(99);
  CHECK_THROWS_AS(grad_check(
                      [p, noisy_rng] {
                        auto jitter =
                            make_const(Tensor::vec({noisy_rng->next_double()}));
                        return g_sum(g_hadamard(p, jitter));
                      },
                      {p}, 1e-5),
                  ConfigError);
}

TEST_CASE("grad_check names the worst scalar") {
  auto p = make_param(Tensor::vec({0.5, -0.25}), "theta");
  auto result =
      grad_check([&] { return g_sum(g_hadamard(p, p)); }, {p}, 1e-5);
  CHECK(result.max_rel_error < 1e-8);
  CHECK(result.worst_param.substr(0, 5) == "theta");
}

}  // TEST_SUITE
