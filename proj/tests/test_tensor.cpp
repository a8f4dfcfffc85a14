#include <cmath>
#include <cstdint>

#include "affect/errors.hpp"
#include "affect/rng.hpp"
#include "affect/tensor.hpp"
#include "doctest.h"

using namespace affect;

TEST_SUITE("tensor") {

TEST_CASE("rng reproduces the documented generator bit-for-bit") {
  // Expected words derived independently from the documented update rule
  // (they can be reproduced in a few lines of any language).
  Rng rng(42);
  CHECK(rng.next_u64() == 0xbdd732262feb6e95ull);
  CHECK(rng.next_u64() == 0x28efe333b266f103ull);
  CHECK(rng.next_u64() == 0x47526757130f9f52ull);
  CHECK(rng.next_u64() == 0x581ce1ff0e4ae394ull);

  Rng zero(0);
  CHECK(zero.next_u64() == 0xe220a8397b1dcdafull);

  Rng rng2(42);
  CHECK(rng2.next_double() == doctest::Approx(0.7415648787718233).epsilon(1e-15));
  CHECK(rng2.next_double() == doctest::Approx(0.1599103928769201).epsilon(1e-15));

  Rng rng3(7);
  const std::uint64_t expected[] = {7, 4, 6, 3, 4, 5, 8, 2};
  for (std::uint64_t e : expected) CHECK(rng3.next_below(10) == e);
}

TEST_CASE("rng uniform stays in range and is seeded deterministically") {
  Rng a(9), b(9);
  for (int i = 0; i < 100; ++i) {
    const double v = a.next_uniform(-0.25, 0.25);
    CHECK(v >= -0.25);
    CHECK(v < 0.25);
    CHECK(v == b.next_uniform(-0.25, 0.25));
  }
}

TEST_CASE("tensor constructors and accessors") {
  const Tensor z = Tensor::zeros({2, 3});
  CHECK(z.rank() == 2);
  CHECK(z.rows() == 2);
  CHECK(z.cols() == 3);
  CHECK(z.numel() == 6);
  for (double v : z.data) CHECK(v == 0.0);

  const Tensor v = Tensor::vec({1.0, 2.0, 3.0});
  CHECK(v.rank() == 1);
  CHECK(v(1) == 2.0);

  Tensor m = Tensor::mat(2, 2, {1, 2, 3, 4});
  CHECK(m(1, 0) == 3.0);
  m(0, 1) = 9.0;
  CHECK(m.data[1] == 9.0);

  CHECK_THROWS_AS(Tensor::mat(2, 2, {1, 2, 3}), DimensionError);
  CHECK(shape_str(m) == "(2x2)");
  CHECK(shape_str(v) == "(3)");
}

TEST_CASE("elementwise arithmetic checks shapes") {
  const Tensor a = Tensor::vec({1, 2, 3});
  const Tensor b = Tensor::vec({10, 20, 30});
  CHECK(add(a, b).data == std::vector<double>{11, 22, 33});
  CHECK(sub(b, a).data == std::vector<double>{9, 18, 27});
  CHECK(hadamard(a, b).data == std::vector<double>{10, 40, 90});
  CHECK(scale(a, -2).data == std::vector<double>{-2, -4, -6});
  CHECK(dot(a, b) == doctest::Approx(140.0));

  Tensor c = Tensor::vec({1, 1, 1});
  add_inplace(c, a);
  CHECK(c.data == std::vector<double>{2, 3, 4});
  axpy_inplace(c, 0.5, b);
  CHECK(c.data == std::vector<double>{7, 13, 19});

  const Tensor bad = Tensor::vec({1, 2});
  CHECK_THROWS_AS(add(a, bad), DimensionError);
  CHECK_THROWS_AS(hadamard(a, bad), DimensionError);
  CHECK_THROWS_AS(dot(a, bad), DimensionError);
}

TEST_CASE("matvec and affine") {
  const Tensor W = Tensor::mat(2, 3, {1, 0, -1, 2, 1, 0});
  const Tensor x = Tensor::vec({3, 4, 5});
  const Tensor y = matvec(W, x);
  CHECK(y.data == std::vector<double>{-2, 10});

  const Tensor yt = matvec_transposed(W, Tensor::vec({1, 1}));
  CHECK(yt.data == std::vector<double>{3, 1, -1});

  const Tensor b = Tensor::vec({0.5, -0.5});
  CHECK(affine(W, x, b).data == std::vector<double>{-1.5, 9.5});

  CHECK_THROWS_AS(matvec(W, Tensor::vec({1, 2})), DimensionError);
  CHECK_THROWS_AS(affine(W, x, Tensor::vec({1, 2, 3})), DimensionError);

  Tensor U = Tensor::zeros({2, 2});
  add_outer(U, Tensor::vec({1, 2}), Tensor::vec({3, 4}));
  CHECK(U.data == std::vector<double>{3, 4, 6, 8});
}

TEST_CASE("activations and their output-space gradients") {
  CHECK(act_apply(0.3, Act::kLinear) == 0.3);
  CHECK(act_apply(-1.0, Act::kRelu) == 0.0);
  CHECK(act_apply(2.0, Act::kRelu) == 2.0);
  CHECK(act_apply(0.0, Act::kSigmoid) == doctest::Approx(0.5));
  CHECK(act_apply(1.0, Act::kTanh) == doctest::Approx(std::tanh(1.0)));

  // Gradients are expressed in terms of the output y.
  CHECK(act_grad_from_y(0.7, Act::kLinear) == 1.0);
  CHECK(act_grad_from_y(0.7, Act::kSigmoid) == doctest::Approx(0.7 * 0.3));
  CHECK(act_grad_from_y(0.5, Act::kTanh) == doctest::Approx(1 - 0.25));
  CHECK(act_grad_from_y(0.5, Act::kRelu) == 1.0);
  CHECK(act_grad_from_y(0.0, Act::kRelu) == 0.0);  // kink counts as inactive
  CHECK(act_grad_from_y(-0.2, Act::kRelu) == 0.0);

  CHECK(act_from_name("tanh") == Act::kTanh);
  CHECK(act_from_name("relu") == Act::kRelu);
  CHECK(act_from_name("sigmoid") == Act::kSigmoid);
  CHECK(act_from_name("linear") == Act::kLinear);
  CHECK_THROWS_AS(act_from_name("gelu"), ConfigError);
  CHECK(std::string(act_name(Act::kRelu)) == "relu");
}

TEST_CASE("softmax is stable, normalized, and argmax-preserving") {
  const Tensor p = softmax(Tensor::vec({1.0, 2.0, 3.0}));
  double sum = 0;
  for (double v : p.data) sum += v;
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.data[2] > p.data[1]);
  CHECK(p.data[1] > p.data[0]);

  // Huge logits must not overflow.
  const Tensor big = softmax(Tensor::vec({1000.0, 1001.0}));
  CHECK(std::isfinite(big.data[0]));
  CHECK(big.data[1] == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))));

  // Uniform logits -> uniform probabilities.
  const Tensor u = softmax(Tensor::vec({5.0, 5.0, 5.0, 5.0}));
  for (double v : u.data) CHECK(v == doctest::Approx(0.25));
}

TEST_CASE("cross entropy floors the probability") {
  const Tensor probs = Tensor::vec({0.25, 0.75});
  CHECK(cross_entropy(probs, 1) == doctest::Approx(-std::log(0.75)));
  // A confidently wrong prediction stays finite.
  const Tensor wrong = Tensor::vec({1.0, 0.0});
  CHECK(cross_entropy(wrong, 1) == doctest::Approx(-std::log(1e-12)));
  CHECK_THROWS_AS(cross_entropy(probs, 2), IndexError);
}

TEST_CASE("random_uniform fills the shape deterministically") {
  Rng rng(5);
  const Tensor t = random_uniform({3, 4}, -0.1, 0.1, rng);
  CHECK(t.rows() == 3);
  CHECK(t.cols() == 4);
  for (double v : t.data) {
    CHECK(v >= -0.1);
    CHECK(v < 0.1);
  }
  Rng rng2(5);
  const Tensor t2 = random_uniform({3, 4}, -0.1, 0.1, rng2);
  CHECK(t.data == t2.data);
}

}  // TEST_SUITE
