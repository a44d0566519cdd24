#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "e2t/checkpoint.hpp"
#include "e2t/gradcheck.hpp"
#include "e2t/kernels.hpp"
#include "e2t/optim.hpp"
#include "e2t/tape.hpp"
#include "support/oracles.hpp"

using namespace e2t;

TEST_CASE("tensor shape/data invariant") {
  CHECK_THROWS_AS(Tensor({2, 3}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(Tensor({0}), std::invalid_argument);
  Tensor t({2, 2}, {1, 2, 3, 4});
  CHECK(t.size() == 4);
  CHECK(t.at2(1, 0) == 3.0);
  CHECK(Tensor::scalar(5.0).scalar_value() == 5.0);
}

TEST_CASE("tensor copies share storage until written") {
  Tensor a({3}, {1, 2, 3});
  Tensor b = a;
  CHECK(a.data() == b.data());
  b.mut()[0] = 9.0;
  CHECK(a.at(0) == 1.0);
  CHECK(b.at(0) == 9.0);
}

TEST_CASE("softmax basics") {
  Tensor two = k_softmax(Tensor::vector({0.0, 0.0}));
  CHECK(two.at(0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(two.at(1) == doctest::Approx(0.5).epsilon(1e-15));

  // shift invariance, exactly representable offsets
  Tensor base = k_softmax(Tensor::vector({0.0, 1.0, 2.5}));
  Tensor shifted = k_softmax(Tensor::vector({1024.0, 1025.0, 1026.5}));
  for (std::size_t i = 0; i < 3; ++i) CHECK(base.at(i) == shifted.at(i));

  const std::vector<double> probs = oracle::softmax_longdouble({1.0, 2.0, 3.0});
  Tensor got = k_softmax(Tensor::vector({1.0, 2.0, 3.0}));
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(got.at(i) == doctest::Approx(probs[i]).epsilon(1e-14));
  }
  CHECK(got.at(0) == doctest::Approx(0.09003057317038046).epsilon(1e-12));
  CHECK(got.at(1) == doctest::Approx(0.24472847105479764).epsilon(1e-12));
  CHECK(got.at(2) == doctest::Approx(0.66524095577482190).epsilon(1e-12));

  CHECK_THROWS_WITH_AS(k_softmax(Tensor::matrix(1, 3, {1, 2, 3})),
                       doctest::Contains("softmax"), std::invalid_argument);
}

TEST_CASE("softmax is a probability vector for any finite input incl. the mask value") {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(8);
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(-50.0, 50.0);
    if (n > 1 && trial % 3 == 0) v[rng.below(n)] = -1e9;
    Tensor p = k_softmax(Tensor::vector(v));
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(p.at(i) >= 0.0);
      sum += p.at(i);
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("random shift invariance within 1e-12") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const double c = rng.uniform(-100.0, 100.0);
    std::vector<double> v = {rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
    std::vector<double> w = v;
    for (double& x : w) x += c;
    Tensor a = k_softmax(Tensor::vector(v));
    Tensor b = k_softmax(Tensor::vector(w));
    for (std::size_t i = 0; i < 3; ++i) CHECK(a.at(i) == doctest::Approx(b.at(i)).epsilon(1e-12));
  }
}

TEST_CASE("backward: sum gives all-ones") {
  Tape tape;
  Tape::Var x = tape.input(Tensor({2, 3}, {1, 2, 3, 4, 5, 6}));
  tape.backward(tape.sum(x));
  for (std::size_t i = 0; i < 6; ++i) CHECK(tape.grad(x).at(i) == 1.0);
}

TEST_CASE("backward: sum(x*x) with x=[1,2]") {
  Tape tape;
  Tape::Var x = tape.input(Tensor::vector({1.0, 2.0}));
  tape.backward(tape.sum(tape.mul(x, x)));
  CHECK(tape.grad(x).at(0) == 2.0);
  CHECK(tape.grad(x).at(1) == 4.0);
}

TEST_CASE("backward: a node used twice accumulates both branch gradients") {
  Tape tape;
  Tape::Var x = tape.input(Tensor::vector({3.0, -1.0}));
  tape.backward(tape.sum(tape.add(x, x)));
  CHECK(tape.grad(x).at(0) == 2.0);
  CHECK(tape.grad(x).at(1) == 2.0);
}

TEST_CASE("backward requires a scalar loss and runs once") {
  Tape tape;
  Tape::Var x = tape.input(Tensor::vector({1.0, 2.0}));
  CHECK_THROWS_AS(tape.backward(x), std::invalid_argument);
  Tape tape2;
  Tape::Var y = tape2.input(Tensor::vector({1.0, 2.0}));
  Tape::Var loss = tape2.sum(y);
  tape2.backward(loss);
  CHECK_THROWS_AS(tape2.backward(loss), std::logic_error);
}

TEST_CASE("constants receive no gradient") {
  Tape tape;
  Tape::Var x = tape.input(Tensor::vector({1.0, 2.0}));
  Tape::Var mask = tape.constant(Tensor::vector({0.0, -1e9}));
  Tape::Var loss = tape.sum(tape.softmax(tape.add(x, mask)));
  tape.backward(loss);
  CHECK_FALSE(tape.has_grad(mask));
}

TEST_CASE("gradient map sums across branches and names bind once") {
  ParamMap params;
  params.emplace("w", Tensor::vector({2.0, 3.0}));
  Tape tape;
  Tape::Var a = tape.param("w", params);
  Tape::Var b = tape.param("w", params);  // same leaf
  CHECK(a.id == b.id);
  GradMap g = tape.backward(tape.sum(tape.add(a, tape.mul(b, b))));
  CHECK(g.at("w").at(0) == doctest::Approx(1.0 + 4.0));
  CHECK(g.at("w").at(1) == doctest::Approx(1.0 + 6.0));
  CHECK_THROWS_AS((void)Tape().param("missing", params), std::invalid_argument);
}

TEST_CASE("adadelta: zero gradient is a fixed point") {
  ParamMap params;
  params.emplace("w", Tensor::vector({1.0, -2.0}));
  AdadeltaState state;
  GradMap grads;
  grads.emplace("w", Tensor::zeros({2}));
  for (int i = 0; i < 3; ++i) adadelta_step(params, grads, state);
  CHECK(params.at("w").at(0) == 1.0);
  CHECK(params.at("w").at(1) == -2.0);
}

TEST_CASE("adadelta: first scalar step matches the hand-evaluated update") {
  ParamMap params;
  params.emplace("w", Tensor::scalar(0.0));
  AdadeltaState state;
  GradMap grads;
  grads.emplace("w", Tensor::scalar(1.0));
  adadelta_step(params, grads, state);
  oracle::ScalarAdadelta ref;
  const double expected = ref.step(1.0);
  CHECK(params.at("w").scalar_value() == doctest::Approx(expected).epsilon(1e-15));
  CHECK(params.at("w").scalar_value() == doctest::Approx(-0.0044721).epsilon(1e-4));
}

TEST_CASE("adadelta: |dx| nondecreasing under repeated identical gradients") {
  ParamMap params;
  params.emplace("w", Tensor::scalar(0.0));
  AdadeltaState state;
  GradMap grads;
  grads.emplace("w", Tensor::scalar(0.5));
  oracle::ScalarAdadelta ref;
  double prev_x = 0.0, prev_step = 0.0;
  for (int i = 0; i < 12; ++i) {
    adadelta_step(params, grads, state);
    const double x = params.at("w").scalar_value();
    const double step = std::abs(x - prev_x);
    CHECK(step >= prev_step - 1e-15);
    CHECK(x - prev_x == doctest::Approx(ref.step(0.5)).epsilon(1e-12));
    prev_step = step;
    prev_x = x;
  }
}

TEST_CASE("adadelta rejects shape mismatches") {
  ParamMap params;
  params.emplace("w", Tensor::vector({1.0, 2.0}));
  AdadeltaState state;
  GradMap grads;
  grads.emplace("w", Tensor::vector({1.0, 2.0, 3.0}));
  CHECK_THROWS_AS(adadelta_step(params, grads, state), std::invalid_argument);
}

TEST_CASE("maxnorm constraint") {
  Tensor row34 = maxnorm_constraint(Tensor::matrix(1, 2, {3.0, 4.0}), 3.0);
  CHECK(row34.at(0) == doctest::Approx(1.8).epsilon(1e-15));
  CHECK(row34.at(1) == doctest::Approx(2.4).epsilon(1e-15));

  Tensor small = Tensor::matrix(2, 2, {1.0, 1.0, -1.0, 0.5});
  Tensor kept = maxnorm_constraint(small, 3.0);
  for (std::size_t i = 0; i < 4; ++i) CHECK(kept.at(i) == small.at(i));

  // norm-6 row halves, in-limit row untouched
  Tensor mixed = maxnorm_constraint(Tensor::matrix(2, 1, {6.0, 2.0}), 3.0);
  CHECK(mixed.at(0) == doctest::Approx(3.0));
  CHECK(mixed.at(1) == doctest::Approx(2.0));

  // rank-1 tensors are one row
  Tensor vec = maxnorm_constraint(Tensor::vector({3.0, 4.0}), 3.0);
  CHECK(vec.at(0) == doctest::Approx(1.8));
}

TEST_CASE("dropout modes") {
  Rng rng(3);
  Tensor x = Tensor::full({8}, 1.0);
  Tensor id_train = dropout(x, 0.0, DropoutMode::train, rng);
  Tensor id_eval = dropout(x, 0.5, DropoutMode::eval, rng);
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(id_train.at(i) == 1.0);
    CHECK(id_eval.at(i) == 1.0);
  }
  CHECK_THROWS_AS(dropout(x, 1.0, DropoutMode::train, rng), std::invalid_argument);

  // inverted scaling keeps the mean: 1e6 samples within 1%
  Rng rng2(99);
  const std::size_t n = 1000000;
  double sum = 0.0;
  Tensor big = Tensor::full({n}, 1.0);
  Tensor dropped = dropout(big, 0.5, DropoutMode::train, rng2);
  for (std::size_t i = 0; i < n; ++i) sum += dropped.at(i);
  CHECK(std::abs(sum / n - 1.0) < 0.01);
}

TEST_CASE("dropout tape op: gradient equals the applied mask") {
  ParamMap params;
  params.emplace("x", Tensor::full({16}, 2.0));
  Tape tape;
  Rng rng(12);
  Tape::Var x = tape.param("x", params);
  Tape::Var y = tape.dropout(x, 0.5, rng);
  GradMap g = tape.backward(tape.sum(y));
  for (std::size_t i = 0; i < 16; ++i) {
    const double mask = tape.value(y).at(i) / 2.0;
    CHECK(g.at("x").at(i) == doctest::Approx(mask));
  }
}

TEST_CASE("per-op finite-difference suite stays within tolerance") {
  const auto results = run_gradient_suite(777);
  CHECK(!results.empty());
  for (const auto& r : results) {
    INFO(r.name, " err=", r.max_rel_err);
    CHECK(r.max_rel_err <= r.tolerance);
  }
}

TEST_CASE("checkpoint round trip is exact") {
  ParamMap params;
  params.emplace("a.W", Tensor::matrix(2, 3, {1.5, -2.25, 3.0, 0.1, 1e-300, -0.0}));
  params.emplace("b", Tensor::scalar(0.123456789012345678));
  params.emplace("c.v", Tensor::vector({-1e9, 7.0}));
  std::stringstream buf;
  save_checkpoint(params, buf);
  ParamMap loaded = load_checkpoint(buf);
  REQUIRE(loaded.size() == params.size());
  for (const auto& [name, t] : params) {
    const Tensor& l = loaded.at(name);
    REQUIRE(l.shape() == t.shape());
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(l.at(i) == t.at(i));
  }
}

TEST_CASE("checkpoint byte layout") {
  ParamMap params;
  params.emplace("w", Tensor::vector({1.0}));
  std::stringstream buf;
  save_checkpoint(params, buf);
  const std::string bytes = buf.str();
  // magic, u64 count, u32 name len, "w", u32 rank, u64 dim, f64 value
  REQUIRE(bytes.size() == 4 + 8 + 4 + 1 + 4 + 8 + 8);
  CHECK(bytes.substr(0, 4) == "E2T1");
  CHECK(static_cast<unsigned char>(bytes[4]) == 1);  // count, little-endian
  CHECK(static_cast<unsigned char>(bytes[12]) == 1);  // name length
  CHECK(bytes[16] == 'w');
  CHECK(static_cast<unsigned char>(bytes[17]) == 1);  // rank
  CHECK(static_cast<unsigned char>(bytes[21]) == 1);  // dim 0
  double value;
  std::memcpy(&value, bytes.data() + 29, 8);
  CHECK(value == 1.0);
}

TEST_CASE("checkpoint rejects garbage") {
  std::stringstream buf("NOPE");
  CHECK_THROWS_AS(load_checkpoint(buf), std::runtime_error);
}
