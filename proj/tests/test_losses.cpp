#include <cmath>
#include <random>

#include "doctest.h"
#include "mf/batch_ops.hpp"
#include "mf/flow.hpp"
#include "mf/losses.hpp"
#include "oracles.hpp"

using mf::Activation;
using mf::Dataset;
using mf::Ensemble;
using mf::Loss;

namespace {

std::vector<double> randn(std::size_t n, std::mt19937& gen, double scale = 1.0) {
  std::normal_distribution<double> nd(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = nd(gen);
  return v;
}

Dataset random_dataset(std::size_t n, std::size_t d, std::mt19937& gen) {
  return Dataset(d, randn(n * d, gen), randn(n, gen));
}

}  // namespace

TEST_SUITE("losses") {

TEST_CASE("loss_value examples") {
  CHECK(mf::loss_value(Loss::Square, 1.0, 0.5) == 0.125);
  CHECK(mf::loss_value(Loss::Logistic, 1.0, 0.0) == doctest::Approx(std::log(2.0)));
  CHECK(mf::loss_value(Loss::Logistic, 1.0, 50.0) < 1e-20);
  CHECK(mf::loss_value(Loss::Logistic, 1.0, 50.0) >= 0.0);
  CHECK(std::isfinite(mf::loss_value(Loss::Logistic, 1.0, -800.0)));
}

TEST_CASE("loss derivatives match finite differences and are convex") {
  for (Loss l : {Loss::Square, Loss::Logistic}) {
    for (double y : {-1.0, 1.0, 0.3}) {
      for (double h = -5.0; h <= 5.0; h += 0.25) {
        const double e = 1e-5;
        const double fd = (mf::loss_value(l, y, h + e) - mf::loss_value(l, y, h - e)) / (2 * e);
        CHECK(mf::loss_derivative(l, y, h) == doctest::Approx(fd).epsilon(1e-6));
        const double fd2 = (mf::loss_derivative(l, y, h + e) - mf::loss_derivative(l, y, h - e)) / (2 * e);
        CHECK(mf::loss_second_derivative(l, y, h) == doctest::Approx(fd2).epsilon(1e-5));
        CHECK(mf::loss_second_derivative(l, y, h) >= 0.0);
      }
    }
  }
}

TEST_CASE("risk gradient weights follow the closed forms") {
  const std::vector<double> h{0.5, -2.0, 3.0};
  const std::vector<double> y{1.0, -1.0, 1.0};
  const auto gs = mf::risk_gradient_weights(Loss::Square, h, y);
  const auto gl = mf::risk_gradient_weights(Loss::Logistic, h, y);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(gs[i] == doctest::Approx((h[i] - y[i]) / 3.0));
    CHECK(gl[i] == doctest::Approx(-y[i] / (3.0 * (1.0 + std::exp(y[i] * h[i])))));
  }
}

TEST_CASE("risk gradient weights are the first variation of the risk") {
  std::mt19937 gen(3);
  for (Loss l : {Loss::Square, Loss::Logistic}) {
    auto h = randn(7, gen);
    const auto y = randn(7, gen);
    const auto g = mf::risk_gradient_weights(l, h, y);
    for (std::size_t i = 0; i < h.size(); ++i) {
      for (double eps : {1e-2, 1e-3}) {
        auto hp = h;
        hp[i] += eps;
        const double lin = mf::risk_from_predictions(l, hp, y) - mf::risk_from_predictions(l, h, y);
        CHECK(std::abs(lin - eps * g[i]) < 2.0 * eps * eps);
      }
    }
  }
}

TEST_CASE("empirical risk examples") {
  Dataset ds(1, {1.0, 2.0}, {1.0, -1.0});
  Ensemble zero(1, std::vector<double>{0.0, 1.0});
  CHECK(mf::empirical_risk(zero, ds, Loss::Square, Activation::relu()) == 0.5);

  // h(x) = x, y = x: interpolation
  Dataset lin(1, {1.0, 2.0, 0.5}, {1.0, 2.0, 0.5});
  Ensemble fit(1, std::vector<double>{1.0, 1.0});
  CHECK(mf::empirical_risk(fit, lin, Loss::Square, Activation::relu()) == 0.0);
  const auto g = mf::objective_gradient(fit, lin, Loss::Square, Activation::relu());
  CHECK(oracle::max_abs(g) == 0.0);

  CHECK(mf::empirical_risk(fit, lin, Loss::Square, Activation::relu(), 0.1) >
        mf::empirical_risk(fit, lin, Loss::Square, Activation::relu()));
  CHECK(mf::empirical_risk(fit, lin, Loss::Square, Activation::relu(), 0.1) == doctest::Approx(0.1 * 0.5 * 2.0));
}

TEST_CASE("objective gradient, single particle and point by hand") {
  // w = (a, b) = (2, 1), x = 3, y = 1: h = 6, l' = 5, grad = 5 * (3, 2 * 3)
  Dataset ds(1, {3.0}, {1.0});
  Ensemble e(1, std::vector<double>{2.0, 1.0});
  const auto g = mf::objective_gradient(e, ds, Loss::Square, Activation::relu());
  CHECK(g == std::vector<double>{15.0, 30.0});
}

TEST_CASE("objective gradient matches finite differences of m G") {
  std::mt19937 gen(17);
  const auto act = Activation::smooth(0.25);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t d = 1 + trial % 5, m = 1 + trial % 8, n = 1 + trial % 10;
    const Loss l = trial % 2 ? Loss::Logistic : Loss::Square;
    Dataset ds = random_dataset(n, d, gen);
    if (l == Loss::Logistic) {
      std::vector<double> ys(n);
      for (std::size_t i = 0; i < n; ++i) ys[i] = ds.y(i) > 0 ? 1.0 : -1.0;
      ds = Dataset(d, std::vector<double>(ds.inputs().begin(), ds.inputs().end()), ys);
    }
    Ensemble e(d, randn(m * (d + 1), gen));
    const auto fd = oracle::fd_gradient(
        [&](std::span<const double> w) { return oracle::scaled_objective(w, d, ds, l, act); },
        std::vector<double>(e.weights().begin(), e.weights().end()));
    CHECK(oracle::rel_error(mf::objective_gradient(e, ds, l, act), fd) < 1e-5);
  }
}

TEST_CASE("ridge adds lambda w to the gradient") {
  std::mt19937 gen(2);
  Dataset ds = random_dataset(5, 2, gen);
  Ensemble e(2, randn(4 * 3, gen));
  const auto g0 = mf::objective_gradient(e, ds, Loss::Square, Activation::relu());
  const auto g1 = mf::objective_gradient(e, ds, Loss::Square, Activation::relu(), 0.5);
  for (std::size_t k = 0; k < g0.size(); ++k) CHECK(g1[k] == doctest::Approx(g0[k] + 0.5 * e.weights()[k]));
}

TEST_CASE("pairwise sum is exact on integers and independent of split") {
  std::vector<double> v(1001);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  CHECK(mf::pairwise_sum(v) == 500500.0);
  CHECK(mf::pairwise_sum(std::vector<double>{}) == 0.0);
}

TEST_CASE("dataset validation") {
  CHECK_THROWS_AS(Dataset(2, {1.0, 2.0, 3.0}, {1.0}), std::invalid_argument);
  Ensemble e(3, 2);
  Dataset ds(2, {1.0, 2.0}, {1.0});
  CHECK_THROWS_AS(mf::empirical_risk(e, ds, Loss::Square, Activation::relu()), std::invalid_argument);
}

}
