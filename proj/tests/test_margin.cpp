#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mf/flow.hpp"
#include "mf/margin.hpp"

using mf::Activation;
using mf::Dataset;
using mf::Ensemble;

TEST_SUITE("margin-analysis") {

TEST_CASE("ensemble scale and normalized margin by hand") {
  // h(x) = 0.5 * (relu(x) - relu(-x)) = x / 2, scale = (2 + 2) / 2 = 2
  Ensemble e(1, std::vector<double>{1.0, 1.0, -1.0, -1.0});
  Dataset ds(1, {1.0, -3.0}, {1.0, -1.0});
  CHECK(mf::ensemble_scale(e) == 2.0);
  CHECK(mf::normalized_margin(e, ds, Activation::relu()) == 0.25);
  CHECK_THROWS_AS(mf::normalized_margin(Ensemble(1, 2), ds, Activation::relu()), std::invalid_argument);
}

TEST_CASE("normalized margin is scale invariant") {
  const Ensemble e = mf::init_ensemble(2, 20, 3);
  Dataset ds(2, {0.3, -0.1, -0.2, 0.4, 0.1, 0.1}, {1.0, -1.0, 1.0});
  const double base = mf::normalized_margin(e, ds, Activation::relu());
  for (double lambda : {1e-3, 0.5, 7.0, 1e3}) {
    Ensemble s = e;
    s.scale(lambda);
    CHECK(mf::normalized_margin(s, ds, Activation::relu()) == doctest::Approx(base).epsilon(1e-12));
  }
}

TEST_CASE("flipping output weights and labels keeps the margin") {
  const Ensemble e = mf::init_ensemble(2, 10, 5);
  Ensemble flipped = e;
  for (std::size_t j = 0; j < e.size(); ++j) flipped.particle(j)[0] *= -1.0;
  Dataset ds(2, {0.3, -0.1, -0.2, 0.4}, {1.0, -1.0});
  Dataset neg(2, {0.3, -0.1, -0.2, 0.4}, {-1.0, 1.0});
  CHECK(mf::normalized_margin(flipped, neg, Activation::relu()) ==
        doctest::Approx(mf::normalized_margin(e, ds, Activation::relu())));
}

TEST_CASE("margin trace follows the snapshots") {
  Dataset ds(2, {0.3, -0.1, -0.2, 0.4, 0.1, 0.2}, {1.0, -1.0, 1.0});
  mf::FlowConfig cfg;
  cfg.step = 0.5;
  cfg.iterations = 30;
  cfg.record_every = 10;
  const auto traj = mf::run_flow(mf::init_ensemble(2, 10, 1), ds, mf::Loss::Logistic, Activation::relu(), cfg);
  const auto tr = mf::margin_trace(traj, ds, Activation::relu());
  CHECK(tr.times.size() == traj.snapshots.size());
  CHECK(tr.normalized_margin.back() == mf::normalized_margin(traj.final, ds, Activation::relu()));
}

TEST_CASE("direction distance") {
  CHECK(mf::direction_distance(std::vector<double>{1.0, 0.0}, std::vector<double>{3.0, 0.0}) == doctest::Approx(0.0));
  CHECK(mf::direction_distance(std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 2.0}) == doctest::Approx(1.0));
  CHECK(mf::direction_distance(std::vector<double>{1.0, 1.0}, std::vector<double>{-1.0, -1.0}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(mf::direction_distance(std::vector<double>{0.0, 0.0}, std::vector<double>{1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("straight boundary: one line and no turning") {
  const auto grid = mf::extract_boundary([](double x, double y) { return x - 0.3 * y + 0.05; }, 65);
  REQUIRE(grid.polylines.size() == 1);
  for (const auto& p : grid.polylines[0]) CHECK(p[0] - 0.3 * p[1] + 0.05 == doctest::Approx(0.0).scale(1.0));
  CHECK(mf::turning_angle_variance(grid) < 1e-20);
  CHECK(grid.coord(0) == -0.5);
  CHECK(grid.coord(64) == 0.5);
}

TEST_CASE("circle: one closed loop with even turning") {
  const auto grid = mf::extract_boundary([](double x, double y) { return x * x + y * y - 0.09; }, 129);
  REQUIRE(grid.polylines.size() == 1);
  const auto& loop = grid.polylines[0];
  CHECK(loop.front() == loop.back());
  double total = 0.0;
  for (double a : mf::turning_angles(grid.polylines)) total += a;
  CHECK(std::abs(total) == doctest::Approx(2.0 * std::numbers::pi).epsilon(0.05));
  for (const auto& p : loop) CHECK(std::hypot(p[0], p[1]) == doctest::Approx(0.3).epsilon(0.01));
}

TEST_CASE("a corner has larger turning variance than a circle") {
  const auto corner = mf::extract_boundary([](double x, double y) { return std::max(x, y) - 0.1; }, 129);
  const auto circle = mf::extract_boundary([](double x, double y) { return x * x + y * y - 0.09; }, 129);
  CHECK(mf::turning_angle_variance(corner) > mf::turning_angle_variance(circle));
}

TEST_CASE("marching squares on a 2x2 lattice") {
  const std::vector<double> v{-1.0, 1.0, -1.0, 1.0};
  const auto lines = mf::marching_squares(v, 2, 0.0, 1.0);
  REQUIRE(lines.size() == 1);
  REQUIRE(lines[0].size() == 2);
  CHECK(lines[0][0][0] == doctest::Approx(0.5));
  CHECK(lines[0][1][0] == doctest::Approx(0.5));
}

TEST_CASE("ensemble boundaries") {
  Ensemble e(2, std::vector<double>{1.0, 1.0, 0.0});  // h = relu(x_1)
  CHECK(mf::extract_boundary(e, Activation::relu(), 65).values.size() == 65 * 65);
  Ensemble e3(3, std::vector<double>{1.0, 1.0, 0.0, -0.1});  // relu(x_1 - 0.1 b)
  const auto g = mf::extract_boundary(e3, Activation::relu(), 65, 1.0);
  CHECK(g.values[32 * 65 + 64] > 0.0);
  CHECK_THROWS_AS(mf::extract_boundary(e3, Activation::relu(), 65), std::invalid_argument);
  CHECK_THROWS_AS(mf::extract_boundary(e, Activation::relu(), 65, 1.0), std::invalid_argument);
}

}
