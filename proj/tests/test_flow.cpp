#include <cmath>
#include <random>

#include "doctest.h"
#include "mf/batch_ops.hpp"
#include "mf/datagen.hpp"
#include "mf/flow.hpp"
#include "oracles.hpp"

using mf::Activation;
using mf::Dataset;
using mf::Ensemble;
using mf::FlowConfig;
using mf::Loss;

namespace {

Dataset teacher_data(std::size_t d, std::size_t n, std::uint64_t seed) {
  return mf::sample_teacher(mf::make_teacher(d, 3, seed), n, seed);
}

double max_prediction_gap(const Ensemble& a, const Ensemble& b, const Dataset& ds,
                          const Activation& act) {
  const auto ha = mf::serial::predict_all(a, ds.inputs(), act);
  const auto hb = mf::serial::predict_all(b, ds.inputs(), act);
  double gap = 0.0;
  for (std::size_t i = 0; i < ha.size(); ++i) gap = std::max(gap, std::abs(ha[i] - hb[i]));
  return gap;
}

}  // namespace

TEST_SUITE("flow") {

TEST_CASE("one step by hand") {
  Dataset ds(1, {3.0}, {1.0});
  Ensemble e(1, std::vector<double>{2.0, 1.0});
  const Ensemble next = mf::gd_step(e, ds, Loss::Square, Activation::relu(), 0.01);
  CHECK(next.weights()[0] == doctest::Approx(2.0 - 0.15));
  CHECK(next.weights()[1] == doctest::Approx(1.0 - 0.30));
}

TEST_CASE("stationary points do not move") {
  Dataset ds(1, {1.0, 2.0, 0.5}, {1.0, 2.0, 0.5});
  Ensemble e(1, std::vector<double>{1.0, 1.0, 2.0, 0.5});
  FlowConfig cfg;
  cfg.step = 0.1;
  cfg.iterations = 50;
  const auto traj = mf::run_flow(e, ds, Loss::Square, Activation::relu(), cfg);
  CHECK(traj.final == e);
  CHECK_FALSE(traj.diverged);
}

TEST_CASE("snapshots at 0, every record_every steps and the last step") {
  const Dataset ds = teacher_data(2, 20, 1);
  FlowConfig cfg;
  cfg.step = 0.01;
  cfg.iterations = 25;
  cfg.record_every = 10;
  const auto traj = mf::run_flow(mf::init_ensemble(2, 5, 1), ds, Loss::Square, Activation::relu(), cfg);
  REQUIRE(traj.snapshots.size() == 4);
  CHECK(traj.snapshots[0].iteration == 0);
  CHECK(traj.snapshots[1].iteration == 10);
  CHECK(traj.snapshots[2].iteration == 20);
  CHECK(traj.snapshots[3].iteration == 25);
  CHECK(traj.snapshots[3].t == doctest::Approx(0.25));
  CHECK(*traj.snapshots[3].ensemble == traj.final);
  CHECK(traj.snapshots[0].risk == doctest::Approx(mf::empirical_risk(mf::init_ensemble(2, 5, 1), ds, Loss::Square, Activation::relu())));
}

TEST_CASE("smooth instances: risk decreases for small steps") {
  const auto act = Activation::smooth(0.2);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::size_t d = 2 + seed % 3;
    const Dataset ds = teacher_data(d, 30, seed);
    FlowConfig cfg;
    cfg.step = 0.02;
    cfg.iterations = 200;
    cfg.record_every = 1;
    cfg.keep_ensembles = false;
    const auto traj = mf::run_flow(mf::init_ensemble(d, 8, seed), ds, Loss::Square, act, cfg);
    REQUIRE_FALSE(traj.diverged);
    for (std::size_t k = 1; k < traj.snapshots.size(); ++k)
      CHECK(traj.snapshots[k].risk <= traj.snapshots[k - 1].risk + 1e-15);
  }
}

TEST_CASE("explicit Euler is first order in the step") {
  const auto act = Activation::smooth(0.2);
  const Dataset ds = teacher_data(2, 20, 7);
  const Ensemble e0 = mf::init_ensemble(2, 6, 7);
  auto flow_to = [&](double step) {
    FlowConfig cfg;
    cfg.step = step;
    cfg.iterations = static_cast<std::size_t>(std::llround(0.5 / step));
    cfg.record_every = cfg.iterations;
    cfg.keep_ensembles = false;
    return mf::run_flow(e0, ds, Loss::Square, act, cfg).final;
  };
  const Ensemble a = flow_to(0.01), b = flow_to(0.005), c = flow_to(0.0025);
  const double ratio = max_prediction_gap(a, b, ds, act) / max_prediction_gap(b, c, ds, act);
  CHECK(ratio > 1.5);
  CHECK(ratio < 2.5);
}

TEST_CASE("large steps are flagged as divergence") {
  const Dataset ds = teacher_data(2, 20, 3);
  FlowConfig cfg;
  cfg.step = 1e4;
  cfg.iterations = 100;
  cfg.record_every = 1;
  const auto traj = mf::run_flow(mf::init_ensemble(2, 5, 3), ds, Loss::Square, Activation::relu(), cfg);
  CHECK(traj.diverged);
  CHECK_FALSE(traj.error.empty());
  CHECK(traj.snapshots.size() < 101);
}

TEST_CASE("config validation") {
  FlowConfig cfg;
  cfg.step = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.step = 0.1;
  cfg.record_every = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.record_every = 1;
  cfg.mode = FlowConfig::Mode::SGD;
  cfg.batch = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("full-batch SGD on a finite sampler equals gradient descent") {
  const Dataset ds = teacher_data(3, 16, 5);
  const Ensemble e0 = mf::init_ensemble(3, 7, 5);
  FlowConfig cfg;
  cfg.step = 0.05;
  cfg.iterations = 40;
  cfg.record_every = 10;
  cfg.batch = ds.size();
  cfg.mode = FlowConfig::Mode::SGD;
  const auto gd = mf::run_flow(e0, ds, Loss::Square, Activation::relu(), cfg);
  const auto sgd = mf::run_sgd(e0, mf::FiniteSampler(ds), Loss::Square, Activation::relu(), cfg, &ds);
  CHECK(gd.final == sgd.final);
  REQUIRE(gd.snapshots.size() == sgd.snapshots.size());
  for (std::size_t k = 0; k < gd.snapshots.size(); ++k) CHECK(gd.snapshots[k].risk == sgd.snapshots[k].risk);
}

TEST_CASE("SGD is deterministic in the seed") {
  mf::TeacherSampler sampler(mf::make_teacher(3, 2, 4));
  const Ensemble e0 = mf::init_ensemble(3, 6, 4);
  FlowConfig cfg;
  cfg.step = 0.05;
  cfg.iterations = 30;
  cfg.batch = 10;
  cfg.eval_samples = 200;
  cfg.mode = FlowConfig::Mode::SGD;
  cfg.seed = 11;
  const auto a = mf::run_sgd(e0, sampler, Loss::Square, Activation::relu(), cfg);
  const auto b = mf::run_sgd(e0, sampler, Loss::Square, Activation::relu(), cfg);
  CHECK(a.final == b.final);
  cfg.seed = 12;
  const auto c = mf::run_sgd(e0, sampler, Loss::Square, Activation::relu(), cfg);
  CHECK_FALSE(a.final == c.final);
}

TEST_CASE("init_ensemble: unit scaled neurons and reproducibility") {
  const Ensemble e = mf::init_ensemble(4, 50, 9);
  for (std::size_t j = 0; j < e.size(); ++j) {
    const auto w = e.particle(j);
    CHECK(mf::norm2(w) == doctest::Approx(std::sqrt(2.0)));
    CHECK(std::abs(w[0]) == doctest::Approx(1.0));
    CHECK(mf::norm2(w.subspan(1)) == doctest::Approx(1.0));
  }
  CHECK(e == mf::init_ensemble(4, 50, 9));
  CHECK_FALSE(e == mf::init_ensemble(4, 50, 10));
  CHECK_THROWS_AS(mf::init_ensemble(4, 0, 9), std::invalid_argument);
}

}
