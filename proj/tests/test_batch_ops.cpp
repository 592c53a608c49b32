#include <random>

#include "doctest.h"
#include "mf/batch_ops.hpp"
#include "mf/datagen.hpp"
#include "mf/flow.hpp"
#include "mf/kernel_regime.hpp"

using mf::Activation;

TEST_SUITE("batch-ops") {

TEST_CASE("parallel kernels equal the serial reference bitwise") {
  const auto ds = mf::sample_teacher(mf::make_teacher(4, 3, 1), 333, 1);
  const auto e = mf::init_ensemble(4, 257, 2);
  std::mt19937 gen(1);
  std::normal_distribution<double> nd;
  std::vector<double> g(ds.size()), pts(5 * 301);
  for (auto& v : g) v = nd(gen);
  for (auto& v : pts) v = nd(gen);
  const int saved = mf::max_threads();
  for (const auto act : {Activation::relu(), Activation::smooth(0.2)}) {
    const auto h = mf::serial::predict_all(e, ds.inputs(), act);
    const auto pg = mf::serial::particle_gradients(e, ds, g, act);
    const auto pv = mf::serial::potential_values(pts, ds, g, act);
    const auto K = mf::serial::gram(ds.inputs(), 4, [](auto a, auto b) { return mf::closed_form_kernel(a, b); });
    for (int threads : {1, 2, 3, 4}) {
      mf::set_threads(threads);
      CHECK(mf::parallel::predict_all(e, ds.inputs(), act) == h);
      CHECK(mf::parallel::particle_gradients(e, ds, g, act) == pg);
      CHECK(mf::parallel::potential_values(pts, ds, g, act) == pv);
      CHECK(mf::parallel::gram(ds.inputs(), 4, [](auto a, auto b) { return mf::closed_form_kernel(a, b); }) == K);
    }
  }
  mf::set_threads(saved);
}

TEST_CASE("blocked sum does not depend on the thread count") {
  auto f = [](std::size_t k) { return 1.0 / (1.0 + static_cast<double>(k)); };
  const int saved = mf::max_threads();
  mf::set_threads(1);
  const double ref = mf::parallel::blocked_sum(100000, f);
  for (int threads : {2, 3, 5}) {
    mf::set_threads(threads);
    CHECK(mf::parallel::blocked_sum(100000, f) == ref);
  }
  mf::set_threads(saved);
  CHECK(mf::parallel::blocked_sum(0, f) == 0.0);
}

TEST_CASE("training is reproducible across thread counts") {
  const auto ds = mf::sample_teacher(mf::make_teacher(3, 2, 3), 64, 3);
  mf::FlowConfig cfg;
  cfg.step = 0.1;
  cfg.iterations = 50;
  cfg.record_every = 10;
  const int saved = mf::max_threads();
  mf::set_threads(1);
  const auto a = mf::run_flow(mf::init_ensemble(3, 40, 3), ds, mf::Loss::Square, Activation::relu(), cfg);
  mf::set_threads(3);
  const auto b = mf::run_flow(mf::init_ensemble(3, 40, 3), ds, mf::Loss::Square, Activation::relu(), cfg);
  mf::set_threads(saved);
  CHECK(a.final == b.final);
}

}
