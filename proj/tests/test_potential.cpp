#include <cmath>
#include <random>

#include "doctest.h"
#include "mf/datagen.hpp"
#include "mf/flow.hpp"
#include "mf/potential.hpp"
#include "oracles.hpp"

using mf::Activation;
using mf::Dataset;
using mf::Ensemble;
using mf::Loss;

namespace {

Dataset teacher_data(std::size_t d, std::size_t n, std::uint64_t seed) {
  return mf::sample_teacher(mf::make_teacher(d, 3, seed), n, seed);
}

std::vector<double> random_point(std::size_t p, std::mt19937& gen) {
  std::normal_distribution<double> nd;
  std::vector<double> w(p);
  for (auto& v : w) v = nd(gen);
  return w;
}

}  // namespace

TEST_SUITE("potential") {

TEST_CASE("single sample by hand") {
  // h = 2 * relu(3) = 6, y = 1, g = 5: J(w) = 5 * a * relu(b x)
  Dataset ds(1, {3.0}, {1.0});
  Ensemble e(1, std::vector<double>{2.0, 1.0});
  CHECK(mf::mean_potential(std::vector<double>{1.0, 1.0}, e, ds, Loss::Square, Activation::relu()) == 15.0);
  CHECK(mf::mean_potential(std::vector<double>{1.0, -1.0}, e, ds, Loss::Square, Activation::relu()) == 0.0);
  CHECK(mf::mean_potential(std::vector<double>{-2.0, 1.0}, e, ds, Loss::Square, Activation::relu()) == -30.0);
}

TEST_CASE("Euler identity and 2-homogeneity") {
  std::mt19937 gen(5);
  for (const auto act : {Activation::relu(), Activation::smooth(0.3)}) {
    const Dataset ds = teacher_data(3, 12, 1);
    const mf::MeanPotential J(mf::init_ensemble(3, 6, 1), ds, Loss::Square, act);
    for (int k = 0; k < 50; ++k) {
      const auto w = random_point(4, gen);
      const double j = J.value(w);
      CHECK(mf::dot(J.gradient(w), w) == doctest::Approx(2.0 * j).epsilon(1e-12));
      for (double lambda : {0.1, 3.0}) {
        auto lw = w;
        for (auto& v : lw) v *= lambda;
        CHECK(J.value(lw) == doctest::Approx(lambda * lambda * j).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("gradient matches finite differences") {
  std::mt19937 gen(8);
  const auto act = Activation::smooth(0.2);
  const Dataset ds = teacher_data(2, 15, 2);
  const mf::MeanPotential J(mf::init_ensemble(2, 5, 2), ds, Loss::Logistic, act);
  for (int k = 0; k < 20; ++k) {
    const auto w = random_point(3, gen);
    const auto fd = oracle::fd_gradient([&](std::span<const double> x) { return J.value(x); }, w);
    CHECK(oracle::rel_error(J.gradient(w), fd) < 1e-7);
  }
}

TEST_CASE("particle velocities are minus the potential gradient") {
  const auto act = Activation::smooth(0.1);
  for (Loss l : {Loss::Square, Loss::Logistic}) {
    const Dataset ds = teacher_data(3, 20, 4);
    const Ensemble e = mf::init_ensemble(3, 9, 4);
    const auto g = mf::objective_gradient(e, ds, l, act);
    for (std::size_t j = 0; j < e.size(); ++j) {
      const auto gj = mf::mean_potential_grad(e.particle(j), e, ds, l, act);
      CHECK(oracle::rel_error(gj, std::span<const double>(g).subspan(j * 4, 4)) < 1e-12);
    }
  }
}

TEST_CASE("batched values equal pointwise values") {
  std::mt19937 gen(1);
  const Dataset ds = teacher_data(2, 30, 7);
  const mf::MeanPotential J(mf::init_ensemble(2, 4, 7), ds, Loss::Square, Activation::relu());
  std::vector<double> pts;
  for (int k = 0; k < 17; ++k) {
    const auto w = random_point(3, gen);
    pts.insert(pts.end(), w.begin(), w.end());
  }
  const auto vals = J.values(pts);
  for (std::size_t k = 0; k < vals.size(); ++k) CHECK(vals[k] == J.value(std::span<const double>(pts).subspan(k * 3, 3)));
}

TEST_CASE("more probes can only lower the probe minimum") {
  const Dataset ds = teacher_data(2, 30, 3);
  const Ensemble e = mf::init_ensemble(2, 5, 3);
  mf::CertificateOptions opt;
  opt.refine_count = 0;
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t probes : {10, 100, 1000, 4000}) {
    opt.n_probes = probes;
    const auto rep = mf::optimality_certificate(e, ds, Loss::Square, Activation::relu(), opt);
    CHECK(rep.min_probe_J <= previous);
    previous = rep.min_probe_J;
  }
}

TEST_CASE("refinement never raises the minimum") {
  const Dataset ds = teacher_data(2, 30, 3);
  const Ensemble e = mf::init_ensemble(2, 5, 3);
  mf::CertificateOptions off;
  off.refine_count = 0;
  const auto a = mf::optimality_certificate(e, ds, Loss::Square, Activation::relu(), off);
  const auto b = mf::optimality_certificate(e, ds, Loss::Square, Activation::relu());
  CHECK(b.min_probe_J <= a.min_probe_J);
  CHECK(mf::norm2(b.worst_direction) == doctest::Approx(1.0));
}

TEST_CASE("verdicts") {
  // Exact interpolation: every risk weight vanishes.
  Dataset ds(1, {1.0, 2.0, 0.5}, {1.0, 2.0, 0.5});
  Ensemble fit(1, std::vector<double>{1.0, 1.0});
  const auto ok = mf::optimality_certificate(fit, ds, Loss::Square, Activation::relu());
  CHECK(ok.verdict == mf::Verdict::CertifiedUpToProbes);
  CHECK(ok.min_probe_J == 0.0);
  CHECK(ok.support_size == 1);

  // Untrained network on teacher data: some direction lowers the risk.
  const Dataset td = teacher_data(2, 50, 9);
  Ensemble tiny = mf::init_ensemble(2, 3, 9);
  tiny.scale(1e-3);
  const auto bad = mf::optimality_certificate(tiny, td, Loss::Square, Activation::relu());
  CHECK(bad.verdict == mf::Verdict::Violated);
  CHECK(bad.min_probe_J < -1e-3);
  CHECK(mf::to_string(bad.verdict) == "Violated");
}

TEST_CASE("mass cutoff drops negligible particles from the support") {
  Dataset ds(1, {1.0, 2.0}, {1.0, 2.0});
  Ensemble e(1, std::vector<double>{1.0, 1.0, 1e-9, -1e-9});
  const auto rep = mf::optimality_certificate(e, ds, Loss::Square, Activation::relu());
  CHECK(rep.support_size == 1);
}

}
