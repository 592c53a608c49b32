// Serial reference loops against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "mf/batch_ops.hpp"
#include "mf/datagen.hpp"
#include "mf/flow.hpp"
#include "mf/kernel_regime.hpp"
#include "mf/losses.hpp"

namespace {

struct Problem {
  mf::Ensemble e;
  mf::Dataset ds;
  std::vector<double> g;
};

Problem make_problem(std::size_t m, std::size_t n, std::size_t d) {
  const auto teacher = mf::make_teacher(d, 4, 1);
  Problem p{mf::init_ensemble(d, m, 2), mf::sample_teacher(teacher, n, 3), {}};
  const auto h = mf::serial::predict_all(p.e, p.ds.inputs(), mf::Activation::relu());
  p.g = mf::risk_gradient_weights(mf::Loss::Square, h, p.ds.labels());
  return p;
}

template <bool Parallel>
void BM_predict_all(benchmark::State& state) {
  const auto p = make_problem(static_cast<std::size_t>(state.range(0)), 1000, 16);
  for (auto _ : state) {
    auto h = Parallel ? mf::parallel::predict_all(p.e, p.ds.inputs(), mf::Activation::relu())
                      : mf::serial::predict_all(p.e, p.ds.inputs(), mf::Activation::relu());
    benchmark::DoNotOptimize(h.data());
  }
}

template <bool Parallel>
void BM_particle_gradients(benchmark::State& state) {
  const auto p = make_problem(static_cast<std::size_t>(state.range(0)), 1000, 16);
  for (auto _ : state) {
    auto g = Parallel ? mf::parallel::particle_gradients(p.e, p.ds, p.g, mf::Activation::relu())
                      : mf::serial::particle_gradients(p.e, p.ds, p.g, mf::Activation::relu());
    benchmark::DoNotOptimize(g.data());
  }
}

template <bool Parallel>
void BM_potential_values(benchmark::State& state) {
  const auto p = make_problem(100, 1000, 16);
  const auto probes = mf::init_ensemble(16, static_cast<std::size_t>(state.range(0)), 5);
  const auto act = mf::Activation::smooth(0.1);
  for (auto _ : state) {
    auto v = Parallel ? mf::parallel::potential_values(probes.weights(), p.ds, p.g, act)
                      : mf::serial::potential_values(probes.weights(), p.ds, p.g, act);
    benchmark::DoNotOptimize(v.data());
  }
}

template <bool Parallel>
void BM_closed_form_gram(benchmark::State& state) {
  const auto p = make_problem(10, static_cast<std::size_t>(state.range(0)), 16);
  auto k = [](std::span<const double> a, std::span<const double> b) { return mf::closed_form_kernel(a, b); };
  for (auto _ : state) {
    auto K = Parallel ? mf::parallel::gram(p.ds.inputs(), 16, k) : mf::serial::gram(p.ds.inputs(), 16, k);
    benchmark::DoNotOptimize(K.data());
  }
}

}  // namespace

BENCHMARK(BM_predict_all<false>)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_predict_all<true>)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_particle_gradients<false>)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_particle_gradients<true>)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_potential_values<false>)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_potential_values<true>)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_closed_form_gram<false>)->Arg(500)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_closed_form_gram<true>)->Arg(500)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
