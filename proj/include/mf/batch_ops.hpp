#pragma once

// Data-parallel inner loops shared by every module.
//
// Each operation exists twice: `serial` is the plain reference loop kept for
// testing, `parallel` distributes the outer loop with OpenMP. The outer loop
// index owns its output slot and the inner reduction runs in the same order
// in both versions, so the results are bitwise identical for any thread count.

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "mf/losses.hpp"
#include "mf/model.hpp"

namespace mf {

namespace serial {

/// h(x_i) for every row of `xs` (row-major, n x d).
std::vector<double> predict_all(const Ensemble& e, std::span<const double> xs,
                                const Activation& act);

/// sum_i g_i * psi_grad(w_j, x_i) for every particle j.
std::vector<double> particle_gradients(const Ensemble& e, const Dataset& ds,
                                       std::span<const double> g, const Activation& act);

/// sum_i g_i * psi_eval(p_k, x_i) for every row p_k of `points` (k x (d+1)).
std::vector<double> potential_values(std::span<const double> points, const Dataset& ds,
                                     std::span<const double> g, const Activation& act);

/// K_ij = kernel(x_i, x_j) for the rows of `xs`; symmetric fill.
template <class Kernel>
std::vector<double> gram(std::span<const double> xs, std::size_t d, Kernel&& kernel) {
  const std::size_t n = xs.size() / d;
  std::vector<double> K(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = kernel(xs.subspan(i * d, d), xs.subspan(j * d, d));
      K[i * n + j] = v;
      K[j * n + i] = v;
    }
  }
  return K;
}

}  // namespace serial

namespace parallel {

std::vector<double> predict_all(const Ensemble& e, std::span<const double> xs,
                                const Activation& act);
std::vector<double> particle_gradients(const Ensemble& e, const Dataset& ds,
                                       std::span<const double> g, const Activation& act);
std::vector<double> potential_values(std::span<const double> points, const Dataset& ds,
                                     std::span<const double> g, const Activation& act);

template <class Kernel>
std::vector<double> gram(std::span<const double> xs, std::size_t d, Kernel&& kernel) {
  const std::size_t n = xs.size() / d;
  std::vector<double> K(n * n);
  const long long count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 8)
  for (long long ii = 0; ii < count; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    for (std::size_t j = i; j < n; ++j) {
      const double v = kernel(xs.subspan(i * d, d), xs.subspan(j * d, d));
      K[i * n + j] = v;
      K[j * n + i] = v;
    }
  }
  return K;
}

/// Sum of f(k) for k in [0, count), reduced over a fixed block partition so
/// the rounding does not depend on the number of threads.
template <class F>
double blocked_sum(std::size_t count, F&& f) {
  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (count + kBlock - 1) / kBlock;
  std::vector<double> partial(blocks, 0.0);
  const long long nb = static_cast<long long>(blocks);
#pragma omp parallel for schedule(static)
  for (long long bb = 0; bb < nb; ++bb) {
    const auto b = static_cast<std::size_t>(bb);
    const std::size_t end = std::min(count, (b + 1) * kBlock);
    double s = 0.0;
    for (std::size_t k = b * kBlock; k < end; ++k) s += f(k);
    partial[b] = s;
  }
  return pairwise_sum(partial);
}

}  // namespace parallel

/// Number of OpenMP threads available (1 when built without OpenMP).
int max_threads();
/// Sets the OpenMP thread count; no-op without OpenMP.
void set_threads(int n);

}  // namespace mf
