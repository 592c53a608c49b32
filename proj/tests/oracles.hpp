#pragma once

// Reference computations for the tests, written independently of the library
// code paths they check.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <vector>

#include "mf/losses.hpp"
#include "mf/model.hpp"

namespace oracle {

/// Central differences of f at x with step h.
inline std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& f,
                                       std::vector<double> x, double h = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double x0 = x[k];
    x[k] = x0 + h;
    const double fp = f(x);
    x[k] = x0 - h;
    const double fm = f(x);
    x[k] = x0;
    g[k] = (fp - fm) / (2 * h);
  }
  return g;
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

/// max_k |a_k - b_k| / max(1, max_k |b_k|).
inline double rel_error(std::span<const double> a, std::span<const double> b) {
  double e = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) e = std::max(e, std::abs(a[k] - b[k]));
  return e / std::max(1.0, max_abs(b));
}

/// Naive m * G(W) = m * (1/n) sum_i l(y_i, (1/m) sum_j Psi(w_j)(x_i)).
inline double scaled_objective(std::span<const double> flat, std::size_t d, const mf::Dataset& ds,
                               mf::Loss l, const mf::Activation& act) {
  const std::size_t m = flat.size() / (d + 1);
  double total = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    double h = 0.0;
    for (std::size_t j = 0; j < m; ++j) h += mf::psi_eval(flat.subspan(j * (d + 1), d + 1), ds.x(i), act);
    h /= static_cast<double>(m);
    total += mf::loss_value(l, ds.y(i), h);
  }
  return static_cast<double>(m) * total / static_cast<double>(ds.size());
}

/// Gaussian-normalised direction sampler with its own generator.
class SphereSampler {
 public:
  SphereSampler(std::size_t dim, std::uint32_t seed) : dim_(dim), gen_(seed) {}
  void next(std::vector<double>& v) {
    v.resize(dim_);
    double n2 = 0.0;
    for (auto& x : v) {
      x = normal_(gen_);
      n2 += x * x;
    }
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& x : v) x *= inv;
  }

 private:
  std::size_t dim_;
  std::mt19937 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Monte Carlo E[(eta^T x)_+ (eta^T x')_+] over eta uniform on S^{d-1}.
inline double mc_kernel(std::span<const double> x, std::span<const double> xp, std::size_t samples,
                        std::uint32_t seed) {
  SphereSampler s(x.size(), seed);
  std::vector<double> eta;
  long double acc = 0.0L;
  for (std::size_t k = 0; k < samples; ++k) {
    s.next(eta);
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      a += eta[i] * x[i];
      b += eta[i] * xp[i];
    }
    if (a > 0.0 && b > 0.0) acc += a * b;
  }
  return static_cast<double>(acc / static_cast<long double>(samples));
}

struct HardMargin {
  bool feasible = false;
  std::vector<double> alpha;
  double objective = std::numeric_limits<double>::infinity();
};

/// Hard-margin problem min a^T K a s.t. y_i (K a)_i >= 1 by enumerating every
/// active set S: solve Q_SS b_S = 1 with Q = diag(y) K diag(y), keep b >= 0
/// with all margins >= 1. Exponential in n; for n <= 10 only.
inline HardMargin brute_force_max_margin(const Eigen::MatrixXd& K, std::span<const double> ys) {
  const int n = static_cast<int>(ys.size());
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) y[i] = ys[i];
  const Eigen::MatrixXd Q = y.asDiagonal() * K * y.asDiagonal();
  HardMargin best;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> S;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) S.push_back(i);
    const int s = static_cast<int>(S.size());
    Eigen::MatrixXd Qs(s, s);
    for (int a = 0; a < s; ++a)
      for (int b = 0; b < s; ++b) Qs(a, b) = Q(S[a], S[b]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(Qs);
    if (!lu.isInvertible()) continue;
    const Eigen::VectorXd bs = lu.solve(Eigen::VectorXd::Ones(s));
    if (bs.minCoeff() < -1e-12) continue;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(n);
    for (int a = 0; a < s; ++a) beta[S[a]] = bs[a];
    const Eigen::VectorXd margins = Q * beta;
    if (margins.minCoeff() < 1.0 - 1e-9) continue;
    const double obj = beta.dot(Q * beta);
    if (obj < best.objective) {
      best.feasible = true;
      best.objective = obj;
      best.alpha.assign(n, 0.0);
      for (int i = 0; i < n; ++i) best.alpha[i] = y[i] * beta[i];
    }
  }
  return best;
}

}  // namespace oracle
