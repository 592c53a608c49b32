#pragma once

// Polar form of the particle flow. With w_j = r_j * eta_j and |eta_j| = 1,
// 2-homogeneity of Psi turns dw_j/dt = -grad J(w_j | mu) into
//
//   dr_j/dt   = -2 r_j J(eta_j | nu)
//   deta_j/dt = -(I - eta_j eta_j^T) grad J(eta_j | nu)
//
// with nu = (1/m) sum_j r_j^2 delta_{eta_j}. Steps are explicit Euler followed
// by renormalisation of eta_j.

#include <functional>
#include <span>
#include <vector>

#include "mf/losses.hpp"
#include "mf/model.hpp"
#include "mf/potential.hpp"

namespace mf {

struct PolarParticle {
  double r = 0.0;
  std::vector<double> eta;
};

/// m pairs (r_j, eta_j) with eta_j on S^d.
class PolarEnsemble {
 public:
  PolarEnsemble() = default;
  PolarEnsemble(std::size_t d, std::vector<double> radii, std::vector<double> directions);

  std::size_t dim() const { return d_; }
  std::size_t size() const { return r_.size(); }
  double radius(std::size_t j) const { return r_[j]; }
  std::span<const double> direction(std::size_t j) const {
    return {eta_.data() + j * (d_ + 1), d_ + 1};
  }
  std::span<const double> radii() const { return r_; }
  std::span<const double> directions() const { return eta_; }

  /// Total mass of nu, (1/m) sum_j r_j^2.
  double mass() const;
  /// nu(f) = (1/m) sum_j r_j^2 f(eta_j).
  double integrate(const std::function<double(std::span<const double>)>& f) const;

 private:
  std::size_t d_ = 0;
  std::vector<double> r_;
  std::vector<double> eta_;
};

/// Throws std::invalid_argument for the zero vector.
PolarParticle polar_decompose(std::span<const double> w);
std::vector<double> recompose(const PolarParticle& p);
PolarEnsemble polar_decompose(const Ensemble& e);
Ensemble recompose(const PolarEnsemble& pe);

/// h(x) = (1/m) sum_j r_j^2 Psi(eta_j)(x) for every row of `xs`.
std::vector<double> predict_all(const PolarEnsemble& pe, std::span<const double> xs,
                                const Activation& act);

MeanPotential potential_of(const PolarEnsemble& pe, const Dataset& ds, Loss l,
                           const Activation& act);
double mean_potential(std::span<const double> w, const PolarEnsemble& pe, const Dataset& ds,
                      Loss l, const Activation& act);

/// One projected Euler step of the polar dynamics. Throws DivergenceError
/// when J is not finite.
PolarEnsemble polar_step(const PolarEnsemble& pe, const Dataset& ds, Loss l, const Activation& act,
                         double step);

/// Runs Cartesian gradient descent and the polar scheme side by side from e0
/// up to time T and returns the largest |h_cartesian - h_polar| over the
/// probe inputs (rows of `probes`) and all step times.
double equivalence_check(const Ensemble& e0, const Dataset& ds, Loss l, const Activation& act,
                         double step, double horizon, std::span<const double> probes);

/// Smooth test function on the sphere with its (ambient) gradient.
struct TestFunction {
  std::function<double(std::span<const double>)> value;
  std::function<std::vector<double>(std::span<const double>)> gradient;

  static TestFunction constant_one();
  static TestFunction coordinate(std::size_t k);
};

struct MassRates {
  double lhs = 0.0;  // (a(t + step) - a(t)) / step along polar_step
  double rhs = 0.0;  // -4 nu(f J) - nu(grad f^T (I - eta eta^T) grad J)
};

MassRates mass_evolution_check(const PolarEnsemble& pe, const Dataset& ds, Loss l,
                               const Activation& act, const TestFunction& f, double step);

}  // namespace mf
