#pragma once

// Particle representation of a two-layer network in the mean-field scaling.
//
// A particle is the joint weight vector w = [a, b] of one hidden neuron, with
// a the output weight and b in R^d the input weights. The predictor is the
// uniform average h(x) = (1/m) sum_j a_j * sigma(b_j^T x).

#include <cstddef>
#include <span>
#include <vector>

namespace mf {

/// Positively 1-homogeneous activation.
///
/// ReLU uses sigma'(0) = 0. The smooth variant evaluates
/// s * g(t / s) with g(u) = (u + sqrt(u^2 + tau^2)) / 2 - tau / 2 and s the
/// norm of the whole particle, which makes Psi smooth on the unit sphere of
/// R^{d+1} and exactly 2-homogeneous off it.
struct Activation {
  enum class Kind { ReLU, SmoothHomogeneous };

  Kind kind = Kind::ReLU;
  double tau = 0.0;

  static Activation relu() { return {Kind::ReLU, 0.0}; }
  static Activation smooth(double tau);

  bool is_smooth() const { return kind == Kind::SmoothHomogeneous; }
};

/// Flat storage for m particles of dimension d + 1, row-major.
class Ensemble {
 public:
  Ensemble() = default;
  Ensemble(std::size_t d, std::size_t m);
  Ensemble(std::size_t d, std::vector<double> weights);

  std::size_t dim() const { return d_; }
  std::size_t stride() const { return d_ + 1; }
  std::size_t size() const { return d_ == 0 && w_.empty() ? 0 : w_.size() / (d_ + 1); }
  bool empty() const { return w_.empty(); }

  std::span<const double> particle(std::size_t j) const {
    return {w_.data() + j * stride(), stride()};
  }
  std::span<double> particle(std::size_t j) { return {w_.data() + j * stride(), stride()}; }

  std::span<const double> weights() const { return w_; }
  std::span<double> weights() { return w_; }

  /// w_j -> lambda * w_j for every particle.
  void scale(double lambda);

  /// Concatenation of particle lists; the predictor becomes the
  /// size-weighted average of the two predictors.
  static Ensemble merge(const Ensemble& a, const Ensemble& b);

  friend bool operator==(const Ensemble&, const Ensemble&) = default;

 private:
  std::size_t d_ = 0;
  std::vector<double> w_;
};

double activation_value(const Activation& act, double t);

/// Psi(w)(x) = w(0) * sigma(x^T w(1..d)).
double psi_eval(std::span<const double> w, std::span<const double> x, const Activation& act);

/// Gradient of psi_eval with respect to w, written into `out` (size d + 1).
void psi_grad(std::span<const double> w, std::span<const double> x, const Activation& act,
              std::span<double> out);
std::vector<double> psi_grad(std::span<const double> w, std::span<const double> x,
                             const Activation& act);

/// h(x) = (1/m) sum_j Psi(w_j)(x).
double predict(const Ensemble& e, std::span<const double> x, const Activation& act);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace mf
