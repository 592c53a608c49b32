#include "mf/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mf {

Activation Activation::smooth(double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw std::invalid_argument("smooth activation needs tau > 0");
  }
  return {Kind::SmoothHomogeneous, tau};
}

Ensemble::Ensemble(std::size_t d, std::size_t m) : d_(d), w_(m * (d + 1), 0.0) {
  if (d == 0) throw std::invalid_argument("ensemble dimension must be >= 1");
}

Ensemble::Ensemble(std::size_t d, std::vector<double> weights) : d_(d), w_(std::move(weights)) {
  if (d == 0) throw std::invalid_argument("ensemble dimension must be >= 1");
  if (w_.size() % (d + 1) != 0) {
    throw std::invalid_argument("weight buffer size " + std::to_string(w_.size()) +
                                " is not a multiple of d+1=" + std::to_string(d + 1));
  }
}

void Ensemble::scale(double lambda) {
  for (double& v : w_) v *= lambda;
}

Ensemble Ensemble::merge(const Ensemble& a, const Ensemble& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("merge: dimension mismatch");
  std::vector<double> w(a.w_);
  w.insert(w.end(), b.w_.begin(), b.w_.end());
  return Ensemble(a.dim(), std::move(w));
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double activation_value(const Activation& act, double t) {
  if (act.kind == Activation::Kind::ReLU) return t > 0.0 ? t : 0.0;
  return 0.5 * (t + std::hypot(t, act.tau)) - 0.5 * act.tau;
}

namespace {

void check_dims(std::span<const double> w, std::span<const double> x) {
  if (w.size() != x.size() + 1) {
    throw std::invalid_argument("particle has " + std::to_string(w.size()) +
                                " entries but input has dimension " + std::to_string(x.size()));
  }
}

}  // namespace

double psi_eval(std::span<const double> w, std::span<const double> x, const Activation& act) {
  check_dims(w, x);
  const double a = w[0];
  const double t = dot(w.subspan(1), x);
  if (act.kind == Activation::Kind::ReLU) return t > 0.0 ? a * t : 0.0;

  const double s = norm2(w);
  if (s == 0.0) return 0.0;
  const double q = std::hypot(t, act.tau * s);
  return a * (0.5 * (t + q) - 0.5 * act.tau * s);
}

void psi_grad(std::span<const double> w, std::span<const double> x, const Activation& act,
              std::span<double> out) {
  check_dims(w, x);
  if (out.size() != w.size()) throw std::invalid_argument("psi_grad: output size mismatch");
  const std::size_t d = x.size();
  const double a = w[0];
  const double t = dot(w.subspan(1), x);

  if (act.kind == Activation::Kind::ReLU) {
    // subgradient sigma'(0) = 0
    if (t > 0.0) {
      out[0] = t;
      for (std::size_t k = 0; k < d; ++k) out[k + 1] = a * x[k];
    } else {
      std::fill(out.begin(), out.end(), 0.0);
    }
    return;
  }

  const double s = norm2(w);
  if (s == 0.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  const double tau = act.tau;
  const double q = std::hypot(t, tau * s);
  const double phi = 0.5 * (t + q) - 0.5 * tau * s;
  const double phi_t = 0.5 * (1.0 + t / q);
  const double phi_s = 0.5 * tau * (tau * s / q - 1.0);
  // d s / d w = w / s
  const double radial = a * phi_s / s;
  out[0] = phi + radial * a;
  for (std::size_t k = 0; k < d; ++k) out[k + 1] = a * phi_t * x[k] + radial * w[k + 1];
}

std::vector<double> psi_grad(std::span<const double> w, std::span<const double> x,
                             const Activation& act) {
  std::vector<double> out(w.size());
  psi_grad(w, x, act, out);
  return out;
}

double predict(const Ensemble& e, std::span<const double> x, const Activation& act) {
  if (e.empty()) throw std::invalid_argument("predict: empty ensemble");
  if (x.size() != e.dim()) throw std::invalid_argument("predict: input dimension mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < e.size(); ++j) s += psi_eval(e.particle(j), x, act);
  return s / static_cast<double>(e.size());
}

}  // namespace mf
