#include "mf/sphere_flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mf/batch_ops.hpp"
#include "mf/flow.hpp"

namespace mf {

PolarEnsemble::PolarEnsemble(std::size_t d, std::vector<double> radii,
                             std::vector<double> directions)
    : d_(d), r_(std::move(radii)), eta_(std::move(directions)) {
  if (d == 0) throw std::invalid_argument("polar ensemble dimension must be >= 1");
  if (eta_.size() != r_.size() * (d + 1)) throw std::invalid_argument("polar ensemble: size mismatch");
}

double PolarEnsemble::mass() const {
  std::vector<double> sq(r_.size());
  for (std::size_t j = 0; j < r_.size(); ++j) sq[j] = r_[j] * r_[j];
  return pairwise_sum(sq) / static_cast<double>(r_.size());
}

double PolarEnsemble::integrate(const std::function<double(std::span<const double>)>& f) const {
  std::vector<double> terms(size());
  for (std::size_t j = 0; j < size(); ++j) terms[j] = r_[j] * r_[j] * f(direction(j));
  return pairwise_sum(terms) / static_cast<double>(size());
}

PolarParticle polar_decompose(std::span<const double> w) {
  const double r = norm2(w);
  if (r == 0.0) throw std::invalid_argument("polar_decompose: zero particle has no direction");
  PolarParticle p;
  p.r = r;
  p.eta.resize(w.size());
  for (std::size_t k = 0; k < w.size(); ++k) p.eta[k] = w[k] / r;
  return p;
}

std::vector<double> recompose(const PolarParticle& p) {
  std::vector<double> w(p.eta.size());
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = p.r * p.eta[k];
  return w;
}

PolarEnsemble polar_decompose(const Ensemble& e) {
  std::vector<double> r;
  std::vector<double> eta;
  r.reserve(e.size());
  eta.reserve(e.weights().size());
  for (std::size_t j = 0; j < e.size(); ++j) {
    const auto p = polar_decompose(e.particle(j));
    r.push_back(p.r);
    eta.insert(eta.end(), p.eta.begin(), p.eta.end());
  }
  return PolarEnsemble(e.dim(), std::move(r), std::move(eta));
}

Ensemble recompose(const PolarEnsemble& pe) {
  Ensemble e(pe.dim(), pe.size());
  for (std::size_t j = 0; j < pe.size(); ++j) {
    auto w = e.particle(j);
    const auto eta = pe.direction(j);
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = pe.radius(j) * eta[k];
  }
  return e;
}

std::vector<double> predict_all(const PolarEnsemble& pe, std::span<const double> xs,
                                const Activation& act) {
  if (pe.size() == 0) throw std::invalid_argument("predict_all: empty polar ensemble");
  const std::size_t d = pe.dim();
  const long long n = static_cast<long long>(xs.size() / d);
  const double inv_m = 1.0 / static_cast<double>(pe.size());
  std::vector<double> out(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    const auto x = xs.subspan(static_cast<std::size_t>(i) * d, d);
    double s = 0.0;
    for (std::size_t j = 0; j < pe.size(); ++j) {
      s += pe.radius(j) * pe.radius(j) * psi_eval(pe.direction(j), x, act);
    }
    out[static_cast<std::size_t>(i)] = s * inv_m;
  }
  return out;
}

MeanPotential potential_of(const PolarEnsemble& pe, const Dataset& ds, Loss l,
                           const Activation& act) {
  if (pe.dim() != ds.dim()) throw std::invalid_argument("polar ensemble/dataset dimension mismatch");
  const auto h = predict_all(pe, ds.inputs(), act);
  return MeanPotential(h, ds, l, act);
}

double mean_potential(std::span<const double> w, const PolarEnsemble& pe, const Dataset& ds,
                      Loss l, const Activation& act) {
  return potential_of(pe, ds, l, act).value(w);
}

namespace {

// J(eta_j | nu) and grad J(eta_j | nu) for every particle.
struct PolarField {
  std::vector<double> J;
  std::vector<double> grad;
};

PolarField polar_field(const PolarEnsemble& pe, const Dataset& ds, Loss l, const Activation& act) {
  const MeanPotential pot = potential_of(pe, ds, l, act);
  const Ensemble directions(pe.dim(), std::vector<double>(pe.directions().begin(), pe.directions().end()));
  PolarField f;
  f.J = pot.values(pe.directions());
  f.grad = parallel::particle_gradients(directions, ds, pot.weights(), act);
  return f;
}

}  // namespace

PolarEnsemble polar_step(const PolarEnsemble& pe, const Dataset& ds, Loss l, const Activation& act,
                         double step) {
  if (!(step > 0.0)) throw std::invalid_argument("step must be > 0");
  const PolarField f = polar_field(pe, ds, l, act);
  const std::size_t p = pe.dim() + 1;
  std::vector<double> r(pe.size());
  std::vector<double> eta(pe.directions().begin(), pe.directions().end());
  for (std::size_t j = 0; j < pe.size(); ++j) {
    if (!std::isfinite(f.J[j])) throw DivergenceError("non-finite mean potential in polar step");
    r[j] = pe.radius(j) * (1.0 - 2.0 * step * f.J[j]);
    std::span<double> e(eta.data() + j * p, p);
    std::span<const double> g(f.grad.data() + j * p, p);
    const double radial = dot(e, g);
    for (std::size_t k = 0; k < p; ++k) e[k] -= step * (g[k] - radial * e[k]);
    const double n = norm2(e);
    for (double& v : e) v /= n;
  }
  return PolarEnsemble(pe.dim(), std::move(r), std::move(eta));
}

double equivalence_check(const Ensemble& e0, const Dataset& ds, Loss l, const Activation& act,
                         double step, double horizon, std::span<const double> probes) {
  if (!(step > 0.0)) throw std::invalid_argument("step must be > 0");
  if (horizon < 0.0) throw std::invalid_argument("horizon must be >= 0");
  check_compatible(e0, ds);
  Ensemble cart = e0;
  PolarEnsemble polar = polar_decompose(e0);
  const auto steps = static_cast<std::size_t>(std::llround(horizon / step));

  auto discrepancy = [&] {
    const auto hc = parallel::predict_all(cart, probes, act);
    const auto hp = predict_all(polar, probes, act);
    double worst = 0.0;
    for (std::size_t i = 0; i < hc.size(); ++i) {
      const double diff = std::abs(hc[i] - hp[i]);
      if (!std::isfinite(diff)) throw DivergenceError("equivalence_check: non-finite prediction");
      worst = std::max(worst, diff);
    }
    return worst;
  };

  double worst = discrepancy();
  for (std::size_t k = 0; k < steps; ++k) {
    cart = gd_step(cart, ds, l, act, step);
    polar = polar_step(polar, ds, l, act, step);
    worst = std::max(worst, discrepancy());
  }
  return worst;
}

TestFunction TestFunction::constant_one() {
  return {[](std::span<const double>) { return 1.0; },
          [](std::span<const double> eta) { return std::vector<double>(eta.size(), 0.0); }};
}

TestFunction TestFunction::coordinate(std::size_t k) {
  return {[k](std::span<const double> eta) { return eta[k]; },
          [k](std::span<const double> eta) {
            std::vector<double> g(eta.size(), 0.0);
            g[k] = 1.0;
            return g;
          }};
}

MassRates mass_evolution_check(const PolarEnsemble& pe, const Dataset& ds, Loss l,
                               const Activation& act, const TestFunction& f, double step) {
  const PolarField field = polar_field(pe, ds, l, act);
  const std::size_t p = pe.dim() + 1;
  std::vector<double> terms(pe.size());
  for (std::size_t j = 0; j < pe.size(); ++j) {
    const auto eta = pe.direction(j);
    std::span<const double> g(field.grad.data() + j * p, p);
    const auto gf = f.gradient(eta);
    // grad f^T (I - eta eta^T) grad J
    const double tangential = dot(gf, g) - dot(gf, eta) * dot(eta, g);
    const double r2 = pe.radius(j) * pe.radius(j);
    terms[j] = -4.0 * r2 * f.value(eta) * field.J[j] - r2 * tangential;
  }
  MassRates out;
  out.rhs = pairwise_sum(terms) / static_cast<double>(pe.size());
  const PolarEnsemble next = polar_step(pe, ds, l, act, step);
  out.lhs = (next.integrate(f.value) - pe.integrate(f.value)) / step;
  return out;
}

}  // namespace mf
