#include "mf/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mf/batch_ops.hpp"
#include "mf/rng.hpp"

namespace mf {

MeanPotential::MeanPotential(const Ensemble& e, const Dataset& ds, Loss l, const Activation& act)
    : ds_(ds), act_(act) {
  check_compatible(e, ds);
  const auto h = parallel::predict_all(e, ds.inputs(), act);
  g_ = risk_gradient_weights(l, h, ds.labels());
}

MeanPotential::MeanPotential(std::span<const double> predictions, const Dataset& ds, Loss l,
                             const Activation& act)
    : ds_(ds), act_(act), g_(risk_gradient_weights(l, predictions, ds.labels())) {}

double MeanPotential::value(std::span<const double> w) const {
  if (w.size() != ds_.dim() + 1) throw std::invalid_argument("mean potential: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < ds_.size(); ++i) s += g_[i] * psi_eval(w, ds_.x(i), act_);
  return s;
}

std::vector<double> MeanPotential::gradient(std::span<const double> w) const {
  if (w.size() != ds_.dim() + 1) throw std::invalid_argument("mean potential: dimension mismatch");
  std::vector<double> out(w.size(), 0.0);
  std::vector<double> scratch(w.size());
  for (std::size_t i = 0; i < ds_.size(); ++i) {
    psi_grad(w, ds_.x(i), act_, scratch);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += g_[i] * scratch[k];
  }
  return out;
}

std::vector<double> MeanPotential::values(std::span<const double> points) const {
  return parallel::potential_values(points, ds_, g_, act_);
}

double mean_potential(std::span<const double> w, const Ensemble& e, const Dataset& ds, Loss l,
                      const Activation& act) {
  return MeanPotential(e, ds, l, act).value(w);
}

std::vector<double> mean_potential_grad(std::span<const double> w, const Ensemble& e,
                                        const Dataset& ds, Loss l, const Activation& act) {
  return MeanPotential(e, ds, l, act).gradient(w);
}

std::string to_string(Verdict v) {
  return v == Verdict::CertifiedUpToProbes ? "CertifiedUpToProbes" : "Violated";
}

namespace {

void normalize(std::span<double> v) {
  const double n = norm2(v);
  for (double& x : v) x /= n;
}

struct Refined {
  double value;
  std::vector<double> direction;
};

// Projected gradient descent on the sphere; returns the lowest value visited.
Refined refine(const MeanPotential& J, std::vector<double> eta, double start_value,
               const CertificateOptions& opt) {
  Refined best{start_value, eta};
  for (std::size_t it = 0; it < opt.refine_steps; ++it) {
    const auto g = J.gradient(eta);
    const double radial = dot(eta, g);
    for (std::size_t k = 0; k < eta.size(); ++k) eta[k] -= opt.refine_step * (g[k] - radial * eta[k]);
    normalize(eta);
    const double v = J.value(eta);
    if (v < best.value) best = {v, eta};
  }
  return best;
}

}  // namespace

CertificateReport optimality_certificate(const Ensemble& e, const Dataset& ds, Loss l,
                                         const Activation& act, const CertificateOptions& opt) {
  if (opt.n_probes == 0) throw std::invalid_argument("certificate needs n_probes >= 1");
  check_compatible(e, ds);
  const MeanPotential J(e, ds, l, act);
  const std::size_t p = e.stride();

  auto rng = make_rng(opt.seed, Stream::Probes);
  std::vector<double> probes;
  probes.reserve(opt.n_probes * p);
  for (std::size_t q = 0; q < opt.n_probes; ++q) {
    const auto v = uniform_sphere(p, rng);
    probes.insert(probes.end(), v.begin(), v.end());
  }
  const auto vals = J.values(probes);

  std::vector<std::size_t> order(opt.n_probes);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });

  CertificateReport rep;
  rep.n_probes = opt.n_probes;
  rep.min_probe_J = vals[order[0]];
  rep.worst_direction.assign(probes.begin() + order[0] * p, probes.begin() + (order[0] + 1) * p);

  const std::size_t n_refine = std::min(opt.refine_count, opt.n_probes);
  for (std::size_t r = 0; r < n_refine; ++r) {
    const std::size_t q = order[r];
    std::vector<double> start(probes.begin() + q * p, probes.begin() + (q + 1) * p);
    auto res = refine(J, std::move(start), vals[q], opt);
    if (res.value < rep.min_probe_J) {
      rep.min_probe_J = res.value;
      rep.worst_direction = std::move(res.direction);
    }
  }

  // Support: J evaluated at the direction of every particle carrying mass.
  double max_r2 = 0.0;
  for (std::size_t j = 0; j < e.size(); ++j) max_r2 = std::max(max_r2, dot(e.particle(j), e.particle(j)));
  std::vector<double> support;
  for (std::size_t j = 0; j < e.size(); ++j) {
    const auto w = e.particle(j);
    const double r2 = dot(w, w);
    if (r2 == 0.0 || r2 < opt.mass_cutoff * max_r2) continue;
    const double r = std::sqrt(r2);
    for (double v : w) support.push_back(v / r);
  }
  rep.support_size = support.size() / p;
  rep.max_abs_support_J = 0.0;
  for (double v : J.values(support)) rep.max_abs_support_J = std::max(rep.max_abs_support_J, std::abs(v));

  const bool ok = rep.min_probe_J >= -opt.tol_probe && rep.max_abs_support_J <= opt.tol_support;
  rep.verdict = ok ? Verdict::CertifiedUpToProbes : Verdict::Violated;
  return rep;
}

}  // namespace mf
