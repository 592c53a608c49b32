#pragma once

// Mean potential J(w | mu) = <Psi(w), grad R(h_mu)> for empirical risks, and a
// probe-based check of the first-order conditions for global optimality over
// nonnegative measures on the sphere: J = 0 on the support, J >= 0 elsewhere.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mf/losses.hpp"
#include "mf/model.hpp"

namespace mf {

/// J(. | mu) with the risk-gradient weights of the current predictor frozen.
class MeanPotential {
 public:
  MeanPotential(const Ensemble& e, const Dataset& ds, Loss l, const Activation& act);
  /// From predictions h(x_i) already computed for `ds`.
  MeanPotential(std::span<const double> predictions, const Dataset& ds, Loss l,
                const Activation& act);

  std::size_t dim() const { return ds_.dim(); }
  double value(std::span<const double> w) const;
  std::vector<double> gradient(std::span<const double> w) const;
  /// J at every row of `points` ((d+1)-strided), evaluated in parallel.
  std::vector<double> values(std::span<const double> points) const;
  std::span<const double> weights() const { return g_; }

 private:
  Dataset ds_;
  Activation act_;
  std::vector<double> g_;
};

double mean_potential(std::span<const double> w, const Ensemble& e, const Dataset& ds, Loss l,
                      const Activation& act);
std::vector<double> mean_potential_grad(std::span<const double> w, const Ensemble& e,
                                        const Dataset& ds, Loss l, const Activation& act);

enum class Verdict { CertifiedUpToProbes, Violated };
std::string to_string(Verdict v);

struct CertificateOptions {
  std::size_t n_probes = 2000;
  std::uint64_t seed = 0;
  double tol_probe = 1e-3;
  double tol_support = 1e-3;
  /// Particles with r^2 < mass_cutoff * max r^2 are left out of the support.
  double mass_cutoff = 1e-8;
  /// Lowest probes refined by projected gradient descent on the sphere.
  std::size_t refine_count = 10;
  double refine_step = 1e-2;
  std::size_t refine_steps = 200;
};

struct CertificateReport {
  double min_probe_J = 0.0;
  double max_abs_support_J = 0.0;
  std::size_t n_probes = 0;
  std::size_t support_size = 0;
  Verdict verdict = Verdict::Violated;
  /// Unit direction attaining min_probe_J.
  std::vector<double> worst_direction;
};

CertificateReport optimality_certificate(const Ensemble& e, const Dataset& ds, Loss l,
                                         const Activation& act, const CertificateOptions& opt = {});

}  // namespace mf
