#include "mf/flow.hpp"

#include <cmath>

#include "mf/batch_ops.hpp"
#include "mf/rng.hpp"

namespace mf {

void FlowConfig::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("step must be > 0");
  if (record_every == 0) throw std::invalid_argument("record_every must be >= 1");
  if (mode == Mode::SGD && batch == 0) throw std::invalid_argument("batch must be >= 1");
  if (ridge < 0.0) throw std::invalid_argument("ridge must be >= 0");
}

Ensemble gd_step(const Ensemble& e, const Dataset& ds, Loss l, const Activation& act, double step,
                 double ridge) {
  if (!(step > 0.0)) throw std::invalid_argument("step must be > 0");
  const auto grad = objective_gradient(e, ds, l, act, ridge);
  Ensemble next = e;
  auto w = next.weights();
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (!std::isfinite(grad[k])) {
      throw DivergenceError("non-finite gradient at particle " +
                            std::to_string(k / e.stride()) + ", coordinate " +
                            std::to_string(k % e.stride()));
    }
    w[k] -= step * grad[k];
  }
  return next;
}

namespace {

template <class StepFn, class RiskFn>
Trajectory integrate(const Ensemble& e0, const FlowConfig& cfg, StepFn&& step_fn,
                     RiskFn&& risk_fn) {
  Trajectory traj;
  Ensemble e = e0;
  auto record = [&](std::size_t k) -> bool {
    const double r = risk_fn(e);
    Snapshot s;
    s.t = static_cast<double>(k) * cfg.step;
    s.iteration = k;
    s.risk = r;
    if (cfg.keep_ensembles) s.ensemble = e;
    traj.snapshots.push_back(std::move(s));
    if (!std::isfinite(r) || r > kDivergenceThreshold) {
      traj.diverged = true;
      traj.error = "risk " + std::to_string(r) + " at iteration " + std::to_string(k);
      return false;
    }
    return true;
  };

  if (record(0)) {
    for (std::size_t k = 1; k <= cfg.iterations; ++k) {
      try {
        e = step_fn(e);
      } catch (const DivergenceError& err) {
        traj.diverged = true;
        traj.error = std::string(err.what()) + " at iteration " + std::to_string(k);
        break;
      }
      if ((k % cfg.record_every == 0 || k == cfg.iterations) && !record(k)) break;
    }
  }
  traj.final = std::move(e);
  return traj;
}

}  // namespace

Trajectory run_flow(const Ensemble& e0, const Dataset& ds, Loss l, const Activation& act,
                    const FlowConfig& cfg) {
  cfg.validate();
  check_compatible(e0, ds);
  return integrate(
      e0, cfg, [&](const Ensemble& e) { return gd_step(e, ds, l, act, cfg.step, cfg.ridge); },
      [&](const Ensemble& e) { return empirical_risk(e, ds, l, act, cfg.ridge); });
}

Trajectory run_sgd(const Ensemble& e0, const Sampler& dist, Loss l, const Activation& act,
                   const FlowConfig& cfg, const Dataset* eval) {
  cfg.validate();
  if (dist.dim() != e0.dim()) throw std::invalid_argument("run_sgd: dimension mismatch");
  Dataset held_out;
  if (eval == nullptr) {
    auto eval_rng = make_rng(cfg.seed, Stream::Evaluation);
    held_out = dist.sample(cfg.eval_samples, eval_rng);
    eval = &held_out;
  }
  auto rng = make_rng(cfg.seed, Stream::Minibatch);
  return integrate(
      e0, cfg,
      [&](const Ensemble& e) {
        const Dataset batch = dist.sample(cfg.batch, rng);
        return gd_step(e, batch, l, act, cfg.step, cfg.ridge);
      },
      [&](const Ensemble& e) { return empirical_risk(e, *eval, l, act, cfg.ridge); });
}

Ensemble init_ensemble(std::size_t d, std::size_t m, std::uint64_t seed) {
  if (m == 0) throw std::invalid_argument("ensemble needs m >= 1");
  auto rng = make_rng(seed, Stream::Init);
  std::bernoulli_distribution coin(0.5);
  Ensemble e(d, m);
  for (std::size_t j = 0; j < m; ++j) {
    auto w = e.particle(j);
    const auto b = uniform_sphere(d, rng);
    w[0] = coin(rng) ? 1.0 : -1.0;
    std::copy(b.begin(), b.end(), w.begin() + 1);
    const double scale = std::sqrt(2.0) / norm2(w);
    for (double& v : w) v *= scale;
  }
  return e;
}

}  // namespace mf
