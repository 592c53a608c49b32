#pragma once

// Cartesian optimizers on particle ensembles.
//
// One step is W_k = W_{k-1} - step * m * grad G(W_{k-1}); repeated, it is the
// explicit Euler scheme for the gradient flow dW/dt = -m grad G(W), with
// time t = k * step.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mf/datagen.hpp"
#include "mf/losses.hpp"
#include "mf/model.hpp"

namespace mf {

class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FlowConfig {
  enum class Mode { FullBatch, SGD };

  double step = 1e-2;
  std::size_t iterations = 1000;
  Mode mode = Mode::FullBatch;
  std::size_t batch = 100;
  std::size_t record_every = 100;
  std::uint64_t seed = 0;
  double ridge = 0.0;
  /// Held-out set size for SGD risk snapshots.
  std::size_t eval_samples = 10000;
  /// Snapshots keep a copy of the ensemble only when set.
  bool keep_ensembles = true;

  void validate() const;
};

/// Risk values above this abort a run.
inline constexpr double kDivergenceThreshold = 1e12;

struct Snapshot {
  double t = 0.0;
  std::size_t iteration = 0;
  double risk = 0.0;
  std::optional<Ensemble> ensemble;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  Ensemble final;
  bool diverged = false;
  std::string error;
};

/// One full-batch step on `ds`. Throws DivergenceError on a non-finite gradient.
Ensemble gd_step(const Ensemble& e, const Dataset& ds, Loss l, const Activation& act, double step,
                 double ridge = 0.0);

/// Full-batch gradient descent for cfg.iterations steps. Snapshots are taken
/// at t = 0, every record_every steps, and at the last step.
Trajectory run_flow(const Ensemble& e0, const Dataset& ds, Loss l, const Activation& act,
                    const FlowConfig& cfg);

/// SGD with a fresh minibatch of size cfg.batch drawn from `dist` at every
/// step; snapshot risk is measured on `eval` (or on cfg.eval_samples fresh
/// samples drawn from the evaluation substream when `eval` is empty).
Trajectory run_sgd(const Ensemble& e0, const Sampler& dist, Loss l, const Activation& act,
                   const FlowConfig& cfg, const Dataset* eval = nullptr);

/// Input weights uniform on S^{d-1}, output weights uniform in {-1, +1};
/// every particle then has norm sqrt(2), so |a| * b lies on the unit circle.
Ensemble init_ensemble(std::size_t d, std::size_t m, std::uint64_t seed);

}  // namespace mf
