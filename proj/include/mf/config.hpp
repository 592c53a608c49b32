#pragma once

// Experiment configuration: built-in presets, overridden by a YAML file of
// flat key/value pairs, then by command-line flags.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mf/datagen.hpp"
#include "mf/model.hpp"

namespace mf {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Experiment {
  ParticleTrace,
  TeacherStudentSweep,
  ImplicitBias2D,
  ImplicitBiasHighDim,
  Certificate,
  Equivalence,
};

enum class Preset { Desk, Paper };

std::string to_string(Experiment e);
std::string to_string(Preset p);
/// Accepts the snake_case names printed by to_string; throws ConfigError.
Experiment parse_experiment(const std::string& name);
Preset parse_preset(const std::string& name);

struct ExperimentConfig {
  Experiment experiment = Experiment::ParticleTrace;
  Preset preset = Preset::Desk;
  std::uint64_t seed = 0;
  std::size_t repetitions = 1;
  std::string output_dir = "out";

  // data
  std::size_t d = 2;
  std::size_t m0 = 4;
  WeightLaw teacher_law = WeightLaw::SphereSigns;
  std::size_t n = 300;
  std::size_t n_test = 10000;
  std::size_t k = 3;
  double bias = 1.0;  // constant appended to cluster inputs; 0 disables

  // network and optimizer
  std::size_t m = 100;
  std::vector<std::size_t> m_grid;
  std::vector<std::size_t> n_grid;
  std::vector<std::size_t> d_grid;
  Activation activation = Activation::relu();
  double step = 0.5;
  std::size_t iterations = 3000;
  std::size_t batch = 100;
  std::size_t record_every = 100;

  // output layer only
  double rf_step = 40.0;
  std::size_t rf_iterations = 50000;

  // diagnostics
  std::size_t resolution = 129;
  std::size_t n_probes = 2000;
  double tol_probe = 1e-3;
  double tol_support = 1e-3;
  double success_threshold = 1e-3;
  double recovery_angle = 0.1;
  double recovery_mass = 0.5;
  double horizon = 1.0;

  /// Throws ConfigError naming the first offending key.
  void validate() const;
};

/// Built-in values for an experiment at the given scale.
ExperimentConfig preset_config(Experiment e, Preset p);

/// Applies the key/value pairs of a YAML document on top of `cfg`. Unknown
/// keys, wrong types and an `experiment` key naming a different experiment
/// are ConfigErrors.
void apply_yaml(ExperimentConfig& cfg, const std::string& yaml_text);

/// preset_config(e, preset) overridden by the file at `path` (if not empty).
/// A `preset` key in the file is used only when `preset` is empty.
ExperimentConfig load_config(Experiment e, const std::string& path,
                             std::optional<Preset> preset = std::nullopt);

/// "key: value" lines describing every field, in a fixed order. The lines
/// form a YAML document that apply_yaml accepts.
std::vector<std::string> describe(const ExperimentConfig& cfg);

}  // namespace mf
