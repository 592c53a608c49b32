#pragma once

// Experiment harnesses. Each run_* function writes its CSV/JSON/SVG files under
// cfg.output_dir and returns the written paths; the *_trial functions compute
// one repetition without touching the file system.

#include <cstdint>
#include <string>
#include <vector>

#include "mf/config.hpp"
#include "mf/datagen.hpp"
#include "mf/flow.hpp"
#include "mf/margin.hpp"
#include "mf/potential.hpp"

namespace mf {

/// Seed of repetition `rep`; every stream of the repetition derives from it.
std::uint64_t repetition_seed(const ExperimentConfig& cfg, std::size_t rep);

/// For each teacher neuron j: (1/m) sum |a_k| |b_k| over particles with
/// sign(a_k) = sign(out_j) and angle(b_k, theta_j) < max_angle, divided by
/// |out_j| |theta_j|. Near 1 when the neuron is recovered.
std::vector<double> matched_mass(const Ensemble& e, const TeacherNetwork& t, double max_angle);

struct TeacherStudentTrial {
  std::size_t m = 0;
  std::uint64_t seed = 0;
  TeacherNetwork teacher;
  Trajectory trajectory;
  double train_risk = 0.0;
  double population_risk = 0.0;  // on n_test fresh samples
  bool success = false;          // population_risk < success_threshold
  std::vector<double> matched;
  bool recovered = false;  // every matched mass >= recovery_mass
  CertificateReport certificate;
};

/// Full-batch square-loss training of m particles on n teacher samples, then
/// population risk, recovery and the optimality certificate on the training set.
TeacherStudentTrial teacher_student_trial(const ExperimentConfig& cfg, std::size_t m,
                                          std::uint64_t seed, bool keep_ensembles = false);

struct SweepRun {
  std::size_t m = 0;
  std::size_t repetition = 0;
  double final_risk = 0.0;
  bool success = false;
  bool diverged = false;
};

/// Fresh-sample SGD for every (m, repetition) of the grid, sorted by m then repetition.
std::vector<SweepRun> teacher_student_sweep(const ExperimentConfig& cfg);

struct BiasTrial2D {
  std::size_t repetition = 0;
  std::uint64_t seed = 0;
  std::size_t attempts = 1;  // > 1 when a training set had to be redrawn
  Dataset train;             // without the bias coordinate
  BoundaryGrid both;
  BoundaryGrid output;
  std::size_t both_train_errors = 0;
  std::size_t output_train_errors = 0;
  double both_margin = 0.0;    // normalized margin of the trained ensemble
  double output_margin = 0.0;  // min_i y_i f(x_i) / |theta|
  double both_variance = 0.0;
  double output_variance = 0.0;
};

/// Both-layer and output-layer logistic training on k x k cluster data in 2-D.
BiasTrial2D implicit_bias_2d_trial(const ExperimentConfig& cfg, std::size_t rep);

struct HighDimTrial {
  std::size_t d = 0;
  std::size_t n = 0;
  std::size_t repetition = 0;
  double both_error = 0.0;
  double output_error = 0.0;
  bool both_diverged = false;
  bool output_diverged = false;
};

/// Test errors P(y f(x) < 0) on n_test fresh samples after both-layer and
/// output-layer training on n cluster samples in dimension d.
HighDimTrial implicit_bias_highdim_trial(const ExperimentConfig& cfg, std::size_t d,
                                         std::size_t n, std::size_t rep);

struct EquivalenceStudy {
  double discrepancy = 0.0;       // at cfg.step
  double discrepancy_half = 0.0;  // at cfg.step / 2
  double ratio = 0.0;             // discrepancy / discrepancy_half
};

EquivalenceStudy equivalence_study(const ExperimentConfig& cfg, std::uint64_t seed);

std::vector<std::string> run_particle_trace(const ExperimentConfig& cfg);
std::vector<std::string> run_teacher_student_sweep(const ExperimentConfig& cfg);
std::vector<std::string> run_implicit_bias_2d(const ExperimentConfig& cfg);
std::vector<std::string> run_implicit_bias_highdim(const ExperimentConfig& cfg);
std::vector<std::string> run_certificate(const ExperimentConfig& cfg);
std::vector<std::string> run_equivalence(const ExperimentConfig& cfg);

/// Validates cfg and dispatches on cfg.experiment.
std::vector<std::string> run_experiment(const ExperimentConfig& cfg);

}  // namespace mf
