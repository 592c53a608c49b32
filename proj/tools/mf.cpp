// Command-line runner for the experiment harnesses.
//
//   mf <experiment> --config <file> [--seed N] [--out DIR] [--preset desk|paper]
//
// Exit status: 0 on success, 2 on a configuration error, 3 when a
// non-sweep experiment diverges, 1 on any other failure.

#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "mf/batch_ops.hpp"
#include "mf/config.hpp"
#include "mf/experiments.hpp"
#include "mf/flow.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kDiverged = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-field two-layer network experiments"};
  std::string experiment;
  std::string config_path;
  std::string preset;
  std::string out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  bool print_only = false;

  app.add_option("experiment", experiment,
                 "particle_trace | teacher_student_sweep | implicit_bias_2d | "
                 "implicit_bias_highdim | certificate | equivalence")
      ->required();
  app.add_option("--config", config_path, "YAML file of key: value overrides");
  auto* seed_opt = app.add_option("--seed", seed, "Experiment seed");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--preset", preset, "desk or paper (default desk)");
  app.add_option("--threads", threads, "OpenMP worker count (default: runtime choice)");
  app.add_flag("--print-config", print_only, "Print the resolved configuration and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  mf::ExperimentConfig cfg;
  try {
    const auto exp = mf::parse_experiment(experiment);
    std::optional<mf::Preset> p;
    if (!preset.empty()) p = mf::parse_preset(preset);
    cfg = mf::load_config(exp, config_path, p);
    if (*seed_opt) cfg.seed = seed;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    cfg.validate();
  } catch (const mf::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  }

  if (print_only) {
    for (const auto& line : mf::describe(cfg)) std::printf("%s\n", line.c_str());
    return 0;
  }
  if (threads > 0) mf::set_threads(threads);

  try {
    for (const auto& f : mf::run_experiment(cfg)) std::printf("%s\n", f.c_str());
  } catch (const mf::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const mf::DivergenceError& e) {
    std::fprintf(stderr, "diverged: %s\n", e.what());
    return kDiverged;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
