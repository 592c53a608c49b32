#include "mf/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <map>
#include <numbers>
#include <tuple>

#include "mf/batch_ops.hpp"
#include "mf/kernel_regime.hpp"
#include "mf/sphere_flow.hpp"
#include "mf/svg.hpp"
#include "report.hpp"

namespace mf {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kMaxRedraws = 10;

// Runs f(0..count-1) on the OpenMP worker pool; the first exception (by
// index) is rethrown after every task has finished.
template <class F>
void for_each_task(std::size_t count, F&& f) {
  std::vector<std::exception_ptr> errors(count);
  const long long n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 1) if (count > 1)
  for (long long i = 0; i < n; ++i) {
    try {
      f(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

FlowConfig flow_config(const ExperimentConfig& cfg, std::uint64_t seed) {
  FlowConfig fc;
  fc.step = cfg.step;
  fc.iterations = cfg.iterations;
  fc.record_every = cfg.record_every;
  fc.batch = cfg.batch;
  fc.seed = seed;
  fc.eval_samples = cfg.n_test;
  fc.keep_ensembles = false;
  return fc;
}

FlowConfig output_layer_config(const ExperimentConfig& cfg) {
  FlowConfig fc;
  fc.step = cfg.rf_step;
  fc.iterations = cfg.rf_iterations;
  fc.record_every = std::max<std::size_t>(1, cfg.rf_iterations / 20);
  return fc;
}

Dataset with_bias(const ExperimentConfig& cfg, const Dataset& ds) {
  return cfg.bias != 0.0 ? append_constant(ds, cfg.bias) : ds;
}

// f(x) = theta^T Phi(x) for every row of xs.
std::vector<double> output_predictions(const RandomFeatures& rf, std::span<const double> theta,
                                       std::span<const double> xs) {
  const std::size_t d = rf.d;
  const long long n = static_cast<long long>(xs.size() / d);
  const double inv = 1.0 / std::sqrt(static_cast<double>(rf.m));
  std::vector<double> out(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    const double* x = xs.data() + static_cast<std::size_t>(i) * d;
    double s = 0.0;
    for (std::size_t j = 0; j < rf.m; ++j) {
      const double* w = rf.directions.data() + j * d;
      double t = 0.0;
      for (std::size_t k = 0; k < d; ++k) t += w[k] * x[k];
      if (t > 0.0) s += theta[j] * t;
    }
    out[static_cast<std::size_t>(i)] = s * inv;
  }
  return out;
}

std::size_t count_errors(std::span<const double> f, std::span<const double> ys, bool strict) {
  std::size_t e = 0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double v = ys[i] * f[i];
    e += strict ? (v < 0.0) : (v <= 0.0);
  }
  return e;
}

// Cluster data whose training set is separable by the frozen random features;
// redraws with the next derived seed otherwise.
struct ClusterDraw {
  std::uint64_t seed = 0;
  std::size_t attempts = 0;
  ClusterDistribution clusters;
  Dataset train;  // raw inputs
  Dataset input;  // with the bias coordinate
  RandomFeatures rf;
};

ClusterDraw draw_clusters(const ExperimentConfig& cfg, std::size_t d, std::size_t n,
                          std::uint64_t base, const std::string& what) {
  ClusterDraw out;
  for (std::size_t attempt = 0; attempt < kMaxRedraws; ++attempt) {
    out.seed = attempt == 0 ? base : derive_seed(base, attempt);
    out.attempts = attempt + 1;
    out.clusters = make_clusters(cfg.k, d, out.seed);
    out.train = sample_clusters(out.clusters, n, out.seed);
    out.input = with_bias(cfg, out.train);
    out.rf = make_random_features(out.input.dim(), cfg.m, out.seed);
    if (separable(empirical_gram(out.rf, out.input), out.input.labels())) return out;
    std::fprintf(stderr, "%s: training set not separable by the random features, redrawing\n",
                 what.c_str());
  }
  throw std::runtime_error(what + ": no separable training set after " + std::to_string(kMaxRedraws) +
                           " draws");
}

double mean_finite(const std::vector<double>& v) {
  double s = 0.0;
  std::size_t c = 0;
  for (double x : v) {
    if (std::isfinite(x)) {
      s += x;
      ++c;
    }
  }
  return c ? s / static_cast<double>(c) : kNaN;
}

}  // namespace

std::uint64_t repetition_seed(const ExperimentConfig& cfg, std::size_t rep) {
  return derive_seed(cfg.seed, rep);
}

std::vector<double> matched_mass(const Ensemble& e, const TeacherNetwork& t, double max_angle) {
  if (e.dim() != t.d) throw std::invalid_argument("matched_mass: dimension mismatch");
  std::vector<double> out(t.m0, 0.0);
  const double cos_max = std::cos(max_angle);
  for (std::size_t j = 0; j < t.m0; ++j) {
    const auto theta = t.direction(j);
    const double nt = norm2(theta);
    const double target = std::abs(t.out[j]) * nt;
    if (target == 0.0) continue;
    double s = 0.0;
    for (std::size_t k = 0; k < e.size(); ++k) {
      const auto w = e.particle(k);
      const double a = w[0];
      if (a * t.out[j] <= 0.0) continue;
      const auto b = w.subspan(1);
      const double nb = norm2(b);
      if (nb == 0.0) continue;
      if (dot(b, theta) / (nb * nt) > cos_max) s += std::abs(a) * nb;
    }
    out[j] = s / static_cast<double>(e.size()) / target;
  }
  return out;
}

TeacherStudentTrial teacher_student_trial(const ExperimentConfig& cfg, std::size_t m,
                                          std::uint64_t seed, bool keep_ensembles) {
  TeacherStudentTrial tr;
  tr.m = m;
  tr.seed = seed;
  tr.teacher = make_teacher(cfg.d, cfg.m0, seed, cfg.teacher_law);
  const Dataset train = sample_teacher(tr.teacher, cfg.n, seed);
  auto test_rng = make_rng(seed, Stream::Test);
  const Dataset test = TeacherSampler(tr.teacher).sample(cfg.n_test, test_rng);

  const Ensemble e0 = init_ensemble(cfg.d, m, derive_seed(seed, m));
  auto fc = flow_config(cfg, seed);
  fc.keep_ensembles = keep_ensembles;
  tr.trajectory = run_flow(e0, train, Loss::Square, cfg.activation, fc);
  if (tr.trajectory.diverged) {
    throw DivergenceError("teacher-student run m=" + std::to_string(m) + ": " + tr.trajectory.error);
  }
  const Ensemble& e = tr.trajectory.final;
  tr.train_risk = empirical_risk(e, train, Loss::Square, cfg.activation);
  tr.population_risk = empirical_risk(e, test, Loss::Square, cfg.activation);
  tr.success = tr.population_risk < cfg.success_threshold;
  tr.matched = matched_mass(e, tr.teacher, cfg.recovery_angle);
  tr.recovered = std::all_of(tr.matched.begin(), tr.matched.end(),
                             [&](double v) { return v >= cfg.recovery_mass; });

  CertificateOptions opt;
  opt.n_probes = cfg.n_probes;
  opt.seed = seed;
  opt.tol_probe = cfg.tol_probe;
  opt.tol_support = cfg.tol_support;
  tr.certificate = optimality_certificate(e, train, Loss::Square, cfg.activation, opt);
  return tr;
}

std::vector<SweepRun> teacher_student_sweep(const ExperimentConfig& cfg) {
  const std::size_t reps = cfg.repetitions;
  std::vector<SweepRun> runs(cfg.m_grid.size() * reps);
  for_each_task(runs.size(), [&](std::size_t idx) {
    const std::size_t m = cfg.m_grid[idx / reps];
    const std::size_t rep = idx % reps;
    const std::uint64_t seed = repetition_seed(cfg, rep);
    const auto teacher = make_teacher(cfg.d, cfg.m0, seed, cfg.teacher_law);
    const TeacherSampler sampler(teacher);
    auto eval_rng = make_rng(seed, Stream::Test);
    const Dataset eval = sampler.sample(cfg.n_test, eval_rng);
    const Ensemble e0 = init_ensemble(cfg.d, m, derive_seed(seed, m));
    auto fc = flow_config(cfg, derive_seed(seed, m));
    fc.mode = FlowConfig::Mode::SGD;
    const auto traj = run_sgd(e0, sampler, Loss::Square, cfg.activation, fc, &eval);

    SweepRun& r = runs[idx];
    r.m = m;
    r.repetition = rep;
    r.diverged = traj.diverged;
    r.final_risk = traj.diverged ? kNaN : traj.snapshots.back().risk;
    r.success = !traj.diverged && r.final_risk < cfg.success_threshold;
  });
  return runs;
}

BiasTrial2D implicit_bias_2d_trial(const ExperimentConfig& cfg, std::size_t rep) {
  BiasTrial2D tr;
  tr.repetition = rep;
  const auto draw = draw_clusters(cfg, cfg.d, cfg.n, repetition_seed(cfg, rep),
                                  "implicit_bias_2d repetition " + std::to_string(rep));
  tr.seed = draw.seed;
  tr.attempts = draw.attempts;
  tr.train = draw.train;
  const Dataset& input = draw.input;
  const auto bias = cfg.bias != 0.0 ? std::optional<double>(cfg.bias) : std::nullopt;

  const Ensemble e0 = init_ensemble(input.dim(), cfg.m, draw.seed);
  const auto traj = run_flow(e0, input, Loss::Logistic, cfg.activation, flow_config(cfg, draw.seed));
  if (traj.diverged) throw DivergenceError("both-layer training: " + traj.error);
  const auto h = parallel::predict_all(traj.final, input.inputs(), cfg.activation);
  tr.both_train_errors = count_errors(h, input.labels(), false);
  tr.both_margin = normalized_margin(traj.final, input, cfg.activation);
  tr.both = extract_boundary(traj.final, cfg.activation, cfg.resolution, bias);
  tr.both_variance = turning_angle_variance(tr.both);

  const auto res = train_output_layer(draw.rf, input, output_layer_config(cfg));
  if (res.diverged) throw DivergenceError("output-layer training: logistic risk increased");
  const auto f = output_predictions(draw.rf, res.theta, input.inputs());
  tr.output_train_errors = count_errors(f, input.labels(), false);
  tr.output_margin = res.normalized_margins.back();
  tr.output = extract_boundary(
      [&](double x1, double x2) {
        std::vector<double> x{x1, x2};
        if (bias) x.push_back(*bias);
        return output_predictions(draw.rf, res.theta, x)[0];
      },
      cfg.resolution);
  tr.output_variance = turning_angle_variance(tr.output);
  return tr;
}

HighDimTrial implicit_bias_highdim_trial(const ExperimentConfig& cfg, std::size_t d, std::size_t n,
                                         std::size_t rep) {
  HighDimTrial tr;
  tr.d = d;
  tr.n = n;
  tr.repetition = rep;
  const std::uint64_t base = derive_seed(repetition_seed(cfg, rep), d * 1000003ULL + n);
  const auto draw = draw_clusters(cfg, d, n, base,
                                  "implicit_bias_highdim d=" + std::to_string(d) + " n=" +
                                      std::to_string(n) + " repetition " + std::to_string(rep));
  auto test_rng = make_rng(draw.seed, Stream::Test);
  const Dataset test = with_bias(cfg, ClusterSampler(draw.clusters).sample(cfg.n_test, test_rng));
  const double nt = static_cast<double>(test.size());

  const Ensemble e0 = init_ensemble(draw.input.dim(), cfg.m, draw.seed);
  const auto traj = run_flow(e0, draw.input, Loss::Logistic, cfg.activation, flow_config(cfg, draw.seed));
  tr.both_diverged = traj.diverged;
  if (traj.diverged) {
    tr.both_error = kNaN;
  } else {
    const auto h = parallel::predict_all(traj.final, test.inputs(), cfg.activation);
    tr.both_error = static_cast<double>(count_errors(h, test.labels(), true)) / nt;
  }

  const auto res = train_output_layer(draw.rf, draw.input, output_layer_config(cfg));
  tr.output_diverged = res.diverged;
  if (res.diverged) {
    tr.output_error = kNaN;
  } else {
    const auto f = output_predictions(draw.rf, res.theta, test.inputs());
    tr.output_error = static_cast<double>(count_errors(f, test.labels(), true)) / nt;
  }
  return tr;
}

EquivalenceStudy equivalence_study(const ExperimentConfig& cfg, std::uint64_t seed) {
  const auto teacher = make_teacher(cfg.d, cfg.m0, seed, cfg.teacher_law);
  const Dataset train = sample_teacher(teacher, cfg.n, seed);
  auto probe_rng = make_rng(seed, Stream::Test);
  const Dataset probes = TeacherSampler(teacher).sample(cfg.n_test, probe_rng);
  const Ensemble e0 = init_ensemble(cfg.d, cfg.m, seed);
  EquivalenceStudy s;
  s.discrepancy = equivalence_check(e0, train, Loss::Square, cfg.activation, cfg.step, cfg.horizon,
                                    probes.inputs());
  s.discrepancy_half = equivalence_check(e0, train, Loss::Square, cfg.activation, cfg.step / 2,
                                         cfg.horizon, probes.inputs());
  s.ratio = s.discrepancy_half > 0.0 ? s.discrepancy / s.discrepancy_half
                                     : std::numeric_limits<double>::infinity();
  return s;
}

std::vector<std::string> run_particle_trace(const ExperimentConfig& cfg) {
  const std::size_t reps = cfg.repetitions;
  std::vector<TeacherStudentTrial> trials(cfg.m_grid.size() * reps);
  for_each_task(trials.size(), [&](std::size_t idx) {
    trials[idx] = teacher_student_trial(cfg, cfg.m_grid[idx / reps], repetition_seed(cfg, idx % reps), true);
  });

  std::vector<std::string> files;
  report::CsvFile particles(cfg, "particles.csv",
                            {"m", "repetition", "snapshot", "t", "particle", "x_1", "x_2", "sign"});
  for (std::size_t idx = 0; idx < trials.size(); ++idx) {
    const auto& tr = trials[idx];
    for (std::size_t s = 0; s < tr.trajectory.snapshots.size(); ++s) {
      const auto& snap = tr.trajectory.snapshots[s];
      for (std::size_t j = 0; j < snap.ensemble->size(); ++j) {
        const auto w = snap.ensemble->particle(j);
        const double a = std::abs(w[0]);
        particles.row().field(tr.m).field(idx % reps).field(s).field(snap.t).field(j);
        particles.row().field(a * w[1]).field(a * w[2]).field(w[0] >= 0.0 ? 1 : -1);
        particles.row().end_row();
      }
    }
  }
  files.push_back(particles.close());

  report::CsvFile teacher(cfg, "teacher.csv", {"repetition", "neuron", "x_1", "x_2", "sign"});
  for (std::size_t rep = 0; rep < reps; ++rep) {
    const auto& t = trials[rep].teacher;
    for (std::size_t j = 0; j < t.m0; ++j) {
      const double a = std::abs(t.out[j]);
      teacher.row().field(rep).field(j).field(a * t.direction(j)[0]).field(a * t.direction(j)[1]);
      teacher.row().field(t.out[j] >= 0.0 ? 1 : -1).end_row();
    }
  }
  files.push_back(teacher.close());

  report::CsvFile summary(cfg, "summary.csv",
                          {"m", "repetition", "seed", "train_risk", "population_risk", "success",
                           "recovered", "min_matched_mass", "min_probe_J", "max_abs_support_J",
                           "verdict"});
  for (std::size_t idx = 0; idx < trials.size(); ++idx) {
    const auto& tr = trials[idx];
    summary.row().field(tr.m).field(idx % reps).field(std::to_string(tr.seed));
    summary.row().field(tr.train_risk).field(tr.population_risk).field(tr.success ? 1 : 0);
    summary.row().field(tr.recovered ? 1 : 0).field(*std::min_element(tr.matched.begin(), tr.matched.end()));
    summary.row().field(tr.certificate.min_probe_J).field(tr.certificate.max_abs_support_J);
    summary.row().field(to_string(tr.certificate.verdict)).end_row();
  }
  files.push_back(summary.close());

  files.push_back(report::write_text(
      cfg, "particles.svg", particle_trace_svg(read_csv_file(files[0]), read_csv_file(files[1]))));
  return files;
}

std::vector<std::string> run_teacher_student_sweep(const ExperimentConfig& cfg) {
  const auto runs = teacher_student_sweep(cfg);
  std::vector<std::string> files;
  report::CsvFile per_run(cfg, "runs.csv", {"m", "repetition", "final_risk", "success", "diverged"});
  for (const auto& r : runs) {
    per_run.row().field(r.m).field(r.repetition).field(r.final_risk).field(r.success ? 1 : 0);
    per_run.row().field(r.diverged ? 1 : 0).end_row();
  }
  files.push_back(per_run.close());

  report::CsvFile agg(cfg, "summary.csv", {"m", "mean_risk", "success_rate", "diverged_runs"});
  for (std::size_t g = 0; g < cfg.m_grid.size(); ++g) {
    std::vector<double> risks;
    std::size_t ok = 0, div = 0;
    for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
      const auto& r = runs[g * cfg.repetitions + rep];
      risks.push_back(r.final_risk);
      ok += r.success;
      div += r.diverged;
    }
    agg.row().field(cfg.m_grid[g]).field(mean_finite(risks));
    agg.row().field(static_cast<double>(ok) / static_cast<double>(cfg.repetitions)).field(div).end_row();
  }
  files.push_back(agg.close());

  const auto table = read_csv_file(files[1]);
  files.push_back(report::write_text(
      cfg, "mean_risk.svg", curve_svg(table, {"m", "mean_risk", "", "mean risk after training", true, true})));
  files.push_back(report::write_text(
      cfg, "success_rate.svg", curve_svg(table, {"m", "success_rate", "", "success rate", true, false})));
  return files;
}

std::vector<std::string> run_implicit_bias_2d(const ExperimentConfig& cfg) {
  std::vector<BiasTrial2D> trials(cfg.repetitions);
  for_each_task(trials.size(), [&](std::size_t rep) { trials[rep] = implicit_bias_2d_trial(cfg, rep); });

  std::vector<std::string> files;
  report::CsvFile data(cfg, "data.csv", {"repetition", "x_1", "x_2", "y"});
  for (const auto& tr : trials) {
    for (std::size_t i = 0; i < tr.train.size(); ++i)
      data.row().field(tr.repetition).field(tr.train.x(i)[0]).field(tr.train.x(i)[1]).field(tr.train.y(i)).end_row();
  }
  files.push_back(data.close());

  const std::pair<const char*, BoundaryGrid BiasTrial2D::*> modes[] = {{"both_layers", &BiasTrial2D::both},
                                                                      {"output_layer", &BiasTrial2D::output}};
  report::CsvFile grid(cfg, "boundary_grid.csv", {"repetition", "mode", "row", "col", "x_1", "x_2", "value"});
  report::CsvFile lines(cfg, "boundary_lines.csv", {"repetition", "mode", "line", "vertex", "x_1", "x_2"});
  for (const auto& tr : trials) {
    for (const auto& [name, member] : modes) {
      const BoundaryGrid& g = tr.*member;
      for (std::size_t row = 0; row < g.resolution; ++row) {
        for (std::size_t col = 0; col < g.resolution; ++col) {
          grid.row().field(tr.repetition).field(name).field(row).field(col).field(g.coord(col)).field(g.coord(row));
          grid.row().field(g.values[row * g.resolution + col]).end_row();
        }
      }
      for (std::size_t l = 0; l < g.polylines.size(); ++l) {
        for (std::size_t v = 0; v < g.polylines[l].size(); ++v) {
          lines.row().field(tr.repetition).field(name).field(l).field(v);
          lines.row().field(g.polylines[l][v][0]).field(g.polylines[l][v][1]).end_row();
        }
      }
    }
  }
  files.push_back(grid.close());
  files.push_back(lines.close());

  report::CsvFile summary(cfg, "summary.csv",
                          {"repetition", "seed", "attempts", "mode", "train_errors", "normalized_margin",
                           "angle_variance"});
  report::CsvFile contrast(cfg, "contrast.csv",
                           {"repetition", "both_layers_variance", "output_layer_variance", "both_larger"});
  for (const auto& tr : trials) {
    summary.row().field(tr.repetition).field(std::to_string(tr.seed)).field(tr.attempts).field("both_layers");
    summary.row().field(tr.both_train_errors).field(tr.both_margin).field(tr.both_variance).end_row();
    summary.row().field(tr.repetition).field(std::to_string(tr.seed)).field(tr.attempts).field("output_layer");
    summary.row().field(tr.output_train_errors).field(tr.output_margin).field(tr.output_variance).end_row();
    contrast.row().field(tr.repetition).field(tr.both_variance).field(tr.output_variance);
    contrast.row().field(tr.both_variance > tr.output_variance ? 1 : 0).end_row();
  }
  files.push_back(summary.close());
  files.push_back(contrast.close());

  files.push_back(report::write_text(cfg, "boundaries.svg",
                                     boundary_svg(read_csv_file(files[2]), read_csv_file(files[0]))));
  return files;
}

std::vector<std::string> run_implicit_bias_highdim(const ExperimentConfig& cfg) {
  using Key = std::tuple<std::size_t, std::size_t, std::size_t>;  // d, n, repetition
  std::map<Key, std::size_t> index;
  std::vector<Key> keys;
  auto add = [&](std::size_t d, std::size_t n) {
    for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
      const Key k{d, n, rep};
      if (index.emplace(k, keys.size()).second) keys.push_back(k);
    }
  };
  for (auto n : cfg.n_grid) add(cfg.d, n);
  for (auto d : cfg.d_grid) add(d, cfg.n);

  std::vector<HighDimTrial> trials(keys.size());
  for_each_task(keys.size(), [&](std::size_t i) {
    const auto [d, n, rep] = keys[i];
    trials[i] = implicit_bias_highdim_trial(cfg, d, n, rep);
  });

  std::vector<std::string> files;
  report::CsvFile runs(cfg, "runs.csv",
                       {"sweep_var", "value", "mode", "repetition", "test_error", "diverged"});
  struct Sweep {
    const char* var;
    const std::vector<std::size_t>* values;
  };
  const Sweep sweeps[] = {{"n", &cfg.n_grid}, {"d", &cfg.d_grid}};
  const char* modes[] = {"both_layers", "output_layer"};
  auto trial_at = [&](const char* var, std::size_t v, std::size_t rep) -> const HighDimTrial& {
    const Key k = std::string(var) == "n" ? Key{cfg.d, v, rep} : Key{v, cfg.n, rep};
    return trials[index.at(k)];
  };
  for (const auto& sw : sweeps) {
    for (auto v : *sw.values) {
      for (int mode = 0; mode < 2; ++mode) {
        for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
          const auto& t = trial_at(sw.var, v, rep);
          runs.row().field(sw.var).field(v).field(modes[mode]).field(rep);
          runs.row().field(mode == 0 ? t.both_error : t.output_error);
          runs.row().field((mode == 0 ? t.both_diverged : t.output_diverged) ? 1 : 0).end_row();
        }
      }
    }
  }
  files.push_back(runs.close());

  for (const auto& sw : sweeps) {
    const std::string name = std::string("summary_") + sw.var + ".csv";
    report::CsvFile agg(cfg, name, {sw.var, "mode", "mean_test_error"});
    for (int mode = 0; mode < 2; ++mode) {
      for (auto v : *sw.values) {
        std::vector<double> errs;
        for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
          const auto& t = trial_at(sw.var, v, rep);
          errs.push_back(mode == 0 ? t.both_error : t.output_error);
        }
        agg.row().field(v).field(modes[mode]).field(mean_finite(errs)).end_row();
      }
    }
    files.push_back(agg.close());
    const auto table = read_csv_file(files.back());
    files.push_back(report::write_text(
        cfg, std::string("test_error_vs_") + sw.var + ".svg",
        curve_svg(table, {sw.var, "mean_test_error", "mode", std::string("test error against ") + sw.var,
                          std::string(sw.var) == "n", false})));
  }
  return files;
}

std::vector<std::string> run_certificate(const ExperimentConfig& cfg) {
  std::vector<TeacherStudentTrial> trials(cfg.repetitions);
  for_each_task(trials.size(), [&](std::size_t rep) {
    trials[rep] = teacher_student_trial(cfg, cfg.m, repetition_seed(cfg, rep));
  });
  nlohmann::json out;
  out["config"] = report::config_json(cfg);
  out["loss"] = "square";
  out["runs"] = nlohmann::json::array();
  for (std::size_t rep = 0; rep < trials.size(); ++rep) {
    const auto& tr = trials[rep];
    const auto& c = tr.certificate;
    out["runs"].push_back({
        {"repetition", rep},
        {"seed", tr.seed},
        {"m", tr.m},
        {"train_risk", tr.train_risk},
        {"population_risk", tr.population_risk},
        {"certificate",
         {{"min_probe_J", c.min_probe_J},
          {"max_abs_support_J", c.max_abs_support_J},
          {"n_probes", c.n_probes},
          {"support_size", c.support_size},
          {"verdict", to_string(c.verdict)},
          {"worst_direction", c.worst_direction}}},
    });
  }
  return {report::write_json(cfg, "certificate.json", out)};
}

std::vector<std::string> run_equivalence(const ExperimentConfig& cfg) {
  nlohmann::json out;
  out["config"] = report::config_json(cfg);
  out["loss"] = "square";
  out["runs"] = nlohmann::json::array();
  std::vector<EquivalenceStudy> studies(cfg.repetitions);
  for_each_task(studies.size(), [&](std::size_t rep) {
    studies[rep] = equivalence_study(cfg, repetition_seed(cfg, rep));
  });
  for (std::size_t rep = 0; rep < studies.size(); ++rep) {
    out["runs"].push_back({{"repetition", rep},
                           {"seed", repetition_seed(cfg, rep)},
                           {"step", cfg.step},
                           {"discrepancy", studies[rep].discrepancy},
                           {"discrepancy_half_step", studies[rep].discrepancy_half},
                           {"ratio", studies[rep].ratio}});
  }
  return {report::write_json(cfg, "equivalence.json", out)};
}

std::vector<std::string> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  switch (cfg.experiment) {
    case Experiment::ParticleTrace: return run_particle_trace(cfg);
    case Experiment::TeacherStudentSweep: return run_teacher_student_sweep(cfg);
    case Experiment::ImplicitBias2D: return run_implicit_bias_2d(cfg);
    case Experiment::ImplicitBiasHighDim: return run_implicit_bias_highdim(cfg);
    case Experiment::Certificate: return run_certificate(cfg);
    case Experiment::Equivalence: return run_equivalence(cfg);
  }
  throw ConfigError("unknown experiment");
}

}  // namespace mf
