#include "mf/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "mf/csv.hpp"

namespace mf {

namespace {

struct NamedExperiment {
  Experiment e;
  const char* name;
};

constexpr NamedExperiment kExperiments[] = {
    {Experiment::ParticleTrace, "particle_trace"},
    {Experiment::TeacherStudentSweep, "teacher_student_sweep"},
    {Experiment::ImplicitBias2D, "implicit_bias_2d"},
    {Experiment::ImplicitBiasHighDim, "implicit_bias_highdim"},
    {Experiment::Certificate, "certificate"},
    {Experiment::Equivalence, "equivalence"},
};

std::string join(const std::vector<std::size_t>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(v[i]);
  }
  return s + "]";
}

template <class T>
T scalar(const YAML::Node& node, const std::string& key) {
  if (!node.IsScalar()) throw ConfigError("config key '" + key + "' must be a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type: " + node.Scalar());
  }
}

std::size_t count(const YAML::Node& node, const std::string& key) {
  const auto v = scalar<long long>(node, key);
  if (v < 0) throw ConfigError("config key '" + key + "' must be nonnegative");
  return static_cast<std::size_t>(v);
}

std::vector<std::size_t> grid(const YAML::Node& node, const std::string& key) {
  if (!node.IsSequence()) throw ConfigError("config key '" + key + "' must be a list");
  std::vector<std::size_t> out;
  for (const auto& item : node) out.push_back(count(item, key));
  return out;
}

std::string law_name(WeightLaw w) { return w == WeightLaw::Gaussian ? "gaussian" : "sphere_signs"; }

struct Field {
  const char* key;
  std::function<void(ExperimentConfig&, const YAML::Node&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define MF_COUNT(name)                                                                      \
  Field {                                                                                   \
    #name, [](ExperimentConfig& c, const YAML::Node& n) { c.name = count(n, #name); },     \
        [](const ExperimentConfig& c) { return std::to_string(c.name); }                    \
  }
#define MF_REAL(name)                                                                       \
  Field {                                                                                   \
    #name, [](ExperimentConfig& c, const YAML::Node& n) { c.name = scalar<double>(n, #name); }, \
        [](const ExperimentConfig& c) { return format_double(c.name); }                    \
  }
#define MF_GRID(name)                                                                       \
  Field {                                                                                   \
    #name, [](ExperimentConfig& c, const YAML::Node& n) { c.name = grid(n, #name); },      \
        [](const ExperimentConfig& c) { return join(c.name); }                              \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> f = {
      {"experiment",
       [](ExperimentConfig& c, const YAML::Node& n) {
         if (parse_experiment(scalar<std::string>(n, "experiment")) != c.experiment)
           throw ConfigError("config file is for experiment '" + n.Scalar() + "', not '" +
                             to_string(c.experiment) + "'");
       },
       [](const ExperimentConfig& c) { return to_string(c.experiment); }},
      {"preset", [](ExperimentConfig&, const YAML::Node& n) { parse_preset(scalar<std::string>(n, "preset")); },
       [](const ExperimentConfig& c) { return to_string(c.preset); }},
      {"seed",
       [](ExperimentConfig& c, const YAML::Node& n) { c.seed = scalar<std::uint64_t>(n, "seed"); },
       [](const ExperimentConfig& c) { return std::to_string(c.seed); }},
      MF_COUNT(repetitions),
      {"output_dir",
       [](ExperimentConfig& c, const YAML::Node& n) { c.output_dir = scalar<std::string>(n, "output_dir"); },
       [](const ExperimentConfig& c) { return c.output_dir; }},
      MF_COUNT(d),
      MF_COUNT(m0),
      {"teacher_law",
       [](ExperimentConfig& c, const YAML::Node& n) {
         const auto s = scalar<std::string>(n, "teacher_law");
         if (s == "sphere_signs") c.teacher_law = WeightLaw::SphereSigns;
         else if (s == "gaussian") c.teacher_law = WeightLaw::Gaussian;
         else throw ConfigError("unknown teacher_law '" + s + "'");
       },
       [](const ExperimentConfig& c) { return law_name(c.teacher_law); }},
      MF_COUNT(n),
      MF_COUNT(n_test),
      MF_COUNT(k),
      MF_REAL(bias),
      MF_COUNT(m),
      MF_GRID(m_grid),
      MF_GRID(n_grid),
      MF_GRID(d_grid),
      {"activation",
       [](ExperimentConfig& c, const YAML::Node& n) {
         const auto s = scalar<std::string>(n, "activation");
         if (s == "relu") c.activation.kind = Activation::Kind::ReLU;
         else if (s == "smooth") c.activation.kind = Activation::Kind::SmoothHomogeneous;
         else throw ConfigError("unknown activation '" + s + "'");
       },
       [](const ExperimentConfig& c) { return std::string(c.activation.is_smooth() ? "smooth" : "relu"); }},
      {"tau", [](ExperimentConfig& c, const YAML::Node& n) { c.activation.tau = scalar<double>(n, "tau"); },
       [](const ExperimentConfig& c) { return format_double(c.activation.tau); }},
      MF_REAL(step),
      MF_COUNT(iterations),
      MF_COUNT(batch),
      MF_COUNT(record_every),
      MF_REAL(rf_step),
      MF_COUNT(rf_iterations),
      MF_COUNT(resolution),
      MF_COUNT(n_probes),
      MF_REAL(tol_probe),
      MF_REAL(tol_support),
      MF_REAL(success_threshold),
      MF_REAL(recovery_angle),
      MF_REAL(recovery_mass),
      MF_REAL(horizon),
  };
  return f;
}

#undef MF_COUNT
#undef MF_REAL
#undef MF_GRID

YAML::Node parse(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& ex) {
    throw ConfigError(std::string("config is not valid YAML: ") + ex.what());
  }
  if (root.IsNull()) return YAML::Node(YAML::NodeType::Map);
  if (!root.IsMap()) throw ConfigError("config must be a mapping of keys to values");
  return root;
}

void apply(ExperimentConfig& cfg, const YAML::Node& root) {
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    const Field* hit = nullptr;
    for (const auto& f : fields())
      if (key == f.key) hit = &f;
    if (!hit) throw ConfigError("unknown config key '" + key + "'");
    hit->set(cfg, kv.second);
  }
}

}  // namespace

std::string to_string(Experiment e) {
  for (const auto& x : kExperiments)
    if (x.e == e) return x.name;
  return "unknown";
}

std::string to_string(Preset p) { return p == Preset::Paper ? "paper" : "desk"; }

Experiment parse_experiment(const std::string& name) {
  for (const auto& x : kExperiments)
    if (name == x.name) return x.e;
  throw ConfigError("unknown experiment '" + name + "'");
}

Preset parse_preset(const std::string& name) {
  if (name == "desk") return Preset::Desk;
  if (name == "paper") return Preset::Paper;
  throw ConfigError("unknown preset '" + name + "' (expected desk or paper)");
}

ExperimentConfig preset_config(Experiment e, Preset p) {
  ExperimentConfig c;
  c.experiment = e;
  c.preset = p;
  const bool paper = p == Preset::Paper;
  switch (e) {
    case Experiment::ParticleTrace:
      c.d = 2;
      c.m0 = 4;
      c.m_grid = {5, 20, 100, 1000};
      c.n = paper ? 1000 : 300;
      c.step = 0.5;
      c.iterations = paper ? 10000 : 3000;
      c.record_every = paper ? 100 : 50;
      break;
    case Experiment::TeacherStudentSweep:
      c.d = paper ? 100 : 10;
      c.m0 = paper ? 10 : 4;
      c.m_grid = paper ? std::vector<std::size_t>{5, 10, 20, 40, 80, 160, 320}
                       : std::vector<std::size_t>{4, 8, 16, 32, 64};
      c.repetitions = paper ? 30 : 10;
      c.step = paper ? 0.005 : 0.05;
      c.iterations = 10000;
      c.batch = 100;
      c.record_every = 1000;
      break;
    case Experiment::ImplicitBias2D:
      c.d = 2;
      c.k = 3;
      c.n = 100;
      c.m = 1000;
      c.repetitions = 4;
      c.step = 2.0;
      c.iterations = paper ? 20000 : 8000;
      c.record_every = 500;
      c.rf_step = 40.0;
      c.rf_iterations = paper ? 200000 : 50000;
      break;
    case Experiment::ImplicitBiasHighDim:
      c.k = 3;
      c.m = 1000;
      c.d = 15;
      c.n = paper ? 256 : 128;
      c.n_grid = paper ? std::vector<std::size_t>{16, 32, 64, 128, 256, 512}
                       : std::vector<std::size_t>{32, 64, 128};
      c.d_grid = paper ? std::vector<std::size_t>{5, 10, 15, 20, 25, 30}
                       : std::vector<std::size_t>{5, 10, 15};
      c.repetitions = paper ? 20 : 5;
      c.step = 2.0;
      c.iterations = paper ? 10000 : 3000;
      c.record_every = paper ? 10000 : 3000;
      c.rf_step = 40.0;
      c.rf_iterations = paper ? 100000 : 20000;
      break;
    case Experiment::Certificate:
      c.d = 2;
      c.m0 = 4;
      c.m = 100;
      c.n = paper ? 1000 : 300;
      c.step = 0.5;
      c.iterations = paper ? 10000 : 3000;
      c.record_every = 500;
      break;
    case Experiment::Equivalence:
      c.d = 2;
      c.m0 = 4;
      c.m = 10;
      c.n = 20;
      c.n_test = 50;
      c.activation = Activation::smooth(0.1);
      c.step = 1e-3;
      c.horizon = 1.0;
      break;
  }
  return c;
}

void ExperimentConfig::validate() const {
  auto positive = [](const char* key, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("config key '") + key + "' must be positive");
  };
  auto nonempty = [](const char* key, const std::vector<std::size_t>& v) {
    if (v.empty()) throw ConfigError(std::string("config key '") + key + "' must not be empty");
    for (auto x : v)
      if (x == 0) throw ConfigError(std::string("config key '") + key + "' entries must be positive");
  };
  positive("repetitions", static_cast<double>(repetitions));
  positive("d", static_cast<double>(d));
  positive("m0", static_cast<double>(m0));
  positive("n", static_cast<double>(n));
  positive("n_test", static_cast<double>(n_test));
  positive("k", static_cast<double>(k));
  positive("m", static_cast<double>(m));
  positive("step", step);
  positive("iterations", static_cast<double>(iterations));
  positive("batch", static_cast<double>(batch));
  positive("record_every", static_cast<double>(record_every));
  positive("rf_step", rf_step);
  positive("rf_iterations", static_cast<double>(rf_iterations));
  positive("n_probes", static_cast<double>(n_probes));
  positive("tol_probe", tol_probe);
  positive("tol_support", tol_support);
  positive("success_threshold", success_threshold);
  positive("recovery_angle", recovery_angle);
  positive("recovery_mass", recovery_mass);
  positive("horizon", horizon);
  if (!std::isfinite(bias)) throw ConfigError("config key 'bias' must be finite");
  if (activation.is_smooth()) positive("tau", activation.tau);
  if (output_dir.empty()) throw ConfigError("config key 'output_dir' must not be empty");
  if (resolution < 64) throw ConfigError("config key 'resolution' must be at least 64");

  switch (experiment) {
    case Experiment::ParticleTrace:
      if (d != 2) throw ConfigError("particle_trace needs d = 2");
      nonempty("m_grid", m_grid);
      break;
    case Experiment::TeacherStudentSweep:
      nonempty("m_grid", m_grid);
      break;
    case Experiment::ImplicitBias2D:
      if (d != 2) throw ConfigError("implicit_bias_2d needs d = 2");
      break;
    case Experiment::ImplicitBiasHighDim:
      nonempty("n_grid", n_grid);
      nonempty("d_grid", d_grid);
      for (auto x : d_grid)
        if (x < 2) throw ConfigError("config key 'd_grid' entries must be at least 2");
      if (d < 2) throw ConfigError("implicit_bias_highdim needs d >= 2");
      break;
    case Experiment::Certificate:
    case Experiment::Equivalence:
      break;
  }
}

void apply_yaml(ExperimentConfig& cfg, const std::string& yaml_text) { apply(cfg, parse(yaml_text)); }

ExperimentConfig load_config(Experiment e, const std::string& path, std::optional<Preset> preset) {
  YAML::Node root(YAML::NodeType::Map);
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    root = parse(ss.str());
  }
  Preset p = Preset::Desk;
  if (preset) p = *preset;
  else if (root["preset"]) p = parse_preset(scalar<std::string>(root["preset"], "preset"));
  auto cfg = preset_config(e, p);
  apply(cfg, root);
  cfg.preset = p;
  return cfg;
}

std::vector<std::string> describe(const ExperimentConfig& cfg) {
  std::vector<std::string> out;
  for (const auto& f : fields()) out.push_back(std::string(f.key) + ": " + f.get(cfg));
  return out;
}

}  // namespace mf
