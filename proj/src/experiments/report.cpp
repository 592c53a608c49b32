#include "report.hpp"

#include <yaml-cpp/yaml.h>

#include <stdexcept>

namespace mf::report {

namespace {

nlohmann::json to_json(const YAML::Node& node) {
  if (node.IsSequence()) {
    auto arr = nlohmann::json::array();
    for (const auto& item : node) arr.push_back(to_json(item));
    return arr;
  }
  const std::string& s = node.Scalar();
  std::size_t used = 0;
  try {
    const long long v = std::stoll(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  try {
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  return s;
}

void check(std::ofstream& os, const std::filesystem::path& p) {
  if (!os) throw std::runtime_error("cannot write " + p.string());
}

}  // namespace

std::filesystem::path output_path(const ExperimentConfig& cfg, const std::string& name) {
  const std::filesystem::path dir(cfg.output_dir);
  std::filesystem::create_directories(dir);
  return dir / name;
}

CsvFile::CsvFile(const ExperimentConfig& cfg, const std::string& name,
                 const std::vector<std::string>& columns)
    : path_(output_path(cfg, name)), os_(path_, std::ios::binary), writer_(os_) {
  check(os_, path_);
  writer_.comments(describe(cfg));
  writer_.header(columns);
}

std::string CsvFile::close() {
  os_.close();
  check(os_, path_);
  return path_.string();
}

nlohmann::json config_json(const ExperimentConfig& cfg) {
  auto obj = nlohmann::json::object();
  for (const auto& line : describe(cfg)) {
    const auto colon = line.find(": ");
    const std::string key = line.substr(0, colon);
    obj[key] = to_json(YAML::Load(line.substr(colon + 2)));
  }
  return obj;
}

std::string write_json(const ExperimentConfig& cfg, const std::string& name, const nlohmann::json& j) {
  return write_text(cfg, name, j.dump(2) + "\n");
}

std::string write_text(const ExperimentConfig& cfg, const std::string& name, const std::string& text) {
  const auto p = output_path(cfg, name);
  std::ofstream os(p, std::ios::binary);
  os << text;
  os.close();
  check(os, p);
  return p.string();
}

}  // namespace mf::report
