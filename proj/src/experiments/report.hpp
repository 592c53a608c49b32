#pragma once

// Output files of the experiment harnesses.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mf/config.hpp"
#include "mf/csv.hpp"

namespace mf::report {

/// Creates cfg.output_dir and returns the path of `name` inside it.
std::filesystem::path output_path(const ExperimentConfig& cfg, const std::string& name);

/// CSV file whose comment block is describe(cfg), followed by `columns`.
class CsvFile {
 public:
  CsvFile(const ExperimentConfig& cfg, const std::string& name,
          const std::vector<std::string>& columns);

  CsvWriter& row() { return writer_; }
  /// Flushes, closes and returns the path; throws if writing failed.
  std::string close();

 private:
  std::filesystem::path path_;
  std::ofstream os_;
  CsvWriter writer_;
};

/// The resolved configuration as a JSON object with typed values.
nlohmann::json config_json(const ExperimentConfig& cfg);

std::string write_json(const ExperimentConfig& cfg, const std::string& name, const nlohmann::json& j);
std::string write_text(const ExperimentConfig& cfg, const std::string& name, const std::string& text);

}  // namespace mf::report
