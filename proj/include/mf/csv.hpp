#pragma once

// Minimal RFC-4180 style CSV emission with a '#' comment header block.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mf {

/// Shortest round-tripping form is not needed; 17 significant digits always.
std::string format_double(double v);

std::string csv_escape(std::string_view field);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}

  /// One '# ' comment line per entry of `lines`.
  void comments(const std::vector<std::string>& lines);
  void header(const std::vector<std::string>& columns);

  CsvWriter& field(std::string_view s);
  CsvWriter& field(double v);
  CsvWriter& field(long long v);
  CsvWriter& field(std::size_t v) { return field(static_cast<long long>(v)); }
  CsvWriter& field(int v) { return field(static_cast<long long>(v)); }
  void end_row();

 private:
  std::ostream& os_;
  bool first_ = true;
};

/// Parsed CSV: comment lines, header, rows of raw fields.
struct CsvTable {
  std::vector<std::string> comments;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;
};

CsvTable read_csv(std::istream& is);
CsvTable read_csv_file(const std::string& path);

}  // namespace mf
