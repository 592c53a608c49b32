#include "mf/csv.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace mf {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void CsvWriter::comments(const std::vector<std::string>& lines) {
  for (const auto& l : lines) os_ << "# " << l << "\r\n";
}

void CsvWriter::header(const std::vector<std::string>& columns) {
  for (const auto& c : columns) field(std::string_view(c));
  end_row();
}

CsvWriter& CsvWriter::field(std::string_view s) {
  if (!first_) os_ << ',';
  os_ << csv_escape(s);
  first_ = false;
  return *this;
}

CsvWriter& CsvWriter::field(double v) { return field(std::string_view(format_double(v))); }

CsvWriter& CsvWriter::field(long long v) { return field(std::string_view(std::to_string(v))); }

void CsvWriter::end_row() {
  os_ << "\r\n";
  first_ = true;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw std::out_of_range("no CSV column named " + std::string(name));
}

namespace {

std::vector<std::string> split_record(std::istream& is, std::string& line, bool& ok) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  std::size_t pos = 0;
  while (true) {
    if (pos >= line.size()) {
      if (quoted) {
        std::string next;
        if (!std::getline(is, next)) throw std::runtime_error("unterminated quoted CSV field");
        if (!next.empty() && next.back() == '\r') next.pop_back();
        cur += '\n';
        line = next;
        pos = 0;
        continue;
      }
      break;
    }
    const char c = line[pos++];
    if (quoted) {
      if (c == '"') {
        if (pos < line.size() && line[pos] == '"') {
          cur += '"';
          ++pos;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  ok = true;
  return fields;
}

}  // namespace

CsvTable read_csv(std::istream& is) {
  CsvTable t;
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      t.comments.push_back(line.size() > 2 ? line.substr(2) : std::string());
      continue;
    }
    bool ok = false;
    auto rec = split_record(is, line, ok);
    if (!have_header) {
      t.header = std::move(rec);
      have_header = true;
    } else {
      if (rec.size() != t.header.size()) throw std::runtime_error("CSV row has wrong field count");
      t.rows.push_back(std::move(rec));
    }
  }
  if (!have_header) throw std::runtime_error("CSV input has no header");
  return t;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_csv(in);
}

}  // namespace mf
