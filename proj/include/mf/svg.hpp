#pragma once

// Standalone SVG figures rendered from parsed CSV tables only.

#include <string>

#include "mf/csv.hpp"

namespace mf {

/// One panel per m: particle paths |a| b (columns m, repetition, snapshot,
/// particle, x_1, x_2, sign) with the radius mapped through tanh, the unit
/// circle, and dashed teacher directions (columns x_1, x_2, optional
/// repetition). Only repetition 0 is drawn.
std::string particle_trace_svg(const CsvTable& particles, const CsvTable& teacher);

/// Grid of panels, one column per repetition and one row per mode: training
/// points (repetition, x_1, x_2, y) and zero-level polylines
/// (repetition, mode, line, vertex, x_1, x_2).
std::string boundary_svg(const CsvTable& lines, const CsvTable& data);

struct CurveOptions {
  std::string x_column;
  std::string y_column;
  std::string series_column;  // empty for a single curve
  std::string title;
  bool log_x = false;
  bool log_y = false;
};

/// Line plot of y against x, one polyline per distinct series value, rows in
/// table order.
std::string curve_svg(const CsvTable& table, const CurveOptions& opt);

}  // namespace mf
