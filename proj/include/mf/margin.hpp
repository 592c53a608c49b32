#pragma once

// Implicit-bias diagnostics: normalized margins, direction distances and
// zero-level decision boundaries of 2-D classifiers.

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mf/flow.hpp"
#include "mf/losses.hpp"
#include "mf/model.hpp"

namespace mf {

/// (1/m) sum_j |w_j|^2, the total mass of nu; 2-homogeneous like h.
double ensemble_scale(const Ensemble& e);

/// min_i y_i h(x_i) / ensemble_scale(e). Throws on a zero ensemble.
double normalized_margin(const Ensemble& e, const Dataset& ds, const Activation& act);

struct MarginTrace {
  std::vector<double> times;
  std::vector<double> normalized_margin;
  std::string scale_definition = "(1/m) sum_j |w_j|^2";
};

/// Normalized margin at every snapshot that kept its ensemble.
MarginTrace margin_trace(const Trajectory& traj, const Dataset& ds, const Activation& act);

/// 1 - cos(a, b), in [0, 2]. Throws on a zero vector.
double direction_distance(std::span<const double> a, std::span<const double> b);

using Point2 = std::array<double, 2>;
using Polyline = std::vector<Point2>;

/// Values of a classifier on a regular lattice over [-1/2, 1/2]^2 and its
/// zero-level set.
struct BoundaryGrid {
  std::size_t resolution = 0;  // lattice points per axis
  double lo = -0.5;
  double hi = 0.5;
  std::vector<double> values;  // values[row * resolution + col], row along x_2
  std::vector<Polyline> polylines;

  double coord(std::size_t i) const {
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(resolution - 1);
  }
};

/// Zero-level polylines of lattice values (marching squares, saddles resolved
/// by the cell-centre average). Closed loops repeat their first point.
std::vector<Polyline> marching_squares(std::span<const double> values, std::size_t resolution,
                                       double lo, double hi);

BoundaryGrid extract_boundary(const std::function<double(double, double)>& f,
                              std::size_t resolution);

/// Evaluates the ensemble on the lattice. With `bias` set the ensemble takes
/// three inputs (x_1, x_2, bias); otherwise it must have d = 2.
BoundaryGrid extract_boundary(const Ensemble& e, const Activation& act, std::size_t resolution,
                              std::optional<double> bias = std::nullopt);

/// Signed turning angles between consecutive segments of every polyline.
std::vector<double> turning_angles(const std::vector<Polyline>& lines);

/// Variance of the turning angles: large for few sharp corners joined by
/// straight pieces, small for evenly curved boundaries.
double turning_angle_variance(const BoundaryGrid& grid);

}  // namespace mf
