#include "mf/margin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "mf/batch_ops.hpp"

namespace mf {

double ensemble_scale(const Ensemble& e) {
  if (e.empty()) throw std::invalid_argument("ensemble_scale: empty ensemble");
  std::vector<double> sq(e.size());
  for (std::size_t j = 0; j < e.size(); ++j) sq[j] = dot(e.particle(j), e.particle(j));
  return pairwise_sum(sq) / static_cast<double>(e.size());
}

double normalized_margin(const Ensemble& e, const Dataset& ds, const Activation& act) {
  check_compatible(e, ds);
  const double scale = ensemble_scale(e);
  if (scale == 0.0) throw std::invalid_argument("normalized_margin: zero ensemble");
  const auto h = parallel::predict_all(e, ds.inputs(), act);
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ds.size(); ++i) lo = std::min(lo, ds.y(i) * h[i]);
  return lo / scale;
}

MarginTrace margin_trace(const Trajectory& traj, const Dataset& ds, const Activation& act) {
  MarginTrace tr;
  for (const auto& s : traj.snapshots) {
    if (!s.ensemble || ensemble_scale(*s.ensemble) == 0.0) continue;
    tr.times.push_back(s.t);
    tr.normalized_margin.push_back(normalized_margin(*s.ensemble, ds, act));
  }
  return tr;
}

double direction_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("direction_distance: dimension mismatch");
  const double na = norm2(a);
  const double nb = norm2(b);
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("direction_distance: zero vector");
  return std::clamp(1.0 - dot(a, b) / (na * nb), 0.0, 2.0);
}

std::vector<Polyline> marching_squares(std::span<const double> values, std::size_t res, double lo,
                                       double hi) {
  if (res < 2 || values.size() != res * res) throw std::invalid_argument("marching_squares: bad grid");
  auto coord = [&](std::size_t i) {
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(res - 1);
  };
  auto val = [&](std::size_t col, std::size_t row) { return values[row * res + col]; };
  auto positive = [](double v) { return v > 0.0; };

  // Edge keys: 2 * (row * res + col) for the edge to (col + 1, row),
  // +1 for the edge to (col, row + 1).
  auto edge_point = [&](std::size_t key) -> Point2 {
    const std::size_t base = key / 2;
    const std::size_t col = base % res;
    const std::size_t row = base / res;
    const bool vertical = key % 2 == 1;
    const std::size_t col1 = vertical ? col : col + 1;
    const std::size_t row1 = vertical ? row + 1 : row;
    const double v0 = val(col, row);
    const double v1 = val(col1, row1);
    const double t = v0 / (v0 - v1);
    return {coord(col) + t * (coord(col1) - coord(col)), coord(row) + t * (coord(row1) - coord(row))};
  };

  std::vector<std::array<std::size_t, 2>> segments;
  for (std::size_t row = 0; row + 1 < res; ++row) {
    for (std::size_t col = 0; col + 1 < res; ++col) {
      const double c[4] = {val(col, row), val(col + 1, row), val(col + 1, row + 1), val(col, row + 1)};
      const std::size_t e[4] = {2 * (row * res + col), 2 * (row * res + col + 1) + 1,
                                2 * ((row + 1) * res + col), 2 * (row * res + col) + 1};
      // edge k joins corners (k, k+1) except the left edge, which joins (0, 3)
      bool cut[4];
      cut[0] = positive(c[0]) != positive(c[1]);
      cut[1] = positive(c[1]) != positive(c[2]);
      cut[2] = positive(c[3]) != positive(c[2]);
      cut[3] = positive(c[0]) != positive(c[3]);
      const int count = cut[0] + cut[1] + cut[2] + cut[3];
      if (count == 2) {
        std::size_t ends[2];
        int n = 0;
        for (int k = 0; k < 4; ++k)
          if (cut[k]) ends[n++] = e[k];
        segments.push_back({ends[0], ends[1]});
      } else if (count == 4) {
        const double centre = 0.25 * (c[0] + c[1] + c[2] + c[3]);
        if (positive(centre) == positive(c[0])) {
          segments.push_back({e[0], e[1]});
          segments.push_back({e[2], e[3]});
        } else {
          segments.push_back({e[3], e[0]});
          segments.push_back({e[1], e[2]});
        }
      }
    }
  }

  std::unordered_map<std::size_t, std::vector<std::size_t>> at_edge;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    at_edge[segments[s][0]].push_back(s);
    at_edge[segments[s][1]].push_back(s);
  }
  std::vector<bool> used(segments.size(), false);

  auto walk = [&](std::size_t start_seg, std::size_t start_edge) {
    std::vector<std::size_t> keys{start_edge};
    std::size_t seg = start_seg;
    std::size_t cur = start_edge;
    while (true) {
      used[seg] = true;
      const std::size_t next = segments[seg][0] == cur ? segments[seg][1] : segments[seg][0];
      keys.push_back(next);
      cur = next;
      std::size_t follow = segments.size();
      for (std::size_t cand : at_edge[cur])
        if (!used[cand]) follow = cand;
      if (follow == segments.size()) break;
      seg = follow;
    }
    Polyline line;
    line.reserve(keys.size());
    for (std::size_t k : keys) line.push_back(edge_point(k));
    return line;
  };

  std::vector<Polyline> lines;
  // Open chains start at edges touched by a single segment (the lattice border).
  for (std::size_t s = 0; s < segments.size(); ++s) {
    if (used[s]) continue;
    for (std::size_t end : segments[s]) {
      if (at_edge[end].size() == 1) {
        lines.push_back(walk(s, end));
        break;
      }
    }
  }
  for (std::size_t s = 0; s < segments.size(); ++s) {
    if (!used[s]) lines.push_back(walk(s, segments[s][0]));
  }
  return lines;
}

BoundaryGrid extract_boundary(const std::function<double(double, double)>& f,
                              std::size_t resolution) {
  if (resolution < 64) throw std::invalid_argument("boundary grid resolution must be >= 64");
  BoundaryGrid g;
  g.resolution = resolution;
  g.values.resize(resolution * resolution);
  for (std::size_t row = 0; row < resolution; ++row) {
    for (std::size_t col = 0; col < resolution; ++col) {
      const double v = f(g.coord(col), g.coord(row));
      if (!std::isfinite(v)) throw std::runtime_error("extract_boundary: non-finite value");
      g.values[row * resolution + col] = v;
    }
  }
  g.polylines = marching_squares(g.values, resolution, g.lo, g.hi);
  return g;
}

BoundaryGrid extract_boundary(const Ensemble& e, const Activation& act, std::size_t resolution,
                              std::optional<double> bias) {
  const std::size_t want = bias ? 3 : 2;
  if (e.dim() != want) {
    throw std::invalid_argument("extract_boundary needs a 2-D input (plus optional bias), got d=" +
                                std::to_string(e.dim()));
  }
  if (resolution < 64) throw std::invalid_argument("boundary grid resolution must be >= 64");
  BoundaryGrid g;
  g.resolution = resolution;
  std::vector<double> xs;
  xs.reserve(resolution * resolution * want);
  for (std::size_t row = 0; row < resolution; ++row) {
    for (std::size_t col = 0; col < resolution; ++col) {
      xs.push_back(g.coord(col));
      xs.push_back(g.coord(row));
      if (bias) xs.push_back(*bias);
    }
  }
  g.values = parallel::predict_all(e, xs, act);
  for (double v : g.values)
    if (!std::isfinite(v)) throw std::runtime_error("extract_boundary: non-finite value");
  g.polylines = marching_squares(g.values, resolution, g.lo, g.hi);
  return g;
}

std::vector<double> turning_angles(const std::vector<Polyline>& lines) {
  std::vector<double> out;
  for (const auto& raw : lines) {
    Polyline line;
    for (const auto& p : raw) {
      if (line.empty() || std::hypot(p[0] - line.back()[0], p[1] - line.back()[1]) > 1e-9) {
        line.push_back(p);
      }
    }
    const bool closed = line.size() > 3 &&
                        std::hypot(line.front()[0] - line.back()[0], line.front()[1] - line.back()[1]) <= 1e-9;
    if (closed) line.pop_back();
    const std::size_t n = line.size();
    if (n < 3) continue;
    auto angle_at = [&](std::size_t prev, std::size_t mid, std::size_t next) {
      const double ux = line[mid][0] - line[prev][0];
      const double uy = line[mid][1] - line[prev][1];
      const double vx = line[next][0] - line[mid][0];
      const double vy = line[next][1] - line[mid][1];
      return std::atan2(ux * vy - uy * vx, ux * vx + uy * vy);
    };
    for (std::size_t i = 1; i + 1 < n; ++i) out.push_back(angle_at(i - 1, i, i + 1));
    if (closed) {
      out.push_back(angle_at(n - 2, n - 1, 0));
      out.push_back(angle_at(n - 1, 0, 1));
    }
  }
  return out;
}

double turning_angle_variance(const BoundaryGrid& grid) {
  const auto a = turning_angles(grid.polylines);
  if (a.empty()) return 0.0;
  double mean = 0.0;
  for (double v : a) mean += v;
  mean /= static_cast<double>(a.size());
  double var = 0.0;
  for (double v : a) var += (v - mean) * (v - mean);
  return var / static_cast<double>(a.size());
}

}  // namespace mf
