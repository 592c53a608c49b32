#include "mf/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace mf {

namespace {

constexpr double kPanel = 320.0;
constexpr double kPad = 24.0;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

double to_double(const std::string& s) {
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw std::invalid_argument("svg: not a number: '" + s + "'");
  }
}

class Svg {
 public:
  Svg(double w, double h) : w_(w), h_(h) {}

  void raw(const std::string& s) { body_ << s << '\n'; }

  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke,
                double width, const std::string& extra = "") {
    if (pts.size() < 2) return;
    body_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width)
          << "\"" << extra << " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) body_ << ' ';
      body_ << num(pts[i].first) << ',' << num(pts[i].second);
    }
    body_ << "\"/>\n";
  }

  void circle(double cx, double cy, double r, const std::string& fill, const std::string& stroke = "none") {
    body_ << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(cy) << "\" r=\"" << num(r)
          << "\" fill=\"" << fill << "\" stroke=\"" << stroke << "\"/>\n";
  }

  void text(double x, double y, const std::string& s, const std::string& anchor = "middle",
            double size = 12) {
    body_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-family=\"sans-serif\" font-size=\""
          << num(size) << "\" text-anchor=\"" << anchor << "\">" << s << "</text>\n";
  }

  void rect(double x, double y, double w, double h) {
    body_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w) << "\" height=\""
          << num(h) << "\" fill=\"none\" stroke=\"#888\"/>\n";
  }

  std::string str() const {
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w_) << "\" height=\"" << num(h_)
       << "\" viewBox=\"0 0 " << num(w_) << ' ' << num(h_) << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << body_.str() << "</svg>\n";
    return os.str();
  }

 private:
  double w_, h_;
  std::ostringstream body_;
};

// Maps [lo, hi]^2 onto a square panel with its top-left corner at (ox, oy).
struct Frame {
  double ox, oy, lo, hi;
  double x(double v) const { return ox + kPad + (v - lo) / (hi - lo) * (kPanel - 2 * kPad); }
  double y(double v) const { return oy + kPanel - kPad - (v - lo) / (hi - lo) * (kPanel - 2 * kPad); }
};

}  // namespace

std::string particle_trace_svg(const CsvTable& particles, const CsvTable& teacher) {
  const auto cm = particles.column("m");
  const auto crep = particles.column("repetition");
  const auto cpart = particles.column("particle");
  const auto cx = particles.column("x_1");
  const auto cy = particles.column("x_2");
  const auto csign = particles.column("sign");

  struct Path {
    std::vector<std::pair<double, double>> pts;
    double sign = 1.0;
  };
  std::map<long long, std::map<long long, Path>> panels;  // m -> particle -> path
  for (const auto& row : particles.rows) {
    if (std::stoll(row[crep]) != 0) continue;
    auto& path = panels[std::stoll(row[cm])][std::stoll(row[cpart])];
    const double px = to_double(row[cx]);
    const double py = to_double(row[cy]);
    const double r = std::hypot(px, py);
    const double s = r > 0.0 ? std::tanh(r) / r : 1.0;
    path.pts.emplace_back(px * s, py * s);
    path.sign = to_double(row[csign]);
  }

  const auto tx = teacher.column("x_1");
  const auto ty = teacher.column("x_2");
  std::optional<std::size_t> trep;
  if (std::find(teacher.header.begin(), teacher.header.end(), "repetition") != teacher.header.end())
    trep = teacher.column("repetition");

  Svg svg(kPanel * static_cast<double>(std::max<std::size_t>(panels.size(), 1)), kPanel + 20);
  double ox = 0.0;
  for (const auto& [m, paths] : panels) {
    Frame f{ox, 20.0, -1.0, 1.0};
    svg.rect(ox + kPad, 20.0 + kPad, kPanel - 2 * kPad, kPanel - 2 * kPad);
    svg.text(ox + kPanel / 2, 16.0, "m = " + std::to_string(m));
    std::vector<std::pair<double, double>> circle;
    for (int k = 0; k <= 128; ++k) {
      const double a = 2.0 * M_PI * k / 128.0;
      circle.emplace_back(f.x(std::tanh(1.0) * std::cos(a)), f.y(std::tanh(1.0) * std::sin(a)));
    }
    svg.polyline(circle, "black", 1.0);
    for (const auto& row : teacher.rows) {
      if (trep && std::stoll(row[*trep]) != 0) continue;
      const double px = to_double(row[tx]);
      const double py = to_double(row[ty]);
      const double r = std::hypot(px, py);
      if (r == 0.0) continue;
      svg.polyline({{f.x(0), f.y(0)}, {f.x(px / r), f.y(py / r)}}, "black", 1.0,
                   " stroke-dasharray=\"5,4\"");
    }
    for (const auto& [j, path] : paths) {
      std::vector<std::pair<double, double>> pts;
      for (const auto& [px, py] : path.pts) pts.emplace_back(f.x(px), f.y(py));
      const std::string colour = path.sign >= 0 ? "#d62728" : "#1f77b4";
      svg.polyline(pts, colour, 0.6, " stroke-opacity=\"0.6\"");
      svg.circle(pts.back().first, pts.back().second, 1.6, colour);
    }
    ox += kPanel;
  }
  return svg.str();
}

std::string boundary_svg(const CsvTable& lines, const CsvTable& data) {
  const auto lrep = lines.column("repetition");
  const auto lmode = lines.column("mode");
  const auto lline = lines.column("line");
  const auto lx = lines.column("x_1");
  const auto ly = lines.column("x_2");
  const auto drep = data.column("repetition");
  const auto dx = data.column("x_1");
  const auto dy = data.column("x_2");
  const auto dlab = data.column("y");

  std::vector<long long> reps;
  std::vector<std::string> modes;
  for (const auto& row : lines.rows) {
    const long long r = std::stoll(row[lrep]);
    if (std::find(reps.begin(), reps.end(), r) == reps.end()) reps.push_back(r);
    if (std::find(modes.begin(), modes.end(), row[lmode]) == modes.end()) modes.push_back(row[lmode]);
  }
  for (const auto& row : data.rows) {
    const long long r = std::stoll(row[drep]);
    if (std::find(reps.begin(), reps.end(), r) == reps.end()) reps.push_back(r);
  }
  std::sort(reps.begin(), reps.end());

  Svg svg(kPanel * static_cast<double>(std::max<std::size_t>(reps.size(), 1)),
          (kPanel + 20) * static_cast<double>(std::max<std::size_t>(modes.size(), 1)));
  for (std::size_t c = 0; c < reps.size(); ++c) {
    for (std::size_t r = 0; r < std::max<std::size_t>(modes.size(), 1); ++r) {
      const double ox = kPanel * static_cast<double>(c);
      const double oy = (kPanel + 20) * static_cast<double>(r) + 20;
      Frame f{ox, oy, -0.5, 0.5};
      svg.rect(ox + kPad, oy + kPad, kPanel - 2 * kPad, kPanel - 2 * kPad);
      if (!modes.empty()) svg.text(ox + kPanel / 2, oy - 4, modes[r] + ", repetition " + std::to_string(reps[c]));
      for (const auto& row : data.rows) {
        if (std::stoll(row[drep]) != reps[c]) continue;
        svg.circle(f.x(to_double(row[dx])), f.y(to_double(row[dy])), 2.0,
                   to_double(row[dlab]) > 0 ? "#d62728" : "#1f77b4");
      }
      if (modes.empty()) continue;
      std::vector<std::pair<double, double>> pts;
      long long current = -1;
      for (const auto& row : lines.rows) {
        if (std::stoll(row[lrep]) != reps[c] || row[lmode] != modes[r]) continue;
        const long long line = std::stoll(row[lline]);
        if (line != current) {
          svg.polyline(pts, "black", 1.5);
          pts.clear();
          current = line;
        }
        pts.emplace_back(f.x(to_double(row[lx])), f.y(to_double(row[ly])));
      }
      svg.polyline(pts, "black", 1.5);
    }
  }
  return svg.str();
}

std::string curve_svg(const CsvTable& table, const CurveOptions& opt) {
  const auto cx = table.column(opt.x_column);
  const auto cy = table.column(opt.y_column);
  std::vector<std::string> names;
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  for (const auto& row : table.rows) {
    const std::string key = opt.series_column.empty() ? "" : row[table.column(opt.series_column)];
    if (!series.count(key)) names.push_back(key);
    series[key].emplace_back(to_double(row[cx]), to_double(row[cy]));
  }
  auto tx = [&](double v) { return opt.log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return opt.log_y ? std::log10(v) : v; };
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& [k, pts] : series) {
    for (const auto& [x, y] : pts) {
      if (!std::isfinite(tx(x)) || !std::isfinite(ty(y))) continue;
      x0 = std::min(x0, tx(x));
      x1 = std::max(x1, tx(x));
      y0 = std::min(y0, ty(y));
      y1 = std::max(y1, ty(y));
    }
  }
  if (!(x0 < x1)) {
    x0 = std::isfinite(x0) ? x0 - 1 : 0;
    x1 = x0 + 2;
  }
  if (!(y0 < y1)) {
    y0 = std::isfinite(y0) ? y0 - 1 : 0;
    y1 = y0 + 2;
  }
  const double W = 480, H = 340, L = 60, R = 120, T = 30, B = 40;
  auto px = [&](double v) { return L + (tx(v) - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double v) { return H - B - (ty(v) - y0) / (y1 - y0) * (H - T - B); };

  Svg svg(W, H);
  svg.text(W / 2, 18, opt.title);
  svg.rect(L, T, W - L - R, H - T - B);
  svg.text((L + W - R) / 2, H - 8, opt.x_column + (opt.log_x ? " (log)" : ""));
  svg.text(12, T - 8, opt.y_column + (opt.log_y ? " (log)" : ""), "start");
  auto label = [](double v, bool log) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", log ? std::pow(10.0, v) : v);
    return std::string(buf);
  };
  svg.text(L, H - B + 14, label(x0, opt.log_x));
  svg.text(W - R, H - B + 14, label(x1, opt.log_x));
  svg.text(L - 4, H - B, label(y0, opt.log_y), "end");
  svg.text(L - 4, T + 10, label(y1, opt.log_y), "end");

  for (std::size_t s = 0; s < names.size(); ++s) {
    const std::string colour = kPalette[s % std::size(kPalette)];
    std::vector<std::pair<double, double>> pts;
    for (const auto& [x, y] : series[names[s]]) {
      if (!std::isfinite(tx(x)) || !std::isfinite(ty(y))) continue;
      pts.emplace_back(px(x), py(y));
      svg.circle(px(x), py(y), 2.5, colour);
    }
    svg.polyline(pts, colour, 1.5);
    if (!names[s].empty()) {
      svg.polyline({{W - R + 10, T + 14 + 18.0 * s}, {W - R + 30, T + 14 + 18.0 * s}}, colour, 2.0);
      svg.text(W - R + 36, T + 18 + 18.0 * s, names[s], "start");
    }
  }
  return svg.str();
}

}  // namespace mf
