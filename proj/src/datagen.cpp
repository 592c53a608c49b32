#include "mf/datagen.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mf/csv.hpp"

namespace mf {

double TeacherNetwork::operator()(std::span<const double> x) const {
  if (x.size() != d) throw std::invalid_argument("teacher: input dimension mismatch");
  double y = 0.0;
  for (std::size_t j = 0; j < m0; ++j) {
    const double t = dot(direction(j), x);
    if (t > 0.0) y += out[j] * t;
  }
  return y;
}

TeacherNetwork make_teacher(std::size_t d, std::size_t m0, std::uint64_t seed, WeightLaw law) {
  if (d == 0 || m0 == 0) throw std::invalid_argument("teacher needs d >= 1 and m0 >= 1");
  TeacherNetwork t;
  t.d = d;
  t.m0 = m0;
  t.directions.reserve(m0 * d);
  t.out.reserve(m0);
  auto rng = make_rng(seed, Stream::TeacherWeights);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t j = 0; j < m0; ++j) {
    if (law == WeightLaw::SphereSigns) {
      const auto v = uniform_sphere(d, rng);
      t.directions.insert(t.directions.end(), v.begin(), v.end());
    } else {
      for (std::size_t k = 0; k < d; ++k) t.directions.push_back(normal(rng));
    }
  }
  for (std::size_t j = 0; j < m0; ++j) {
    t.out.push_back(law == WeightLaw::SphereSigns ? (coin(rng) ? 1.0 : -1.0) : normal(rng));
  }
  return t;
}

Dataset TeacherSampler::sample(std::size_t n, Rng& rng) const {
  const std::size_t d = teacher_.d;
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> xs(n * d);
  std::vector<double> ys(n);
  for (double& v : xs) v = normal(rng);
  for (std::size_t i = 0; i < n; ++i) ys[i] = teacher_(std::span<const double>(xs).subspan(i * d, d));
  return Dataset(d, std::move(xs), std::move(ys));
}

ClusterDistribution make_clusters(std::size_t k, std::size_t d, std::uint64_t seed) {
  if (k == 0) throw std::invalid_argument("cluster grid needs k >= 1");
  if (d < 2) throw std::invalid_argument("cluster distribution needs d >= 2");
  ClusterDistribution c;
  c.k = k;
  c.d = d;
  const double denom = 3.0 * static_cast<double>(k) - 1.0;
  c.radius = 1.0 / denom;
  c.step = 3.0 / denom;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) {
      c.centers.push_back(-0.5 + c.radius + static_cast<double>(a) * c.step);
      c.centers.push_back(-0.5 + c.radius + static_cast<double>(b) * c.step);
    }
  }
  auto rng = make_rng(seed, Stream::Labels);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t i = 0; i < k * k; ++i) c.labels.push_back(coin(rng) ? 1.0 : -1.0);
  return c;
}

int ClusterDistribution::cluster_of(std::span<const double> x) const {
  for (std::size_t i = 0; i < clusters(); ++i) {
    const double dx = x[0] - centers[2 * i];
    const double dy = x[1] - centers[2 * i + 1];
    if (dx * dx + dy * dy <= radius * radius * (1.0 + 1e-12)) return static_cast<int>(i);
  }
  return -1;
}

Dataset ClusterSampler::sample(std::size_t n, Rng& rng) const {
  const std::size_t d = dist_.d;
  std::uniform_int_distribution<std::size_t> pick(0, dist_.clusters() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> box(-0.5, 0.5);
  std::vector<double> xs(n * d);
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = pick(rng);
    const double rad = dist_.radius * std::sqrt(unit(rng));
    const double ang = 2.0 * std::numbers::pi * unit(rng);
    double* x = xs.data() + i * d;
    x[0] = dist_.centers[2 * c] + rad * std::cos(ang);
    x[1] = dist_.centers[2 * c + 1] + rad * std::sin(ang);
    for (std::size_t k = 2; k < d; ++k) x[k] = box(rng);
    ys[i] = dist_.labels[c];
  }
  return Dataset(d, std::move(xs), std::move(ys));
}

Dataset FiniteSampler::sample(std::size_t n, Rng&) const {
  const std::size_t d = ds_.dim();
  std::vector<double> xs;
  std::vector<double> ys;
  xs.reserve(n * d);
  ys.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = ds_.x(cursor_);
    xs.insert(xs.end(), x.begin(), x.end());
    ys.push_back(ds_.y(cursor_));
    cursor_ = (cursor_ + 1) % ds_.size();
  }
  return Dataset(d, std::move(xs), std::move(ys));
}

Dataset sample_teacher(const TeacherNetwork& t, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample size must be >= 1");
  auto rng = make_rng(seed, Stream::Inputs);
  return TeacherSampler(t).sample(n, rng);
}

Dataset sample_clusters(const ClusterDistribution& c, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample size must be >= 1");
  auto rng = make_rng(seed, Stream::Inputs);
  return ClusterSampler(c).sample(n, rng);
}

std::vector<double> append_constant(std::span<const double> x, double value) {
  std::vector<double> out(x.begin(), x.end());
  out.push_back(value);
  return out;
}

Dataset append_constant(const Dataset& ds, double value) {
  const std::size_t d = ds.dim();
  std::vector<double> xs;
  xs.reserve(ds.size() * (d + 1));
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto x = ds.x(i);
    xs.insert(xs.end(), x.begin(), x.end());
    xs.push_back(value);
  }
  return Dataset(d + 1, std::move(xs), std::vector<double>(ds.labels().begin(), ds.labels().end()));
}

void write_dataset_csv(std::ostream& os, const Dataset& ds) {
  CsvWriter w(os);
  std::vector<std::string> cols;
  for (std::size_t k = 0; k < ds.dim(); ++k) cols.push_back("x_" + std::to_string(k + 1));
  cols.push_back("y");
  w.header(cols);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (double v : ds.x(i)) w.field(v);
    w.field(ds.y(i));
    w.end_row();
  }
}

Dataset read_dataset_csv(std::istream& is) {
  const CsvTable t = read_csv(is);
  if (t.header.size() < 2 || t.header.back() != "y") {
    throw std::runtime_error("dataset CSV must have columns x_1..x_d,y");
  }
  const std::size_t d = t.header.size() - 1;
  for (std::size_t k = 0; k < d; ++k) {
    if (t.header[k] != "x_" + std::to_string(k + 1)) {
      throw std::runtime_error("unexpected dataset column " + t.header[k]);
    }
  }
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& row : t.rows) {
    for (std::size_t k = 0; k < d; ++k) xs.push_back(std::stod(row[k]));
    ys.push_back(std::stod(row[d]));
  }
  if (ys.empty()) throw std::runtime_error("dataset CSV has no rows");
  return Dataset(d, std::move(xs), std::move(ys));
}

void write_dataset_csv(const std::string& path, const Dataset& ds) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_dataset_csv(out, ds);
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_dataset_csv(in);
}

}  // namespace mf
