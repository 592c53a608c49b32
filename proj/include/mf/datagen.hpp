#pragma once

// Synthetic data distributions: a ReLU teacher network with Gaussian inputs,
// and a mixture of uniform disks on a k x k grid with random cluster classes.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "mf/losses.hpp"
#include "mf/rng.hpp"

namespace mf {

enum class WeightLaw {
  SphereSigns,  // directions uniform on S^{d-1}, output weights uniform in {-1, +1}
  Gaussian,     // all entries standard normal
};

/// y = sum_j out[j] * max(directions_j^T x, 0), no 1/m0 factor.
struct TeacherNetwork {
  std::size_t d = 0;
  std::size_t m0 = 0;
  std::vector<double> directions;  // m0 x d, row j is theta_1(:, j)
  std::vector<double> out;         // m0

  std::span<const double> direction(std::size_t j) const { return {directions.data() + j * d, d}; }
  double operator()(std::span<const double> x) const;
};

TeacherNetwork make_teacher(std::size_t d, std::size_t m0, std::uint64_t seed,
                            WeightLaw law = WeightLaw::SphereSigns);

/// k^2 disks of radius 1/(3k-1) centred on a grid with step 3/(3k-1) inside
/// [-1/2, 1/2]^2; coordinates beyond the second are uniform on [-1/2, 1/2].
struct ClusterDistribution {
  std::size_t k = 0;
  std::size_t d = 0;
  double radius = 0.0;
  double step = 0.0;
  std::vector<double> centers;  // k^2 x 2
  std::vector<double> labels;   // k^2 entries in {-1, +1}

  std::size_t clusters() const { return k * k; }
  /// Index of the disk containing the first two coordinates, or -1.
  int cluster_of(std::span<const double> x) const;
};

ClusterDistribution make_clusters(std::size_t k, std::size_t d, std::uint64_t seed);

/// Generative source of labelled samples used by fresh-sample SGD.
class Sampler {
 public:
  virtual ~Sampler() = default;
  virtual std::size_t dim() const = 0;
  virtual Dataset sample(std::size_t n, Rng& rng) const = 0;
};

class TeacherSampler final : public Sampler {
 public:
  explicit TeacherSampler(TeacherNetwork t) : teacher_(std::move(t)) {}
  std::size_t dim() const override { return teacher_.d; }
  Dataset sample(std::size_t n, Rng& rng) const override;
  const TeacherNetwork& teacher() const { return teacher_; }

 private:
  TeacherNetwork teacher_;
};

class ClusterSampler final : public Sampler {
 public:
  explicit ClusterSampler(ClusterDistribution c) : dist_(std::move(c)) {}
  std::size_t dim() const override { return dist_.d; }
  Dataset sample(std::size_t n, Rng& rng) const override;
  const ClusterDistribution& distribution() const { return dist_; }

 private:
  ClusterDistribution dist_;
};

/// Cycles through a fixed dataset in order; never consumes randomness.
class FiniteSampler final : public Sampler {
 public:
  explicit FiniteSampler(Dataset ds) : ds_(std::move(ds)) {}
  std::size_t dim() const override { return ds_.dim(); }
  Dataset sample(std::size_t n, Rng& rng) const override;

 private:
  Dataset ds_;
  mutable std::size_t cursor_ = 0;
};

Dataset sample_teacher(const TeacherNetwork& t, std::size_t n, std::uint64_t seed);
Dataset sample_clusters(const ClusterDistribution& c, std::size_t n, std::uint64_t seed);

/// Appends a constant coordinate to every input (bias feature).
Dataset append_constant(const Dataset& ds, double value);
std::vector<double> append_constant(std::span<const double> x, double value);

/// CSV with header x_1..x_d,y. Lines starting with '#' are comments.
void write_dataset_csv(std::ostream& os, const Dataset& ds);
Dataset read_dataset_csv(std::istream& is);
void write_dataset_csv(const std::string& path, const Dataset& ds);
Dataset read_dataset_csv(const std::string& path);

}  // namespace mf
