#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace mf {

using Rng = std::mt19937_64;

/// Independent substreams derived from one experiment seed.
enum class Stream : std::uint64_t {
  TeacherWeights = 1,
  Inputs = 2,
  Labels = 3,
  Init = 4,
  Minibatch = 5,
  Evaluation = 6,
  Probes = 7,
  Features = 8,
  Test = 9,
};

std::uint64_t splitmix64(std::uint64_t x);

Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);
inline Rng make_rng(std::uint64_t seed, Stream stream) {
  return make_rng(seed, static_cast<std::uint64_t>(stream));
}

/// Seed of repetition `rep` of an experiment seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t rep);

/// Uniform point on the unit sphere S^{dim-1}.
std::vector<double> uniform_sphere(std::size_t dim, Rng& rng);

}  // namespace mf
