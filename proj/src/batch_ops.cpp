#include "mf/batch_ops.hpp"

#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mf {

namespace {

void check_points(std::span<const double> points, std::size_t stride) {
  if (points.size() % stride != 0) throw std::invalid_argument("point buffer has wrong stride");
}

double predict_one(const Ensemble& e, std::span<const double> x, const Activation& act) {
  double s = 0.0;
  if (act.kind == Activation::Kind::ReLU) {
    // same arithmetic as psi_eval, without the per-call checks
    const std::size_t d = e.dim();
    const double* w = e.weights().data();
    for (std::size_t j = 0; j < e.size(); ++j, w += d + 1) {
      double t = 0.0;
      for (std::size_t k = 0; k < d; ++k) t += w[k + 1] * x[k];
      s += t > 0.0 ? w[0] * t : 0.0;
    }
  } else {
    for (std::size_t j = 0; j < e.size(); ++j) s += psi_eval(e.particle(j), x, act);
  }
  return s / static_cast<double>(e.size());
}

void gradient_one(std::span<const double> w, const Dataset& ds, std::span<const double> g,
                  const Activation& act, std::span<double> out, std::span<double> scratch) {
  std::fill(out.begin(), out.end(), 0.0);
  if (act.kind == Activation::Kind::ReLU) {
    const std::size_t d = ds.dim();
    const double a = w[0];
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const double* x = ds.inputs().data() + i * d;
      double t = 0.0;
      for (std::size_t k = 0; k < d; ++k) t += w[k + 1] * x[k];
      if (t > 0.0) {
        out[0] += g[i] * t;
        const double ga = g[i] * a;
        for (std::size_t k = 0; k < d; ++k) out[k + 1] += ga * x[k];
      }
    }
    return;
  }
  for (std::size_t i = 0; i < ds.size(); ++i) {
    psi_grad(w, ds.x(i), act, scratch);
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += g[i] * scratch[k];
  }
}

double potential_one(std::span<const double> w, const Dataset& ds, std::span<const double> g,
                     const Activation& act) {
  double s = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) s += g[i] * psi_eval(w, ds.x(i), act);
  return s;
}

}  // namespace

namespace serial {

std::vector<double> predict_all(const Ensemble& e, std::span<const double> xs,
                                const Activation& act) {
  if (e.empty()) throw std::invalid_argument("predict_all: empty ensemble");
  const std::size_t d = e.dim();
  check_points(xs, d);
  const std::size_t n = xs.size() / d;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = predict_one(e, xs.subspan(i * d, d), act);
  return out;
}

std::vector<double> particle_gradients(const Ensemble& e, const Dataset& ds,
                                       std::span<const double> g, const Activation& act) {
  check_compatible(e, ds);
  const std::size_t p = e.stride();
  std::vector<double> out(e.size() * p);
  std::vector<double> scratch(p);
  for (std::size_t j = 0; j < e.size(); ++j) {
    gradient_one(e.particle(j), ds, g, act, std::span(out).subspan(j * p, p), scratch);
  }
  return out;
}

std::vector<double> potential_values(std::span<const double> points, const Dataset& ds,
                                     std::span<const double> g, const Activation& act) {
  const std::size_t p = ds.dim() + 1;
  check_points(points, p);
  const std::size_t k = points.size() / p;
  std::vector<double> out(k);
  for (std::size_t q = 0; q < k; ++q) out[q] = potential_one(points.subspan(q * p, p), ds, g, act);
  return out;
}

}  // namespace serial

namespace parallel {

std::vector<double> predict_all(const Ensemble& e, std::span<const double> xs,
                                const Activation& act) {
  if (e.empty()) throw std::invalid_argument("predict_all: empty ensemble");
  const std::size_t d = e.dim();
  check_points(xs, d);
  const long long n = static_cast<long long>(xs.size() / d);
  std::vector<double> out(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    out[ui] = predict_one(e, xs.subspan(ui * d, d), act);
  }
  return out;
}

std::vector<double> particle_gradients(const Ensemble& e, const Dataset& ds,
                                       std::span<const double> g, const Activation& act) {
  check_compatible(e, ds);
  const std::size_t p = e.stride();
  std::vector<double> out(e.size() * p);
  const long long m = static_cast<long long>(e.size());
#pragma omp parallel
  {
    std::vector<double> scratch(p);
#pragma omp for schedule(static)
    for (long long j = 0; j < m; ++j) {
      const auto uj = static_cast<std::size_t>(j);
      gradient_one(e.particle(uj), ds, g, act, std::span(out).subspan(uj * p, p), scratch);
    }
  }
  return out;
}

std::vector<double> potential_values(std::span<const double> points, const Dataset& ds,
                                     std::span<const double> g, const Activation& act) {
  const std::size_t p = ds.dim() + 1;
  check_points(points, p);
  const long long k = static_cast<long long>(points.size() / p);
  std::vector<double> out(static_cast<std::size_t>(k));
#pragma omp parallel for schedule(static)
  for (long long q = 0; q < k; ++q) {
    const auto uq = static_cast<std::size_t>(q);
    out[uq] = potential_one(points.subspan(uq * p, p), ds, g, act);
  }
  return out;
}

}  // namespace parallel

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

}  // namespace mf
