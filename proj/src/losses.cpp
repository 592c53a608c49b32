#include "mf/losses.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "mf/batch_ops.hpp"

namespace mf {

Dataset::Dataset(std::size_t d, std::vector<double> xs, std::vector<double> ys)
    : d_(d), xs_(std::move(xs)), ys_(std::move(ys)) {
  if (d == 0) throw std::invalid_argument("dataset dimension must be >= 1");
  if (xs_.size() != ys_.size() * d) {
    throw std::invalid_argument("dataset has " + std::to_string(ys_.size()) + " labels but " +
                                std::to_string(xs_.size()) + " input entries for d=" +
                                std::to_string(d));
  }
}

void check_compatible(const Ensemble& e, const Dataset& ds) {
  if (e.dim() != ds.dim()) {
    throw std::invalid_argument("ensemble dimension " + std::to_string(e.dim()) +
                                " does not match dataset dimension " + std::to_string(ds.dim()));
  }
}

namespace {

// log(1 + exp(-z)) without overflow.
double softplus_neg(double z) {
  if (z > 0.0) return std::log1p(std::exp(-z));
  return -z + std::log1p(std::exp(z));
}

// 1 / (1 + exp(z))
double sigmoid_neg(double z) {
  if (z >= 0.0) {
    const double e = std::exp(-z);
    return e / (1.0 + e);
  }
  return 1.0 / (1.0 + std::exp(z));
}

}  // namespace

double loss_value(Loss l, double y, double h) {
  switch (l) {
    case Loss::Square:
      return 0.5 * (y - h) * (y - h);
    case Loss::Logistic:
      return softplus_neg(y * h);
  }
  return 0.0;
}

double loss_derivative(Loss l, double y, double h) {
  switch (l) {
    case Loss::Square:
      return h - y;
    case Loss::Logistic:
      return -y * sigmoid_neg(y * h);
  }
  return 0.0;
}

double loss_second_derivative(Loss l, double y, double h) {
  switch (l) {
    case Loss::Square:
      return 1.0;
    case Loss::Logistic: {
      const double s = sigmoid_neg(y * h);
      return y * y * s * (1.0 - s);
    }
  }
  return 0.0;
}

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

std::vector<double> risk_gradient_weights(Loss l, std::span<const double> predictions,
                                          std::span<const double> ys) {
  if (predictions.size() != ys.size()) throw std::invalid_argument("prediction/label mismatch");
  const double inv_n = 1.0 / static_cast<double>(ys.size());
  std::vector<double> g(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) g[i] = loss_derivative(l, ys[i], predictions[i]) * inv_n;
  return g;
}

double risk_from_predictions(Loss l, std::span<const double> predictions,
                             std::span<const double> ys) {
  if (predictions.size() != ys.size()) throw std::invalid_argument("prediction/label mismatch");
  if (ys.empty()) throw std::invalid_argument("risk of an empty dataset");
  std::vector<double> terms(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) terms[i] = loss_value(l, ys[i], predictions[i]);
  return pairwise_sum(terms) / static_cast<double>(ys.size());
}

double empirical_risk(const Ensemble& e, const Dataset& ds, Loss l, const Activation& act,
                      double ridge) {
  check_compatible(e, ds);
  if (ridge < 0.0) throw std::invalid_argument("ridge must be >= 0");
  const auto h = parallel::predict_all(e, ds.inputs(), act);
  double r = risk_from_predictions(l, h, ds.labels());
  if (ridge > 0.0) {
    std::vector<double> sq(e.size());
    for (std::size_t j = 0; j < e.size(); ++j) sq[j] = dot(e.particle(j), e.particle(j));
    r += ridge * 0.5 * pairwise_sum(sq) / static_cast<double>(e.size());
  }
  return r;
}

std::vector<double> objective_gradient(const Ensemble& e, const Dataset& ds, Loss l,
                                       const Activation& act, double ridge) {
  check_compatible(e, ds);
  const auto h = parallel::predict_all(e, ds.inputs(), act);
  const auto g = risk_gradient_weights(l, h, ds.labels());
  auto grad = parallel::particle_gradients(e, ds, g, act);
  if (ridge > 0.0) {
    const auto w = e.weights();
    for (std::size_t k = 0; k < grad.size(); ++k) grad[k] += ridge * w[k];
  }
  return grad;
}

}  // namespace mf
