#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mf/model.hpp"

namespace mf {

enum class Loss { Square, Logistic };

/// n labelled samples in R^d, inputs stored row-major.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t d, std::vector<double> xs, std::vector<double> ys);

  std::size_t dim() const { return d_; }
  std::size_t size() const { return ys_.size(); }
  std::span<const double> x(std::size_t i) const { return {xs_.data() + i * d_, d_}; }
  double y(std::size_t i) const { return ys_[i]; }
  std::span<const double> inputs() const { return xs_; }
  std::span<const double> labels() const { return ys_; }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::size_t d_ = 0;
  std::vector<double> xs_;
  std::vector<double> ys_;
};

double loss_value(Loss l, double y, double h);
/// d/dh of the loss.
double loss_derivative(Loss l, double y, double h);
double loss_second_derivative(Loss l, double y, double h);

/// Sum in fixed pairwise-tree order, so results do not depend on threading.
double pairwise_sum(std::span<const double> v);

/// Weights g_i = l'(y_i, h(x_i)) / n representing the gradient of the
/// empirical risk as a weighted sum of point evaluations.
std::vector<double> risk_gradient_weights(Loss l, std::span<const double> predictions,
                                          std::span<const double> ys);

/// (1/n) sum_i l(y_i, h_i).
double risk_from_predictions(Loss l, std::span<const double> predictions,
                             std::span<const double> ys);

/// (1/n) sum_i l(y_i, h(x_i)) + ridge * (1/2m) sum_j |w_j|^2.
double empirical_risk(const Ensemble& e, const Dataset& ds, Loss l, const Activation& act,
                      double ridge = 0.0);

/// m * grad_{w_j} G(W) for every particle, flattened like the ensemble.
/// Equals sum_i g_i * psi_grad(w_j, x_i) (+ ridge * w_j).
std::vector<double> objective_gradient(const Ensemble& e, const Dataset& ds, Loss l,
                                       const Activation& act, double ridge = 0.0);

void check_compatible(const Ensemble& e, const Dataset& ds);

}  // namespace mf
