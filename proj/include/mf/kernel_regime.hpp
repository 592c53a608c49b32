#pragma once

// Output-layer-only training over frozen random ReLU features, the matching
// random-feature and limit kernels, and hard-margin solvers.

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "mf/flow.hpp"
#include "mf/losses.hpp"

namespace mf {

class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Phi(x)_j = max(theta_j^T x, 0) / sqrt(m) with theta_j uniform on S^{d-1}.
struct RandomFeatures {
  std::size_t d = 0;
  std::size_t m = 0;
  std::vector<double> directions;  // m x d

  std::span<const double> direction(std::size_t j) const { return {directions.data() + j * d, d}; }
  std::vector<double> features(std::span<const double> x) const;
  /// n x m matrix of features of every sample.
  Eigen::MatrixXd feature_matrix(const Dataset& ds) const;
};

RandomFeatures make_random_features(std::size_t d, std::size_t m, std::uint64_t seed);

/// Phi(x)^T Phi(x').
double empirical_kernel(const RandomFeatures& rf, std::span<const double> x,
                        std::span<const double> xp);

/// E[(eta^T x)_+ (eta^T x')_+] for eta uniform on S^{d-1}:
/// |x||x'| / (2 pi d) * (sin t + (pi - t) cos t), t the angle between x and x'.
double closed_form_kernel(std::span<const double> x, std::span<const double> xp);

Eigen::MatrixXd closed_form_gram(const Dataset& ds);
Eigen::MatrixXd empirical_gram(const RandomFeatures& rf, const Dataset& ds);
/// Linear kernel X X^T.
Eigen::MatrixXd linear_gram(const Dataset& ds);

double min_eigenvalue(const Eigen::MatrixXd& K);
/// Throws std::invalid_argument unless K is symmetric with
/// min eigenvalue >= -1e-10 * trace / n.
void check_psd(const Eigen::MatrixXd& K);

struct LogisticFlowResult {
  std::vector<double> theta;
  std::vector<double> times;
  std::vector<double> risks;
  /// theta / |theta| at each snapshot (zero vector at t = 0).
  std::vector<std::vector<double>> directions;
  /// min_i y_i theta^T Phi(x_i) / |theta| at each snapshot.
  std::vector<double> normalized_margins;
  bool diverged = false;
};

/// Gradient descent from theta = 0 on the unregularised logistic risk of a
/// linear model with the given feature rows. Stops and flags `diverged` when
/// the recorded risk goes up.
LogisticFlowResult logistic_flow(const Eigen::MatrixXd& features, std::span<const double> ys,
                                 const FlowConfig& cfg);

LogisticFlowResult train_output_layer(const RandomFeatures& rf, const Dataset& ds,
                                      const FlowConfig& cfg);

struct QpOptions {
  double tol = 1e-8;
};

struct MaxMarginSolution {
  std::vector<double> alpha;    // f(x) = sum_i alpha_i k(x, x_i)
  double objective = 0.0;       // alpha^T K alpha
  std::vector<double> margins;  // y_i f(x_i)
  std::size_t support = 0;      // number of nonzero alpha_i
};

/// min alpha^T K alpha  s.t.  y_i (K alpha)_i >= 1. Solved through its dual
/// (nonnegative multipliers) as a min-norm-point problem, then refined on
/// the support.
/// Throws InfeasibleError when the labels are not separable in the RKHS and
/// std::invalid_argument when K is not PSD.
MaxMarginSolution max_margin_qp(const Eigen::MatrixXd& K, std::span<const double> ys,
                                const QpOptions& opt = {});

/// Largest violation among primal feasibility, dual feasibility (y_i alpha_i >= 0)
/// and complementary slackness.
double kkt_residual(const Eigen::MatrixXd& K, std::span<const double> ys,
                    const MaxMarginSolution& sol);

/// Min-norm point of the convex hull of points with Gram matrix Q, as
/// barycentric weights (Wolfe's method).
struct MinNormPoint {
  std::vector<double> weights;
  double norm_sq = 0.0;
};
MinNormPoint min_norm_point(const Eigen::MatrixXd& Q, double tol = 1e-12);

/// Whether some f in the RKHS has y_i f(x_i) > 0 for all i: a kernel
/// perceptron pass, then the min-norm-point test on diag(y) K diag(y).
bool separable(const Eigen::MatrixXd& K, std::span<const double> ys);

struct LinearMaxMargin {
  std::vector<double> theta;
  double margin = 0.0;  // geometric margin 1 / |theta|
};

/// min |theta|^2  s.t.  y_i theta^T x_i >= 1, via the min-norm point of the
/// hull of {y_i x_i}. Throws InfeasibleError when not linearly separable.
LinearMaxMargin max_margin_linear(const Dataset& ds);

}  // namespace mf
