#include "mf/kernel_regime.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mf/batch_ops.hpp"
#include "mf/rng.hpp"

namespace mf {

std::vector<double> RandomFeatures::features(std::span<const double> x) const {
  if (x.size() != d) throw std::invalid_argument("random features: dimension mismatch");
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  std::vector<double> phi(m);
  for (std::size_t j = 0; j < m; ++j) phi[j] = scale * std::max(dot(direction(j), x), 0.0);
  return phi;
}

Eigen::MatrixXd RandomFeatures::feature_matrix(const Dataset& ds) const {
  if (ds.dim() != d) throw std::invalid_argument("random features: dimension mismatch");
  Eigen::MatrixXd F(ds.size(), m);
  const long long n = static_cast<long long>(ds.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < n; ++i) {
    const auto phi = features(ds.x(static_cast<std::size_t>(i)));
    for (std::size_t j = 0; j < m; ++j) F(i, static_cast<Eigen::Index>(j)) = phi[j];
  }
  return F;
}

RandomFeatures make_random_features(std::size_t d, std::size_t m, std::uint64_t seed) {
  if (d == 0 || m == 0) throw std::invalid_argument("random features need d, m >= 1");
  RandomFeatures rf;
  rf.d = d;
  rf.m = m;
  rf.directions.reserve(d * m);
  auto rng = make_rng(seed, Stream::Features);
  for (std::size_t j = 0; j < m; ++j) {
    const auto v = uniform_sphere(d, rng);
    rf.directions.insert(rf.directions.end(), v.begin(), v.end());
  }
  return rf;
}

double empirical_kernel(const RandomFeatures& rf, std::span<const double> x,
                        std::span<const double> xp) {
  if (x.size() != rf.d || xp.size() != rf.d) throw std::invalid_argument("kernel: dimension mismatch");
  const double s = parallel::blocked_sum(rf.m, [&](std::size_t j) {
    const auto th = rf.direction(j);
    const double a = dot(th, x);
    const double b = dot(th, xp);
    return (a > 0.0 && b > 0.0) ? a * b : 0.0;
  });
  return s / static_cast<double>(rf.m);
}

double closed_form_kernel(std::span<const double> x, std::span<const double> xp) {
  if (x.size() != xp.size()) throw std::invalid_argument("kernel: dimension mismatch");
  const double nx = norm2(x);
  const double np = norm2(xp);
  if (nx == 0.0 || np == 0.0) return 0.0;
  const double c = std::clamp(dot(x, xp) / (nx * np), -1.0, 1.0);
  const double t = std::acos(c);
  const double d = static_cast<double>(x.size());
  return nx * np / (2.0 * std::numbers::pi * d) * (std::sin(t) + (std::numbers::pi - t) * c);
}

namespace {

Eigen::MatrixXd to_matrix(const std::vector<double>& K, std::size_t n) {
  Eigen::MatrixXd M(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) M(i, j) = K[i * n + j];
  return M;
}

}  // namespace

Eigen::MatrixXd closed_form_gram(const Dataset& ds) {
  return to_matrix(parallel::gram(ds.inputs(), ds.dim(), closed_form_kernel), ds.size());
}

Eigen::MatrixXd empirical_gram(const RandomFeatures& rf, const Dataset& ds) {
  const Eigen::MatrixXd F = rf.feature_matrix(ds);
  return F * F.transpose();
}

Eigen::MatrixXd linear_gram(const Dataset& ds) {
  return to_matrix(parallel::gram(ds.inputs(), ds.dim(),
                                  [](auto a, auto b) { return dot(a, b); }),
                   ds.size());
}

double min_eigenvalue(const Eigen::MatrixXd& K) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void check_psd(const Eigen::MatrixXd& K) {
  if (K.rows() != K.cols() || K.rows() == 0) throw std::invalid_argument("kernel matrix must be square");
  const double scale = std::max(K.cwiseAbs().maxCoeff(), 1e-300);
  if (((K - K.transpose()).cwiseAbs().maxCoeff()) > 1e-12 * scale) {
    throw std::invalid_argument("kernel matrix is not symmetric");
  }
  const double n = static_cast<double>(K.rows());
  const double lo = min_eigenvalue(K);
  if (lo < -1e-10 * std::abs(K.trace()) / n) {
    throw std::invalid_argument("kernel matrix is not positive semidefinite (min eigenvalue " +
                                std::to_string(lo) + ")");
  }
}

LogisticFlowResult logistic_flow(const Eigen::MatrixXd& F, std::span<const double> ys,
                                 const FlowConfig& cfg) {
  cfg.validate();
  if (static_cast<std::size_t>(F.rows()) != ys.size()) throw std::invalid_argument("logistic_flow: size mismatch");
  const Eigen::Index n = F.rows();
  const Eigen::Map<const Eigen::VectorXd> y(ys.data(), n);
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(F.cols());
  LogisticFlowResult res;

  auto record = [&](std::size_t k, const Eigen::VectorXd& scores) {
    std::vector<double> h(scores.data(), scores.data() + n);
    const double risk = risk_from_predictions(Loss::Logistic, h, ys);
    const double nt = theta.norm();
    std::vector<double> dir(theta.size(), 0.0);
    double margin = 0.0;
    if (nt > 0.0) {
      for (Eigen::Index j = 0; j < theta.size(); ++j) dir[j] = theta[j] / nt;
      margin = (y.array() * scores.array()).minCoeff() / nt;
    }
    if (!res.risks.empty() && !(risk <= res.risks.back())) res.diverged = true;
    res.times.push_back(static_cast<double>(k) * cfg.step);
    res.risks.push_back(risk);
    res.directions.push_back(std::move(dir));
    res.normalized_margins.push_back(margin);
  };

  Eigen::VectorXd scores = F * theta;
  record(0, scores);
  Eigen::VectorXd g(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t k = 1; k <= cfg.iterations && !res.diverged; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) g[i] = loss_derivative(Loss::Logistic, y[i], scores[i]) * inv_n;
    theta.noalias() -= cfg.step * (F.transpose() * g);
    scores.noalias() = F * theta;
    if (k % cfg.record_every == 0 || k == cfg.iterations) record(k, scores);
  }
  res.theta.assign(theta.data(), theta.data() + theta.size());
  return res;
}

LogisticFlowResult train_output_layer(const RandomFeatures& rf, const Dataset& ds,
                                      const FlowConfig& cfg) {
  return logistic_flow(rf.feature_matrix(ds), ds.labels(), cfg);
}

MinNormPoint min_norm_point(const Eigen::MatrixXd& Q, double tol) {
  const Eigen::Index n = Q.rows();
  if (n == 0 || Q.cols() != n) throw std::invalid_argument("min_norm_point: bad Gram matrix");
  const double scale = std::max(Q.diagonal().maxCoeff(), 1e-300);
  constexpr double kEps = 1e-13;

  Eigen::Index i0 = 0;
  Q.diagonal().minCoeff(&i0);
  std::vector<Eigen::Index> S{i0};
  Eigen::VectorXd lam = Eigen::VectorXd::Ones(1);

  auto q_times = [&](const Eigen::VectorXd& l) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (std::size_t a = 0; a < S.size(); ++a) out += l[static_cast<Eigen::Index>(a)] * Q.col(S[a]);
    return out;
  };

  const std::size_t max_major = 50 * static_cast<std::size_t>(n) + 100;
  for (std::size_t major = 0; major < max_major; ++major) {
    const Eigen::VectorXd qx = q_times(lam);
    double xx = 0.0;
    for (std::size_t a = 0; a < S.size(); ++a) xx += lam[static_cast<Eigen::Index>(a)] * qx[S[a]];
    Eigen::Index j = 0;
    const double lo = qx.minCoeff(&j);
    if (xx - lo <= tol * scale) break;
    if (std::find(S.begin(), S.end(), j) != S.end()) break;
    S.push_back(j);
    lam.conservativeResize(static_cast<Eigen::Index>(S.size()));
    lam[lam.size() - 1] = 0.0;

    for (std::size_t minor = 0; minor < 10 * S.size() + 10; ++minor) {
      const auto k = static_cast<Eigen::Index>(S.size());
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k + 1, k + 1);
      for (Eigen::Index a = 0; a < k; ++a) {
        for (Eigen::Index b = 0; b < k; ++b) A(a, b) = Q(S[a], S[b]);
        A(a, k) = 1.0;
        A(k, a) = 1.0;
      }
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
      rhs[k] = 1.0;
      const Eigen::VectorXd sol = A.completeOrthogonalDecomposition().solve(rhs);
      Eigen::VectorXd mu = sol.head(k);
      mu /= mu.sum();
      if (mu.minCoeff() > kEps) {
        lam = mu;
        break;
      }
      double theta = 1.0;
      for (Eigen::Index a = 0; a < k; ++a) {
        if (mu[a] <= kEps) {
          const double denom = lam[a] - mu[a];
          theta = std::min(theta, denom > 0.0 ? lam[a] / denom : 0.0);
        }
      }
      lam = theta * mu + (1.0 - theta) * lam;
      std::vector<Eigen::Index> keep_idx;
      std::vector<double> keep_lam;
      for (Eigen::Index a = 0; a < k; ++a) {
        if (lam[a] > kEps) {
          keep_idx.push_back(S[a]);
          keep_lam.push_back(lam[a]);
        }
      }
      if (keep_idx.empty()) {
        // Numerical breakdown; restart from the newest vertex.
        keep_idx = {S.back()};
        keep_lam = {1.0};
      }
      S = std::move(keep_idx);
      lam = Eigen::Map<Eigen::VectorXd>(keep_lam.data(), static_cast<Eigen::Index>(keep_lam.size()));
      lam /= lam.sum();
    }
  }

  MinNormPoint out;
  out.weights.assign(static_cast<std::size_t>(n), 0.0);
  for (std::size_t a = 0; a < S.size(); ++a) out.weights[S[a]] = lam[static_cast<Eigen::Index>(a)];
  const Eigen::Map<const Eigen::VectorXd> w(out.weights.data(), n);
  out.norm_sq = std::max(0.0, w.dot(Q * w));
  return out;
}

namespace {

Eigen::MatrixXd signed_gram(const Eigen::MatrixXd& K, std::span<const double> ys) {
  const Eigen::Map<const Eigen::VectorXd> y(ys.data(), static_cast<Eigen::Index>(ys.size()));
  return y.asDiagonal() * K * y.asDiagonal();
}

void check_labels(std::span<const double> ys) {
  for (double v : ys) {
    if (v != 1.0 && v != -1.0) throw std::invalid_argument("labels must be +1 or -1");
  }
}

bool perceptron_separates(const Eigen::MatrixXd& Q, std::size_t epochs) {
  const Eigen::Index n = Q.rows();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd margins = Eigen::VectorXd::Zero(n);
  for (std::size_t e = 0; e < epochs; ++e) {
    bool clean = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (margins[i] <= 0.0) {
        beta[i] += 1.0;
        margins += Q.col(i);
        clean = false;
      }
    }
    if (clean) return true;
  }
  return false;
}

}  // namespace

bool separable(const Eigen::MatrixXd& K, std::span<const double> ys) {
  if (static_cast<std::size_t>(K.rows()) != ys.size()) throw std::invalid_argument("separable: size mismatch");
  check_labels(ys);
  const Eigen::MatrixXd Q = signed_gram(K, ys);
  if (perceptron_separates(Q, 25)) return true;
  const double scale = std::max(Q.diagonal().maxCoeff(), 1e-300);
  return min_norm_point(Q).norm_sq > 1e-10 * scale;
}

MaxMarginSolution max_margin_qp(const Eigen::MatrixXd& K, std::span<const double> ys,
                                const QpOptions& opt) {
  if (static_cast<std::size_t>(K.rows()) != ys.size()) throw std::invalid_argument("max_margin_qp: size mismatch");
  check_psd(K);
  if (!separable(K, ys)) throw InfeasibleError("labels are not separable by the kernel");

  const Eigen::Index n = K.rows();
  const Eigen::MatrixXd Q = signed_gram(K, ys);

  // With u the min-norm point of the hull of the signed features and lambda
  // its weights, beta = lambda / |u|^2 solves the dual.
  const auto mnp = min_norm_point(Q, opt.tol * 1e-4);
  Eigen::VectorXd beta(n);
  for (Eigen::Index i = 0; i < n; ++i) beta[i] = mnp.weights[static_cast<std::size_t>(i)] / mnp.norm_sq;

  // Exact solve of Q_SS b = 1 on the support, kept when it is still a KKT point.
  std::vector<Eigen::Index> S;
  for (Eigen::Index i = 0; i < n; ++i)
    if (beta[i] > 0.0) S.push_back(i);
  const auto k = static_cast<Eigen::Index>(S.size());
  Eigen::MatrixXd Qs(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) Qs(a, b) = Q(S[a], S[b]);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(k);
  Eigen::VectorXd b(k);
  for (Eigen::Index a = 0; a < k; ++a) b[a] = beta[S[a]];
  const auto cod = Qs.completeOrthogonalDecomposition();
  for (int r = 0; r < 3; ++r) b += cod.solve(ones - Qs * b);
  if (b.minCoeff() > 0.0) {
    Eigen::VectorXd cand = Eigen::VectorXd::Zero(n);
    for (Eigen::Index a = 0; a < k; ++a) cand[S[a]] = b[a];
    const Eigen::VectorXd m_old = Q * beta, m_new = Q * cand;
    auto violation = [&](const Eigen::VectorXd& bb, const Eigen::VectorXd& mm) {
      double v = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) v = std::max({v, 1.0 - mm[i], std::abs(bb[i] * (mm[i] - 1.0))});
      return v;
    };
    if (violation(cand, m_new) <= violation(beta, m_old)) beta = cand;
  }

  MaxMarginSolution sol;
  sol.alpha.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) sol.alpha[i] = ys[i] * beta[i];
  const Eigen::Map<const Eigen::VectorXd> alpha(sol.alpha.data(), n);
  const Eigen::VectorXd f = K * alpha;
  sol.objective = alpha.dot(f);
  sol.margins.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) sol.margins[i] = ys[i] * f[i];
  sol.support = static_cast<std::size_t>((beta.array() > 0.0).count());
  return sol;
}

double kkt_residual(const Eigen::MatrixXd& K, std::span<const double> ys,
                    const MaxMarginSolution& sol) {
  const Eigen::Index n = K.rows();
  const Eigen::Map<const Eigen::VectorXd> alpha(sol.alpha.data(), n);
  const Eigen::VectorXd f = K * alpha;
  double r = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double margin = ys[i] * f[i];
    const double beta = ys[i] * alpha[i];
    r = std::max(r, std::max(0.0, 1.0 - margin));
    r = std::max(r, std::max(0.0, -beta));
    r = std::max(r, std::abs(beta * (margin - 1.0)));
  }
  return r;
}

LinearMaxMargin max_margin_linear(const Dataset& ds) {
  check_labels(ds.labels());
  const std::size_t n = ds.size();
  const std::size_t d = ds.dim();
  Eigen::MatrixXd Z(n, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < d; ++k) Z(i, k) = ds.y(i) * ds.x(i)[k];
  const Eigen::MatrixXd Q = Z * Z.transpose();
  const auto mnp = min_norm_point(Q);
  const double scale = std::max(Q.diagonal().maxCoeff(), 1e-300);
  if (mnp.norm_sq <= 1e-10 * scale) throw InfeasibleError("data are not linearly separable");

  const Eigen::Map<const Eigen::VectorXd> lam(mnp.weights.data(), static_cast<Eigen::Index>(n));
  const Eigen::VectorXd p = Z.transpose() * lam;
  const double pp = p.squaredNorm();
  LinearMaxMargin out;
  out.theta.resize(d);
  for (std::size_t k = 0; k < d; ++k) out.theta[k] = p[k] / pp;
  out.margin = std::sqrt(pp);
  return out;
}

}  // namespace mf
