#include "mixdyn/dynamics.hpp"

#include <cmath>
#include <fmt/core.h>

#include "mixdyn/errors.hpp"

namespace mixdyn {

namespace {
constexpr int kChunk = 1024;
}

SyntheticRegressionSet build_synthetic_regression(const Eigen::MatrixXd& x,
                                                  const Eigen::VectorXd& y,
                                                  const ScalarFunction& truth,
                                                  double lambda) {
  const int n = static_cast<int>(x.rows());
  if (n == 0) throw EmptyDatasetError("build_synthetic_regression: empty dataset");
  const int m = n * n;

  SyntheticRegressionSet out;
  out.features.resize(m, x.cols());
  out.clean_targets.resize(m);
  out.mixed_targets.resize(m);
  out.noise.resize(m);
  out.lambdas = Eigen::VectorXd::Constant(m, lambda);

#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int row = i * n + j;
      out.features.row(row) = lambda * x.row(i) + (1.0 - lambda) * x.row(j);
      out.mixed_targets[row] = lambda * y[i] + (1.0 - lambda) * y[j];
      out.clean_targets[row] = truth(out.features.row(row).transpose());
      out.noise[row] = out.mixed_targets[row] - out.clean_targets[row];
    }
  }
  return out;
}

Eigen::MatrixXd feature_matrix_serial(const RandomFeatureModel& model,
                                      const Eigen::MatrixXd& x) {
  if (x.cols() != model.frozen_weights.cols()) {
    throw DimensionMismatchError("feature_matrix: input dimension mismatch");
  }
  const int m = static_cast<int>(x.rows());
  Eigen::MatrixXd phi(model.feature_dim(), m);
  for (int j = 0; j < m; ++j) {
    phi.col(j) = (model.frozen_weights * x.row(j).transpose()).array().tanh();
  }
  return phi;
}

Eigen::MatrixXd feature_matrix(const RandomFeatureModel& model,
                               const Eigen::MatrixXd& x) {
  if (x.cols() != model.frozen_weights.cols()) {
    throw DimensionMismatchError("feature_matrix: input dimension mismatch");
  }
  const int m = static_cast<int>(x.rows());
  Eigen::MatrixXd phi(model.feature_dim(), m);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < m; ++j) {
    phi.col(j) = (model.frozen_weights * x.row(j).transpose()).array().tanh();
  }
  return phi;
}

Eigen::VectorXd pseudo_inverse_apply(const Eigen::MatrixXd& phi,
                                     const Eigen::VectorXd& y) {
  const Eigen::Index d = phi.rows();
  const Eigen::Index m = phi.cols();
  if (m <= d) {
    throw UnderdeterminedError(
        fmt::format("pseudo_inverse_apply: m={} <= d={}", m, d));
  }
  if (y.size() != m) {
    throw DimensionMismatchError("pseudo_inverse_apply: y length mismatch");
  }
  const Eigen::MatrixXd gram = phi * phi.transpose() / static_cast<double>(m);
  const SpectralDecomposition decomp = sym_eig(gram);
  const double mu_max = decomp.eigenvalues.maxCoeff();
  const double mu_min = decomp.eigenvalues.minCoeff();
  if (mu_min <= 0.0 || mu_max / mu_min > 1e12) {
    throw RankDeficientError(
        fmt::format("pseudo_inverse_apply: Gram condition number {} > 1e12",
                    mu_min <= 0.0 ? INFINITY : mu_max / mu_min));
  }
  // (Phi Phi^T)^{-1} Phi y via the decomposition of the scaled Gram matrix.
  const Eigen::VectorXd rhs = phi * y / static_cast<double>(m);
  const Eigen::VectorXd proj = decomp.eigenvectors.transpose() * rhs;
  return decomp.eigenvectors * (proj.array() / decomp.eigenvalues.array()).matrix();
}

Eigen::VectorXd closed_form_theta(const Eigen::MatrixXd& phi,
                                  const Eigen::VectorXd& y_clean,
                                  const Eigen::VectorXd& z,
                                  const Eigen::VectorXd& theta0, double eta,
                                  double t) {
  const double m = static_cast<double>(phi.cols());
  const Eigen::VectorXd theta_star = pseudo_inverse_apply(phi, y_clean);
  const Eigen::VectorXd theta_noise = pseudo_inverse_apply(phi, z);
  const SpectralDecomposition decomp = sym_eig(phi * phi.transpose() / m);
  const Eigen::MatrixXd decay = spectral_exp(decomp, -eta * t);
  return theta_star + decay * (theta0 - theta_star) +
         (Eigen::MatrixXd::Identity(phi.rows(), phi.rows()) - decay) * theta_noise;
}

Eigen::VectorXd flow_euler_oracle(const Eigen::MatrixXd& phi,
                                  const Eigen::VectorXd& y_mixed,
                                  const Eigen::VectorXd& theta0, double eta,
                                  double t_end, double dt) {
  const double m = static_cast<double>(phi.cols());
  // Drift in gradient form, -eta grad = (eta/m) Phi (y - Phi^T theta); the
  // d x d Gram and d-vector are precomputed once.
  const Eigen::MatrixXd gram = phi * phi.transpose() / m;
  const Eigen::VectorXd pull = phi * y_mixed / m;

  const double mu_max_proxy = gram.trace();  // cheap upper-bound surrogate
  if (dt * eta * mu_max_proxy >= 0.1) {
    // Trace over-estimates mu_max; re-check against the true spectral radius
    // before rejecting.
    const double mu_max = sym_eig(gram).eigenvalues.maxCoeff();
    if (dt * eta * mu_max >= 0.1) {
      throw StepTooLargeError(
          fmt::format("flow_euler_oracle: dt*eta*mu_max = {} >= 0.1",
                      dt * eta * mu_max));
    }
  }

  Eigen::VectorXd theta = theta0;
  double t = 0.0;
  while (t < t_end) {
    const double step = std::min(dt, t_end - t);
    theta += eta * step * (pull - gram * theta);
    t += step;
  }
  return theta;
}

Trajectory gd_trajectory(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y,
                         const Eigen::MatrixXd& test_phi,
                         const Eigen::VectorXd& test_y,
                         const Eigen::VectorXd& theta0, const GdOptions& options) {
  const double m = static_cast<double>(phi.cols());
  const double test_m = static_cast<double>(test_phi.cols());

  Trajectory traj;
  traj.times.reserve(options.epochs);
  Eigen::VectorXd theta = theta0;
  for (int epoch = 1; epoch <= options.epochs; ++epoch) {
    const Eigen::VectorXd grad = phi * (phi.transpose() * theta - y) / m;
    theta -= options.eta * grad;

    const double train = (phi.transpose() * theta - y).squaredNorm() / m;
    if (train > 1e12) {
      throw DivergedError(
          fmt::format("gd_trajectory: train risk {} at epoch {}", train, epoch));
    }
    traj.times.push_back(static_cast<double>(epoch));
    traj.train_risk.push_back(train);
    traj.test_risk.push_back((test_phi.transpose() * theta - test_y).squaredNorm() /
                             test_m);
    traj.gradient_norm.push_back(gradient_norm(phi, theta, y));
    if (options.keep_theta_history) traj.theta_history.push_back(theta);
  }
  traj.final_theta = theta;
  return traj;
}

McEstimate population_risk_mc_serial(const Eigen::VectorXd& theta,
                                     const RandomFeatureModel& model,
                                     const ScalarFunction& truth, int n_samples,
                                     RandomStream& rng) {
  const int d0 = model.input_dim();
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    Eigen::VectorXd x(d0);
    for (int k = 0; k < d0; ++k) x[k] = rng.normal();
    const double resid = theta.dot(model.features(x)) - truth(x);
    const double sq = resid * resid;
    sum += sq;
    sum_sq += sq * sq;
  }
  const double mean = sum / n_samples;
  const double var = std::max(0.0, sum_sq / n_samples - mean * mean);
  return {mean, std::sqrt(var / n_samples)};
}

McEstimate population_risk_mc(const Eigen::VectorXd& theta,
                              const RandomFeatureModel& model,
                              const ScalarFunction& truth, int n_samples,
                              RandomStream& rng) {
  // The stream stays single-owner: draw all inputs serially, parallelize only
  // the pure evaluation.
  const int d0 = model.input_dim();
  Eigen::MatrixXd x(n_samples, d0);
  for (int i = 0; i < n_samples; ++i) {
    for (int k = 0; k < d0; ++k) x(i, k) = rng.normal();
  }

  const int n_chunks = (n_samples + kChunk - 1) / kChunk;
  std::vector<double> partial_sum(n_chunks, 0.0), partial_sq(n_chunks, 0.0);
#pragma omp parallel for schedule(static)
  for (int chunk = 0; chunk < n_chunks; ++chunk) {
    const int lo = chunk * kChunk;
    const int hi = std::min(n_samples, lo + kChunk);
    double s = 0.0, sq = 0.0;
    for (int i = lo; i < hi; ++i) {
      const Eigen::VectorXd xi = x.row(i).transpose();
      const double resid = theta.dot(model.features(xi)) - truth(xi);
      const double r2 = resid * resid;
      s += r2;
      sq += r2 * r2;
    }
    partial_sum[chunk] = s;
    partial_sq[chunk] = sq;
  }
  double sum = 0.0, sum_sq = 0.0;
  for (int c = 0; c < n_chunks; ++c) {
    sum += partial_sum[c];
    sum_sq += partial_sq[c];
  }
  const double mean = sum / n_samples;
  const double var = std::max(0.0, sum_sq / n_samples - mean * mean);
  return {mean, std::sqrt(var / n_samples)};
}

RiskBoundParams RiskBoundParams::make(double c1, double c2, double xi,
                                      Eigen::VectorXd theta_star,
                                      Eigen::VectorXd eigenvalues, double eta,
                                      double r_star) {
  RiskBoundParams p;
  p.c1 = c1;
  p.c2 = c2;
  p.xi = xi;
  p.theta_star = std::move(theta_star);
  p.eigenvalues = std::move(eigenvalues);
  p.eta = eta;
  p.r_star = r_star;
  p.zeta = 0.0;
  for (Eigen::Index k = 0; k < p.eigenvalues.size(); ++k) {
    p.zeta += std::max(xi * xi + p.theta_star[k] * p.theta_star[k],
                       c2 / p.eigenvalues[k]);
  }
  p.validate();
  return p;
}

void RiskBoundParams::validate() const {
  if (c1 <= 0.0 || c2 < 0.0 || eta <= 0.0 || r_star < 0.0) {
    throw NumericError("RiskBoundParams: c1 > 0, c2 >= 0, eta > 0, r* >= 0 required");
  }
  if (eigenvalues.size() != theta_star.size() || eigenvalues.minCoeff() <= 0.0) {
    throw NumericError("RiskBoundParams: eigenvalues must be positive and match theta*");
  }
  double z = 0.0;
  for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) {
    z += std::max(xi * xi + theta_star[k] * theta_star[k], c2 / eigenvalues[k]);
  }
  if (std::abs(z - zeta) > 1e-12 * std::max(1.0, std::abs(z))) {
    throw NumericError("RiskBoundParams: stored zeta does not match fields");
  }
}

double risk_bound(const RiskBoundParams& params, double t) {
  double sum = 0.0;
  for (Eigen::Index k = 0; k < params.eigenvalues.size(); ++k) {
    const double mu = params.eigenvalues[k];
    const double decay = std::exp(-params.eta * mu * t);
    sum += (params.xi * params.xi + params.theta_star[k] * params.theta_star[k]) *
               decay * decay +
           params.c2 / mu * (1.0 - decay) * (1.0 - decay);
  }
  return params.c1 * sum +
         2.0 * std::sqrt(params.c1 * params.r_star * params.zeta);
}

double bound_turning_point(const RiskBoundParams& params) {
  if (params.c2 <= 0.0) {
    // No noise term: the bound is monotone decreasing, minimum at the bracket end.
    return 50.0 / (params.eta * params.eigenvalues.minCoeff());
  }
  const double t_max = 50.0 / (params.eta * params.eigenvalues.minCoeff());
  auto f = [&](double t) { return risk_bound(params, t); };

  // Unimodality pre-scan on a dense grid.
  const int grid = 512;
  std::vector<double> values(grid + 1);
  for (int i = 0; i <= grid; ++i) values[i] = f(t_max * i / grid);
  std::vector<int> minima;
  for (int i = 1; i < grid; ++i) {
    if (values[i] < values[i - 1] && values[i] <= values[i + 1]) minima.push_back(i);
  }
  if (minima.size() > 1) {
    std::string where;
    for (int i : minima) where += fmt::format(" t={}", t_max * i / grid);
    throw NotUnimodalError("bound_turning_point: multiple local minima at" + where);
  }
  if (minima.empty()) {
    return values.front() <= values.back() ? 0.0 : t_max;
  }
  const double lo = t_max * (minima[0] - 1) / grid;
  const double hi = t_max * (minima[0] + 1) / grid;
  return golden_section_min(f, lo, hi, 1e-6).x;
}

double gradient_norm(const Eigen::MatrixXd& phi, const Eigen::VectorXd& theta,
                     const Eigen::VectorXd& y) {
  const double m = static_cast<double>(phi.cols());
  return (phi * (phi.transpose() * theta - y) / m).norm();
}

}  // namespace mixdyn
