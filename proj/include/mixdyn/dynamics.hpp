#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "mixdyn/mixup.hpp"
#include "mixdyn/numerics.hpp"
#include "mixdyn/random.hpp"

namespace mixdyn {

using ScalarFunction = std::function<double(const Eigen::VectorXd&)>;

/// Frozen tanh feature map phi(x) = tanh(W x) with a trainable linear head.
struct RandomFeatureModel {
  Eigen::MatrixXd frozen_weights;  // d x d0
  Eigen::VectorXd theta;           // d

  int feature_dim() const { return static_cast<int>(frozen_weights.rows()); }
  int input_dim() const { return static_cast<int>(frozen_weights.cols()); }
  Eigen::VectorXd features(const Eigen::VectorXd& x) const {
    return (frozen_weights * x).array().tanh();
  }
  double predict(const Eigen::VectorXd& x) const { return theta.dot(features(x)); }
};

struct SyntheticRegressionSet {
  Eigen::MatrixXd features;      // m x d0
  Eigen::VectorXd clean_targets; // f(x_mix)
  Eigen::VectorXd mixed_targets; // lambda y + (1-lambda) y'
  Eigen::VectorXd noise;         // mixed - clean
  Eigen::VectorXd lambdas;

  int size() const { return static_cast<int>(lambdas.size()); }
};

/// All n^2 ordered pairs of X mixed with one lambda; targets come from the
/// stored labels, clean targets from the ground truth at the mixed input.
SyntheticRegressionSet build_synthetic_regression(const Eigen::MatrixXd& x,
                                                  const Eigen::VectorXd& y,
                                                  const ScalarFunction& truth,
                                                  double lambda);

/// Column j is tanh(W x_j); X is m x d0 row-major points.
Eigen::MatrixXd feature_matrix(const RandomFeatureModel& model,
                               const Eigen::MatrixXd& x);
Eigen::MatrixXd feature_matrix_serial(const RandomFeatureModel& model,
                                      const Eigen::MatrixXd& x);

/// (Phi Phi^T)^{-1} Phi y, the least-squares head for m > d. Throws
/// UnderdeterminedError when m <= d and RankDeficientError when the Gram
/// condition number exceeds 1e12.
Eigen::VectorXd pseudo_inverse_apply(const Eigen::MatrixXd& phi,
                                     const Eigen::VectorXd& y);

/// Closed-form gradient-flow iterate:
/// theta* + (theta0 - theta*) e^{-(eta/m) Phi Phi^T t}
///        + (I - e^{-(eta/m) Phi Phi^T t}) theta_noise.
Eigen::VectorXd closed_form_theta(const Eigen::MatrixXd& phi,
                                  const Eigen::VectorXd& y_clean,
                                  const Eigen::VectorXd& z,
                                  const Eigen::VectorXd& theta0, double eta,
                                  double t);

/// Explicit-Euler integration of the gradient flow; independent check of the
/// closed form (no eigendecomposition, no pseudoinverse).
Eigen::VectorXd flow_euler_oracle(const Eigen::MatrixXd& phi,
                                  const Eigen::VectorXd& y_mixed,
                                  const Eigen::VectorXd& theta0, double eta,
                                  double t_end, double dt);

struct Trajectory {
  std::vector<double> times;
  std::vector<double> train_risk;
  std::vector<double> test_risk;
  std::vector<double> gradient_norm;
  std::vector<Eigen::VectorXd> theta_history;  // optional, may be empty
  Eigen::VectorXd final_theta;
  std::string metadata;
};

struct GdOptions {
  double eta = 0.1;
  int epochs = 0;
  bool keep_theta_history = false;
};

/// Full-batch gradient descent on (1/2m)|theta^T Phi - y^T|^2 against a fixed
/// synthetic set; test risk is evaluated on the given probe featurization.
Trajectory gd_trajectory(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y,
                         const Eigen::MatrixXd& test_phi,
                         const Eigen::VectorXd& test_y,
                         const Eigen::VectorXd& theta0, const GdOptions& options);

struct McEstimate {
  double mean = 0.0;
  double std_err = 0.0;
};

/// Monte-Carlo estimate of E|theta^T phi(X) - truth(X)|^2 with X ~ N(0, I).
McEstimate population_risk_mc(const Eigen::VectorXd& theta,
                              const RandomFeatureModel& model,
                              const ScalarFunction& truth, int n_samples,
                              RandomStream& rng);
McEstimate population_risk_mc_serial(const Eigen::VectorXd& theta,
                                     const RandomFeatureModel& model,
                                     const ScalarFunction& truth, int n_samples,
                                     RandomStream& rng);

struct RiskBoundParams {
  double c1 = 0.0;               // bound on 2 |phi(X)|^2
  double c2 = 0.0;               // bound on Z^2
  double xi = 0.0;               // initialization stddev
  Eigen::VectorXd theta_star;
  Eigen::VectorXd eigenvalues;   // mu_k of (1/m) Phi Phi^T, all > 0
  double eta = 0.0;
  double r_star = 0.0;
  double zeta = 0.0;             // sum_k max{xi^2 + theta*_k^2, c2 / mu_k}

  static RiskBoundParams make(double c1, double c2, double xi,
                              Eigen::VectorXd theta_star,
                              Eigen::VectorXd eigenvalues, double eta,
                              double r_star);
  void validate() const;
};

/// Population-risk upper bound on R_t - R*.
double risk_bound(const RiskBoundParams& params, double t);

/// argmin over t >= 0 of risk_bound on [0, 50/(eta mu_min)], golden-section
/// after a unimodality pre-scan.
double bound_turning_point(const RiskBoundParams& params);

/// Norm of the gradient of (1/2m)|theta^T Phi - y^T|^2.
double gradient_norm(const Eigen::MatrixXd& phi, const Eigen::VectorXd& theta,
                     const Eigen::VectorXd& y);

}  // namespace mixdyn
