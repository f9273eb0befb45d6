#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

#include "mixdyn/random.hpp"

namespace mixdyn {

struct ClassificationSet {
  Eigen::MatrixXd features;   // n x d0
  std::vector<int> labels;    // class tokens in {0..C-1}
  int class_count = 0;

  int size() const { return static_cast<int>(labels.size()); }
  bool is_balanced() const;
};

enum class LambdaMode { FixedLambda, BetaPerEpoch, Erm };

struct MixupConfig {
  double alpha = 1.0;            // Beta parameter; 0 is the ERM sentinel
  LambdaMode mode = LambdaMode::BetaPerEpoch;
  double fixed_lambda = 0.5;     // used by FixedLambda
};

struct SyntheticClassificationSet {
  Eigen::MatrixXd features;                  // m x d0
  Eigen::MatrixXd soft_labels;               // m x C, row-stochastic
  std::vector<std::pair<int, int>> pair_index;
  Eigen::VectorXd lambdas;

  int size() const { return static_cast<int>(lambdas.size()); }
};

std::pair<Eigen::VectorXd, Eigen::VectorXd> mix_pair(const Eigen::VectorXd& x,
                                                     const Eigen::VectorXd& x2,
                                                     const Eigen::VectorXd& y,
                                                     const Eigen::VectorXd& y2,
                                                     double lambda);

std::pair<Eigen::VectorXd, double> mix_pair(const Eigen::VectorXd& x,
                                            const Eigen::VectorXd& x2, double y,
                                            double y2, double lambda);

/// All n^2 ordered pairs, self-pairs included, mixed with one fixed lambda.
SyntheticClassificationSet build_synthetic_fixed(const ClassificationSet& data,
                                                 double lambda);

double sample_lambda(const MixupConfig& config, RandomStream& rng);

double entropy(const Eigen::VectorXd& p);
double kl_divergence(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

/// Cross entropy in nats; throws SupportViolationError when p_j = 0 while
/// y_j > 0.
double cross_entropy(const Eigen::VectorXd& y, const Eigen::VectorXd& p);

/// (C-1)/(2C), the Mixup cross-entropy floor for a balanced C-class set.
double mixup_ce_lower_bound(int class_count);

/// E_{lambda~Beta(alpha,alpha)} of the pair entropy
/// -[lambda ln lambda + (1-lambda) ln(1-lambda)], by quadrature.
double expected_pair_entropy(double alpha, int nodes = 64);

using Predictor = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

/// Mean cross entropy of the predictor over the synthetic set.
double empirical_mixup_loss(const Predictor& predictor,
                            const SyntheticClassificationSet& synth);
double empirical_mixup_loss_serial(const Predictor& predictor,
                                   const SyntheticClassificationSet& synth);

}  // namespace mixdyn
