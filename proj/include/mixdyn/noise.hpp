#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <vector>

#include "mixdyn/mixup.hpp"

namespace mixdyn {

/// Evaluable ground-truth conditional P(Y=j | X=x) from a small set of
/// closed-form families, so label-noise claims can be brute-forced.
class GroundTruthConditional {
 public:
  /// Softmax over the logits W x.
  static GroundTruthConditional linear_softmax(const Eigen::MatrixXd& weights);

  /// One-hot by thresholding the first coordinate: region k is
  /// [boundaries[k-1], boundaries[k]) and maps to region_classes[k].
  static GroundTruthConditional piecewise_1d(const std::vector<double>& boundaries,
                                             const std::vector<int>& region_classes,
                                             int class_count);

  /// f_j(x) proportional to exp(-|x - center_j|^2 / (2 h^2)).
  static GroundTruthConditional radial_posterior(const Eigen::MatrixXd& centers,
                                                 double bandwidth);

  /// f(x) = A x + b, entrywise linear in x. Only valid where the output is a
  /// distribution; used for the linear-conditional special case.
  static GroundTruthConditional affine(const Eigen::MatrixXd& a,
                                       const Eigen::VectorXd& b);

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const;
  int class_count() const { return class_count_; }

 private:
  GroundTruthConditional() = default;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> eval_;
  int class_count_ = 0;
};

enum class NoiseCase { SamePair, CrossPair, Intrusion };

enum class CoefficientOrder { AsPrinted, Matched };

struct NoiseReport {
  double tv = 0.0;
  double sup_bound = 0.0;
  int mixup_hard_label = 0;
  int truth_hard_label = 0;
};

Eigen::VectorXd mixup_conditional(const GroundTruthConditional& f,
                                  const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& x2, double lambda);

/// Half-L1 total variation between two discrete distributions.
double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

NoiseReport noise_lower_bound(const GroundTruthConditional& f,
                              const Eigen::VectorXd& x, const Eigen::VectorXd& x2,
                              double lambda,
                              CoefficientOrder order = CoefficientOrder::Matched);

/// (truth hard label, mixup hard label); argmax ties break to the lowest index.
std::pair<int, int> hard_labels(const GroundTruthConditional& f,
                                const Eigen::VectorXd& x, const Eigen::VectorXd& x2,
                                double lambda);

NoiseCase classify_case(int y, int y2, int truth_hard);

struct NoisyFractionResult {
  double fraction = 0.0;
  long same_pair = 0;
  long cross_pair = 0;
  long intrusion = 0;
};

/// Exhaustive enumeration over all n^2 ordered pairs (self-pairs included).
NoisyFractionResult noisy_fraction(const ClassificationSet& data,
                                   const GroundTruthConditional& f, double lambda);
NoisyFractionResult noisy_fraction_serial(const ClassificationSet& data,
                                          const GroundTruthConditional& f,
                                          double lambda);

/// Z = lambda f(x) + (1-lambda) f(x2) - f(lambda x + (1-lambda) x2).
double regression_noise(const std::function<double(const Eigen::VectorXd&)>& f,
                        const Eigen::VectorXd& x, const Eigen::VectorXd& x2,
                        double lambda);

}  // namespace mixdyn
