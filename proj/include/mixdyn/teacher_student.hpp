#pragma once

#include <Eigen/Dense>
#include <map>
#include <vector>

#include "mixdyn/dynamics.hpp"
#include "mixdyn/random.hpp"

namespace mixdyn {

/// Two-layer tanh teacher: x in R^10 -> w2 tanh(w1 x), hidden width 5.
struct TeacherNetwork {
  Eigen::MatrixXd w1;  // 5 x 10
  Eigen::RowVectorXd w2;  // 1 x 5

  double operator()(const Eigen::VectorXd& x) const {
    return w2 * (w1 * x).array().tanh().matrix();
  }
};

enum class TrainMode { Erm, MixupFixed, MixupBeta, Switch };

struct ExperimentConfig {
  TrainMode mode = TrainMode::Erm;
  double lambda = 0.5;       // MixupFixed
  double alpha = 1.0;        // MixupBeta / Switch
  int switch_epoch = 0;      // Switch
  int n = 20;
  int d = 100;
  int d0 = 10;
  double eta = 0.1;
  int epochs = 4000;
  int test_size = 2000;
  double theta_init_std = 0.0;
  std::uint64_t seed = 0;
  /// "all": all n^2 ordered pairs per epoch (default). "sampled": n pairs
  /// drawn per epoch, matching an ERM-sized batch.
  bool sampled_pairs = false;
};

struct RegressionData {
  Eigen::MatrixXd x;  // n x d0
  Eigen::VectorXd y;
};

TeacherNetwork make_teacher(RandomStream& rng);

RegressionData generate_dataset(const TeacherNetwork& teacher, int n,
                                RandomStream& rng);

Trajectory run_experiment(const ExperimentConfig& config);

/// Index of the minimum of the centered moving average (default window 5),
/// earliest on ties.
int detect_turning_point(const std::vector<double>& test_risk, int window = 5);

/// Median detected turning epoch per lambda over the given seeds.
std::map<double, double> ablation_lambda(const std::vector<double>& lambdas,
                                         const ExperimentConfig& base,
                                         const std::vector<std::uint64_t>& seeds);

struct TrajectoryPair {
  Trajectory mixup;
  Trajectory switched;
};

TrajectoryPair gradient_norm_comparison(const ExperimentConfig& config_mixup,
                                        const ExperimentConfig& config_switch);

}  // namespace mixdyn
