#include "mixdyn/teacher_student.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/core.h>

#include "mixdyn/errors.hpp"

namespace mixdyn {

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, double stddev, RandomStream& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = stddev * rng.normal();
  }
  return m;
}

struct MixedBatch {
  Eigen::MatrixXd phi;  // d x m
  Eigen::VectorXd y;
};

MixedBatch mix_all_pairs(const RandomFeatureModel& model, const RegressionData& data,
                         double lambda) {
  const int n = static_cast<int>(data.x.rows());
  Eigen::MatrixXd mixed_x(n * n, data.x.cols());
  Eigen::VectorXd mixed_y(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      mixed_x.row(i * n + j) = lambda * data.x.row(i) + (1.0 - lambda) * data.x.row(j);
      mixed_y[i * n + j] = lambda * data.y[i] + (1.0 - lambda) * data.y[j];
    }
  }
  return {feature_matrix(model, mixed_x), mixed_y};
}

MixedBatch mix_sampled_pairs(const RandomFeatureModel& model,
                             const RegressionData& data, double lambda,
                             RandomStream& rng) {
  const int n = static_cast<int>(data.x.rows());
  Eigen::MatrixXd mixed_x(n, data.x.cols());
  Eigen::VectorXd mixed_y(n);
  for (int k = 0; k < n; ++k) {
    const int i = static_cast<int>(rng.next_u64() % n);
    const int j = static_cast<int>(rng.next_u64() % n);
    mixed_x.row(k) = lambda * data.x.row(i) + (1.0 - lambda) * data.x.row(j);
    mixed_y[k] = lambda * data.y[i] + (1.0 - lambda) * data.y[j];
  }
  return {feature_matrix(model, mixed_x), mixed_y};
}

}  // namespace

TeacherNetwork make_teacher(RandomStream& rng) {
  TeacherNetwork t;
  t.w1 = random_matrix(5, 10, 1.0, rng);
  t.w2 = random_matrix(1, 5, 1.0, rng);
  return t;
}

RegressionData generate_dataset(const TeacherNetwork& teacher, int n,
                                RandomStream& rng) {
  const int d0 = static_cast<int>(teacher.w1.cols());
  RegressionData data;
  data.x = random_matrix(n, d0, 1.0, rng);
  data.y.resize(n);
  for (int i = 0; i < n; ++i) data.y[i] = teacher(data.x.row(i).transpose());
  return data;
}

Trajectory run_experiment(const ExperimentConfig& config) {
  RandomStream rng(config.seed);
  const TeacherNetwork teacher = make_teacher(rng);
  const RegressionData data = generate_dataset(teacher, config.n, rng);

  RandomFeatureModel model;
  model.frozen_weights =
      random_matrix(config.d, config.d0, 1.0 / std::sqrt(config.d0), rng);
  model.theta = Eigen::VectorXd::Zero(config.d);
  if (config.theta_init_std > 0.0) {
    for (int k = 0; k < config.d; ++k) {
      model.theta[k] = config.theta_init_std * rng.normal();
    }
  }

  RegressionData test;
  test.x = random_matrix(config.test_size, config.d0, 1.0, rng);
  test.y.resize(config.test_size);
  for (int i = 0; i < config.test_size; ++i) {
    test.y[i] = teacher(test.x.row(i).transpose());
  }
  const Eigen::MatrixXd test_phi = feature_matrix(model, test.x);

  const Eigen::MatrixXd erm_phi = feature_matrix(model, data.x);

  // An all-pairs fixed-lambda batch never changes, so it is built once; the
  // sampled-pairs and Beta modes rebuild per epoch.
  MixedBatch fixed_batch;
  if (config.mode == TrainMode::MixupFixed && !config.sampled_pairs) {
    fixed_batch = mix_all_pairs(model, data, config.lambda);
  }

  Trajectory traj;
  traj.metadata = fmt::format(
      "mode={} n={} d={} d0={} eta={} epochs={} test_size={} seed={} "
      "theta_init_std={} sampled_pairs={} rng={}",
      static_cast<int>(config.mode), config.n, config.d, config.d0, config.eta,
      config.epochs, config.test_size, config.seed, config.theta_init_std,
      config.sampled_pairs, RandomStream::kAlgorithm);

  Eigen::VectorXd theta = model.theta;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const bool erm_phase =
        config.mode == TrainMode::Erm ||
        (config.mode == TrainMode::Switch && epoch > config.switch_epoch);

    const Eigen::MatrixXd* phi = nullptr;
    const Eigen::VectorXd* y = nullptr;
    MixedBatch epoch_batch;
    if (erm_phase) {
      phi = &erm_phi;
      y = &data.y;
    } else if (config.mode == TrainMode::MixupFixed && !config.sampled_pairs) {
      phi = &fixed_batch.phi;
      y = &fixed_batch.y;
    } else {
      // MixupBeta, or the Mixup phase of Switch: one fresh lambda per epoch.
      const double lam =
          config.mode == TrainMode::MixupFixed
              ? config.lambda
              : (config.alpha == 1.0 ? rng.uniform()
                                     : rng.beta(config.alpha, config.alpha));
      epoch_batch = config.sampled_pairs
                        ? mix_sampled_pairs(model, data, lam, rng)
                        : mix_all_pairs(model, data, lam);
      phi = &epoch_batch.phi;
      y = &epoch_batch.y;
    }

    const double m = static_cast<double>(phi->cols());
    const Eigen::VectorXd grad = (*phi) * (phi->transpose() * theta - *y) / m;
    theta -= config.eta * grad;

    const double train = (phi->transpose() * theta - *y).squaredNorm() / m;
    if (train > 1e12) {
      throw DivergedError(fmt::format("run_experiment: diverged at epoch {}", epoch));
    }
    traj.times.push_back(static_cast<double>(epoch));
    traj.train_risk.push_back(train);
    traj.test_risk.push_back(
        (test_phi.transpose() * theta - test.y).squaredNorm() / config.test_size);
    traj.gradient_norm.push_back(gradient_norm(*phi, theta, *y));
  }
  traj.final_theta = theta;
  return traj;
}

int detect_turning_point(const std::vector<double>& test_risk, int window) {
  const int n = static_cast<int>(test_risk.size());
  if (window < 1 || n < window) {
    throw SeriesTooShortError(
        fmt::format("detect_turning_point: series length {} < window {}", n, window));
  }
  const int half = window / 2;
  int best = 0;
  double best_value = INFINITY;
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i + half);
    double avg = 0.0;
    for (int k = lo; k <= hi; ++k) avg += test_risk[k];
    avg /= (hi - lo + 1);
    if (avg < best_value) {
      best_value = avg;
      best = i;
    }
  }
  return best;
}

std::map<double, double> ablation_lambda(const std::vector<double>& lambdas,
                                         const ExperimentConfig& base,
                                         const std::vector<std::uint64_t>& seeds) {
  std::map<double, double> result;
  for (double lam : lambdas) {
    std::vector<double> turning;
    turning.resize(seeds.size());
#pragma omp parallel for schedule(dynamic)
    for (int s = 0; s < static_cast<int>(seeds.size()); ++s) {
      ExperimentConfig config = base;
      config.mode = TrainMode::MixupFixed;
      config.lambda = lam;
      config.seed = seeds[s];
      const Trajectory traj = run_experiment(config);
      turning[s] = static_cast<double>(detect_turning_point(traj.test_risk));
    }
    std::sort(turning.begin(), turning.end());
    const std::size_t k = turning.size();
    result[lam] =
        k % 2 == 1 ? turning[k / 2] : 0.5 * (turning[k / 2 - 1] + turning[k / 2]);
  }
  return result;
}

TrajectoryPair gradient_norm_comparison(const ExperimentConfig& config_mixup,
                                        const ExperimentConfig& config_switch) {
  if (config_mixup.seed != config_switch.seed) {
    throw ConfigError("gradient_norm_comparison: configs must share a seed");
  }
  TrajectoryPair pair;
  pair.mixup = run_experiment(config_mixup);
  pair.switched = run_experiment(config_switch);
  return pair;
}

}  // namespace mixdyn
