#include <fmt/core.h>

#include <cmath>

#include "cli_common.hpp"
#include "mixdyn/dynamics.hpp"
#include "mixdyn/errors.hpp"
#include "mixdyn/numerics.hpp"
#include "mixdyn/teacher_student.hpp"

namespace mixdyn::cli {

int cmd_flow(const CliOptions& options) {
  StrictConfig config(load_config(options.config_path));

  const int n = static_cast<int>(config.integer("n", 15));
  const int d0 = static_cast<int>(config.integer("d0", 10));
  const int d = static_cast<int>(config.integer("d", 50));
  const double lambda = config.number("lambda", 0.5);
  const double eta = config.number("eta", 0.5);
  const double xi = config.number("xi", 0.0);
  std::uint64_t seed = static_cast<std::uint64_t>(config.integer("seed", 0));
  const double t_min = config.number("t_min", 0.01);
  const double t_max = config.number("t_max", 100.0);
  const int t_points = static_cast<int>(config.integer("t_points", 64));
  const int mc_samples = static_cast<int>(config.integer("mc_samples", 10000));
  const int theta0_draws = static_cast<int>(config.integer("theta0_draws", 32));
  const bool c2_given = config.has("c2");
  const double c2_config = config.number("c2", -1.0);
  const double c1_config = config.number("c1", -1.0);
  config.reject_unknown();

  if (d0 != 10) {
    throw ConfigError("d0 must be 10: the teacher input width is fixed");
  }
  if (n * n <= d) {
    throw UnderdeterminedError(
        fmt::format("flow requires m = n^2 > d, got n^2={} d={}", n * n, d));
  }
  if (lambda < 0.0 || lambda > 1.0) throw ConfigError("lambda must be in [0,1]");
  if (t_min <= 0.0 || t_max <= t_min) {
    throw ConfigError("need 0 < t_min < t_max");
  }
  if (t_points < 2 || mc_samples < 2 || theta0_draws < 1) {
    throw ConfigError("t_points, mc_samples, theta0_draws too small");
  }
  if (c2_given && c2_config < 0.0) throw ConfigError("c2 must be >= 0");
  if (options.seed_set) {
    seed = options.seed;
    config.override_echo("seed", seed);
  }
  ensure_out_dir(options.out_dir);

  RandomStream rng(seed);
  const TeacherNetwork teacher = make_teacher(rng);
  const RegressionData data = generate_dataset(teacher, n, rng);
  RandomFeatureModel model;
  model.frozen_weights.resize(d, d0);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d0; ++j) {
      model.frozen_weights(i, j) = rng.normal() / std::sqrt(d0);
    }
  }

  const ScalarFunction truth = [&teacher](const Eigen::VectorXd& x) {
    return teacher(x);
  };
  const SyntheticRegressionSet synth =
      build_synthetic_regression(data.x, data.y, truth, lambda);
  const int m = synth.size();

  // c2 = 0 in the config selects the noise-free instance.
  const bool zero_noise = c2_given && c2_config == 0.0;
  const Eigen::VectorXd z =
      zero_noise ? Eigen::VectorXd::Zero(m) : synth.noise;
  const double c2 =
      c2_given ? c2_config : z.cwiseAbs2().maxCoeff();
  const double c1 = c1_config > 0.0 ? c1_config : 2.0 * d;

  const Eigen::MatrixXd phi = feature_matrix(model, synth.features);
  const Eigen::VectorXd theta_star = pseudo_inverse_apply(phi, synth.clean_targets);
  const Eigen::VectorXd theta_noise =
      zero_noise ? Eigen::VectorXd::Zero(d) : pseudo_inverse_apply(phi, z);
  const SpectralDecomposition decomp = sym_eig(phi * phi.transpose() / m);
  const Eigen::VectorXd& mu = decomp.eigenvalues;
  const Eigen::MatrixXd& v = decomp.eigenvectors;

  // theta0 draws with standard deviation xi around zero.
  Eigen::MatrixXd theta0(d, theta0_draws);
  for (int k = 0; k < theta0_draws; ++k) {
    for (int i = 0; i < d; ++i) theta0(i, k) = xi * rng.normal();
  }

  // One shared Monte-Carlo test set for every (t, draw) pair.
  Eigen::MatrixXd test_x(mc_samples, d0);
  for (int i = 0; i < mc_samples; ++i) {
    for (int j = 0; j < d0; ++j) test_x(i, j) = rng.normal();
  }
  const Eigen::MatrixXd test_phi = feature_matrix(model, test_x);
  Eigen::VectorXd test_y(mc_samples);
  for (int i = 0; i < mc_samples; ++i) test_y[i] = teacher(test_x.row(i).transpose());

  auto mc_risk_of = [&](const Eigen::VectorXd& theta) {
    const Eigen::ArrayXd sq =
        (test_phi.transpose() * theta - test_y).array().square();
    const double mean = sq.mean();
    const double var = std::max(0.0, (sq - mean).square().mean());
    return std::pair<double, double>(mean, std::sqrt(var / mc_samples));
  };

  const auto [r_star, r_star_se] = mc_risk_of(theta_star);

  const RiskBoundParams params = RiskBoundParams::make(
      c1, c2, xi, v.transpose() * theta_star, mu, eta, r_star);

  // Eigen-coordinate offsets: theta_t = theta* + theta_noise
  //   + V diag(e^{-eta mu t}) (V^T theta0 - V^T theta* - V^T theta_noise).
  const Eigen::MatrixXd offsets =
      (v.transpose() * theta0).colwise() -
      (v.transpose() * (theta_star + theta_noise)).col(0).eval();
  const Eigen::VectorXd limit = theta_star + theta_noise;

  std::vector<double> grid;
  grid.push_back(0.0);
  for (int i = 0; i < t_points - 1; ++i) {
    const double frac =
        t_points == 2 ? 0.0 : static_cast<double>(i) / (t_points - 2);
    grid.push_back(t_min * std::pow(t_max / t_min, frac));
  }

  Csv csv(options.out_dir, "flow.csv");
  csv.row({"t", "theta_dist_to_star", "mc_risk", "mc_std_err", "risk_bound"});
  for (double t : grid) {
    const Eigen::ArrayXd decay = (-eta * t * mu.array()).exp();
    const Eigen::MatrixXd theta_t =
        (v * (offsets.array().colwise() * decay).matrix()).colwise() + limit;

    double mean_sum = 0.0, se_sq_sum = 0.0, mean_sq_sum = 0.0;
    for (int k = 0; k < theta0_draws; ++k) {
      const auto [mean, se] = mc_risk_of(theta_t.col(k));
      mean_sum += mean;
      mean_sq_sum += mean * mean;
      se_sq_sum += se * se;
    }
    const double mc_risk = mean_sum / theta0_draws;
    const double between =
        std::max(0.0, mean_sq_sum / theta0_draws - mc_risk * mc_risk);
    const double se = std::sqrt((se_sq_sum / theta0_draws + between) /
                                theta0_draws);

    // Mean-trajectory distance (theta0 = 0).
    const Eigen::VectorXd mean_offset =
        -(v.transpose() * (theta_star + theta_noise));
    const Eigen::VectorXd theta_mean =
        limit + v * (decay * mean_offset.array()).matrix();
    csv.row({Csv::cell(t), Csv::cell((theta_mean - theta_star).norm()),
             Csv::cell(mc_risk), Csv::cell(se),
             Csv::cell(risk_bound(params, t))});
  }

  config.override_echo("c1", c1);
  config.override_echo("c2", c2);
  write_manifest(options, "flow", config.echo(), seed, {csv.filename()});
  return 0;
}

}  // namespace mixdyn::cli
