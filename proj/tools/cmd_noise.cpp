#include <fmt/core.h>

#include <algorithm>
#include <cmath>

#include "cli_common.hpp"
#include "mixdyn/errors.hpp"
#include "mixdyn/noise.hpp"
#include "mixdyn/random.hpp"

namespace mixdyn::cli {

namespace {

int argmax_index(const Eigen::VectorXd& p) {
  int best = 0;
  for (Eigen::Index j = 1; j < p.size(); ++j) {
    if (p[j] > p[best]) best = static_cast<int>(j);
  }
  return best;
}

}  // namespace

int cmd_noise(const CliOptions& options) {
  StrictConfig config(load_config(options.config_path));

  const std::string family = config.text("family", "piecewise");
  const int n = static_cast<int>(config.integer("n", 30));
  std::uint64_t seed = static_cast<std::uint64_t>(config.integer("seed", 0));
  const double lambda_min = config.number("lambda_min", 0.0);
  const double lambda_max = config.number("lambda_max", 1.0);
  const int lambda_points = static_cast<int>(config.integer("lambda_points", 11));

  if (n < 1) throw ConfigError("n must be positive");
  if (lambda_points < 1 || lambda_min < 0.0 || lambda_max > 1.0 ||
      lambda_min > lambda_max) {
    throw ConfigError("lambda grid must satisfy 0 <= lambda_min <= lambda_max <= 1");
  }
  if (options.seed_set) {
    seed = options.seed;
    config.override_echo("seed", seed);
  }

  ClassificationSet data;
  GroundTruthConditional f = [&]() -> GroundTruthConditional {
    if (family == "piecewise") {
      const std::vector<double> boundaries =
          config.number_list("boundaries", {0.0});
      std::vector<int> region_classes;
      for (long c : config.integer_list(
               "region_classes",
               std::vector<long>(boundaries.size() + 1, 0))) {
        region_classes.push_back(static_cast<int>(c));
      }
      if (!config.has("region_classes")) {
        // Default: regions alternate 0,1,0,1,...
        for (std::size_t r = 0; r < region_classes.size(); ++r) {
          region_classes[r] = static_cast<int>(r % 2);
        }
      }
      const int class_count = static_cast<int>(config.integer(
          "class_count",
          1 + *std::max_element(region_classes.begin(), region_classes.end())));
      const double x_min = config.number("x_min", -3.0);
      const double x_max = config.number("x_max", 3.0);
      if (x_max <= x_min) throw ConfigError("need x_min < x_max");
      data.features.resize(n, 1);
      for (int i = 0; i < n; ++i) {
        data.features(i, 0) =
            n == 1 ? x_min : x_min + (x_max - x_min) * i / (n - 1.0);
      }
      return GroundTruthConditional::piecewise_1d(boundaries, region_classes,
                                                  class_count);
    }
    if (family == "linear_softmax") {
      const int classes = static_cast<int>(config.integer("classes", 3));
      const int d0 = static_cast<int>(config.integer("d0", 2));
      if (classes < 2 || d0 < 1) throw ConfigError("need classes >= 2, d0 >= 1");
      RandomStream rng(seed);
      Eigen::MatrixXd w(classes, d0);
      for (int i = 0; i < classes; ++i) {
        for (int j = 0; j < d0; ++j) w(i, j) = rng.normal();
      }
      data.features.resize(n, d0);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d0; ++j) data.features(i, j) = rng.normal();
      }
      return GroundTruthConditional::linear_softmax(w);
    }
    if (family == "radial") {
      const int classes = static_cast<int>(config.integer("classes", 3));
      const int d0 = static_cast<int>(config.integer("d0", 2));
      const double bandwidth = config.number("bandwidth", 1.0);
      if (classes < 2 || d0 < 1) throw ConfigError("need classes >= 2, d0 >= 1");
      if (bandwidth <= 0.0) throw ConfigError("bandwidth must be positive");
      RandomStream rng(seed);
      Eigen::MatrixXd centers(classes, d0);
      for (int i = 0; i < classes; ++i) {
        for (int j = 0; j < d0; ++j) centers(i, j) = 3.0 * rng.normal();
      }
      data.features.resize(n, d0);
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d0; ++j) data.features(i, j) = 3.0 * rng.normal();
      }
      return GroundTruthConditional::radial_posterior(centers, bandwidth);
    }
    throw ConfigError(fmt::format(
        "unknown family '{}'; expected piecewise, linear_softmax or radial",
        family));
  }();
  config.reject_unknown();

  data.class_count = f.class_count();
  data.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    data.labels[i] = argmax_index(f(data.features.row(i).transpose()));
  }

  ensure_out_dir(options.out_dir);
  Csv csv(options.out_dir, "noise.csv");
  csv.row({"lambda", "noisy_fraction", "same_pair", "cross_pair", "intrusion"});
  for (int k = 0; k < lambda_points; ++k) {
    const double lambda =
        lambda_points == 1
            ? lambda_min
            : lambda_min + (lambda_max - lambda_min) * k / (lambda_points - 1.0);
    const NoisyFractionResult result = noisy_fraction(data, f, lambda);
    csv.row({Csv::cell(lambda), Csv::cell(result.fraction),
             Csv::cell(result.same_pair), Csv::cell(result.cross_pair),
             Csv::cell(result.intrusion)});
  }

  write_manifest(options, "noise", config.echo(), seed, {csv.filename()});
  return 0;
}

}  // namespace mixdyn::cli
