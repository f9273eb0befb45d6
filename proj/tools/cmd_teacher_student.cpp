#include <fmt/core.h>

#include <map>

#include "cli_common.hpp"
#include "mixdyn/errors.hpp"
#include "mixdyn/teacher_student.hpp"

namespace mixdyn::cli {

namespace {

TrainMode parse_mode(const std::string& name) {
  static const std::map<std::string, TrainMode> table{
      {"erm", TrainMode::Erm},
      {"mixup_fixed", TrainMode::MixupFixed},
      {"mixup_beta", TrainMode::MixupBeta},
      {"switch", TrainMode::Switch}};
  const auto it = table.find(name);
  if (it == table.end()) {
    throw ConfigError(fmt::format(
        "unknown mode '{}'; expected erm, mixup_fixed, mixup_beta or switch",
        name));
  }
  return it->second;
}

}  // namespace

int cmd_teacher_student(const CliOptions& options) {
  StrictConfig config(load_config(options.config_path));

  const std::vector<std::string> modes = config.text_list(
      "modes", {"erm", "mixup_fixed", "mixup_beta"});
  ExperimentConfig base;
  base.lambda = config.number("lambda", 0.5);
  base.alpha = config.number("alpha", 1.0);
  base.switch_epoch = static_cast<int>(config.integer("switch_epoch", 0));
  base.n = static_cast<int>(config.integer("n", 20));
  base.d = static_cast<int>(config.integer("d", 100));
  base.d0 = static_cast<int>(config.integer("d0", 10));
  base.eta = config.number("eta", 0.1);
  base.epochs = static_cast<int>(config.integer("epochs", 4000));
  base.test_size = static_cast<int>(config.integer("test_size", 2000));
  base.theta_init_std = config.number("theta_init_std", 0.0);
  base.seed = static_cast<std::uint64_t>(config.integer("seed", 0));
  base.sampled_pairs = config.boolean("sampled_pairs", false);
  const int window = static_cast<int>(config.integer("turning_window", 5));
  config.reject_unknown();

  if (base.d0 != 10) {
    throw ConfigError("d0 must be 10: the teacher input width is fixed");
  }
  if (base.n < 1 || base.d < 1 || base.epochs < 0 || base.test_size < 1) {
    throw ConfigError("n, d, test_size must be positive and epochs nonnegative");
  }
  if (window < 1) throw ConfigError("turning_window must be positive");
  for (const std::string& name : modes) parse_mode(name);

  if (options.seed_set) {
    base.seed = options.seed;
    config.override_echo("seed", base.seed);
  }
  ensure_out_dir(options.out_dir);

  std::vector<std::string> outputs;
  Csv summary(options.out_dir, "summary.csv");
  summary.row({"mode", "turning_epoch"});
  outputs.push_back(summary.filename());

  for (const std::string& name : modes) {
    ExperimentConfig run_config = base;
    run_config.mode = parse_mode(name);
    Csv csv(options.out_dir, name + ".csv");
    csv.row({"epoch", "train_mse", "test_mse", "grad_norm"});
    outputs.push_back(csv.filename());
    if (base.epochs == 0) continue;

    const Trajectory traj = run_experiment(run_config);
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
      csv.row({Csv::cell(static_cast<long>(traj.times[i])),
               Csv::cell(traj.train_risk[i]), Csv::cell(traj.test_risk[i]),
               Csv::cell(traj.gradient_norm[i])});
    }
    if (base.epochs >= window) {
      const int turn = detect_turning_point(traj.test_risk, window) + 1;
      summary.row({Csv::cell(name), Csv::cell(static_cast<long>(turn))});
    }
  }

  write_manifest(options, "teacher-student", config.echo(), base.seed, outputs);
  return 0;
}

}  // namespace mixdyn::cli
