#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mixdyn/errors.hpp"
#include "mixdyn/teacher_student.hpp"

using namespace mixdyn;

TEST_CASE("teacher network shape and bounds") {
  RandomStream rng(5);
  const TeacherNetwork teacher = make_teacher(rng);
  CHECK(teacher.w1.rows() == 5);
  CHECK(teacher.w1.cols() == 10);
  CHECK(teacher.w2.cols() == 5);
  CHECK(teacher(Eigen::VectorXd::Zero(10)) == 0.0);
  // tanh is bounded by 1, so |output| <= sum |w2_k|.
  const double cap = teacher.w2.cwiseAbs().sum();
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd x(10);
    for (int k = 0; k < 10; ++k) x[k] = 10.0 * rng.normal();
    CHECK(std::abs(teacher(x)) <= cap);
  }
}

TEST_CASE("generate_dataset labels come from the teacher") {
  RandomStream rng(6);
  const TeacherNetwork teacher = make_teacher(rng);
  const RegressionData data = generate_dataset(teacher, 20, rng);
  CHECK(data.x.rows() == 20);
  CHECK(data.x.cols() == 10);
  for (int i = 0; i < 20; ++i) {
    CHECK(data.y[i] == teacher(data.x.row(i).transpose()));
  }
}

TEST_CASE("run_experiment is bitwise deterministic") {
  ExperimentConfig config;
  config.mode = TrainMode::MixupBeta;
  config.epochs = 50;
  config.test_size = 200;
  config.seed = 42;
  const Trajectory a = run_experiment(config);
  const Trajectory b = run_experiment(config);
  REQUIRE(a.test_risk.size() == b.test_risk.size());
  for (std::size_t i = 0; i < a.test_risk.size(); ++i) {
    CHECK(a.test_risk[i] == b.test_risk[i]);
    CHECK(a.train_risk[i] == b.train_risk[i]);
    CHECK(a.gradient_norm[i] == b.gradient_norm[i]);
  }
  CHECK((a.final_theta - b.final_theta).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.metadata == b.metadata);
}

TEST_CASE("different seeds give different data") {
  ExperimentConfig config;
  config.epochs = 5;
  config.test_size = 100;
  config.seed = 1;
  const Trajectory a = run_experiment(config);
  config.seed = 2;
  const Trajectory b = run_experiment(config);
  CHECK(a.train_risk[0] != b.train_risk[0]);
}

TEST_CASE("overparameterized ERM interpolates") {
  ExperimentConfig config;
  config.mode = TrainMode::Erm;
  config.epochs = 20000;
  config.test_size = 100;
  config.seed = 3;
  const Trajectory traj = run_experiment(config);
  CHECK(traj.train_risk.back() <= 1e-8);
  CHECK(traj.gradient_norm.back() <= 1e-6);
  // Test risk settles: last-100-epoch range below 1% of its mean.
  double lo = INFINITY, hi = 0.0, sum = 0.0;
  for (std::size_t i = traj.test_risk.size() - 100; i < traj.test_risk.size(); ++i) {
    lo = std::min(lo, traj.test_risk[i]);
    hi = std::max(hi, traj.test_risk[i]);
    sum += traj.test_risk[i];
  }
  CHECK((hi - lo) / (sum / 100.0) <= 0.01);
}

TEST_CASE("fixed-lambda mixup shows a U-shaped test curve") {
  ExperimentConfig config;
  config.mode = TrainMode::MixupFixed;
  config.lambda = 0.5;
  config.epochs = 20000;
  config.seed = 1;
  const Trajectory traj = run_experiment(config);
  double min_risk = INFINITY;
  std::size_t argmin = 0;
  for (std::size_t i = 0; i < traj.test_risk.size(); ++i) {
    if (traj.test_risk[i] < min_risk) {
      min_risk = traj.test_risk[i];
      argmin = i;
    }
  }
  CHECK(argmin > 0);
  CHECK(argmin + 1 < traj.test_risk.size());
  CHECK(traj.test_risk.back() >= 1.3 * min_risk);
  // Mixup keeps a non-vanishing training residual: the noisy targets are not
  // realizable over all pairs.
  CHECK(traj.train_risk.back() > 1e-4);
}

TEST_CASE("mixup train risk is nonincreasing under fixed targets") {
  ExperimentConfig config;
  config.mode = TrainMode::MixupFixed;
  config.lambda = 0.5;
  config.epochs = 500;
  config.test_size = 100;
  config.seed = 7;
  const Trajectory traj = run_experiment(config);
  for (std::size_t i = 1; i < traj.train_risk.size(); ++i) {
    CHECK(traj.train_risk[i] <= traj.train_risk[i - 1] * (1.0 + 1e-12));
  }
}

TEST_CASE("detect_turning_point") {
  SUBCASE("V-shape finds the bottom") {
    std::vector<double> v{5, 4, 3, 2, 1, 2, 3, 4, 5};
    CHECK(detect_turning_point(v, 1) == 4);
    CHECK(detect_turning_point(v, 3) == 4);
  }
  SUBCASE("monotone decreasing ends at the last index") {
    std::vector<double> v{5, 4, 3, 2, 1};
    CHECK(detect_turning_point(v, 1) == 4);
  }
  SUBCASE("ties break to the earliest index") {
    std::vector<double> v{3, 1, 1, 1, 3};
    CHECK(detect_turning_point(v, 1) == 1);
  }
  SUBCASE("smoothing ignores a single spike") {
    std::vector<double> v{9, 8, 7, 6, 1, 6, 5, 4, 3.2, 3.0, 3.2, 4, 5};
    CHECK(detect_turning_point(v, 1) == 4);  // raw argmin is the spike
    CHECK(detect_turning_point(v, 5) == 9);  // smoothed argmin is the valley
  }
  SUBCASE("short series throws") {
    std::vector<double> v{1, 2};
    CHECK_THROWS_AS(detect_turning_point(v, 5), SeriesTooShortError);
  }
}

TEST_CASE("switch run matches the pure-mixup run before the switch") {
  ExperimentConfig mix;
  mix.mode = TrainMode::MixupBeta;
  mix.alpha = 1.0;
  mix.epochs = 60;
  mix.test_size = 100;
  mix.seed = 11;
  ExperimentConfig sw = mix;
  sw.mode = TrainMode::Switch;
  sw.switch_epoch = 30;
  const Trajectory a = run_experiment(mix);
  const Trajectory b = run_experiment(sw);
  for (int e = 0; e < 30; ++e) {
    CHECK(a.train_risk[e] == b.train_risk[e]);
    CHECK(a.test_risk[e] == b.test_risk[e]);
  }
  CHECK(a.train_risk[35] != b.train_risk[35]);
}

TEST_CASE("switch with epoch 0 behaves like ERM") {
  ExperimentConfig sw;
  sw.mode = TrainMode::Switch;
  sw.switch_epoch = 0;
  sw.epochs = 40;
  sw.test_size = 100;
  sw.seed = 13;
  ExperimentConfig erm = sw;
  erm.mode = TrainMode::Erm;
  const Trajectory a = run_experiment(sw);
  const Trajectory b = run_experiment(erm);
  for (int e = 0; e < 40; ++e) CHECK(a.train_risk[e] == b.train_risk[e]);
}

TEST_CASE("sampled-pairs mode uses n-sized batches and stays deterministic") {
  ExperimentConfig config;
  config.mode = TrainMode::MixupFixed;
  config.lambda = 0.5;
  config.sampled_pairs = true;
  config.epochs = 100;
  config.test_size = 100;
  config.seed = 17;
  const Trajectory a = run_experiment(config);
  const Trajectory b = run_experiment(config);
  for (int e = 0; e < 100; ++e) CHECK(a.train_risk[e] == b.train_risk[e]);
  // Unlike the all-pairs fixed batch, resampled batches break monotonicity of
  // the recorded train risk with overwhelming probability.
  bool increased = false;
  for (int e = 1; e < 100; ++e) {
    if (a.train_risk[e] > a.train_risk[e - 1]) increased = true;
  }
  CHECK(increased);
}

TEST_CASE("ablation_lambda returns a median per lambda") {
  ExperimentConfig base;
  base.epochs = 300;
  base.test_size = 200;
  base.sampled_pairs = true;
  const auto result = ablation_lambda({0.2, 0.5}, base, {1, 2, 3});
  REQUIRE(result.size() == 2);
  for (const auto& [lam, median] : result) {
    CHECK(median >= 0.0);
    CHECK(median < 300.0);
  }
  const auto again = ablation_lambda({0.2, 0.5}, base, {1, 2, 3});
  CHECK(result.at(0.5) == again.at(0.5));
}

TEST_CASE("gradient_norm_comparison requires paired seeds") {
  ExperimentConfig a, b;
  a.seed = 1;
  b.seed = 2;
  CHECK_THROWS_AS(gradient_norm_comparison(a, b), ConfigError);
}

TEST_CASE("post-switch gradient norm collapses; pure mixup's does not") {
  // Switch late enough that the clean pattern is already fit.
  ExperimentConfig mix;
  mix.mode = TrainMode::MixupBeta;
  mix.alpha = 1.0;
  mix.epochs = 6000;
  mix.test_size = 200;
  mix.seed = 1;
  ExperimentConfig sw = mix;
  sw.mode = TrainMode::Switch;
  sw.switch_epoch = 4000;
  const TrajectoryPair pair = gradient_norm_comparison(mix, sw);
  // The first ERM gradient right after the switch shrinks fast, while the
  // mixup gradient keeps fluctuating with the per-epoch lambda draw.
  CHECK(pair.switched.gradient_norm[4199] <
        0.1 * pair.switched.gradient_norm[3999]);
  CHECK(pair.switched.gradient_norm.back() < 1e-3);
  CHECK(pair.mixup.gradient_norm.back() > 1e-2);
}
