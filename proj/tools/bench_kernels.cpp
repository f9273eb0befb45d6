// Compares the OpenMP kernels against their serial reference implementations
// and reports wall-clock timings plus the observed numerical gap.

#include <fmt/core.h>

#include <chrono>
#include <cmath>
#include <functional>

#include "mixdyn/dynamics.hpp"
#include "mixdyn/mixup.hpp"
#include "mixdyn/noise.hpp"
#include "mixdyn/random.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double time_ms(const std::function<void()>& body, int reps) {
  body();  // warm-up
  const auto start = Clock::now();
  for (int r = 0; r < reps; ++r) body();
  const auto stop = Clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count() / reps;
}

void report(const std::string& name, double serial_ms, double parallel_ms,
            double gap) {
  fmt::print("{:<24} serial {:>9.3f} ms   parallel {:>9.3f} ms   "
             "speedup {:>5.2f}x   max-gap {:.3e}\n",
             name, serial_ms, parallel_ms, serial_ms / parallel_ms, gap);
}

}  // namespace

int main() {
  using namespace mixdyn;
  RandomStream rng(7);

  // Shared fixtures.
  const int n = 60, d0 = 10, d = 300, classes = 4;
  ClassificationSet cls;
  cls.class_count = classes;
  cls.features.resize(n, d0);
  cls.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d0; ++j) cls.features(i, j) = rng.normal();
    cls.labels[i] = static_cast<int>(rng.next_u64() % classes);
  }

  RandomFeatureModel model;
  model.frozen_weights.resize(d, d0);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d0; ++j) {
      model.frozen_weights(i, j) = rng.normal() / std::sqrt(d0);
    }
  }
  model.theta = Eigen::VectorXd::Zero(d);

  // empirical_mixup_loss over all n^2 pairs with a softmax-head predictor.
  {
    const SyntheticClassificationSet synth = build_synthetic_fixed(cls, 0.4);
    Eigen::MatrixXd head(classes, d0);
    for (int i = 0; i < classes; ++i) {
      for (int j = 0; j < d0; ++j) head(i, j) = rng.normal();
    }
    const Predictor predictor = [&head](const Eigen::VectorXd& x) {
      Eigen::VectorXd logits = head * x;
      logits.array() -= logits.maxCoeff();
      Eigen::VectorXd p = logits.array().exp();
      return Eigen::VectorXd(p / p.sum());
    };
    double serial_value = 0.0, parallel_value = 0.0;
    const double serial_ms = time_ms(
        [&] { serial_value = empirical_mixup_loss_serial(predictor, synth); }, 5);
    const double parallel_ms = time_ms(
        [&] { parallel_value = empirical_mixup_loss(predictor, synth); }, 5);
    report("empirical_mixup_loss", serial_ms, parallel_ms,
           std::abs(serial_value - parallel_value));
  }

  // noisy_fraction with a radial ground truth.
  {
    Eigen::MatrixXd centers(classes, d0);
    for (int i = 0; i < classes; ++i) {
      for (int j = 0; j < d0; ++j) centers(i, j) = 2.0 * rng.normal();
    }
    const GroundTruthConditional truth =
        GroundTruthConditional::radial_posterior(centers, 1.0);
    ClassificationSet labeled = cls;
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd p = truth(labeled.features.row(i).transpose());
      int best = 0;
      for (Eigen::Index j = 1; j < p.size(); ++j) {
        if (p[j] > p[best]) best = static_cast<int>(j);
      }
      labeled.labels[i] = best;
    }
    NoisyFractionResult serial_result, parallel_result;
    const double serial_ms = time_ms(
        [&] { serial_result = noisy_fraction_serial(labeled, truth, 0.6); }, 5);
    const double parallel_ms =
        time_ms([&] { parallel_result = noisy_fraction(labeled, truth, 0.6); }, 5);
    report("noisy_fraction", serial_ms, parallel_ms,
           std::abs(serial_result.fraction - parallel_result.fraction));
  }

  // feature_matrix on a large point cloud.
  {
    const int m = 20000;
    Eigen::MatrixXd x(m, d0);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < d0; ++j) x(i, j) = rng.normal();
    }
    Eigen::MatrixXd serial_phi, parallel_phi;
    const double serial_ms =
        time_ms([&] { serial_phi = feature_matrix_serial(model, x); }, 3);
    const double parallel_ms =
        time_ms([&] { parallel_phi = feature_matrix(model, x); }, 3);
    report("feature_matrix", serial_ms, parallel_ms,
           (serial_phi - parallel_phi).cwiseAbs().maxCoeff());
  }

  // population_risk_mc against a fixed quadratic truth.
  {
    const ScalarFunction truth = [](const Eigen::VectorXd& x) {
      return x.squaredNorm() / x.size();
    };
    Eigen::VectorXd theta(d);
    for (int i = 0; i < d; ++i) theta[i] = rng.normal() / d;
    McEstimate serial_est, parallel_est;
    const double serial_ms = time_ms(
        [&] {
          RandomStream local(11);
          serial_est = population_risk_mc_serial(theta, model, truth, 50000, local);
        },
        3);
    const double parallel_ms = time_ms(
        [&] {
          RandomStream local(11);
          parallel_est = population_risk_mc(theta, model, truth, 50000, local);
        },
        3);
    report("population_risk_mc", serial_ms, parallel_ms,
           std::abs(serial_est.mean - parallel_est.mean));
  }

  return 0;
}
