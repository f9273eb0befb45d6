#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "mixdyn/errors.hpp"
#include "mixdyn/noise.hpp"
#include "mixdyn/random.hpp"

using namespace mixdyn;

namespace {

GroundTruthConditional random_radial(int c, int d0, RandomStream& rng) {
  Eigen::MatrixXd centers(c, d0);
  for (int i = 0; i < c; ++i) {
    for (int j = 0; j < d0; ++j) centers(i, j) = 2.0 * rng.normal();
  }
  return GroundTruthConditional::radial_posterior(centers, 0.5 + rng.uniform());
}

Eigen::VectorXd random_point(int d0, RandomStream& rng) {
  Eigen::VectorXd x(d0);
  for (int k = 0; k < d0; ++k) x[k] = rng.normal();
  return x;
}

// Two-class piecewise instance with a boundary at x=1: class 0 on (-inf, 1),
// class 1 from the boundary up.
GroundTruthConditional boundary_at_one() {
  return GroundTruthConditional::piecewise_1d({1.0}, {0, 1}, 2);
}

}  // namespace

TEST_CASE("ground-truth families emit valid distributions") {
  RandomStream rng(3);
  Eigen::MatrixXd w(4, 3);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 3; ++j) w(i, j) = rng.normal();
  }
  const auto softmax = GroundTruthConditional::linear_softmax(w);
  const auto radial = random_radial(4, 3, rng);
  const auto piecewise = GroundTruthConditional::piecewise_1d({-1.0, 1.0}, {0, 1, 2}, 3);
  for (int rep = 0; rep < 200; ++rep) {
    const Eigen::VectorXd x = random_point(3, rng);
    for (const auto* f : {&softmax, &radial, &piecewise}) {
      const Eigen::VectorXd p = (*f)(x);
      CHECK(std::abs(p.sum() - 1.0) <= 1e-12);
      CHECK(p.minCoeff() >= 0.0);
    }
  }
}

TEST_CASE("mixup_conditional endpoints and hand value") {
  RandomStream rng(5);
  const auto f = random_radial(3, 2, rng);
  const Eigen::VectorXd x = random_point(2, rng);
  const Eigen::VectorXd x2 = random_point(2, rng);
  CHECK((mixup_conditional(f, x, x2, 1.0) - f(x)).cwiseAbs().maxCoeff() <= 1e-15);

  // Affine map on a 1-D segment where outputs are exact distributions.
  Eigen::MatrixXd a(2, 1);
  a << 0.3, -0.3;
  Eigen::VectorXd b(2);
  b << 0.5, 0.5;
  const auto affine = GroundTruthConditional::affine(a, b);
  Eigen::VectorXd p(1), q(1);
  p << 1.0;   // f = (0.8, 0.2)
  q << -1.0;  // f = (0.2, 0.8)
  const Eigen::VectorXd mixed = mixup_conditional(affine, p, q, 0.3);
  CHECK(mixed[0] == doctest::Approx(0.38));
  CHECK(mixed[1] == doctest::Approx(0.62));
}

TEST_CASE("total_variation hand values") {
  Eigen::VectorXd p(2), q(2);
  p << 1.0, 0.0;
  q << 0.0, 1.0;
  CHECK(total_variation(p, p) == doctest::Approx(0.0));
  CHECK(total_variation(p, q) == doctest::Approx(1.0));
  p << 0.7, 0.3;
  q << 0.4, 0.6;
  CHECK(total_variation(p, q) == doctest::Approx(0.3));
}

TEST_CASE("total_variation symmetry and triangle inequality") {
  RandomStream rng(9);
  for (int rep = 0; rep < 500; ++rep) {
    Eigen::VectorXd p(4), q(4), r(4);
    for (int j = 0; j < 4; ++j) {
      p[j] = rng.gamma(1.0) + 1e-9;
      q[j] = rng.gamma(1.0) + 1e-9;
      r[j] = rng.gamma(1.0) + 1e-9;
    }
    p /= p.sum();
    q /= q.sum();
    r /= r.sum();
    CHECK(std::abs(total_variation(p, q) - total_variation(q, p)) <= 1e-12);
    CHECK(total_variation(p, r) <=
          total_variation(p, q) + total_variation(q, r) + 1e-12);
  }
}

TEST_CASE("noise_lower_bound vanishes for an affine conditional") {
  Eigen::MatrixXd a(2, 1);
  a << 0.2, -0.2;
  Eigen::VectorXd b(2);
  b << 0.5, 0.5;
  const auto affine = GroundTruthConditional::affine(a, b);
  Eigen::VectorXd x(1), x2(1);
  x << 1.0;
  x2 << -1.5;
  for (const auto order : {CoefficientOrder::Matched, CoefficientOrder::AsPrinted}) {
    const auto report = noise_lower_bound(affine, x, x2, 0.5, order);
    CHECK(report.sup_bound <= 1e-12);
    CHECK(report.tv <= 1e-12);
  }
}

TEST_CASE("noise_lower_bound on the piecewise boundary instance") {
  const auto f = boundary_at_one();
  Eigen::VectorXd x(1), x2(1);
  x << 0.0;
  x2 << 2.0;
  const auto report = noise_lower_bound(f, x, x2, 0.5);
  // x~ = 1 lands in the upper region, so f(x~) = (0, 1) while the mixed
  // conditional is (0.5, 0.5): tv = 0.5, sup bound = 0.25.
  CHECK(report.tv == doctest::Approx(0.5));
  CHECK(report.sup_bound == doctest::Approx(0.25));
  CHECK(report.truth_hard_label == 1);
  CHECK(report.mixup_hard_label == 0);
}

TEST_CASE("noise_lower_bound with identical endpoints is zero") {
  RandomStream rng(15);
  const auto f = random_radial(3, 2, rng);
  const Eigen::VectorXd x = random_point(2, rng);
  for (double lam : {0.0, 0.3, 1.0}) {
    const auto report = noise_lower_bound(f, x, x, lam);
    CHECK(report.tv <= 1e-12);
    CHECK(report.sup_bound <= 1e-12);
  }
}

TEST_CASE("tv >= sup_bound under Matched order on random draws") {
  RandomStream rng(16);
  for (int rep = 0; rep < 10000; ++rep) {
    const auto f = random_radial(2 + static_cast<int>(rng.next_u64() % 4), 3, rng);
    const Eigen::VectorXd x = random_point(3, rng);
    const Eigen::VectorXd x2 = random_point(3, rng);
    const double lam = rng.uniform();
    const auto report = noise_lower_bound(f, x, x2, lam, CoefficientOrder::Matched);
    CHECK(report.tv >= report.sup_bound - 1e-12);
    CHECK(report.tv >= 0.0);
    CHECK(report.tv <= 1.0 + 1e-12);
    CHECK(report.sup_bound >= 0.0);
  }
}

TEST_CASE("hard_labels argmax and tie-breaking") {
  const auto f = boundary_at_one();
  Eigen::VectorXd x(1), x2(1);
  x << 0.0;
  x2 << 2.0;
  const auto [truth, mixup] = hard_labels(f, x, x2, 0.5);
  // Mixed point sits on the boundary, which belongs to the upper region, so
  // the truth label is 1; the mixed conditional is (0.5, 0.5) and ties break
  // low, so the mixup label is 0 and the pair is noisy.
  CHECK(truth == 1);
  CHECK(mixup == 0);

  // Below the boundary both assignments agree.
  x2 << 1.5;
  const auto [truth2, mixup2] = hard_labels(f, x, x2, 0.5);
  CHECK(truth2 == 0);
  CHECK(mixup2 == 0);
}

TEST_CASE("classify_case covers the three situations") {
  CHECK(classify_case(2, 2, 2) == NoiseCase::SamePair);
  CHECK(classify_case(0, 1, 0) == NoiseCase::CrossPair);
  CHECK(classify_case(0, 1, 1) == NoiseCase::CrossPair);
  CHECK(classify_case(0, 1, 2) == NoiseCase::Intrusion);
  CHECK(classify_case(1, 1, 0) == NoiseCase::Intrusion);
}

TEST_CASE("noisy_fraction degenerate cases") {
  RandomStream rng(21);
  ClassificationSet data;
  data.class_count = 2;
  data.features.resize(6, 1);
  for (int i = 0; i < 6; ++i) {
    data.features(i, 0) = (i < 3) ? rng.uniform(-1.0, 0.5) : rng.uniform(1.5, 3.0);
    data.labels.push_back(i < 3 ? 0 : 1);
  }
  const auto f = boundary_at_one();

  // lambda=1: synthetic set equals the original points.
  CHECK(noisy_fraction(data, f, 1.0).fraction == 0.0);

  // Single-class set under a constant one-hot conditional: case iii everywhere.
  ClassificationSet same;
  same.class_count = 2;
  same.features = data.features.topRows(3);
  same.labels = {0, 0, 0};
  const auto constant = GroundTruthConditional::piecewise_1d({}, {0}, 2);
  const auto result = noisy_fraction(same, constant, 0.4);
  CHECK(result.fraction == 0.0);
  CHECK(result.same_pair == 9);
}

TEST_CASE("noisy_fraction matches the serial reference exactly") {
  RandomStream rng(23);
  ClassificationSet data;
  data.class_count = 3;
  data.features.resize(30, 1);
  // 1-D three-class layout with a middle band.
  for (int i = 0; i < 30; ++i) {
    const int y = i / 10;
    data.features(i, 0) = -2.0 + 2.0 * y + 0.8 * rng.uniform();
    data.labels.push_back(y);
  }
  const auto f = GroundTruthConditional::piecewise_1d({-0.9, 1.1}, {0, 1, 2}, 3);
  for (double lam : {0.2, 0.5, 0.8}) {
    const auto par = noisy_fraction(data, f, lam);
    const auto ser = noisy_fraction_serial(data, f, lam);
    CHECK(par.fraction == ser.fraction);
    CHECK(par.same_pair == ser.same_pair);
    CHECK(par.cross_pair == ser.cross_pair);
    CHECK(par.intrusion == ser.intrusion);
    CHECK(par.same_pair + par.cross_pair + par.intrusion == 900);
  }
}

TEST_CASE("noisy_fraction rejects contradicting labels") {
  ClassificationSet data;
  data.class_count = 2;
  data.features.resize(1, 1);
  data.features(0, 0) = 0.0;
  data.labels = {1};  // boundary_at_one says class 0
  CHECK_THROWS_AS(noisy_fraction(data, boundary_at_one(), 0.5), LabelMismatchError);
}

TEST_CASE("same-pair mixing of one-hot regions is never noisy") {
  RandomStream rng(27);
  const auto f = GroundTruthConditional::piecewise_1d({0.0}, {0, 1}, 2);
  for (int rep = 0; rep < 500; ++rep) {
    // Both endpoints on the same side; the segment stays inside the region.
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    Eigen::VectorXd x(1), x2(1);
    x << sign * (0.1 + rng.uniform());
    x2 << sign * (0.1 + rng.uniform());
    const auto [truth, mixup] = hard_labels(f, x, x2, rng.uniform());
    CHECK(truth == mixup);
  }
}

TEST_CASE("regression_noise hand values") {
  const std::function<double(const Eigen::VectorXd&)> quad = [](const Eigen::VectorXd& v) { return v.squaredNorm(); };
  Eigen::VectorXd x(1), x2(1);
  x << 0.0;
  x2 << 2.0;
  CHECK(regression_noise(quad, x, x2, 0.5) == doctest::Approx(1.0));
  CHECK(regression_noise(quad, x, x2, 0.0) == doctest::Approx(0.0));
  CHECK(regression_noise(quad, x, x2, 1.0) == doctest::Approx(0.0));

  const std::function<double(const Eigen::VectorXd&)> linear = [](const Eigen::VectorXd& v) {
    return 3.0 * v[0] - 1.0;
  };
  for (double lam : {0.1, 0.5, 0.9}) {
    CHECK(std::abs(regression_noise(linear, x, x2, lam)) <= 1e-12);
  }
}

TEST_CASE("regression_noise respects the strong-convexity floor") {
  RandomStream rng(33);
  const double rho = 2.0;
  for (int rep = 0; rep < 1000; ++rep) {
    Eigen::VectorXd w(3);
    for (int k = 0; k < 3; ++k) w[k] = rng.normal();
    const std::function<double(const Eigen::VectorXd&)> f = [w, rho](const Eigen::VectorXd& v) {
      return 0.5 * rho * v.squaredNorm() + w.dot(v);
    };
    const Eigen::VectorXd x = random_point(3, rng);
    const Eigen::VectorXd x2 = random_point(3, rng);
    const double lam = rng.uniform();
    const double floor = 0.5 * rho * lam * (1.0 - lam) * (x - x2).squaredNorm();
    CHECK(regression_noise(f, x, x2, lam) >= floor - 1e-9);
  }
}

TEST_CASE("coupling inequality sanity on an independent coupling") {
  // Explicit discrete laws P, Q; under the independent coupling,
  // P(X != Y) >= TV(P, Q) must hold empirically.
  Eigen::VectorXd p(3), q(3);
  p << 0.6, 0.3, 0.1;
  q << 0.2, 0.5, 0.3;
  const double tv = total_variation(p, q);

  RandomStream rng(37);
  auto draw = [&](const Eigen::VectorXd& law) {
    const double u = rng.uniform();
    double acc = 0.0;
    for (int j = 0; j < 3; ++j) {
      acc += law[j];
      if (u < acc) return j;
    }
    return 2;
  };
  const int n = 100000;
  int mismatch = 0;
  for (int i = 0; i < n; ++i) {
    if (draw(p) != draw(q)) ++mismatch;
  }
  const double rate = static_cast<double>(mismatch) / n;
  const double se = std::sqrt(rate * (1.0 - rate) / n);
  CHECK(rate >= tv - 3.0 * se);
}
