#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "mixdyn/errors.hpp"
#include "mixdyn/numerics.hpp"
#include "mixdyn/random.hpp"
#include "mixdyn/spectral.hpp"

using namespace mixdyn;

TEST_CASE("mp_density support and edges") {
  const MpLaw law{0.25, MpEdgeMode::Standard};
  CHECK(law.edge_lower() == doctest::Approx(0.25));
  CHECK(law.edge_upper() == doctest::Approx(2.25));
  CHECK(mp_density(law.edge_lower(), law) == 0.0);
  CHECK(mp_density(law.edge_upper(), law) == 0.0);
  CHECK(mp_density(0.1, law) == 0.0);
  CHECK(mp_density(3.0, law) == 0.0);
  CHECK(mp_density(1.0, law) > 0.0);

  const MpLaw printed{0.25, MpEdgeMode::AsPrinted};
  CHECK(printed.edge_lower() == doctest::Approx(0.5625));
  CHECK(printed.edge_upper() == doctest::Approx(1.5625));
}

TEST_CASE("mp_density hand value at the center") {
  // gamma = 1: support [0, 4], density at mu = 2 is sqrt(4)/(4 pi) = 1/(2 pi).
  const MpLaw law{1.0, MpEdgeMode::Standard};
  CHECK(mp_density(2.0, law) == doctest::Approx(1.0 / (2.0 * M_PI)).epsilon(1e-12));
}

TEST_CASE("standard-mode density normalizes") {
  for (double gamma : {0.1, 0.25, 0.5, 0.9}) {
    const MpLaw law{gamma, MpEdgeMode::Standard};
    // Integrate with the same trig substitution the CDF uses, via the CDF at
    // the upper edge minus a brute-force check on an interior point.
    const double total = mp_cdf(law.edge_upper() - 1e-15, law);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("as-printed density does not normalize and the CDF refuses it") {
  const MpLaw law{0.25, MpEdgeMode::AsPrinted};
  const double mass = gauss_legendre(
      [&](double mu) { return mp_density(mu, law); }, law.edge_lower(),
      law.edge_upper(), 256);
  CHECK(std::abs(mass - 1.0) > 0.05);
  CHECK_THROWS_AS(mp_cdf(1.0, law), UnsupportedLawError);
}

TEST_CASE("mp_cdf is monotone from 0 to 1") {
  const MpLaw law{0.5, MpEdgeMode::Standard};
  CHECK(mp_cdf(law.edge_lower() - 0.1, law) == 0.0);
  CHECK(mp_cdf(law.edge_upper() + 0.1, law) == 1.0);
  double prev = 0.0;
  for (int i = 1; i <= 50; ++i) {
    const double mu = law.edge_lower() +
                      (law.edge_upper() - law.edge_lower()) * i / 50.0;
    const double c = mp_cdf(mu, law);
    CHECK(c >= prev);
    prev = c;
  }
  CHECK(prev == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(mp_cdf(1.0, MpLaw{1.5, MpEdgeMode::Standard}),
                  UnsupportedLawError);
}

TEST_CASE("mp_cdf matches the density derivative") {
  const MpLaw law{0.25, MpEdgeMode::Standard};
  const double h = 1e-5;
  for (double mu : {0.5, 1.0, 1.5, 2.0}) {
    const double fd = (mp_cdf(mu + h, law) - mp_cdf(mu - h, law)) / (2.0 * h);
    CHECK(fd == doctest::Approx(mp_density(mu, law)).epsilon(1e-6));
  }
}

TEST_CASE("mp_quantile inverts mp_cdf") {
  const MpLaw law{0.5, MpEdgeMode::Standard};
  for (double p : {0.05, 0.25, 0.5, 0.75, 0.95}) {
    const double q = mp_quantile(p, law);
    CHECK(mp_cdf(q, law) == doctest::Approx(p).epsilon(1e-8));
  }
}

TEST_CASE("inverse-CDF samples pass their own KS test") {
  const MpLaw law{0.25, MpEdgeMode::Standard};
  RandomStream rng(7);
  Eigen::VectorXd samples(2000);
  for (int i = 0; i < 2000; ++i) samples[i] = mp_quantile(rng.uniform_pos(), law);
  CHECK(ks_distance(samples, law) <= 0.03);
}

TEST_CASE("ks_distance detects a point mass") {
  const MpLaw law{0.25, MpEdgeMode::Standard};
  Eigen::VectorXd point = Eigen::VectorXd::Constant(100, mp_quantile(0.5, law));
  CHECK(ks_distance(point, law) >= 0.4);
  CHECK(ks_distance(point, law) <= 1.0);
}

TEST_CASE("ks_distance hand value on a tiny sample") {
  const MpLaw law{0.25, MpEdgeMode::Standard};
  // One sample at the median: CDF jumps 0 -> 1 at a point with F = 0.5.
  Eigen::VectorXd one(1);
  one[0] = mp_quantile(0.5, law);
  CHECK(ks_distance(one, law) == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("empirical_spectrum basics") {
  SUBCASE("trace identity") {
    RandomStream rng(11);
    Eigen::MatrixXd phi(30, 200);
    for (int i = 0; i < 30; ++i) {
      for (int j = 0; j < 200; ++j) phi(i, j) = rng.normal();
    }
    const Eigen::VectorXd spec = empirical_spectrum(phi);
    CHECK(spec.sum() ==
          doctest::Approx((phi * phi.transpose() / 200.0).trace()).epsilon(1e-10));
    CHECK(std::is_sorted(spec.data(), spec.data() + spec.size()));
  }

  SUBCASE("rank-one matrix") {
    Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(4, 10);
    phi.row(0).setConstant(2.0);
    const Eigen::VectorXd spec = empirical_spectrum(phi);
    CHECK(spec[0] == doctest::Approx(0.0));
    CHECK(spec[3] == doctest::Approx(4.0));  // (1/10) * 10 * 2^2
  }
}

TEST_CASE("iid Gaussian spectrum follows the MP law") {
  RandomStream rng(13);
  const int d = 200, m = 2000;
  Eigen::MatrixXd phi(d, m);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < m; ++j) phi(i, j) = rng.normal();
  }
  const MpLaw law{static_cast<double>(d) / m, MpEdgeMode::Standard};
  const Eigen::VectorXd spec = empirical_spectrum(phi);
  CHECK(ks_distance(spec, law) <= 0.05);
  // Smallest eigenvalue sits near the lower edge (1 - sqrt(0.1))^2 = 0.468.
  CHECK(spec[0] >= 0.3);
  CHECK(spec[0] <= 0.6);
}

TEST_CASE("narrower aspect ratio fits its law better than a mismatched one") {
  RandomStream rng(17);
  const int d = 100, m = 2000;
  Eigen::MatrixXd phi(d, m);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < m; ++j) phi(i, j) = rng.normal();
  }
  const Eigen::VectorXd spec = empirical_spectrum(phi);
  const double own = ks_distance(spec, MpLaw{0.05, MpEdgeMode::Standard});
  const double wrong = ks_distance(spec, MpLaw{0.5, MpEdgeMode::Standard});
  CHECK(own < wrong);
}

TEST_CASE("histogram partitions the sample") {
  Eigen::VectorXd v(6);
  v << 0.0, 0.1, 0.4, 0.5, 0.9, 1.0;
  const Histogram h = histogram(v, 2);
  REQUIRE(h.edges.size() == 3);
  REQUIRE(h.counts.size() == 2);
  CHECK(h.edges.front() == 0.0);
  CHECK(h.edges.back() == 1.0);
  CHECK(h.counts[0] + h.counts[1] == 6);
  CHECK(h.counts[0] == 3);
}

TEST_CASE("mixup_spectrum_experiment") {
  SUBCASE("mixed features deviate from MP more than the iid control") {
    int mixup_worse = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      const MixupSpectrumResult r = mixup_spectrum_experiment(40, 10, 100, 0.5, seed);
      if (r.ks_gap > 0.0) ++mixup_worse;
      CHECK(r.mixup.ks >= 0.0);
      CHECK(r.control.ks <= 0.1);
    }
    CHECK(mixup_worse >= 7);
  }

  SUBCASE("lambda = 1 collapses the rank to at most n") {
    const MixupSpectrumResult r = mixup_spectrum_experiment(15, 10, 50, 1.0, 3);
    const Eigen::VectorXd& spec = r.mixup.eigenvalues;
    int nonzero = 0;
    for (Eigen::Index i = 0; i < spec.size(); ++i) {
      if (spec[i] > 1e-8) ++nonzero;
    }
    CHECK(nonzero <= 15);
  }

  SUBCASE("d >= n^2 is rejected") {
    CHECK_THROWS_AS(mixup_spectrum_experiment(5, 10, 30, 0.5, 1),
                    UnderdeterminedError);
  }

  SUBCASE("deterministic in the seed") {
    const MixupSpectrumResult a = mixup_spectrum_experiment(20, 10, 80, 0.5, 9);
    const MixupSpectrumResult b = mixup_spectrum_experiment(20, 10, 80, 0.5, 9);
    CHECK(a.mixup.ks == b.mixup.ks);
    CHECK(a.control.ks == b.control.ks);
    CHECK((a.mixup.eigenvalues - b.mixup.eigenvalues).cwiseAbs().maxCoeff() == 0.0);
  }
}
