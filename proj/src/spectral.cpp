#include "mixdyn/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/core.h>

#include "mixdyn/errors.hpp"
#include "mixdyn/numerics.hpp"

namespace mixdyn {

double MpLaw::edge_lower() const {
  const double s = edge_mode == MpEdgeMode::Standard ? std::sqrt(gamma) : gamma;
  const double e = 1.0 - s;
  return e * e;
}

double MpLaw::edge_upper() const {
  const double s = edge_mode == MpEdgeMode::Standard ? std::sqrt(gamma) : gamma;
  const double e = 1.0 + s;
  return e * e;
}

double mp_density(double mu, const MpLaw& law) {
  const double lo = law.edge_lower();
  const double hi = law.edge_upper();
  if (mu <= lo || mu >= hi) return 0.0;
  return std::sqrt((hi - mu) * (mu - lo)) / (2.0 * M_PI * mu * law.gamma);
}

double mp_cdf(double mu, const MpLaw& law) {
  if (law.edge_mode != MpEdgeMode::Standard) {
    throw UnsupportedLawError("mp_cdf: AsPrinted edges do not normalize");
  }
  if (law.gamma > 1.0) {
    throw UnsupportedLawError("mp_cdf: gamma <= 1 required");
  }
  const double lo = law.edge_lower();
  const double hi = law.edge_upper();
  if (mu <= lo) return 0.0;
  if (mu >= hi) return 1.0;
  // mu = c - r cos(phi) turns the square root into r sin(phi); the integrand
  // in phi is smooth.
  const double c = 0.5 * (lo + hi);
  const double r = 0.5 * (hi - lo);
  const double phi_end = std::acos(std::clamp((c - mu) / r, -1.0, 1.0));
  auto integrand = [&](double phi) {
    const double s = std::sin(phi);
    const double m = c - r * std::cos(phi);
    return r * r * s * s / (2.0 * M_PI * law.gamma * m);
  };
  return gauss_legendre(integrand, 0.0, phi_end, 128);
}

double mp_quantile(double p, const MpLaw& law) {
  double lo = law.edge_lower();
  double hi = law.edge_upper();
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mp_cdf(mid, law) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-12 * std::max(1.0, hi)) break;
  }
  return 0.5 * (lo + hi);
}

Eigen::VectorXd empirical_spectrum(const Eigen::MatrixXd& phi) {
  const double m = static_cast<double>(phi.cols());
  const SpectralDecomposition decomp = sym_eig(phi * phi.transpose() / m);
  return decomp.eigenvalues.reverse();  // ascending
}

double ks_distance(const Eigen::VectorXd& eigenvalues, const MpLaw& law) {
  if (law.edge_mode != MpEdgeMode::Standard) {
    throw UnsupportedLawError("ks_distance: Standard edge mode required");
  }
  std::vector<double> sorted(eigenvalues.data(), eigenvalues.data() + eigenvalues.size());
  std::sort(sorted.begin(), sorted.end());
  const double k = static_cast<double>(sorted.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = mp_cdf(sorted[i], law);
    ks = std::max(ks, std::abs(cdf - static_cast<double>(i) / k));
    ks = std::max(ks, std::abs(static_cast<double>(i + 1) / k - cdf));
  }
  return ks;
}

Histogram histogram(const Eigen::VectorXd& values, int bins) {
  Histogram h;
  const double lo = values.minCoeff();
  const double hi = values.maxCoeff();
  const double width = (hi > lo) ? (hi - lo) / bins : 1.0;
  h.edges.resize(bins + 1);
  h.counts.assign(bins, 0);
  for (int b = 0; b <= bins; ++b) h.edges[b] = lo + b * width;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    int b = static_cast<int>((values[i] - lo) / width);
    b = std::clamp(b, 0, bins - 1);
    h.counts[b]++;
  }
  return h;
}

namespace {

/// Center and scale entries to mean 0, variance 1 so the Gram spectrum is
/// comparable to the unit-variance MP law.
Eigen::MatrixXd standardize_entries(const Eigen::MatrixXd& phi) {
  const double mean = phi.mean();
  const double var = (phi.array() - mean).square().mean();
  return (phi.array() - mean) / std::sqrt(var);
}

}  // namespace

MixupSpectrumResult mixup_spectrum_experiment(int n, int d0, int d, double lambda,
                                              std::uint64_t seed, int bins) {
  const int m = n * n;
  if (m <= d) {
    throw UnderdeterminedError(
        fmt::format("mixup_spectrum_experiment: n^2={} <= d={}", m, d));
  }
  RandomStream rng(seed);

  Eigen::MatrixXd x(n, d0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d0; ++j) x(i, j) = rng.normal();
  }
  Eigen::MatrixXd w(d, d0);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d0; ++j) w(i, j) = rng.normal() / std::sqrt(d0);
  }

  Eigen::MatrixXd mixed_phi(d, m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Eigen::VectorXd xm =
          lambda * x.row(i).transpose() + (1.0 - lambda) * x.row(j).transpose();
      mixed_phi.col(i * n + j) = (w * xm).array().tanh();
    }
  }

  Eigen::MatrixXd control(d, m);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < m; ++j) control(i, j) = rng.normal();
  }

  const MpLaw law{static_cast<double>(d) / m, MpEdgeMode::Standard};

  MixupSpectrumResult result;
  result.mixup.eigenvalues = empirical_spectrum(standardize_entries(mixed_phi));
  result.mixup.gamma = law.gamma;
  result.mixup.ks = ks_distance(result.mixup.eigenvalues, law);
  result.mixup.hist = histogram(result.mixup.eigenvalues, bins);

  result.control.eigenvalues = empirical_spectrum(control);
  result.control.gamma = law.gamma;
  result.control.ks = ks_distance(result.control.eigenvalues, law);
  result.control.hist = histogram(result.control.eigenvalues, bins);

  result.ks_gap = result.mixup.ks - result.control.ks;
  return result;
}

}  // namespace mixdyn
