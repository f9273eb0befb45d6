#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "mixdyn/random.hpp"

namespace mixdyn {

enum class MpEdgeMode {
  Standard,   // gamma_pm = (1 +- sqrt(gamma))^2
  AsPrinted,  // gamma_pm = (1 +- gamma)^2; not a normalized density
};

struct MpLaw {
  double gamma = 0.5;  // aspect ratio d/m
  MpEdgeMode edge_mode = MpEdgeMode::Standard;

  double edge_lower() const;
  double edge_upper() const;
};

double mp_density(double mu, const MpLaw& law);

/// CDF of the Standard-mode law by quadrature (trig substitution removes the
/// square-root edge singularity). Requires gamma <= 1.
double mp_cdf(double mu, const MpLaw& law);

/// Inverse CDF by bisection; Standard mode, gamma <= 1.
double mp_quantile(double p, const MpLaw& law);

/// Ascending eigenvalues of (1/m) Phi Phi^T.
Eigen::VectorXd empirical_spectrum(const Eigen::MatrixXd& phi);

/// Sup distance between the sample's empirical CDF and the MP CDF.
double ks_distance(const Eigen::VectorXd& eigenvalues, const MpLaw& law);

struct Histogram {
  std::vector<double> edges;
  std::vector<long> counts;
};

Histogram histogram(const Eigen::VectorXd& values, int bins);

struct SpectrumReport {
  Eigen::VectorXd eigenvalues;  // ascending
  double gamma = 0.0;
  double ks = 0.0;
  Histogram hist;
};

struct MixupSpectrumResult {
  SpectrumReport mixup;
  SpectrumReport control;
  double ks_gap = 0.0;  // mixup.ks - control.ks
};

/// Spectrum of tanh features of all n^2 mixed points versus an i.i.d. Gaussian
/// control of the same shape, both scored against MP(gamma = d/n^2).
MixupSpectrumResult mixup_spectrum_experiment(int n, int d0, int d, double lambda,
                                              std::uint64_t seed, int bins = 40);

}  // namespace mixdyn
