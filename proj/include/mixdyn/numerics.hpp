#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

namespace mixdyn {

/// Symmetric eigendecomposition with eigenvalues sorted descending and
/// orthonormal eigenvector columns, so A = V diag(mu) V^T.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  Eigen::MatrixXd reconstruct() const {
    return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
  }
};

/// Throws NonSymmetricError if max|A - A^T| > 1e-12 * max|A|, NoConvergenceError
/// if the iteration fails.
SpectralDecomposition sym_eig(const Eigen::MatrixXd& a);

/// e^{sA} = V diag(e^{s mu_k}) V^T. Throws OverflowError when s*mu_max > 700.
Eigen::MatrixXd spectral_exp(const SpectralDecomposition& decomp, double s);

struct GaussLegendreRule {
  std::vector<double> nodes;    // on (-1, 1)
  std::vector<double> weights;
};

GaussLegendreRule gauss_legendre_rule(int n);

/// Integrates f over [a, b]; exact for polynomials of degree <= 2n-1.
double gauss_legendre(const std::function<double(double)>& f, double a, double b,
                      int nodes = 64);

struct GoldenResult {
  double x;
  double value;
};

/// Golden-section minimization of a unimodal f on [a, b] to relative
/// tolerance rel_tol on x.
GoldenResult golden_section_min(const std::function<double(double)>& f, double a,
                                double b, double rel_tol = 1e-6);

}  // namespace mixdyn
