#include "mixdyn/numerics.hpp"

#include <cmath>
#include <fmt/core.h>

#include "mixdyn/errors.hpp"

namespace mixdyn {

SpectralDecomposition sym_eig(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) {
    throw NonSymmetricError("sym_eig: matrix is not square");
  }
  const double scale = a.cwiseAbs().maxCoeff();
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (scale > 0.0 && asym > 1e-12 * scale) {
    throw NonSymmetricError(
        fmt::format("sym_eig: relative asymmetry {} exceeds 1e-12", asym / scale));
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) {
    throw NoConvergenceError("sym_eig: eigensolver did not converge");
  }

  // Eigen returns ascending order; flip to descending.
  const Eigen::Index d = a.rows();
  SpectralDecomposition out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors.resize(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    out.eigenvectors.col(k) = solver.eigenvectors().col(d - 1 - k);
  }
  return out;
}

Eigen::MatrixXd spectral_exp(const SpectralDecomposition& decomp, double s) {
  const double max_exponent = s * decomp.eigenvalues.maxCoeff();
  const double min_exponent = s * decomp.eigenvalues.minCoeff();
  if (std::max(max_exponent, min_exponent) > 700.0) {
    throw OverflowError(
        fmt::format("spectral_exp: exponent {} exceeds double range",
                    std::max(max_exponent, min_exponent)));
  }
  Eigen::VectorXd scaled = (s * decomp.eigenvalues.array()).exp().matrix();
  return decomp.eigenvectors * scaled.asDiagonal() * decomp.eigenvectors.transpose();
}

GaussLegendreRule gauss_legendre_rule(int n) {
  if (n < 2) throw InvalidIntervalError("gauss_legendre: nodes must be >= 2");
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Newton iteration on P_n from the Chebyshev-based initial guess.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.nodes[i] = -x;
    rule.weights[i] = w;
    rule.nodes[n - 1 - i] = x;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

double gauss_legendre(const std::function<double(double)>& f, double a, double b,
                      int nodes) {
  if (!(a < b)) throw InvalidIntervalError("gauss_legendre: requires a < b");
  const GaussLegendreRule rule = gauss_legendre_rule(nodes);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (int i = 0; i < nodes; ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return half * sum;
}

GoldenResult golden_section_min(const std::function<double(double)>& f, double a,
                                double b, double rel_tol) {
  if (!(a < b)) throw InvalidIntervalError("golden_section_min: requires a < b");
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  while (b - a > rel_tol * scale) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return GoldenResult{x, f(x)};
}

}  // namespace mixdyn
