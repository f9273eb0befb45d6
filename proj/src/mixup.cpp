#include "mixdyn/mixup.hpp"

#include <cmath>
#include <fmt/core.h>

#include "mixdyn/errors.hpp"
#include "mixdyn/numerics.hpp"

namespace mixdyn {

namespace {
constexpr int kChunk = 1024;  // fixed-size accumulation blocks, thread-count independent
}

bool ClassificationSet::is_balanced() const {
  if (labels.empty() || class_count <= 0) return false;
  std::vector<int> counts(class_count, 0);
  for (int y : labels) counts[y]++;
  for (int c : counts) {
    if (c != counts[0]) return false;
  }
  return true;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> mix_pair(const Eigen::VectorXd& x,
                                                     const Eigen::VectorXd& x2,
                                                     const Eigen::VectorXd& y,
                                                     const Eigen::VectorXd& y2,
                                                     double lambda) {
  if (x.size() != x2.size() || y.size() != y2.size()) {
    throw DimensionMismatchError("mix_pair: operand dimensions differ");
  }
  return {lambda * x + (1.0 - lambda) * x2, lambda * y + (1.0 - lambda) * y2};
}

std::pair<Eigen::VectorXd, double> mix_pair(const Eigen::VectorXd& x,
                                            const Eigen::VectorXd& x2, double y,
                                            double y2, double lambda) {
  if (x.size() != x2.size()) {
    throw DimensionMismatchError("mix_pair: operand dimensions differ");
  }
  return {lambda * x + (1.0 - lambda) * x2, lambda * y + (1.0 - lambda) * y2};
}

SyntheticClassificationSet build_synthetic_fixed(const ClassificationSet& data,
                                                 double lambda) {
  const int n = data.size();
  if (n == 0) throw EmptyDatasetError("build_synthetic_fixed: empty dataset");
  const int c = data.class_count;
  const Eigen::Index d0 = data.features.cols();
  const int m = n * n;

  SyntheticClassificationSet out;
  out.features.resize(m, d0);
  out.soft_labels = Eigen::MatrixXd::Zero(m, c);
  out.pair_index.resize(m);
  out.lambdas = Eigen::VectorXd::Constant(m, lambda);

#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int row = i * n + j;
      out.features.row(row) =
          lambda * data.features.row(i) + (1.0 - lambda) * data.features.row(j);
      out.soft_labels(row, data.labels[i]) += lambda;
      out.soft_labels(row, data.labels[j]) += 1.0 - lambda;
      out.pair_index[row] = {i, j};
    }
  }
  return out;
}

double sample_lambda(const MixupConfig& config, RandomStream& rng) {
  if (config.mode == LambdaMode::Erm || config.alpha == 0.0) return 1.0;
  if (config.mode == LambdaMode::FixedLambda) return config.fixed_lambda;
  if (config.alpha == 1.0) return rng.uniform();
  return rng.beta(config.alpha, config.alpha);
}

double entropy(const Eigen::VectorXd& p) {
  double h = 0.0;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    if (p[j] > 0.0) h -= p[j] * std::log(p[j]);
  }
  return h;
}

double kl_divergence(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size()) {
    throw DimensionMismatchError("kl_divergence: dimensions differ");
  }
  double kl = 0.0;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    if (p[j] > 0.0) {
      if (q[j] <= 0.0) {
        throw SupportViolationError("kl_divergence: q has zero mass where p > 0");
      }
      kl += p[j] * std::log(p[j] / q[j]);
    }
  }
  return kl;
}

double cross_entropy(const Eigen::VectorXd& y, const Eigen::VectorXd& p) {
  if (y.size() != p.size()) {
    throw DimensionMismatchError("cross_entropy: dimensions differ");
  }
  if (std::abs(y.sum() - 1.0) > 1e-9 || std::abs(p.sum() - 1.0) > 1e-9) {
    throw SupportViolationError("cross_entropy: inputs must sum to 1");
  }
  double ce = 0.0;
  for (Eigen::Index j = 0; j < y.size(); ++j) {
    if (y[j] > 0.0) {
      if (p[j] <= 0.0) {
        throw SupportViolationError(
            fmt::format("cross_entropy: p[{}]=0 while y[{}]>0", j, j));
      }
      ce -= y[j] * std::log(p[j]);
    }
  }
  return ce;
}

double mixup_ce_lower_bound(int class_count) {
  return (class_count - 1.0) / (2.0 * class_count);
}

double expected_pair_entropy(double alpha, int nodes) {
  // lambda = sin^2(pi u / 2) clusters nodes at the endpoints, where the
  // integrand has log/power singularities in its derivatives.
  const double log_beta_norm = 2.0 * std::lgamma(alpha) - std::lgamma(2.0 * alpha);
  auto integrand = [&](double u) {
    const double s = std::sin(0.5 * M_PI * u);
    const double lam = s * s;
    const double one_m = 1.0 - lam;
    if (lam <= 0.0 || one_m <= 0.0) return 0.0;
    const double pair_entropy = -(lam * std::log(lam) + one_m * std::log(one_m));
    const double log_pdf =
        (alpha - 1.0) * (std::log(lam) + std::log(one_m)) - log_beta_norm;
    const double jacobian = 0.5 * M_PI * std::sin(M_PI * u);
    return pair_entropy * std::exp(log_pdf) * jacobian;
  };
  return gauss_legendre(integrand, 0.0, 1.0, nodes);
}

double empirical_mixup_loss_serial(const Predictor& predictor,
                                   const SyntheticClassificationSet& synth) {
  const int m = synth.size();
  double sum = 0.0;
  for (int i = 0; i < m; ++i) {
    sum += cross_entropy(synth.soft_labels.row(i).transpose(),
                         predictor(synth.features.row(i).transpose()));
  }
  return sum / m;
}

double empirical_mixup_loss(const Predictor& predictor,
                            const SyntheticClassificationSet& synth) {
  const int m = synth.size();
  const int n_chunks = (m + kChunk - 1) / kChunk;
  std::vector<double> partial(n_chunks, 0.0);

#pragma omp parallel for schedule(static)
  for (int chunk = 0; chunk < n_chunks; ++chunk) {
    const int lo = chunk * kChunk;
    const int hi = std::min(m, lo + kChunk);
    double s = 0.0;
    for (int i = lo; i < hi; ++i) {
      s += cross_entropy(synth.soft_labels.row(i).transpose(),
                         predictor(synth.features.row(i).transpose()));
    }
    partial[chunk] = s;
  }
  double sum = 0.0;
  for (double s : partial) sum += s;
  return sum / m;
}

}  // namespace mixdyn
