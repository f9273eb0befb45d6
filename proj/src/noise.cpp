#include "mixdyn/noise.hpp"

#include <cmath>
#include <fmt/core.h>

#include "mixdyn/errors.hpp"

namespace mixdyn {

namespace {

int argmax_lowest(const Eigen::VectorXd& p) {
  int best = 0;
  for (Eigen::Index j = 1; j < p.size(); ++j) {
    if (p[j] > p[best]) best = static_cast<int>(j);
  }
  return best;
}

}  // namespace

GroundTruthConditional GroundTruthConditional::linear_softmax(
    const Eigen::MatrixXd& weights) {
  GroundTruthConditional f;
  f.class_count_ = static_cast<int>(weights.rows());
  f.eval_ = [weights](const Eigen::VectorXd& x) {
    Eigen::VectorXd logits = weights * x;
    logits.array() -= logits.maxCoeff();
    Eigen::VectorXd p = logits.array().exp();
    return Eigen::VectorXd(p / p.sum());
  };
  return f;
}

GroundTruthConditional GroundTruthConditional::piecewise_1d(
    const std::vector<double>& boundaries, const std::vector<int>& region_classes,
    int class_count) {
  if (region_classes.size() != boundaries.size() + 1) {
    throw DimensionMismatchError(
        "piecewise_1d: need one more region class than boundaries");
  }
  GroundTruthConditional f;
  f.class_count_ = class_count;
  f.eval_ = [boundaries, region_classes, class_count](const Eigen::VectorXd& x) {
    const double t = x[0];
    std::size_t region = 0;
    while (region < boundaries.size() && t >= boundaries[region]) ++region;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(class_count);
    p[region_classes[region]] = 1.0;
    return p;
  };
  return f;
}

GroundTruthConditional GroundTruthConditional::radial_posterior(
    const Eigen::MatrixXd& centers, double bandwidth) {
  GroundTruthConditional f;
  f.class_count_ = static_cast<int>(centers.rows());
  f.eval_ = [centers, bandwidth](const Eigen::VectorXd& x) {
    Eigen::VectorXd logits(centers.rows());
    for (Eigen::Index j = 0; j < centers.rows(); ++j) {
      logits[j] = -(x - centers.row(j).transpose()).squaredNorm() /
                  (2.0 * bandwidth * bandwidth);
    }
    logits.array() -= logits.maxCoeff();
    Eigen::VectorXd p = logits.array().exp();
    return Eigen::VectorXd(p / p.sum());
  };
  return f;
}

GroundTruthConditional GroundTruthConditional::affine(const Eigen::MatrixXd& a,
                                                      const Eigen::VectorXd& b) {
  GroundTruthConditional f;
  f.class_count_ = static_cast<int>(a.rows());
  f.eval_ = [a, b](const Eigen::VectorXd& x) { return Eigen::VectorXd(a * x + b); };
  return f;
}

Eigen::VectorXd GroundTruthConditional::operator()(const Eigen::VectorXd& x) const {
  return eval_(x);
}

Eigen::VectorXd mixup_conditional(const GroundTruthConditional& f,
                                  const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& x2, double lambda) {
  return lambda * f(x) + (1.0 - lambda) * f(x2);
}

double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size()) {
    throw DimensionMismatchError("total_variation: dimensions differ");
  }
  return 0.5 * (p - q).cwiseAbs().sum();
}

NoiseReport noise_lower_bound(const GroundTruthConditional& f,
                              const Eigen::VectorXd& x, const Eigen::VectorXd& x2,
                              double lambda, CoefficientOrder order) {
  const Eigen::VectorXd x_mix = lambda * x + (1.0 - lambda) * x2;
  const Eigen::VectorXd truth = f(x_mix);
  const Eigen::VectorXd mixed = mixup_conditional(f, x, x2, lambda);

  const double a = (order == CoefficientOrder::AsPrinted) ? 1.0 - lambda : lambda;
  const double b = 1.0 - a;
  const Eigen::VectorXd combo = a * f(x) + b * f(x2);

  NoiseReport report;
  report.tv = total_variation(mixed, truth);
  report.sup_bound = 0.5 * (truth - combo).cwiseAbs().maxCoeff();
  report.truth_hard_label = argmax_lowest(truth);
  report.mixup_hard_label = argmax_lowest(mixed);
  return report;
}

std::pair<int, int> hard_labels(const GroundTruthConditional& f,
                                const Eigen::VectorXd& x, const Eigen::VectorXd& x2,
                                double lambda) {
  const Eigen::VectorXd x_mix = lambda * x + (1.0 - lambda) * x2;
  return {argmax_lowest(f(x_mix)),
          argmax_lowest(mixup_conditional(f, x, x2, lambda))};
}

NoiseCase classify_case(int y, int y2, int truth_hard) {
  if (truth_hard != y && truth_hard != y2) return NoiseCase::Intrusion;
  if (y != y2) return NoiseCase::CrossPair;
  if (truth_hard != y) {
    throw InconsistentCaseError("classify_case: equal pair labels differ from truth");
  }
  return NoiseCase::SamePair;
}

NoisyFractionResult noisy_fraction_serial(const ClassificationSet& data,
                                          const GroundTruthConditional& f,
                                          double lambda) {
  const int n = data.size();
  for (int i = 0; i < n; ++i) {
    if (argmax_lowest(f(data.features.row(i).transpose())) != data.labels[i]) {
      throw LabelMismatchError(
          fmt::format("noisy_fraction: label of point {} contradicts f", i));
    }
  }

  NoisyFractionResult result;
  long noisy = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Eigen::VectorXd xi = data.features.row(i).transpose();
      const Eigen::VectorXd xj = data.features.row(j).transpose();
      const auto [truth_hard, mixup_hard] = hard_labels(f, xi, xj, lambda);
      if (truth_hard != mixup_hard) ++noisy;
      switch (classify_case(data.labels[i], data.labels[j], truth_hard)) {
        case NoiseCase::SamePair: ++result.same_pair; break;
        case NoiseCase::CrossPair: ++result.cross_pair; break;
        case NoiseCase::Intrusion: ++result.intrusion; break;
      }
    }
  }
  result.fraction = static_cast<double>(noisy) / (static_cast<double>(n) * n);
  return result;
}

NoisyFractionResult noisy_fraction(const ClassificationSet& data,
                                   const GroundTruthConditional& f, double lambda) {
  const int n = data.size();
  for (int i = 0; i < n; ++i) {
    if (argmax_lowest(f(data.features.row(i).transpose())) != data.labels[i]) {
      throw LabelMismatchError(
          fmt::format("noisy_fraction: label of point {} contradicts f", i));
    }
  }

  NoisyFractionResult result;
  long noisy = 0, same = 0, cross = 0, intr = 0;
#pragma omp parallel for schedule(static) reduction(+ : noisy, same, cross, intr)
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd xi = data.features.row(i).transpose();
    for (int j = 0; j < n; ++j) {
      const Eigen::VectorXd xj = data.features.row(j).transpose();
      const auto [truth_hard, mixup_hard] = hard_labels(f, xi, xj, lambda);
      if (truth_hard != mixup_hard) ++noisy;
      switch (classify_case(data.labels[i], data.labels[j], truth_hard)) {
        case NoiseCase::SamePair: ++same; break;
        case NoiseCase::CrossPair: ++cross; break;
        case NoiseCase::Intrusion: ++intr; break;
      }
    }
  }
  result.same_pair = same;
  result.cross_pair = cross;
  result.intrusion = intr;
  result.fraction = static_cast<double>(noisy) / (static_cast<double>(n) * n);
  return result;
}

double regression_noise(const std::function<double(const Eigen::VectorXd&)>& f,
                        const Eigen::VectorXd& x, const Eigen::VectorXd& x2,
                        double lambda) {
  const Eigen::VectorXd x_mix = lambda * x + (1.0 - lambda) * x2;
  return lambda * f(x) + (1.0 - lambda) * f(x2) - f(x_mix);
}

}  // namespace mixdyn
