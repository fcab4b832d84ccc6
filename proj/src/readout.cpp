#include "deepesn/readout.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SVD>

namespace deepesn {

RidgeSolver::RidgeSolver(const Eigen::Ref<const Matrix>& states, const Eigen::Ref<const Matrix>& targets) {
  if (states.rows() == 0) throw Error(ErrorKind::invalid_argument, "fit_ridge: no training rows");
  if (targets.rows() != states.rows()) {
    throw Error(ErrorKind::dimension, "fit_ridge: states have " + std::to_string(states.rows()) +
                                          " rows, targets have " + std::to_string(targets.rows()));
  }
  if (!states.allFinite() || !targets.allFinite()) {
    throw Error(ErrorKind::numerical, "fit_ridge: non-finite training data");
  }
  Eigen::BDCSVD<Matrix> svd(states, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw Error(ErrorKind::numerical, "fit_ridge: SVD did not converge");
  }
  s_ = svd.singularValues();
  v_ = svd.matrixV();
  uty_.noalias() = svd.matrixU().transpose() * targets;

  const double s_max = s_.size() > 0 ? s_(0) : 0.0;
  cutoff_ = static_cast<double>(std::max(states.rows(), states.cols())) *
            std::numeric_limits<double>::epsilon() * s_max;
  diag_.max_singular = s_max;
  diag_.min_singular = s_.size() > 0 ? s_(s_.size() - 1) : 0.0;
  diag_.rank = (s_.array() > cutoff_).count();
  diag_.rank_deficient = diag_.rank < std::min(states.rows(), states.cols());
}

Readout RidgeSolver::solve(double lambda) const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorKind::invalid_argument, "fit_ridge: lambda must be finite and >= 0");
  }
  Vector filter(s_.size());
  for (Index k = 0; k < s_.size(); ++k) {
    const double s = s_(k);
    if (lambda == 0.0) {
      filter(k) = s > cutoff_ ? 1.0 / s : 0.0;
    } else {
      filter(k) = s / (s * s + lambda);
    }
  }
  Readout r;
  r.regularization = lambda;
  r.diagnostics = diag_;
  r.diagnostics.rank_deficient = lambda == 0.0 && diag_.rank_deficient;
  // (V diag(f) U^T Y)^T, stored N_Y x D.
  r.weights.noalias() = (v_ * (filter.asDiagonal() * uty_)).transpose();
  return r;
}

Readout fit_ridge(const Eigen::Ref<const Matrix>& states, const Eigen::Ref<const Matrix>& targets,
                  double lambda) {
  return RidgeSolver(states, targets).solve(lambda);
}

Matrix predict(const Readout& r, const Eigen::Ref<const Matrix>& states) {
  if (states.cols() != r.weights.cols()) {
    throw Error(ErrorKind::dimension, "predict: states have width " + std::to_string(states.cols()) +
                                          ", readout expects " + std::to_string(r.weights.cols()));
  }
  return states * r.weights.transpose();
}

double nrmse(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) {
    throw Error(ErrorKind::dimension, "nrmse: prediction and target lengths differ");
  }
  if (target.size() < 2) throw Error(ErrorKind::invalid_argument, "nrmse: need at least 2 samples");
  double mean = 0.0;
  for (double y : target) mean += y;
  mean /= static_cast<double>(target.size());
  double centered = 0.0;
  double sse = 0.0;
  for (std::size_t t = 0; t < target.size(); ++t) {
    const double c = target[t] - mean;
    centered += c * c;
    const double e = target[t] - pred[t];
    sse += e * e;
  }
  // centered == T * sigma^2 with sigma^2 the population variance.
  if (!(centered > 0.0)) throw Error(ErrorKind::numerical, "nrmse: target variance is zero");
  return std::sqrt(sse / centered);
}

double nrmse(const Eigen::Ref<const Vector>& pred, const Eigen::Ref<const Vector>& target) {
  return nrmse(std::span<const double>(pred.data(), static_cast<std::size_t>(pred.size())),
               std::span<const double>(target.data(), static_cast<std::size_t>(target.size())));
}

}  // namespace deepesn
