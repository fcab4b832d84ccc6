#pragma once

#include <span>

#include "deepesn/common.hpp"

namespace deepesn {

struct RidgeDiagnostics {
  Index rank = 0;               // singular values above the pseudo-inverse cutoff
  bool rank_deficient = false;  // only meaningful for lambda == 0
  double max_singular = 0.0;
  double min_singular = 0.0;
};

/// Trained linear map y(t) = W_out x(t); weights is N_Y x D.
struct Readout {
  Matrix weights;
  double regularization = 0.0;
  RidgeDiagnostics diagnostics;
};

/// Ridge regression through one thin SVD of the state matrix, so any number
/// of regularization values can be solved without refactorizing:
/// W_out^T = V diag(s / (s^2 + lambda)) U^T Y. With lambda == 0 this is the
/// minimum-norm least-squares solution (singular values below
/// max(T, D) * eps * s_max are dropped).
class RidgeSolver {
 public:
  /// states: T x D, targets: T x N_Y, rows aligned in time.
  RidgeSolver(const Eigen::Ref<const Matrix>& states, const Eigen::Ref<const Matrix>& targets);

  Readout solve(double lambda) const;

  Index state_width() const noexcept { return v_.rows(); }
  const RidgeDiagnostics& diagnostics() const noexcept { return diag_; }

 private:
  Matrix v_;       // D x r
  Vector s_;       // r
  Matrix uty_;     // r x N_Y
  double cutoff_;  // pseudo-inverse threshold for lambda == 0
  RidgeDiagnostics diag_;
};

Readout fit_ridge(const Eigen::Ref<const Matrix>& states, const Eigen::Ref<const Matrix>& targets,
                  double lambda);

/// T x N_Y predictions; row t is W_out x(t).
Matrix predict(const Readout& r, const Eigen::Ref<const Matrix>& states);

/// sqrt(sum (target - pred)^2 / (T * var)), var being the population
/// variance of target over the same window.
double nrmse(std::span<const double> pred, std::span<const double> target);
double nrmse(const Eigen::Ref<const Vector>& pred, const Eigen::Ref<const Vector>& target);

}  // namespace deepesn
