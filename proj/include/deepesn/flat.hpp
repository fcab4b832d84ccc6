#pragma once

#include <string>
#include <vector>

#include "deepesn/reservoir.hpp"

namespace deepesn {

/// Single-layer system x(t) = V x(t-1) + V_in u(t) equivalent to a linear
/// stacked reservoir. V is lower block triangular with N_R x N_R blocks.
struct FlatSystem {
  Matrix v;
  Matrix v_in;
  int num_layers = 0;
  int units = 0;
  int input_dim = 0;

  auto block(int i, int j) const {
    return v.block(static_cast<Index>(i) * units, static_cast<Index>(j) * units, units, units);
  }
  auto input_block(int i) const {
    return v_in.middleRows(static_cast<Index>(i) * units, units);
  }
};

/// Assembles V and V_in block by block. Below the diagonal,
/// V(i, j) = (a W_i)(a W_{i-1}) ... (a W_{j+1}) M_j with the highest layer
/// leftmost; V_in(i) = (a W_i) ... (a W_1) a W_in. Throws
/// ErrorKind::unsupported_configuration for saturating reservoirs.
FlatSystem flatten(const DeepReservoir& res);

/// Iterates the flat recurrence from zero; same column layout as run().
StateTrajectory run_flat(const FlatSystem& flat, const Eigen::Ref<const Matrix>& inputs);

struct EquivalenceReport {
  double max_abs_diff = 0.0;
  bool pass = false;
  double abs_tol = 0.0;
  std::vector<double> per_step_diffs;  // max |layered - flat| at each step
  HyperParams params;
  Index steps = 0;
};

EquivalenceReport verify_equivalence(const DeepReservoir& res, const Eigen::Ref<const Matrix>& inputs,
                                     double abs_tol);

/// key = value record with the config echo; stable across runs.
std::string to_text(const EquivalenceReport& report);

}  // namespace deepesn
