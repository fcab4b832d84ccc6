#include "deepesn/flat.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace deepesn {

FlatSystem flatten(const DeepReservoir& res) {
  if (res.params().activation != Activation::linear) {
    throw Error(ErrorKind::unsupported_configuration,
                "flatten: only linear reservoirs have a flat equivalent");
  }
  const int layers = res.num_layers();
  const Index n = res.units();
  const double a = res.params().leak_rate;

  FlatSystem flat;
  flat.num_layers = layers;
  flat.units = res.units();
  flat.input_dim = res.params().input_dim;
  flat.v = Matrix::Zero(layers * n, layers * n);
  flat.v_in = Matrix::Zero(layers * n, flat.input_dim);

  for (int j = 0; j < layers; ++j) {
    // Walk down column j: each step left-multiplies by a * W of the next layer.
    Matrix acc = res.effective_matrix(j);
    flat.v.block(j * n, j * n, n, n) = acc;
    for (int i = j + 1; i < layers; ++i) {
      acc = (a * res.inter_layer_weights(i)) * acc;
      flat.v.block(i * n, j * n, n, n) = acc;
    }
  }

  Matrix acc = a * res.input_weights();
  flat.v_in.middleRows(0, n) = acc;
  for (int i = 1; i < layers; ++i) {
    acc = (a * res.inter_layer_weights(i)) * acc;
    flat.v_in.middleRows(i * n, n) = acc;
  }
  return flat;
}

StateTrajectory run_flat(const FlatSystem& flat, const Eigen::Ref<const Matrix>& inputs) {
  if (inputs.rows() == 0) throw Error(ErrorKind::invalid_argument, "run_flat: empty input sequence");
  if (inputs.cols() != flat.v_in.cols()) {
    throw Error(ErrorKind::dimension, "run_flat: input dimension does not match V_in");
  }
  const Index width = flat.v.rows();
  if (flat.v.cols() != width || flat.v_in.rows() != width ||
      width != static_cast<Index>(flat.num_layers) * flat.units) {
    throw Error(ErrorKind::dimension, "run_flat: inconsistent flat system shapes");
  }
  StateTrajectory traj(flat.num_layers, flat.units, inputs.rows());
  Vector x = Vector::Zero(width);
  Vector next(width);
  for (Index t = 0; t < inputs.rows(); ++t) {
    next.noalias() = flat.v * x;
    next.noalias() += flat.v_in * inputs.row(t).transpose();
    x.swap(next);
    traj.states().row(t) = x.transpose();
  }
  return traj;
}

EquivalenceReport verify_equivalence(const DeepReservoir& res, const Eigen::Ref<const Matrix>& inputs,
                                     double abs_tol) {
  if (!(abs_tol > 0.0)) throw Error(ErrorKind::invalid_argument, "abs_tol must be > 0");
  const FlatSystem flat = flatten(res);
  const StateTrajectory layered = run(res, inputs);
  const StateTrajectory flat_traj = run_flat(flat, inputs);

  EquivalenceReport report;
  report.abs_tol = abs_tol;
  report.params = res.params();
  report.steps = inputs.rows();
  report.per_step_diffs.resize(static_cast<std::size_t>(inputs.rows()));
  for (Index t = 0; t < inputs.rows(); ++t) {
    const double d = (layered.states().row(t) - flat_traj.states().row(t)).cwiseAbs().maxCoeff();
    report.per_step_diffs[static_cast<std::size_t>(t)] = d;
    report.max_abs_diff = std::max(report.max_abs_diff, d);
  }
  report.pass = report.max_abs_diff <= abs_tol;
  return report;
}

std::string to_text(const EquivalenceReport& r) {
  char buf[64];
  auto sci = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::ostringstream os;
  os << "pass = " << (r.pass ? "true" : "false") << '\n'
     << "max_abs_diff = " << sci(r.max_abs_diff) << '\n'
     << "abs_tol = " << sci(r.abs_tol) << '\n'
     << "steps = " << r.steps << '\n'
     << "layers = " << r.params.num_layers << '\n'
     << "units = " << r.params.units_per_layer << '\n'
     << "input_dim = " << r.params.input_dim << '\n'
     << "input_scale = " << sci(r.params.input_scale) << '\n'
     << "leak_rate = " << sci(r.params.leak_rate) << '\n'
     << "spectral_radius = " << sci(r.params.spectral_radius) << '\n'
     << "seed = " << r.params.seed << '\n';
  return os.str();
}

}  // namespace deepesn
