#include "deepesn/reservoir.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "deepesn/rng.hpp"

namespace deepesn {

const char* to_string(Activation a) noexcept {
  return a == Activation::linear ? "linear" : "saturating";
}

void HyperParams::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::invalid_argument, msg); };
  if (num_layers < 1) fail("num_layers must be >= 1");
  if (units_per_layer < 1) fail("units_per_layer must be >= 1");
  if (input_dim < 1) fail("input_dim must be >= 1");
  if (!(input_scale >= 0.0) || !std::isfinite(input_scale)) fail("input_scale must be finite and >= 0");
  if (!(leak_rate >= 0.0 && leak_rate <= 1.0)) fail("leak_rate must lie in [0, 1]");
  if (!(spectral_radius > 0.0) || !std::isfinite(spectral_radius)) {
    fail("spectral_radius must be finite and > 0");
  }
}

Eigen::VectorXcd eigenvalues(const Matrix& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::dimension, "eigenvalues: matrix is " + std::to_string(m.rows()) +
                                          "x" + std::to_string(m.cols()) + ", expected square");
  }
  if (!m.allFinite()) throw Error(ErrorKind::numerical, "eigenvalues: non-finite entries");
  if (m.rows() == 0) return {};
  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::numerical, "eigenvalues: real Schur iteration did not converge");
  }
  return solver.eigenvalues();
}

double spectral_radius(const Matrix& m, double rel_tol) {
  if (!(rel_tol >= 1e-14)) {
    throw Error(ErrorKind::invalid_argument, "spectral_radius: rel_tol below double-precision reach");
  }
  const Eigen::VectorXcd ev = eigenvalues(m);
  return ev.size() == 0 ? 0.0 : ev.cwiseAbs().maxCoeff();
}

namespace {

// rho((1 - a) I + a W) from the eigenvalues of W.
double shifted_radius(const Eigen::VectorXcd& ev, double a) {
  double r = 0.0;
  for (const auto& lambda : ev) r = std::max(r, std::abs((1.0 - a) + a * lambda));
  return r;
}

void check_shape(const Matrix& m, Index rows, Index cols, const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw Error(ErrorKind::dimension, std::string(what) + ": expected " + std::to_string(rows) +
                                          "x" + std::to_string(cols) + ", got " +
                                          std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
}

}  // namespace

RawWeights draw_raw_weights(int num_layers, int units, int input_dim, std::uint64_t seed) {
  if (num_layers < 1 || units < 1 || input_dim < 1) {
    throw Error(ErrorKind::invalid_argument, "draw_raw_weights: dimensions must be >= 1");
  }
  RawWeights raw;
  raw.num_layers = num_layers;
  raw.units_per_layer = units;
  raw.input_dim = input_dim;
  raw.seed = seed;
  raw.input = CounterRng(seed, {Stream::input, 1}).matrix(units, input_dim, -1.0, 1.0);
  for (int l = 1; l < num_layers; ++l) {
    raw.inter_layer.push_back(
        CounterRng(seed, {Stream::inter_layer, static_cast<std::uint32_t>(l + 1)})
            .matrix(units, units, -1.0, 1.0));
  }
  for (int l = 0; l < num_layers; ++l) {
    raw.recurrent.push_back(
        CounterRng(seed, {Stream::recurrent, static_cast<std::uint32_t>(l + 1)})
            .matrix(units, units, -1.0, 1.0));
    raw.recurrent_eigenvalues.push_back(eigenvalues(raw.recurrent.back()));
  }
  return raw;
}

DeepReservoir::DeepReservoir(HyperParams params, Matrix input_weights,
                             std::vector<Matrix> inter_layer_weights,
                             std::vector<Matrix> recurrent_weights)
    : params_(params),
      input_(std::move(input_weights)),
      inter_(std::move(inter_layer_weights)),
      recurrent_(std::move(recurrent_weights)) {
  params_.validate();
  const Index n = params_.units_per_layer;
  check_shape(input_, n, params_.input_dim, "input weights");
  if (inter_.size() != static_cast<std::size_t>(params_.num_layers - 1)) {
    throw Error(ErrorKind::dimension, "expected num_layers - 1 inter-layer matrices");
  }
  if (recurrent_.size() != static_cast<std::size_t>(params_.num_layers)) {
    throw Error(ErrorKind::dimension, "expected num_layers recurrent matrices");
  }
  for (const auto& w : inter_) check_shape(w, n, n, "inter-layer weights");
  for (const auto& w : recurrent_) check_shape(w, n, n, "recurrent weights");
}

const Matrix& DeepReservoir::inter_layer_weights(int layer) const {
  if (layer < 1 || layer >= num_layers()) {
    throw Error(ErrorKind::dimension, "inter_layer_weights: layer out of range");
  }
  return inter_[static_cast<std::size_t>(layer - 1)];
}

const Matrix& DeepReservoir::recurrent_weights(int layer) const {
  if (layer < 0 || layer >= num_layers()) {
    throw Error(ErrorKind::dimension, "recurrent_weights: layer out of range");
  }
  return recurrent_[static_cast<std::size_t>(layer)];
}

Matrix DeepReservoir::effective_matrix(int layer) const {
  const double a = params_.leak_rate;
  Matrix m = a * recurrent_weights(layer);
  m.diagonal().array() += 1.0 - a;
  return m;
}

DeepReservoir build_reservoir(const RawWeights& raw, const HyperParams& params) {
  params.validate();
  if (params.leak_rate == 0.0) {
    throw Error(ErrorKind::degenerate_configuration,
                "leak_rate = 0 makes every effective matrix the identity; cannot rescale");
  }
  if (raw.num_layers != params.num_layers || raw.units_per_layer != params.units_per_layer ||
      raw.input_dim != params.input_dim) {
    throw Error(ErrorKind::dimension, "build_reservoir: raw weights do not match params");
  }
  const double a = params.leak_rate;
  const Index n = params.units_per_layer;

  Matrix input = params.input_scale * raw.input;
  std::vector<Matrix> inter;
  inter.reserve(raw.inter_layer.size());
  for (const auto& w : raw.inter_layer) inter.push_back(params.input_scale * w);

  std::vector<Matrix> recurrent;
  recurrent.reserve(raw.recurrent.size());
  for (int l = 0; l < params.num_layers; ++l) {
    Matrix w_raw = raw.recurrent[static_cast<std::size_t>(l)];
    double rho = shifted_radius(raw.recurrent_eigenvalues[static_cast<std::size_t>(l)], a);
    for (std::uint32_t retry = 1; rho < kMinScalableRadius; ++retry) {
      if (retry > static_cast<std::uint32_t>(kMaxRecurrentRetries)) {
        throw Error(ErrorKind::unscalable_matrix,
                    "layer " + std::to_string(l + 1) + ": effective matrix has spectral radius below " +
                        "1e-12 after " + std::to_string(kMaxRecurrentRetries) + " redraws");
      }
      w_raw = CounterRng(params.seed, {Stream::recurrent, static_cast<std::uint32_t>(l + 1), retry})
                  .matrix(n, n, -1.0, 1.0);
      rho = shifted_radius(eigenvalues(w_raw), a);
    }
    Matrix m = a * w_raw;
    m.diagonal().array() += 1.0 - a;
    m *= params.spectral_radius / rho;
    m.diagonal().array() -= 1.0 - a;
    recurrent.push_back(m / a);
  }
  return DeepReservoir(params, std::move(input), std::move(inter), std::move(recurrent));
}

DeepReservoir init_reservoir(const HyperParams& params) {
  params.validate();
  if (params.leak_rate == 0.0) {
    throw Error(ErrorKind::degenerate_configuration,
                "leak_rate = 0 makes every effective matrix the identity; cannot rescale");
  }
  return build_reservoir(
      draw_raw_weights(params.num_layers, params.units_per_layer, params.input_dim, params.seed),
      params);
}

LayeredState LayeredState::zeros(int num_layers, int units) {
  LayeredState s;
  s.per_layer.assign(static_cast<std::size_t>(num_layers), Vector::Zero(units));
  return s;
}

StateTrajectory::StateTrajectory(int num_layers, int units, Index steps)
    : num_layers_(num_layers),
      units_(units),
      states_(Matrix::Zero(steps, static_cast<Index>(num_layers) * units)) {}

LayeredState StateTrajectory::at(Index t) const {
  LayeredState s;
  s.per_layer.reserve(static_cast<std::size_t>(num_layers_));
  for (int l = 0; l < num_layers_; ++l) {
    s.per_layer.emplace_back(states_.row(t).segment(static_cast<Index>(l) * units_, units_).transpose());
  }
  return s;
}

namespace {

// Reused buffers for the layer recurrence.
class Stepper {
 public:
  explicit Stepper(const DeepReservoir& res)
      : res_(res),
        a_(res.params().leak_rate),
        saturating_(res.params().activation == Activation::saturating),
        pre_(res.units()) {}

  // Advances `layers` in place by one time step.
  void advance(std::vector<Vector>& layers, const Eigen::Ref<const Vector>& input) {
    for (int l = 0; l < res_.num_layers(); ++l) {
      Vector& x = layers[static_cast<std::size_t>(l)];
      if (l == 0) {
        pre_.noalias() = res_.input_weights() * input;
      } else {
        pre_.noalias() = res_.inter_layer_weights(l) * layers[static_cast<std::size_t>(l - 1)];
      }
      pre_.noalias() += res_.recurrent_weights(l) * x;
      if (saturating_) pre_ = pre_.array().tanh();
      x = (1.0 - a_) * x + a_ * pre_;
    }
  }

 private:
  const DeepReservoir& res_;
  double a_;
  bool saturating_;
  Vector pre_;
};

void check_input_width(const DeepReservoir& res, Index width) {
  if (width != res.params().input_dim) {
    throw Error(ErrorKind::dimension, "input has dimension " + std::to_string(width) +
                                          ", reservoir expects " +
                                          std::to_string(res.params().input_dim));
  }
}

}  // namespace

LayeredState step(const DeepReservoir& res, const LayeredState& state,
                  const Eigen::Ref<const Vector>& input) {
  check_input_width(res, input.size());
  if (state.per_layer.size() != static_cast<std::size_t>(res.num_layers())) {
    throw Error(ErrorKind::dimension, "step: state has wrong layer count");
  }
  for (const auto& x : state.per_layer) {
    if (x.size() != res.units()) throw Error(ErrorKind::dimension, "step: layer state has wrong size");
  }
  LayeredState next = state;
  Stepper(res).advance(next.per_layer, input);
  return next;
}

StateTrajectory run(const DeepReservoir& res, const Eigen::Ref<const Matrix>& inputs) {
  if (inputs.rows() == 0) throw Error(ErrorKind::invalid_argument, "run: empty input sequence");
  check_input_width(res, inputs.cols());
  const Index n = res.units();
  StateTrajectory traj(res.num_layers(), res.units(), inputs.rows());
  std::vector<Vector> layers(static_cast<std::size_t>(res.num_layers()), Vector::Zero(n));
  Stepper stepper(res);
  Matrix& out = traj.states();
  for (Index t = 0; t < inputs.rows(); ++t) {
    stepper.advance(layers, inputs.row(t).transpose());
    for (int l = 0; l < res.num_layers(); ++l) {
      out.row(t).segment(static_cast<Index>(l) * n, n) = layers[static_cast<std::size_t>(l)].transpose();
    }
  }
  return traj;
}

StateTrajectory run(const DeepReservoir& res, std::span<const double> inputs) {
  const Eigen::Map<const Matrix> m(inputs.data(), static_cast<Index>(inputs.size()), 1);
  return run(res, m);
}

}  // namespace deepesn
