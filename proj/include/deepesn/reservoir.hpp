#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "deepesn/common.hpp"

namespace deepesn {

enum class Activation { linear, saturating };

const char* to_string(Activation a) noexcept;

/// Hyperparameters of a stacked reservoir. Leak rate and spectral radius are
/// shared across layers.
struct HyperParams {
  int num_layers = 1;
  int units_per_layer = 1;
  int input_dim = 1;
  double input_scale = 1.0;
  double leak_rate = 1.0;
  double spectral_radius = 0.9;
  Activation activation = Activation::linear;
  std::uint64_t seed = 0;

  Index state_width() const noexcept {
    return static_cast<Index>(num_layers) * units_per_layer;
  }

  /// Throws Error(invalid_argument) when a field is outside its domain.
  void validate() const;
};

/// Default accuracy contract for spectral_radius.
inline constexpr double kSpectralRadiusRelTol = 1e-10;
/// Effective matrices whose spectral radius falls below this cannot be rescaled.
inline constexpr double kMinScalableRadius = 1e-12;
/// Redraws of a recurrent matrix before init gives up.
inline constexpr int kMaxRecurrentRetries = 10;

/// All eigenvalues of a square matrix (real Schur / Hessenberg QR).
Eigen::VectorXcd eigenvalues(const Matrix& m);

/// max |lambda| over the eigenvalues of m. Uses Eigen's real Schur
/// decomposition, which caps QR sweeps at 40 * n; failure to converge
/// raises ErrorKind::numerical. rel_tol must be achievable in double
/// precision (>= 1e-14).
double spectral_radius(const Matrix& m, double rel_tol = kSpectralRadiusRelTol);

/// Scale-free random draws for one seed: every entry is U[-1, 1]. Input and
/// inter-layer matrices are later multiplied by input_scale; recurrent
/// matrices are rescaled per (leak_rate, spectral_radius). The recurrent
/// eigenvalues are kept so that rho((1-a)I + aW) = max |(1-a) + a*lambda|
/// can be evaluated for any leak rate without another decomposition.
struct RawWeights {
  int num_layers = 0;
  int units_per_layer = 0;
  int input_dim = 0;
  std::uint64_t seed = 0;
  Matrix input;
  std::vector<Matrix> inter_layer;  // entry k feeds layer k + 1
  std::vector<Matrix> recurrent;
  std::vector<Eigen::VectorXcd> recurrent_eigenvalues;
};

RawWeights draw_raw_weights(int num_layers, int units_per_layer, int input_dim,
                            std::uint64_t seed);

/// Fixed weights of a stacked leaky reservoir. Layers are 0-based here:
/// layer 0 reads the external input, layer l > 0 reads layer l - 1.
/// Immutable after construction.
class DeepReservoir {
 public:
  DeepReservoir(HyperParams params, Matrix input_weights,
                std::vector<Matrix> inter_layer_weights,
                std::vector<Matrix> recurrent_weights);

  const HyperParams& params() const noexcept { return params_; }
  int num_layers() const noexcept { return params_.num_layers; }
  int units() const noexcept { return params_.units_per_layer; }

  const Matrix& input_weights() const noexcept { return input_; }
  /// Weights from layer `layer - 1` into `layer`; requires 1 <= layer < num_layers.
  const Matrix& inter_layer_weights(int layer) const;
  const Matrix& recurrent_weights(int layer) const;

  /// (1 - a) I + a W_hat for the given layer.
  Matrix effective_matrix(int layer) const;

 private:
  HyperParams params_;
  Matrix input_;
  std::vector<Matrix> inter_;
  std::vector<Matrix> recurrent_;
};

/// Builds a reservoir from pre-drawn weights. Each recurrent matrix is
/// rescaled through its effective matrix: M = (1-a)I + aW_raw is scaled to
/// the target radius and W_hat = (M_scaled - (1-a)I) / a.
DeepReservoir build_reservoir(const RawWeights& raw, const HyperParams& params);

/// draw_raw_weights + build_reservoir.
DeepReservoir init_reservoir(const HyperParams& params);

struct LayeredState {
  std::vector<Vector> per_layer;

  static LayeredState zeros(int num_layers, int units);
};

/// Time-major record of concatenated layer states. Row t is the global state
/// after consuming input t; columns [l * N_R, (l + 1) * N_R) belong to layer l.
class StateTrajectory {
 public:
  StateTrajectory(int num_layers, int units, Index steps);

  Index steps() const noexcept { return states_.rows(); }
  Index width() const noexcept { return states_.cols(); }
  int num_layers() const noexcept { return num_layers_; }
  int units() const noexcept { return units_; }

  const Matrix& states() const noexcept { return states_; }
  Matrix& states() noexcept { return states_; }

  auto layer_block(int layer) const {
    return states_.middleCols(static_cast<Index>(layer) * units_, units_);
  }

  LayeredState at(Index t) const;

 private:
  int num_layers_;
  int units_;
  Matrix states_;
};

/// One update of every layer. Layer l > 0 consumes the already-updated state
/// of layer l - 1 at the same time step.
LayeredState step(const DeepReservoir& res, const LayeredState& state,
                  const Eigen::Ref<const Vector>& input);

/// Runs from the all-zero state. inputs is T x N_U with one row per step.
StateTrajectory run(const DeepReservoir& res, const Eigen::Ref<const Matrix>& inputs);

/// Convenience overload for scalar input sequences.
StateTrajectory run(const DeepReservoir& res, std::span<const double> inputs);

}  // namespace deepesn
