#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "deepesn/readout.hpp"
#include "deepesn/reservoir.hpp"

namespace deepesn {

/// Frequencies (radians per step) of the twelve canonical MSO sinusoids.
inline constexpr std::array<double, 12> kMsoPhis = {0.2,  0.331, 0.42, 0.51, 0.63, 0.74,
                                                    0.85, 0.97,  1.08, 1.19, 1.27, 1.32};

/// 1-based inclusive step ranges. Washout steps are the first `washout`
/// steps of the training range; they are simulated but not regressed on.
struct SplitSpec {
  Index train_begin = 1;
  Index train_end = 400;
  Index washout = 100;
  Index validation_begin = 401;
  Index validation_end = 700;
  Index test_begin = 701;
  Index test_end = 1000;

  void validate(Index length) const;

  /// 0-based [offset, offset + count) row windows into a trajectory.
  struct Rows {
    Index offset;
    Index count;
  };
  Rows fit_rows() const noexcept { return {train_begin - 1 + washout, train_end - train_begin + 1 - washout}; }
  Rows validation_rows() const noexcept { return {validation_begin - 1, validation_end - validation_begin + 1}; }
  Rows test_rows() const noexcept { return {test_begin - 1, test_end - test_begin + 1}; }
};

struct MsoTask {
  int n = 5;
  std::vector<double> phis;
  Index length = 1000;
  SplitSpec split;

  /// MSO-n with the first n canonical frequencies and the default split.
  static MsoTask canonical(int n);

  void validate() const;
  std::string name() const { return "mso" + std::to_string(n); }
};

/// u(t) = sum_i sin(phi_i t) for t = 1..length.
std::vector<double> generate_mso(const MsoTask& task);

/// The same sum for t = first..first + length - 1, without a task split.
std::vector<double> mso_signal(std::span<const double> phis, Index length, Index first = 1);

/// Next-step targets: element t-1 holds u(t + 1), for t = 1..length.
std::vector<double> mso_targets(const MsoTask& task);

/// Ridge factorization over the post-washout training rows only; rows
/// outside the fit window never reach the readout.
RidgeSolver split_readout_solver(const StateTrajectory& traj, const Eigen::Ref<const Vector>& targets,
                                 const SplitSpec& split);

/// How independent work items are scheduled.
enum class Execution { serial, parallel };

struct RunOptions {
  Execution execution = Execution::parallel;
  int workers = 0;  // 0 = OpenMP default
};

/// Per-guess and aggregate NRMSE for one regularization value.
struct LambdaScores {
  double lambda = 0.0;
  std::vector<double> validation;  // indexed by guess
  std::vector<double> test;
  double mean_validation = 0.0;
  double std_validation = 0.0;
  double mean_test = 0.0;
  double std_test = 0.0;
};

/// Scores for one reservoir configuration over every lambda in the grid.
struct ConfigEvaluation {
  HyperParams params;  // seed field holds the base seed
  std::vector<LambdaScores> per_lambda;
};

/// Runs `guesses` reservoirs (seed = base_seed + g) once each over the full
/// sequence, fits the readout on the post-washout training rows and scores
/// validation and test windows for every lambda. Throws
/// ErrorKind::numerical naming the config if any state is non-finite.
ConfigEvaluation evaluate_config(const MsoTask& task, const HyperParams& params,
                                 std::span<const double> lambda_grid, int guesses,
                                 std::uint64_t base_seed, RunOptions options = {});

/// Same protocol with weights drawn ahead of time; raw[g] serves guess g.
ConfigEvaluation evaluate_config(const MsoTask& task, const HyperParams& params,
                                 std::span<const double> lambda_grid,
                                 std::span<const RawWeights> raw, RunOptions options = {});

/// Mean and population standard deviation; values are sorted before the
/// reduction so the result does not depend on guess order.
std::pair<double, double> mean_and_std(std::vector<double> values);

struct GridSpec {
  std::vector<double> input_scales;
  std::vector<double> leak_rates;
  std::vector<double> spectral_radii;
  std::vector<double> lambdas;
  int num_layers = 10;
  int units_per_layer = 100;
  int guesses = 10;
  std::uint64_t base_seed = 0;
  Activation activation = Activation::linear;

  /// Model-selection grid used for the MSO experiments.
  static GridSpec table1();

  void validate() const;
  std::size_t reservoir_configs() const noexcept {
    return input_scales.size() * leak_rates.size() * spectral_radii.size();
  }
};

struct ConfigRecord {
  HyperParams params;  // seed field holds the base seed
  LambdaScores scores;
  std::string error;   // non-empty when the config failed

  bool ok() const noexcept { return error.empty(); }
};

struct ExperimentResult {
  std::string task;
  GridSpec grid;
  /// Canonical order: input_scale, leak_rate, spectral_radius, lambda, each
  /// following its candidate list.
  std::vector<ConfigRecord> records;
  std::optional<std::size_t> selected;
  std::size_t failed_configs = 0;

  const ConfigRecord* best() const { return selected ? &records[*selected] : nullptr; }
};

/// Called once per completed reservoir configuration with its records (one
/// per lambda). Invocations are serialized.
using RecordSink = std::function<void(std::span<const ConfigRecord>)>;

/// Exhaustive sweep: reservoirs are simulated once per (scale, leak, radius)
/// and guess; every lambda reuses those states. Selection minimizes mean
/// validation NRMSE, first minimum in canonical order wins.
ExperimentResult grid_search(const MsoTask& task, const GridSpec& grid, RunOptions options = {},
                             const RecordSink& sink = {});

/// Index of the first record with the smallest mean validation NRMSE among
/// successful records.
std::optional<std::size_t> select_best(std::span<const ConfigRecord> records);

}  // namespace deepesn
