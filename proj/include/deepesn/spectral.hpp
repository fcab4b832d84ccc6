#pragma once

#include <span>
#include <string>
#include <vector>

#include "deepesn/mso.hpp"
#include "deepesn/reservoir.hpp"

namespace deepesn {

/// |X_k| for k = 0..floor(T/2) of the unnormalized, unwindowed DFT
/// X_k = sum_t x_t exp(-2 pi i k t / T). Requires T >= 2.
std::vector<double> magnitude_spectrum(std::span<const double> signal);

/// Bin frequencies in cycles per step for a transform of `window` samples.
std::vector<double> frequency_bins(Index window);

/// Layer-averaged state spectra. Each unit's spectrum is scaled to peak 1
/// before averaging over units and guesses; the averaged layer curve is then
/// rescaled to peak 1 so layers plot on a common axis.
struct SpectrumReport {
  std::vector<double> freq_bins;            // cycles per step, 0..0.5
  std::vector<std::vector<double>> per_layer;
  Index window = 0;                         // samples per transform
  Index washout = 0;
  int guesses = 0;
  int units = 0;
  std::size_t zero_units = 0;               // unit series that were identically zero
  HyperParams params;                       // config echo; seed is the base seed

  int num_layers() const noexcept { return static_cast<int>(per_layer.size()); }
};

/// Streams trajectories into per-layer sums so large guess counts never
/// hold more than one trajectory at a time.
class SpectrumAccumulator {
 public:
  SpectrumAccumulator(int num_layers, int units, Index steps, Index washout);

  /// Per-unit transforms run under `options`; reduction is in unit order,
  /// so serial and parallel execution give identical sums.
  void add(const StateTrajectory& traj, RunOptions options = {});

  SpectrumReport finish() const;

 private:
  int num_layers_;
  int units_;
  Index steps_;
  Index washout_;
  int guesses_ = 0;
  std::size_t zero_units_ = 0;
  std::vector<std::vector<double>> sums_;
};

SpectrumReport layer_spectra(std::span<const StateTrajectory> trajectories, Index washout,
                             RunOptions options = {});

/// Runs `guesses` reservoirs (seed = base_seed + g) over the task sequence
/// and accumulates their layer spectra.
SpectrumReport analyze_task_spectra(const MsoTask& task, const HyperParams& params, int guesses,
                                    Index washout, RunOptions options = {});

/// Smallest peak-to-valley ratio for a spike to count as detected.
inline constexpr double kMinSpikeProminence = 2.0;
/// Half-width, in bins, of the window searched around each expected spike.
inline constexpr Index kSpikeSearchRadius = 2;

struct SpikeMetrics {
  std::vector<double> phis;                    // sorted ascending
  std::vector<Index> expected_bins;            // nearest bin to phi / (2 pi)
  std::vector<std::vector<double>> magnitude;  // [layer][spike]
  std::vector<std::vector<Index>> peak_bin;    // [layer][spike]
  std::vector<std::vector<bool>> detected;     // [layer][spike]
  std::vector<double> filtering_ratio;         // per layer

  std::size_t detected_count(int layer) const;
};

/// Spike magnitude = max of the layer curve within +-2 bins of the expected
/// bin. A spike is detected when that maximum is a strict local maximum and
/// at least kMinSpikeProminence times the curve minimum within +-3 bins.
/// Filtering ratio = mean of the 4 highest-frequency spikes over the mean of
/// the 4 lowest (fewer when there are fewer than 8 frequencies).
SpikeMetrics spike_metrics(const SpectrumReport& report, std::span<const double> phis);

}  // namespace deepesn
