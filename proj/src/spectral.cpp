#include "deepesn/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <exception>
#include <memory>
#include <numbers>

#include <fftw3.h>
#include <omp.h>

namespace deepesn {

namespace {

// FFTW's planner is not thread-safe; executing a plan on new arrays is.
class RealFftPlan {
 public:
  explicit RealFftPlan(Index n) : n_(n) {
    auto* in = fftw_alloc_real(static_cast<std::size_t>(n));
    auto* out = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
#pragma omp critical(deepesn_fftw_planner)
    plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in, out, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
    if (plan_ == nullptr) throw Error(ErrorKind::numerical, "FFTW could not create a plan");
  }
  RealFftPlan(const RealFftPlan&) = delete;
  RealFftPlan& operator=(const RealFftPlan&) = delete;
  ~RealFftPlan() {
#pragma omp critical(deepesn_fftw_planner)
    fftw_destroy_plan(plan_);
  }

  // Writes floor(n/2) + 1 magnitudes.
  void magnitudes(const double* signal, double* out) const {
    struct Buffers {
      double* in;
      fftw_complex* spec;
      ~Buffers() {
        fftw_free(in);
        fftw_free(spec);
      }
    } buf{fftw_alloc_real(static_cast<std::size_t>(n_)),
          fftw_alloc_complex(static_cast<std::size_t>(n_ / 2 + 1))};
    std::copy(signal, signal + n_, buf.in);
    fftw_execute_dft_r2c(plan_, buf.in, buf.spec);
    for (Index k = 0; k <= n_ / 2; ++k) out[k] = std::hypot(buf.spec[k][0], buf.spec[k][1]);
  }

 private:
  Index n_;
  fftw_plan plan_ = nullptr;
};

int resolve_workers(const RunOptions& options) {
  if (options.execution == Execution::serial) return 1;
  return options.workers > 0 ? options.workers : omp_get_max_threads();
}

}  // namespace

std::vector<double> magnitude_spectrum(std::span<const double> signal) {
  if (signal.size() < 2) throw Error(ErrorKind::invalid_argument, "magnitude_spectrum: need at least 2 samples");
  const auto n = static_cast<Index>(signal.size());
  std::vector<double> out(static_cast<std::size_t>(n / 2 + 1));
  RealFftPlan(n).magnitudes(signal.data(), out.data());
  return out;
}

std::vector<double> frequency_bins(Index window) {
  std::vector<double> f(static_cast<std::size_t>(window / 2 + 1));
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = static_cast<double>(k) / static_cast<double>(window);
  return f;
}

SpectrumAccumulator::SpectrumAccumulator(int num_layers, int units, Index steps, Index washout)
    : num_layers_(num_layers), units_(units), steps_(steps), washout_(washout) {
  if (num_layers < 1 || units < 1) throw Error(ErrorKind::invalid_argument, "spectra: empty reservoir");
  if (washout < 0 || steps - washout < 2) {
    throw Error(ErrorKind::invalid_argument, "spectra: analysis window must hold at least 2 steps");
  }
  const auto bins = static_cast<std::size_t>((steps - washout) / 2 + 1);
  sums_.assign(static_cast<std::size_t>(num_layers), std::vector<double>(bins, 0.0));
}

void SpectrumAccumulator::add(const StateTrajectory& traj, RunOptions options) {
  if (traj.num_layers() != num_layers_ || traj.units() != units_ || traj.steps() != steps_) {
    throw Error(ErrorKind::dimension, "spectra: trajectory shape differs from earlier guesses");
  }
  const Index window = steps_ - washout_;
  const Index bins = window / 2 + 1;
  const Index width = traj.width();
  const RealFftPlan plan(window);

  // Column c of the trajectory is one unit's time series; columns are
  // contiguous in the column-major state matrix.
  Matrix spectra(bins, width);
  std::vector<char> zero(static_cast<std::size_t>(width), 0);
  std::exception_ptr failure;
#pragma omp parallel for schedule(static) num_threads(resolve_workers(options))
  for (Index c = 0; c < width; ++c) {
    try {
      const double* series = traj.states().col(c).data() + washout_;
      double* out = spectra.col(c).data();
      plan.magnitudes(series, out);
      const double peak = *std::max_element(out, out + bins);
      if (peak > 0.0) {
        for (Index k = 0; k < bins; ++k) out[k] /= peak;
      } else {
        zero[static_cast<std::size_t>(c)] = 1;
      }
    } catch (...) {
#pragma omp critical(deepesn_spectra_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  for (int l = 0; l < num_layers_; ++l) {
    auto& sum = sums_[static_cast<std::size_t>(l)];
    for (Index u = 0; u < units_; ++u) {
      const Index c = static_cast<Index>(l) * units_ + u;
      if (zero[static_cast<std::size_t>(c)]) {
        ++zero_units_;
        continue;
      }
      for (Index k = 0; k < bins; ++k) sum[static_cast<std::size_t>(k)] += spectra(k, c);
    }
  }
  ++guesses_;
}

SpectrumReport SpectrumAccumulator::finish() const {
  if (guesses_ == 0) throw Error(ErrorKind::invalid_argument, "spectra: no trajectories accumulated");
  SpectrumReport r;
  r.window = steps_ - washout_;
  r.washout = washout_;
  r.guesses = guesses_;
  r.units = units_;
  r.zero_units = zero_units_;
  r.freq_bins = frequency_bins(r.window);
  r.params.num_layers = num_layers_;
  r.params.units_per_layer = units_;
  const double count = static_cast<double>(units_) * guesses_;
  for (const auto& sum : sums_) {
    std::vector<double> curve(sum.size());
    for (std::size_t k = 0; k < sum.size(); ++k) curve[k] = sum[k] / count;
    const double peak = *std::max_element(curve.begin(), curve.end());
    if (peak > 0.0) {
      for (double& v : curve) v /= peak;
    }
    r.per_layer.push_back(std::move(curve));
  }
  return r;
}

SpectrumReport layer_spectra(std::span<const StateTrajectory> trajectories, Index washout,
                             RunOptions options) {
  if (trajectories.empty()) throw Error(ErrorKind::invalid_argument, "spectra: no trajectories");
  const auto& first = trajectories.front();
  SpectrumAccumulator acc(first.num_layers(), first.units(), first.steps(), washout);
  for (const auto& t : trajectories) acc.add(t, options);
  return acc.finish();
}

SpectrumReport analyze_task_spectra(const MsoTask& task, const HyperParams& params, int guesses,
                                    Index washout, RunOptions options) {
  if (guesses < 1) throw Error(ErrorKind::invalid_argument, "guesses must be >= 1");
  const auto u = generate_mso(task);
  SpectrumAccumulator acc(params.num_layers, params.units_per_layer, static_cast<Index>(u.size()), washout);
  for (int g = 0; g < guesses; ++g) {
    HyperParams p = params;
    p.seed = params.seed + static_cast<std::uint64_t>(g);
    acc.add(run(init_reservoir(p), u), options);
  }
  SpectrumReport r = acc.finish();
  r.params = params;
  return r;
}

std::size_t SpikeMetrics::detected_count(int layer) const {
  const auto& d = detected[static_cast<std::size_t>(layer)];
  return static_cast<std::size_t>(std::count(d.begin(), d.end(), true));
}

SpikeMetrics spike_metrics(const SpectrumReport& report, std::span<const double> phis) {
  if (phis.size() < 2) throw Error(ErrorKind::invalid_argument, "spike_metrics: need at least 2 frequencies");
  const auto bins = static_cast<Index>(report.freq_bins.size());
  if (bins < 2 || report.window < 2) throw Error(ErrorKind::invalid_argument, "spike_metrics: empty report");

  SpikeMetrics m;
  m.phis.assign(phis.begin(), phis.end());
  std::sort(m.phis.begin(), m.phis.end());
  for (double phi : m.phis) {
    const double f = phi / (2.0 * std::numbers::pi);
    if (!(f >= 0.0 && f <= 0.5)) {
      throw Error(ErrorKind::invalid_argument, "spike_metrics: frequency outside [0, Nyquist]");
    }
    m.expected_bins.push_back(
        std::min<Index>(bins - 1, static_cast<Index>(std::llround(f * static_cast<double>(report.window)))));
  }

  const std::size_t tail = std::min<std::size_t>(4, m.phis.size() / 2);
  for (const auto& curve : report.per_layer) {
    if (static_cast<Index>(curve.size()) != bins) {
      throw Error(ErrorKind::dimension, "spike_metrics: curve length differs from bin count");
    }
    auto value = [&](Index k) { return curve[static_cast<std::size_t>(k)]; };
    std::vector<double> mags;
    std::vector<Index> peaks;
    std::vector<bool> found;
    for (Index center : m.expected_bins) {
      const Index lo = std::max<Index>(0, center - kSpikeSearchRadius);
      const Index hi = std::min<Index>(bins - 1, center + kSpikeSearchRadius);
      Index best = lo;
      for (Index k = lo + 1; k <= hi; ++k) {
        if (value(k) > value(best)) best = k;
      }
      const bool local_max = best > 0 && best < bins - 1 && value(best) > value(best - 1) &&
                             value(best) > value(best + 1);
      double valley = value(best);
      for (Index k = std::max<Index>(0, center - kSpikeSearchRadius - 1);
           k <= std::min<Index>(bins - 1, center + kSpikeSearchRadius + 1); ++k) {
        valley = std::min(valley, value(k));
      }
      const bool prominent = value(best) >= kMinSpikeProminence * valley;
      mags.push_back(value(best));
      peaks.push_back(best);
      found.push_back(local_max && prominent);
    }
    double low = 0.0;
    double high = 0.0;
    for (std::size_t i = 0; i < tail; ++i) {
      low += mags[i];
      high += mags[mags.size() - 1 - i];
    }
    m.filtering_ratio.push_back(low > 0.0 ? high / low : 0.0);
    m.magnitude.push_back(std::move(mags));
    m.peak_bin.push_back(std::move(peaks));
    m.detected.push_back(std::move(found));
  }
  return m;
}

}  // namespace deepesn
