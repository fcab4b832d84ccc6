#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "config.hpp"

namespace deepesn::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,  // a verification ran and did not pass
  kConfigError = 2,
  kRunFailure = 3,   // some configurations failed; partial results kept
  kIoError = 4,
  kNumericalError = 5,
};

/// Grid or single-config MSO experiment. Writes config.echo, results.csv,
/// summary.txt and nrmse.csv under cfg.out, plus equivalence.txt and
/// spectra.csv / spikes.csv when those analyses are enabled.
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

struct SpectrumCommand {
  int task_n = 12;
  HyperParams params{10, 100, 1, 1.0, 0.9, 0.7, Activation::linear, 0};
  int guesses = 100;
  Index washout = 100;
  int workers = 0;
  std::filesystem::path out = "results/spectrum";
};
int run_spectrum(const SpectrumCommand& cmd, std::ostream& log);

struct VerifyFlatCommand {
  HyperParams params{3, 5, 1, 1.0, 0.7, 0.9, Activation::linear, 0};
  Index steps = 200;
  double abs_tol = 1e-8;
  std::optional<int> task_n;  // drive with an MSO sequence instead of U[-1, 1] noise
  std::optional<std::filesystem::path> out;
};
int run_verify_flat(const VerifyFlatCommand& cmd, std::ostream& log);

struct SignalCommand {
  int task_n = 12;
  Index length = 1000;
  Index excerpt = 0;  // 0 = full sequence
  std::filesystem::path out = "signal.csv";
};
int run_signal(const SignalCommand& cmd, std::ostream& log);

}  // namespace deepesn::cli
