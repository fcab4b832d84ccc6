#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "deepesn/mso.hpp"
#include "deepesn/spectral.hpp"

namespace deepesn {

/// Round-trippable decimal form used in every result file.
std::string format_double(double v);

// Grid results: one CSV row per (reservoir config, lambda). Per-guess NRMSE
// values are ';'-joined inside a single column.
std::string results_csv_header();
std::string results_csv_rows(std::string_view task, std::string_view model,
                             std::span<const ConfigRecord> records);

/// Human-readable summary of a grid search: selected config and its scores.
std::string summary_text(const ExperimentResult& result, std::string_view model);

/// One row of the task-by-model comparison table.
struct NrmseRow {
  std::string task;
  std::string model;
  double mean = 0.0;
  double std = 0.0;
};

/// Task | L-deepESN | L-ESN table of selected test NRMSE.
std::string comparison_table(std::span<const NrmseRow> rows);

/// Per-layer spike magnitudes and filtering ratios.
std::string spike_table(const SpikeMetrics& metrics);

// Plot data. Every file starts with a header row naming its columns.
// Each returns the number of data rows written; an empty input writes the
// header only.
std::size_t emit_signal_excerpt(const std::filesystem::path& path, std::span<const double> values,
                                Index first_step = 1);
std::size_t emit_plot_data(const SpectrumReport& report, const std::filesystem::path& path);
std::size_t emit_plot_data(std::span<const NrmseRow> rows, const std::filesystem::path& path);
/// Selected test NRMSE of a grid result as a single-row table.
std::size_t emit_plot_data(const ExperimentResult& result, std::string_view model,
                           const std::filesystem::path& path);

/// Writes `text` to `path`, replacing it; throws ErrorKind::io on failure.
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace deepesn
