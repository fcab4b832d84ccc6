#include "commands.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include "deepesn/flat.hpp"
#include "deepesn/report.hpp"
#include "deepesn/rng.hpp"

namespace deepesn::cli {

namespace {

namespace fs = std::filesystem;

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(ErrorKind::io, "cannot create output directory " + dir.string());
}

// Appends completed records as they arrive so an interrupted run leaves
// valid rows on disk.
class PartialResults {
 public:
  explicit PartialResults(fs::path path) : path_(std::move(path)) {
    out_.open(path_, std::ios::binary | std::ios::trunc);
    if (!out_) throw Error(ErrorKind::io, "cannot open " + path_.string());
    out_ << results_csv_header();
    out_.flush();
  }

  void append(std::string_view task, std::string_view model, std::span<const ConfigRecord> records) {
    out_ << results_csv_rows(task, model, records);
    out_.flush();
    if (!out_) throw Error(ErrorKind::io, "write to " + path_.string() + " failed");
  }

  void discard() {
    out_.close();
    fs::remove(path_);
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::io: return kIoError;
    case ErrorKind::numerical:
    case ErrorKind::unscalable_matrix: return kNumericalError;
    default: return kConfigError;
  }
}

HyperParams selected_params(const ExperimentResult& r) {
  HyperParams p = r.best()->params;
  p.seed = r.grid.base_seed;
  return p;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  try {
    ensure_dir(cfg.out);
    write_text_file(cfg.out / "config.echo", cfg.to_json().dump(2) + "\n");
    fs::remove(cfg.out / "results.csv");
    fs::remove(cfg.out / "failures.txt");

    const MsoTask task = cfg.task();
    const RunOptions options{Execution::parallel, cfg.workers};
    std::vector<Model> models;
    if (cfg.model == Model::both) {
      models = {Model::deep, Model::shallow};
    } else {
      models = {cfg.model};
    }

    PartialResults partial(cfg.out / "results.partial.csv");
    std::vector<std::pair<Model, ExperimentResult>> results;
    for (Model m : models) {
      const GridSpec grid = cfg.grid_for(m);
      log << "running " << task.name() << " " << to_string(m) << " (" << grid.num_layers << " x "
          << grid.units_per_layer << "), " << grid.reservoir_configs() << " reservoir configs x "
          << grid.guesses << " guesses\n";
      auto sink = [&](std::span<const ConfigRecord> recs) { partial.append(task.name(), to_string(m), recs); };
      results.emplace_back(m, grid_search(task, grid, options, sink));
    }

    std::string csv = results_csv_header();
    std::string summary;
    std::vector<NrmseRow> rows;
    std::ostringstream failures;
    std::size_t failed = 0;
    for (const auto& [m, r] : results) {
      csv += results_csv_rows(task.name(), to_string(m), r.records);
      summary += summary_text(r, to_string(m)) + "\n";
      if (const auto* best = r.best()) {
        rows.push_back({task.name(), to_string(m), best->scores.mean_test, best->scores.std_test});
      }
      for (std::size_t i = 0; i < r.records.size(); i += r.grid.lambdas.size()) {
        if (r.records[i].ok()) continue;
        ++failed;
        const auto& p = r.records[i].params;
        failures << to_string(m) << " input_scale=" << format_double(p.input_scale)
                 << " leak_rate=" << format_double(p.leak_rate)
                 << " spectral_radius=" << format_double(p.spectral_radius) << ": " << r.records[i].error
                 << '\n';
      }
    }
    summary += comparison_table(rows);
    write_text_file(cfg.out / "results.csv", csv);
    partial.discard();
    write_text_file(cfg.out / "summary.txt", summary);
    if (emit_plot_data(std::span<const NrmseRow>(rows), cfg.out / "nrmse.csv") == 0) {
      log << "warning: no successful configuration; nrmse.csv holds only its header\n";
    }
    log << summary;

    int status = kOk;
    const ExperimentResult* deep = nullptr;
    for (const auto& [m, r] : results) {
      if (m == Model::deep && r.best()) deep = &r;
    }
    if (cfg.equivalence && deep) {
      HyperParams p = selected_params(*deep);
      const auto u = generate_mso(task);
      const Eigen::Map<const Matrix> inputs(u.data(), static_cast<Index>(u.size()), 1);
      const auto res = init_reservoir(p);
      // absolute 1e-8, or 1e-14 of the largest state when trajectories grow large
      const double tol = std::max(1e-8, 1e-14 * run(res, inputs).states().cwiseAbs().maxCoeff());
      const auto report = verify_equivalence(res, inputs, tol);
      write_text_file(cfg.out / "equivalence.txt", to_text(report));
      log << "equivalence: " << (report.pass ? "pass" : "FAIL") << " (max_abs_diff "
          << format_double(report.max_abs_diff) << ")\n";
      if (!report.pass) status = kCheckFailed;
    }
    if (cfg.spectrum && deep) {
      const HyperParams p = selected_params(*deep);
      const auto report = analyze_task_spectra(task, p, cfg.guesses, cfg.spectrum_washout, options);
      emit_plot_data(report, cfg.out / "spectra.csv");
      write_text_file(cfg.out / "spikes.csv", spike_table(spike_metrics(report, task.phis)));
    }
    if (failed > 0) {
      write_text_file(cfg.out / "failures.txt", failures.str());
      log << "warning: " << failed << " configuration(s) failed; see failures.txt\n";
      status = kRunFailure;
    }
    return status;
  } catch (const Error& e) {
    log << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const fs::filesystem_error& e) {
    log << "error (io): " << e.what() << '\n';
    return kIoError;
  }
}

int run_spectrum(const SpectrumCommand& cmd, std::ostream& log) {
  try {
    cmd.params.validate();
    ensure_dir(cmd.out);
    const MsoTask task = MsoTask::canonical(cmd.task_n);
    nlohmann::json echo = {{"task", task.name()},
                           {"layers", cmd.params.num_layers},
                           {"units", cmd.params.units_per_layer},
                           {"input_scale", cmd.params.input_scale},
                           {"leak_rate", cmd.params.leak_rate},
                           {"spectral_radius", cmd.params.spectral_radius},
                           {"seed", cmd.params.seed},
                           {"guesses", cmd.guesses},
                           {"washout", cmd.washout},
                           {"normalization", "per-unit peak before averaging, layer curve rescaled to peak 1"}};
    write_text_file(cmd.out / "config.echo", echo.dump(2) + "\n");
    log << "spectrum: " << task.name() << ", " << cmd.guesses << " guesses\n";
    const auto report =
        analyze_task_spectra(task, cmd.params, cmd.guesses, cmd.washout, {Execution::parallel, cmd.workers});
    const auto rows = emit_plot_data(report, cmd.out / "spectra.csv");
    const auto metrics = spike_metrics(report, task.phis);
    const std::string table = spike_table(metrics);
    write_text_file(cmd.out / "spikes.csv", table);
    std::ostringstream summary;
    summary << "window: " << report.window << " samples, " << report.freq_bins.size() << " bins, " << rows
            << " rows\nzero units: " << report.zero_units << '\n'
            << table;
    write_text_file(cmd.out / "summary.txt", summary.str());
    log << summary.str();
    return kOk;
  } catch (const Error& e) {
    log << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e);
  }
}

int run_verify_flat(const VerifyFlatCommand& cmd, std::ostream& log) {
  try {
    cmd.params.validate();
    if (cmd.steps < 1) throw Error(ErrorKind::invalid_argument, "steps must be >= 1");
    Matrix inputs;
    if (cmd.task_n) {
      MsoTask task = MsoTask::canonical(*cmd.task_n);
      task.length = std::max<Index>(cmd.steps, task.split.test_end);
      const auto u = generate_mso(task);
      inputs = Eigen::Map<const Matrix>(u.data(), cmd.steps, 1);
    } else {
      inputs = CounterRng(cmd.params.seed, {Stream::drive, 0})
                   .matrix(cmd.steps, cmd.params.input_dim, -1.0, 1.0);
    }
    const auto report = verify_equivalence(init_reservoir(cmd.params), inputs, cmd.abs_tol);
    const std::string text = to_text(report);
    if (cmd.out) {
      if (cmd.out->has_parent_path()) ensure_dir(cmd.out->parent_path());
      write_text_file(*cmd.out, text);
    }
    log << text;
    return report.pass ? kOk : kCheckFailed;
  } catch (const Error& e) {
    log << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e);
  }
}

int run_signal(const SignalCommand& cmd, std::ostream& log) {
  try {
    const MsoTask task = MsoTask::canonical(cmd.task_n);
    if (cmd.length < 1) throw Error(ErrorKind::invalid_argument, "length must be >= 1");
    const auto u = mso_signal(task.phis, cmd.length);
    const Index n = cmd.excerpt > 0 ? std::min(cmd.excerpt, cmd.length) : cmd.length;
    if (cmd.out.has_parent_path()) ensure_dir(cmd.out.parent_path());
    const auto rows = emit_signal_excerpt(cmd.out, std::span<const double>(u.data(), static_cast<std::size_t>(n)));
    log << "wrote " << rows << " rows of " << task.name() << " to " << cmd.out.string() << '\n';
    return kOk;
  } catch (const Error& e) {
    log << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code_for(e);
  }
}

}  // namespace deepesn::cli
