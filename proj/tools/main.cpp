// deepesn: experiment runner for linear deep echo state networks on the
// multiple superimposed oscillator tasks.
//
//   deepesn run --task mso5 --grid --out results/mso5
//   deepesn spectrum --guesses 100 --out results/spectrum
//   deepesn verify-flat --layers 3 --units 5
//   deepesn signal --task mso12 --excerpt 400 --out mso12.csv

#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace deepesn;
using namespace deepesn::cli;

int main(int argc, char** argv) {
  CLI::App app{"Linear deep echo state networks: MSO experiments, flat equivalence and state spectra"};
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "MSO model selection (grid) or a single configuration");
  std::string config_path;
  std::string task;
  std::string model;
  bool grid_flag = false;
  bool single_flag = false;
  std::optional<int> layers;
  std::optional<int> units;
  std::optional<int> guesses;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<double> scale_in;
  std::optional<double> leak;
  std::optional<double> rho;
  std::optional<double> lambda;
  bool equivalence = false;
  bool spectrum = false;
  bool allow_off_grid = false;
  run_cmd->add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
  run_cmd->add_option("--task", task, "mso1 .. mso12");
  run_cmd->add_option("--model", model, "deep, shallow or both")->check(CLI::IsMember({"deep", "shallow", "both"}));
  auto* g = run_cmd->add_flag("--grid", grid_flag, "full model-selection grid");
  auto* s = run_cmd->add_flag("--single", single_flag, "one configuration (--scale-in/--leak/--rho/--lambda)");
  g->excludes(s);
  run_cmd->add_option("--layers", layers, "reservoir layers (deep model)");
  run_cmd->add_option("--units", units, "units per layer; shallow model uses layers*units");
  run_cmd->add_option("--guesses", guesses, "reservoir guesses per configuration");
  run_cmd->add_option("--workers", workers, "worker threads (0 = all cores)");
  run_cmd->add_option("--seed", seed, "base seed; guess g uses seed + g");
  run_cmd->add_option("--out", out, "output directory");
  run_cmd->add_option("--scale-in", scale_in, "input scaling (single mode)");
  run_cmd->add_option("--leak", leak, "leak rate (single mode)");
  run_cmd->add_option("--rho", rho, "spectral radius (single mode)");
  run_cmd->add_option("--lambda", lambda, "ridge regularization (single mode)");
  run_cmd->add_flag("--equivalence", equivalence, "check layered vs flat trajectories for the selected config");
  run_cmd->add_flag("--spectrum", spectrum, "layer spectra for the selected config");
  run_cmd->add_flag("--allow-off-grid", allow_off_grid, "accept values outside the model-selection grid");

  // spectrum
  auto* spec_cmd = app.add_subcommand("spectrum", "layer-wise FFT analysis of reservoir states");
  SpectrumCommand spec;
  std::string spec_task = "mso12";
  spec_cmd->add_option("--task", spec_task, "driving sequence");
  spec_cmd->add_option("--layers", spec.params.num_layers);
  spec_cmd->add_option("--units", spec.params.units_per_layer);
  spec_cmd->add_option("--scale-in", spec.params.input_scale);
  spec_cmd->add_option("--leak", spec.params.leak_rate);
  spec_cmd->add_option("--rho", spec.params.spectral_radius);
  spec_cmd->add_option("--seed", spec.params.seed);
  spec_cmd->add_option("--guesses", spec.guesses);
  spec_cmd->add_option("--washout", spec.washout);
  spec_cmd->add_option("--workers", spec.workers);
  std::string spec_out = spec.out.string();
  spec_cmd->add_option("--out", spec_out, "output directory");

  // verify-flat
  auto* flat_cmd = app.add_subcommand("verify-flat", "compare layered and flat-system trajectories");
  VerifyFlatCommand flat;
  std::string flat_task;
  std::string flat_out;
  flat_cmd->add_option("--layers", flat.params.num_layers);
  flat_cmd->add_option("--units", flat.params.units_per_layer);
  flat_cmd->add_option("--scale-in", flat.params.input_scale);
  flat_cmd->add_option("--leak", flat.params.leak_rate);
  flat_cmd->add_option("--rho", flat.params.spectral_radius);
  flat_cmd->add_option("--seed", flat.params.seed);
  flat_cmd->add_option("--steps", flat.steps);
  flat_cmd->add_option("--tol", flat.abs_tol, "max-abs tolerance");
  flat_cmd->add_option("--task", flat_task, "drive with an MSO sequence instead of uniform noise");
  flat_cmd->add_option("--out", flat_out, "write the report here");

  // signal
  auto* sig_cmd = app.add_subcommand("signal", "dump an MSO sequence as CSV");
  SignalCommand sig;
  std::string sig_task = "mso12";
  std::string sig_out = sig.out.string();
  sig_cmd->add_option("--task", sig_task);
  sig_cmd->add_option("--length", sig.length);
  sig_cmd->add_option("--excerpt", sig.excerpt, "first N steps only");
  sig_cmd->add_option("--out", sig_out, "CSV file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      ExperimentConfig cfg;
      if (!config_path.empty()) cfg = load_config(config_path);
      if (!task.empty()) cfg.task_n = parse_task(task);
      if (!model.empty()) {
        nlohmann::json j = {{"model", model}};
        apply_json(cfg, j);
      }
      if (grid_flag) cfg.mode = Mode::grid;
      if (single_flag) cfg.mode = Mode::single;
      if (layers) cfg.layers = *layers;
      if (units) cfg.units = *units;
      if (guesses) cfg.guesses = *guesses;
      if (workers) cfg.workers = *workers;
      if (seed) cfg.seed = *seed;
      if (out) cfg.out = *out;
      if (scale_in || leak || rho || lambda) {
        if (grid_flag) throw ConfigError("--scale-in/--leak/--rho/--lambda select single mode; drop --grid");
        cfg.mode = Mode::single;
      }
      if (scale_in) cfg.single.input_scale = *scale_in;
      if (leak) cfg.single.leak_rate = *leak;
      if (rho) cfg.single.spectral_radius = *rho;
      if (lambda) cfg.single.lambda = *lambda;
      cfg.equivalence = cfg.equivalence || equivalence;
      cfg.spectrum = cfg.spectrum || spectrum;
      cfg.allow_off_grid = cfg.allow_off_grid || allow_off_grid;
      return run_experiment(cfg, std::cout);
    }
    if (*spec_cmd) {
      spec.task_n = parse_task(spec_task);
      spec.out = spec_out;
      return run_spectrum(spec, std::cout);
    }
    if (*flat_cmd) {
      if (!flat_task.empty()) flat.task_n = parse_task(flat_task);
      if (!flat_out.empty()) flat.out = flat_out;
      return run_verify_flat(flat, std::cout);
    }
    if (*sig_cmd) {
      sig.task_n = parse_task(sig_task);
      sig.out = sig_out;
      return run_signal(sig, std::cout);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}
