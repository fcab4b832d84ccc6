#include "deepesn/mso.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>

#include <omp.h>

#include "deepesn/readout.hpp"

namespace deepesn {

void SplitSpec::validate(Index length) const {
  auto fail = [](const char* msg) { throw Error(ErrorKind::invalid_argument, msg); };
  if (train_begin < 1) fail("split: training range must start at step >= 1");
  if (train_end < train_begin) fail("split: empty training range");
  if (washout < 0 || washout >= train_end - train_begin + 1) {
    fail("split: washout must leave at least one training step");
  }
  if (validation_begin != train_end + 1 || validation_end < validation_begin) {
    fail("split: validation must directly follow training");
  }
  if (test_begin != validation_end + 1 || test_end < test_begin) {
    fail("split: test must directly follow validation");
  }
  if (validation_end - validation_begin + 1 < 2 || test_end - test_begin + 1 < 2) {
    fail("split: validation and test need at least 2 steps");
  }
  if (test_end > length) fail("split: test range exceeds sequence length");
}

MsoTask MsoTask::canonical(int n) {
  if (n < 1 || n > static_cast<int>(kMsoPhis.size())) {
    throw Error(ErrorKind::invalid_argument, "MSO order must lie in [1, 12], got " + std::to_string(n));
  }
  MsoTask task;
  task.n = n;
  task.phis.assign(kMsoPhis.begin(), kMsoPhis.begin() + n);
  return task;
}

void MsoTask::validate() const {
  if (n < 1 || n > static_cast<int>(kMsoPhis.size())) {
    throw Error(ErrorKind::invalid_argument, "MSO order must lie in [1, 12], got " + std::to_string(n));
  }
  if (phis.size() != static_cast<std::size_t>(n)) {
    throw Error(ErrorKind::invalid_argument, "MSO task needs exactly n frequencies");
  }
  if (length < 1) throw Error(ErrorKind::invalid_argument, "MSO length must be >= 1");
  split.validate(length);
}

namespace {

double mso_value(std::span<const double> phis, Index t) {
  double u = 0.0;
  for (double phi : phis) u += std::sin(phi * static_cast<double>(t));
  return u;
}

std::vector<double> mso_range(const MsoTask& task, Index first) {
  task.validate();
  return mso_signal(task.phis, task.length, first);
}

int resolve_workers(const RunOptions& options) {
  if (options.execution == Execution::serial) return 1;
  return options.workers > 0 ? options.workers : omp_get_max_threads();
}

std::string describe(const HyperParams& p) {
  char buf[192];
  std::snprintf(buf, sizeof buf, "layers=%d units=%d input_scale=%g leak_rate=%g spectral_radius=%g seed=%llu",
                p.num_layers, p.units_per_layer, p.input_scale, p.leak_rate, p.spectral_radius,
                static_cast<unsigned long long>(p.seed));
  return buf;
}

// The task sequence in the shapes the reservoir and readout consume.
struct TaskData {
  Matrix inputs;   // length x 1
  Vector targets;  // length
  SplitSpec split;
};

TaskData make_task_data(const MsoTask& task) {
  const auto u = generate_mso(task);
  const auto y = mso_targets(task);
  TaskData d;
  d.inputs = Eigen::Map<const Matrix>(u.data(), static_cast<Index>(u.size()), 1);
  d.targets = Eigen::Map<const Vector>(y.data(), static_cast<Index>(y.size()));
  d.split = task.split;
  return d;
}

struct GuessScores {
  std::vector<double> validation;  // per lambda
  std::vector<double> test;
};

GuessScores score_guess(const DeepReservoir& res, const TaskData& data,
                        std::span<const double> lambdas) {
  const StateTrajectory traj = run(res, data.inputs);
  if (!traj.states().allFinite()) {
    throw Error(ErrorKind::numerical, "non-finite reservoir states for config " + describe(res.params()));
  }
  const auto val = data.split.validation_rows();
  const auto tst = data.split.test_rows();
  const RidgeSolver solver = split_readout_solver(traj, data.targets, data.split);
  GuessScores out;
  out.validation.reserve(lambdas.size());
  out.test.reserve(lambdas.size());
  for (double lambda : lambdas) {
    const Readout r = solver.solve(lambda);
    const Matrix pv = predict(r, traj.states().middleRows(val.offset, val.count));
    const Matrix pt = predict(r, traj.states().middleRows(tst.offset, tst.count));
    out.validation.push_back(nrmse(pv.col(0), data.targets.segment(val.offset, val.count)));
    out.test.push_back(nrmse(pt.col(0), data.targets.segment(tst.offset, tst.count)));
  }
  return out;
}

ConfigEvaluation aggregate(const HyperParams& params, std::span<const double> lambdas,
                           const std::vector<GuessScores>& guesses) {
  ConfigEvaluation ev;
  ev.params = params;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    LambdaScores s;
    s.lambda = lambdas[k];
    for (const auto& g : guesses) {
      s.validation.push_back(g.validation[k]);
      s.test.push_back(g.test[k]);
    }
    std::tie(s.mean_validation, s.std_validation) = mean_and_std(s.validation);
    std::tie(s.mean_test, s.std_test) = mean_and_std(s.test);
    ev.per_lambda.push_back(std::move(s));
  }
  return ev;
}

void check_lambdas(std::span<const double> lambdas) {
  if (lambdas.empty()) throw Error(ErrorKind::invalid_argument, "lambda grid is empty");
  for (double l : lambdas) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw Error(ErrorKind::invalid_argument, "lambda must be >= 0");
  }
}

std::vector<RawWeights> draw_guesses(const HyperParams& params, int guesses, std::uint64_t base_seed,
                                     const RunOptions& options) {
  std::vector<RawWeights> raw(static_cast<std::size_t>(guesses));
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) num_threads(resolve_workers(options))
  for (int g = 0; g < guesses; ++g) {
    try {
      raw[static_cast<std::size_t>(g)] = draw_raw_weights(
          params.num_layers, params.units_per_layer, params.input_dim, base_seed + static_cast<std::uint64_t>(g));
    } catch (...) {
#pragma omp critical(deepesn_draw_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return raw;
}

ConfigEvaluation evaluate_with(const TaskData& data, const HyperParams& params,
                               std::span<const double> lambdas, std::span<const RawWeights> raw,
                               const RunOptions& options) {
  std::vector<GuessScores> scores(raw.size());
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) num_threads(resolve_workers(options))
  for (std::size_t g = 0; g < raw.size(); ++g) {
    try {
      HyperParams p = params;
      p.seed = raw[g].seed;
      scores[g] = score_guess(build_reservoir(raw[g], p), data, lambdas);
    } catch (...) {
#pragma omp critical(deepesn_guess_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return aggregate(params, lambdas, scores);
}

}  // namespace

std::vector<double> mso_signal(std::span<const double> phis, Index length, Index first) {
  if (length < 0) throw Error(ErrorKind::invalid_argument, "mso_signal: negative length");
  std::vector<double> u(static_cast<std::size_t>(length));
  for (Index i = 0; i < length; ++i) u[static_cast<std::size_t>(i)] = mso_value(phis, first + i);
  return u;
}

std::vector<double> generate_mso(const MsoTask& task) { return mso_range(task, 1); }

RidgeSolver split_readout_solver(const StateTrajectory& traj, const Eigen::Ref<const Vector>& targets,
                                 const SplitSpec& split) {
  split.validate(traj.steps());
  if (targets.size() != traj.steps()) {
    throw Error(ErrorKind::dimension, "split_readout_solver: one target per step required");
  }
  const auto fit = split.fit_rows();
  return RidgeSolver(traj.states().middleRows(fit.offset, fit.count), targets.segment(fit.offset, fit.count));
}

std::vector<double> mso_targets(const MsoTask& task) { return mso_range(task, 2); }

std::pair<double, double> mean_and_std(std::vector<double> values) {
  if (values.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size()))};
}

ConfigEvaluation evaluate_config(const MsoTask& task, const HyperParams& params,
                                 std::span<const double> lambda_grid, std::span<const RawWeights> raw,
                                 RunOptions options) {
  task.validate();
  params.validate();
  check_lambdas(lambda_grid);
  if (raw.empty()) throw Error(ErrorKind::invalid_argument, "guesses must be >= 1");
  if (params.input_dim != 1) throw Error(ErrorKind::dimension, "MSO tasks have a scalar input");
  return evaluate_with(make_task_data(task), params, lambda_grid, raw, options);
}

ConfigEvaluation evaluate_config(const MsoTask& task, const HyperParams& params,
                                 std::span<const double> lambda_grid, int guesses,
                                 std::uint64_t base_seed, RunOptions options) {
  if (guesses < 1) throw Error(ErrorKind::invalid_argument, "guesses must be >= 1");
  params.validate();
  HyperParams p = params;
  p.seed = base_seed;
  const auto raw = draw_guesses(p, guesses, base_seed, options);
  return evaluate_config(task, p, lambda_grid, raw, options);
}

GridSpec GridSpec::table1() {
  GridSpec g;
  g.input_scales = {0.01, 0.1, 1.0};
  g.leak_rates = {0.1, 0.3, 0.5, 0.7, 0.9, 1.0};
  g.spectral_radii = {0.1, 0.3, 0.5, 0.7, 0.9, 1.0};
  for (int e = -11; e <= 0; ++e) g.lambdas.push_back(std::pow(10.0, e));
  return g;
}

void GridSpec::validate() const {
  auto fail = [](const char* msg) { throw Error(ErrorKind::invalid_argument, msg); };
  if (input_scales.empty() || leak_rates.empty() || spectral_radii.empty() || lambdas.empty()) {
    fail("grid: every candidate list must be non-empty");
  }
  if (guesses < 1) fail("grid: guesses must be >= 1");
  if (num_layers < 1 || units_per_layer < 1) fail("grid: layers and units must be >= 1");
  check_lambdas(lambdas);
}

std::optional<std::size_t> select_best(std::span<const ConfigRecord> records) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!r.ok() || !std::isfinite(r.scores.mean_validation)) continue;
    if (!best || r.scores.mean_validation < records[*best].scores.mean_validation) best = i;
  }
  return best;
}

ExperimentResult grid_search(const MsoTask& task, const GridSpec& grid, RunOptions options,
                             const RecordSink& sink) {
  task.validate();
  grid.validate();

  struct Point {
    double scale, leak, radius;
  };
  std::vector<Point> points;
  for (double s : grid.input_scales)
    for (double a : grid.leak_rates)
      for (double r : grid.spectral_radii) points.push_back({s, a, r});

  HyperParams base;
  base.num_layers = grid.num_layers;
  base.units_per_layer = grid.units_per_layer;
  base.input_dim = 1;
  base.activation = grid.activation;
  base.seed = grid.base_seed;

  const TaskData data = make_task_data(task);
  // Raw draws depend only on the seed, so every grid point shares them.
  const auto raw = draw_guesses(base, grid.guesses, grid.base_seed, options);
  const std::size_t per_point = grid.lambdas.size();

  ExperimentResult result;
  result.task = task.name();
  result.grid = grid;
  result.records.resize(points.size() * per_point);

  // Each point is evaluated serially inside; parallelism is across points.
  const RunOptions inner{Execution::serial, 1};
  std::exception_ptr sink_failure;
#pragma omp parallel for schedule(dynamic) num_threads(resolve_workers(options))
  for (std::size_t i = 0; i < points.size(); ++i) {
    HyperParams p = base;
    p.input_scale = points[i].scale;
    p.leak_rate = points[i].leak;
    p.spectral_radius = points[i].radius;
    const std::span<ConfigRecord> out(result.records.data() + i * per_point, per_point);
    try {
      p.validate();
      auto ev = evaluate_with(data, p, grid.lambdas, raw, inner);
      for (std::size_t k = 0; k < per_point; ++k) out[k] = {p, std::move(ev.per_lambda[k]), {}};
    } catch (const std::exception& e) {
      for (std::size_t k = 0; k < per_point; ++k) {
        out[k] = {p, LambdaScores{}, e.what()};
        out[k].scores.lambda = grid.lambdas[k];
        out[k].scores.mean_validation = out[k].scores.mean_test = std::numeric_limits<double>::quiet_NaN();
        out[k].scores.std_validation = out[k].scores.std_test = std::numeric_limits<double>::quiet_NaN();
      }
    }
    if (sink) {
#pragma omp critical(deepesn_record_sink)
      {
        try {
          if (!sink_failure) sink(out);
        } catch (...) {
          sink_failure = std::current_exception();
        }
      }
    }
  }
  if (sink_failure) std::rethrow_exception(sink_failure);

  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!result.records[i * per_point].ok()) ++result.failed_configs;
  }
  result.selected = select_best(result.records);
  return result;
}

}  // namespace deepesn
