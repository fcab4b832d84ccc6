#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "deepesn/mso.hpp"
#include "oracles.hpp"

using namespace deepesn;

namespace {

const std::vector<double> kLambdas = {1e-11, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6,
                                      1e-5,  1e-4,  1e-3, 1e-2, 1e-1, 1e0};

HyperParams deep(int layers, int units, double s, double a, double rho) {
  HyperParams p;
  p.num_layers = layers;
  p.units_per_layer = units;
  p.input_scale = s;
  p.leak_rate = a;
  p.spectral_radius = rho;
  return p;
}

GridSpec tiny_grid() {
  GridSpec g;
  g.input_scales = {0.1, 1.0};
  g.leak_rates = {0.5, 1.0};
  g.spectral_radii = {0.5, 0.9};
  g.lambdas = {1e-8, 1e-4, 1.0};
  g.num_layers = 2;
  g.units_per_layer = 5;
  g.guesses = 3;
  g.base_seed = 10;
  return g;
}

}  // namespace

TEST_CASE("signal values") {
  const auto u1 = generate_mso(MsoTask::canonical(1));
  CHECK(u1.size() == 1000);
  CHECK(u1[0] == doctest::Approx(0.19866933079506122).epsilon(1e-14));
  const auto t5 = MsoTask::canonical(5);
  const auto u5 = generate_mso(t5);
  CHECK(u5[0] == doctest::Approx(2.0087406972390305).epsilon(1e-14));
  for (int n = 1; n <= 12; ++n) {
    const auto task = MsoTask::canonical(n);
    const auto u = generate_mso(task);
    for (long t = 1; t <= 1000; t += 37) {
      CHECK(std::abs(u[static_cast<std::size_t>(t - 1)] - oracle::mso_value(task.phis, t)) <= 1e-12);
    }
  }
}

TEST_CASE("canonical frequencies and task validation") {
  const auto t = MsoTask::canonical(12);
  const std::vector<double> expect = {0.2, 0.331, 0.42, 0.51, 0.63, 0.74, 0.85, 0.97, 1.08, 1.19, 1.27, 1.32};
  CHECK(t.phis == expect);
  CHECK(t.name() == "mso12");
  CHECK(MsoTask::canonical(8).phis.size() == 8);
  CHECK_THROWS_AS(MsoTask::canonical(0), Error);
  CHECK_THROWS_AS(MsoTask::canonical(13), Error);
  auto bad = MsoTask::canonical(3);
  bad.length = 900;  // shorter than the split
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("targets are the next input") {
  const auto task = MsoTask::canonical(7);
  const auto u = generate_mso(task);
  const auto y = mso_targets(task);
  REQUIRE(y.size() == u.size());
  for (std::size_t i = 0; i + 1 < u.size(); ++i) CHECK(y[i] == u[i + 1]);
  CHECK(std::abs(y.back() - oracle::mso_value(task.phis, 1001)) <= 1e-12);
}

TEST_CASE("split windows") {
  const SplitSpec s;
  CHECK(s.fit_rows().offset == 100);
  CHECK(s.fit_rows().count == 300);
  CHECK(s.validation_rows().offset == 400);
  CHECK(s.validation_rows().count == 300);
  CHECK(s.test_rows().offset == 700);
  CHECK(s.test_rows().count == 300);
  CHECK_NOTHROW(s.validate(1000));
  SplitSpec overlap = s;
  overlap.validation_begin = 350;
  CHECK_THROWS_AS(overlap.validate(1000), Error);
  SplitSpec all_washout = s;
  all_washout.washout = 400;
  CHECK_THROWS_AS(all_washout.validate(1000), Error);
}

TEST_CASE("property: |u(t)| <= n") {
  for (int n = 1; n <= 12; ++n) {
    for (double v : generate_mso(MsoTask::canonical(n))) CHECK(std::abs(v) <= n);
  }
}

TEST_CASE("readout never sees rows outside the fit window") {
  const auto task = MsoTask::canonical(5);
  const auto u = generate_mso(task);
  const auto y = mso_targets(task);
  const auto res = init_reservoir(deep(2, 8, 1.0, 0.5, 0.9));
  const auto traj = run(res, u);
  Vector targets = Eigen::Map<const Vector>(y.data(), static_cast<Index>(y.size()));
  const Matrix w = split_readout_solver(traj, targets, task.split).solve(1e-6).weights;
  Vector perturbed = targets;
  perturbed.head(100).setConstant(1e3);   // washout
  perturbed.tail(600).setConstant(-7.0);  // validation and test
  const Matrix w2 = split_readout_solver(traj, perturbed, task.split).solve(1e-6).weights;
  CHECK(w == w2);
}

TEST_CASE("evaluate_config is deterministic and order-free across guesses") {
  const auto task = MsoTask::canonical(3);
  const auto p = deep(2, 6, 1.0, 0.7, 0.9);
  const auto a = evaluate_config(task, p, kLambdas, 4, 5);
  const auto b = evaluate_config(task, p, kLambdas, 4, 5);
  REQUIRE(a.per_lambda.size() == kLambdas.size());
  for (std::size_t i = 0; i < kLambdas.size(); ++i) {
    CHECK(a.per_lambda[i].validation == b.per_lambda[i].validation);
    CHECK(a.per_lambda[i].mean_test == b.per_lambda[i].mean_test);
    CHECK(a.per_lambda[i].validation.size() == 4);
  }

  std::vector<RawWeights> raw;
  for (std::uint64_t g = 0; g < 4; ++g) raw.push_back(draw_raw_weights(2, 6, 1, 5 + g));
  const auto c = evaluate_config(task, p, kLambdas, raw);
  std::vector<RawWeights> perm = {raw[2], raw[0], raw[3], raw[1]};
  const auto d = evaluate_config(task, p, kLambdas, perm);
  for (std::size_t i = 0; i < kLambdas.size(); ++i) {
    CHECK(c.per_lambda[i].validation == a.per_lambda[i].validation);
    CHECK(d.per_lambda[i].mean_validation == c.per_lambda[i].mean_validation);
    CHECK(d.per_lambda[i].std_test == c.per_lambda[i].std_test);
    CHECK(d.per_lambda[i].validation[0] == c.per_lambda[i].validation[2]);
  }
}

TEST_CASE("serial and parallel grid search agree bitwise") {
  const auto task = MsoTask::canonical(4);
  const auto grid = tiny_grid();
  const auto s = grid_search(task, grid, {Execution::serial, 1});
  const auto p = grid_search(task, grid, {Execution::parallel, 0});
  REQUIRE(s.records.size() == 8 * 3);
  REQUIRE(p.records.size() == s.records.size());
  for (std::size_t i = 0; i < s.records.size(); ++i) {
    CHECK(s.records[i].scores.validation == p.records[i].scores.validation);
    CHECK(s.records[i].scores.test == p.records[i].scores.test);
  }
  CHECK(s.selected == p.selected);
}

TEST_CASE("grid records follow canonical order and the selection rule") {
  const auto task = MsoTask::canonical(4);
  const auto grid = tiny_grid();
  std::size_t sink_rows = 0;
  const auto r = grid_search(task, grid, {}, [&](std::span<const ConfigRecord> recs) {
    CHECK(recs.size() == grid.lambdas.size());
    sink_rows += recs.size();
  });
  CHECK(sink_rows == r.records.size());
  std::size_t i = 0;
  for (double s : grid.input_scales) {
    for (double a : grid.leak_rates) {
      for (double rho : grid.spectral_radii) {
        for (double l : grid.lambdas) {
          const auto& rec = r.records[i++];
          CHECK(rec.params.input_scale == s);
          CHECK(rec.params.leak_rate == a);
          CHECK(rec.params.spectral_radius == rho);
          CHECK(rec.scores.lambda == l);
        }
      }
    }
  }
  REQUIRE(r.selected);
  for (const auto& rec : r.records) CHECK(r.best()->scores.mean_validation <= rec.scores.mean_validation);
}

TEST_CASE("a one-point grid reproduces evaluate_config") {
  const auto task = MsoTask::canonical(2);
  GridSpec g;
  g.input_scales = {1.0};
  g.leak_rates = {0.7};
  g.spectral_radii = {0.9};
  g.lambdas = {1e-6};
  g.num_layers = 3;
  g.units_per_layer = 4;
  g.guesses = 2;
  g.base_seed = 3;
  const auto r = grid_search(task, g);
  const auto e = evaluate_config(task, deep(3, 4, 1.0, 0.7, 0.9), g.lambdas, 2, 3);
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].scores.validation == e.per_lambda[0].validation);
  CHECK(r.records[0].scores.test == e.per_lambda[0].test);
}

TEST_CASE("select_best: first minimum wins and failures are skipped") {
  std::vector<ConfigRecord> recs(4);
  recs[0].scores.mean_validation = 0.5;
  recs[1].scores.mean_validation = 0.1;
  recs[2].scores.mean_validation = 0.1;
  recs[3].scores.mean_validation = 0.01;
  recs[3].error = "boom";
  CHECK(select_best(recs) == std::optional<std::size_t>(1));
  recs[1].scores.mean_validation = std::nan("");
  CHECK(select_best(recs) == std::optional<std::size_t>(2));
}

TEST_CASE("failed configurations are marked and excluded") {
  auto grid = tiny_grid();
  grid.leak_rates = {0.0, 0.5};  // a = 0 cannot be rescaled
  const auto r = grid_search(MsoTask::canonical(3), grid);
  CHECK(r.failed_configs == 4);
  for (const auto& rec : r.records) {
    if (rec.params.leak_rate == 0.0) {
      CHECK_FALSE(rec.ok());
      CHECK(std::isnan(rec.scores.mean_validation));
    } else {
      CHECK(rec.ok());
    }
  }
  REQUIRE(r.best());
  CHECK(r.best()->params.leak_rate == 0.5);
}

TEST_CASE("non-finite states abort with the offending config") {
  auto p = deep(2, 3, 1e300, 1.0, 1.0);
  try {
    evaluate_config(MsoTask::canonical(12), p, kLambdas, 1, 0);
    FAIL("expected a numerical error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::numerical);
    CHECK(std::string(e.what()).find("input_scale=1e+300") != std::string::npos);
  }
}

TEST_CASE("mean_and_std") {
  const auto [m, s] = mean_and_std({1.0, 2.0, 3.0, 4.0});
  CHECK(m == 2.5);
  CHECK(s == doctest::Approx(std::sqrt(1.25)).epsilon(1e-15));
  CHECK(mean_and_std({3.0, 1.0, 2.0}) == mean_and_std({1.0, 2.0, 3.0}));
}

TEST_CASE("a deep linear reservoir solves MSO5 to high precision") {
  const auto e = evaluate_config(MsoTask::canonical(5), deep(10, 100, 1.0, 0.5, 0.5), kLambdas, 1, 0);
  double best = 1.0;
  for (const auto& l : e.per_lambda) best = std::min(best, l.mean_test);
  CHECK(best <= 1e-8);
}
