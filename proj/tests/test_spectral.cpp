#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "deepesn/rng.hpp"
#include "deepesn/spectral.hpp"
#include "oracles.hpp"

using namespace deepesn;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> random_signal(std::size_t n, std::uint64_t seed) {
  const CounterRng r(seed, {Stream::drive, 1});
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = r.uniform(i, -1.0, 1.0);
  return x;
}

HyperParams linear(int layers, int units, double s, double a, double rho, std::uint64_t seed = 0) {
  HyperParams p;
  p.num_layers = layers;
  p.units_per_layer = units;
  p.input_scale = s;
  p.leak_rate = a;
  p.spectral_radius = rho;
  p.seed = seed;
  return p;
}

SpectrumReport flat_report(Index window, int layers) {
  SpectrumReport r;
  r.window = window;
  r.freq_bins = frequency_bins(window);
  r.per_layer.assign(static_cast<std::size_t>(layers), std::vector<double>(r.freq_bins.size(), 1.0));
  return r;
}

}  // namespace

TEST_CASE("constant signal has only a DC component") {
  const std::vector<double> x(64, 2.5);
  const auto m = magnitude_spectrum(x);
  REQUIRE(m.size() == 33);
  CHECK(m[0] == doctest::Approx(160.0).epsilon(1e-14));
  for (std::size_t k = 1; k < m.size(); ++k) CHECK(m[k] <= 1e-10 * m[0]);
}

TEST_CASE("a sine centred on a bin lands in that bin") {
  std::vector<double> x(64);
  for (std::size_t t = 0; t < x.size(); ++t) x[t] = std::sin(2.0 * kPi * 5.0 * static_cast<double>(t) / 64.0);
  const auto m = magnitude_spectrum(x);
  CHECK(m[5] == doctest::Approx(32.0).epsilon(1e-12));
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (k != 5) CHECK(m[k] <= 1e-10 * m[5]);
  }
}

TEST_CASE("sin(0.2 t) peaks next to 0.2 / (2 pi) cycles per step") {
  std::vector<double> x(900);
  for (std::size_t t = 0; t < x.size(); ++t) x[t] = std::sin(0.2 * static_cast<double>(t + 1));
  const auto m = magnitude_spectrum(x);
  const auto f = frequency_bins(900);
  const auto k = static_cast<std::size_t>(std::max_element(m.begin(), m.end()) - m.begin());
  CHECK(std::abs(f[k] - 0.2 / (2.0 * kPi)) <= 1.0 / 900.0);
  const auto ref = oracle::naive_dft_magnitudes(x);
  CHECK(k == static_cast<std::size_t>(std::max_element(ref.begin(), ref.end()) - ref.begin()));
}

TEST_CASE("frequency bins") {
  const auto f = frequency_bins(900);
  CHECK(f.size() == 451);
  CHECK(f.front() == 0.0);
  CHECK(f.back() == 0.5);
  CHECK(frequency_bins(7).size() == 4);
}

TEST_CASE("short signals are rejected") {
  CHECK_THROWS_AS(magnitude_spectrum(std::vector<double>{1.0}), Error);
  CHECK_THROWS_AS(magnitude_spectrum(std::vector<double>{}), Error);
}

TEST_CASE("property: FFT magnitudes match a direct DFT and obey Parseval") {
  for (std::size_t n : {2u, 3u, 17u, 64u, 255u, 900u}) {
    const auto x = random_signal(n, n);
    const auto m = magnitude_spectrum(x);
    const auto ref = oracle::naive_dft_magnitudes(x);
    REQUIRE(m.size() == ref.size());
    const double scale = *std::max_element(ref.begin(), ref.end());
    for (std::size_t k = 0; k < m.size(); ++k) CHECK(std::abs(m[k] - ref[k]) <= 1e-9 * scale);

    // sum x^2 = (1/T) sum_k |X_k|^2 over the full spectrum
    long double energy = 0.0L;
    for (double v : x) energy += static_cast<long double>(v) * v;
    long double spec = static_cast<long double>(m[0]) * m[0];
    for (std::size_t k = 1; k < m.size(); ++k) {
      const bool nyquist = (n % 2 == 0) && k == n / 2;
      spec += (nyquist ? 1.0L : 2.0L) * static_cast<long double>(m[k]) * m[k];
    }
    spec /= static_cast<long double>(n);
    CHECK(std::abs(static_cast<double>(spec - energy)) <= 1e-8 * static_cast<double>(energy));
  }
}

TEST_CASE("layer curves peak at exactly one and have the expected shape") {
  const auto task = MsoTask::canonical(3);
  const auto r = analyze_task_spectra(task, linear(3, 10, 1.0, 0.7, 0.9), 2, 100);
  CHECK(r.num_layers() == 3);
  CHECK(r.window == 900);
  CHECK(r.freq_bins.size() == 451);
  CHECK(r.guesses == 2);
  for (const auto& curve : r.per_layer) {
    CHECK(curve.size() == 451);
    CHECK(*std::max_element(curve.begin(), curve.end()) == 1.0);
    CHECK(*std::min_element(curve.begin(), curve.end()) >= 0.0);
  }
}

TEST_CASE("serial and parallel spectra are identical") {
  const auto task = MsoTask::canonical(12);
  const auto p = linear(4, 20, 1.0, 0.9, 0.7);
  const auto s = analyze_task_spectra(task, p, 3, 100, {Execution::serial, 1});
  const auto q = analyze_task_spectra(task, p, 3, 100, {Execution::parallel, 0});
  CHECK(s.per_layer == q.per_layer);
}

TEST_CASE("identically zero units are counted and skipped") {
  const auto res = init_reservoir(linear(2, 3, 1.0, 0.5, 0.9));
  const auto u = generate_mso(MsoTask::canonical(2));
  StateTrajectory traj = run(res, u);
  traj.states().col(1).setZero();
  traj.states().col(4).setZero();
  const std::vector<StateTrajectory> trajs = {traj};
  const auto r = layer_spectra(trajs, 100);
  CHECK(r.zero_units == 2);
  for (const auto& c : r.per_layer) CHECK(*std::max_element(c.begin(), c.end()) == 1.0);

  StateTrajectory silent(1, 2, 50);
  const std::vector<StateTrajectory> none = {silent};
  const auto z = layer_spectra(none, 10);
  CHECK(z.zero_units == 2);
  for (double v : z.per_layer[0]) CHECK(v == 0.0);
}

TEST_CASE("spike metrics on a flat curve") {
  const auto r = flat_report(900, 2);
  const auto m = spike_metrics(r, kMsoPhis);
  REQUIRE(m.filtering_ratio.size() == 2);
  CHECK(m.filtering_ratio[0] == 1.0);
  CHECK(m.detected_count(0) == 0);
  CHECK(m.expected_bins.front() == 29);
  CHECK(std::is_sorted(m.phis.begin(), m.phis.end()));
}

TEST_CASE("spike metrics find planted spikes") {
  auto r = flat_report(900, 1);
  const std::vector<double> phis = {0.2, 0.5, 1.0, 1.3};
  for (double phi : phis) {
    const auto k = static_cast<std::size_t>(std::llround(phi / (2.0 * kPi) * 900.0));
    r.per_layer[0][k + 1] = 5.0 + phi;  // one bin off the expected position
  }
  const auto m = spike_metrics(r, phis);
  CHECK(m.detected_count(0) == 4);
  // two lowest vs two highest
  CHECK(m.filtering_ratio[0] == doctest::Approx((10.0 + 1.0 + 1.3) / (10.0 + 0.2 + 0.5)).epsilon(1e-14));
}

TEST_CASE("frequencies beyond Nyquist are rejected") {
  const auto r = flat_report(900, 1);
  const std::vector<double> phis = {0.2, 4.0};
  CHECK_THROWS_AS(spike_metrics(r, phis), Error);
}

TEST_CASE("property: a linear reservoir adds no new frequencies") {
  // 30 cycles in the 900-step window, so the drive sits exactly on a bin.
  const Index steps = 1000;
  const Index washout = 100;
  const double omega = 2.0 * kPi * 30.0 / 900.0;
  std::vector<double> u(static_cast<std::size_t>(steps));
  for (Index t = 0; t < steps; ++t) u[static_cast<std::size_t>(t)] = std::sin(omega * static_cast<double>(t + 1));

  auto out_of_band = [&](const HyperParams& p) {
    const auto traj = run(init_reservoir(p), u);
    double worst = 0.0;
    for (Index c = 0; c < traj.width(); ++c) {
      std::vector<double> x(traj.states().col(c).data() + washout, traj.states().col(c).data() + steps);
      const auto m = magnitude_spectrum(x);
      double total = 0.0;
      double near = 0.0;
      for (std::size_t k = 0; k < m.size(); ++k) {
        total += m[k] * m[k];
        if (std::abs(static_cast<long>(k) - 30) <= kSpikeSearchRadius) near += m[k] * m[k];
      }
      worst = std::max(worst, 1.0 - near / total);
    }
    return worst;
  };

  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    CHECK(out_of_band(linear(3, 10, 1.0, 0.7, 0.7, seed)) < 0.01);
  }
  // a saturating reservoir driven hard generates harmonics, so the check can fail
  auto sat = linear(3, 10, 5.0, 0.7, 0.7, 0);
  sat.activation = Activation::saturating;
  CHECK(out_of_band(sat) > 0.01);
}
