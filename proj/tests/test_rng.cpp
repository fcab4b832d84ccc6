#include "doctest.h"

#include <set>

#include "deepesn/rng.hpp"

using namespace deepesn;

TEST_CASE("counter rng is a pure function of seed, substream and counter") {
  const CounterRng a(7, {Stream::recurrent, 3});
  const CounterRng b(7, {Stream::recurrent, 3});
  for (std::uint64_t c = 0; c < 1000; ++c) CHECK(a.unit(c) == b.unit(c));

  const Matrix m1 = a.matrix(13, 17, -1.0, 1.0);
  const Matrix m2 = b.matrix(13, 17, -1.0, 1.0);
  CHECK(m1 == m2);
  // row-major counter order
  CHECK(m1(1, 0) == a.uniform(17, -1.0, 1.0));
  CHECK(m1(12, 16) == a.uniform(13 * 17 - 1, -1.0, 1.0));
}

TEST_CASE("substreams differ") {
  const std::uint64_t seed = 11;
  std::set<double> firsts;
  for (auto s : {Stream::input, Stream::inter_layer, Stream::recurrent, Stream::drive}) {
    for (std::uint32_t layer = 0; layer < 4; ++layer) {
      for (std::uint32_t retry = 0; retry < 3; ++retry) firsts.insert(CounterRng(seed, {s, layer, retry}).unit(0));
    }
  }
  CHECK(firsts.size() == 4 * 4 * 3);
  CHECK(CounterRng(1, {Stream::input, 1}).unit(0) != CounterRng(2, {Stream::input, 1}).unit(0));
}

TEST_CASE("uniform range and moments") {
  const CounterRng r(3, {Stream::drive, 0});
  const int n = 200000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform(static_cast<std::uint64_t>(i), -1.0, 1.0);
    REQUIRE(u >= -1.0);
    REQUIRE(u <= 1.0);
    sum += u;
    sq += u * u;
  }
  // mean 0, variance 1/3; 5 sigma bounds
  CHECK(std::abs(sum / n) < 5.0 * std::sqrt(1.0 / 3.0 / n));
  CHECK(std::abs(sq / n - 1.0 / 3.0) < 0.005);
  CHECK(r.uniform(5, 2.5, 2.5) == 2.5);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.unit(static_cast<std::uint64_t>(i));
    CHECK((u >= 0.0 && u < 1.0));
  }
}

TEST_CASE("splitmix64 reference values") {
  // First two outputs of the published SplitMix64 generator seeded with 0.
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(splitmix64(0x9e3779b97f4a7c15ULL) == 0x6e789e6aa1b965f4ULL);
}
