#include "deepesn/rng.hpp"

namespace deepesn {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::dimension: return "dimension";
    case ErrorKind::degenerate_configuration: return "degenerate-configuration";
    case ErrorKind::unscalable_matrix: return "unscalable-matrix";
    case ErrorKind::numerical: return "numerical";
    case ErrorKind::unsupported_configuration: return "unsupported-configuration";
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, StreamId id) noexcept {
  std::uint64_t k = splitmix64(seed);
  k = splitmix64(k ^ static_cast<std::uint64_t>(id.stream));
  k = splitmix64(k ^ (static_cast<std::uint64_t>(id.layer) << 1));
  k = splitmix64(k ^ (static_cast<std::uint64_t>(id.retry) << 2));
  key_ = k;
}

double CounterRng::unit(std::uint64_t counter) const noexcept {
  // Two rounds so consecutive counters decorrelate fully.
  const std::uint64_t bits = splitmix64(splitmix64(key_ ^ counter) + counter);
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

double CounterRng::uniform(std::uint64_t counter, double lo, double hi) const noexcept {
  if (lo == hi) return lo;
  return lo + (hi - lo) * unit(counter);
}

Matrix CounterRng::matrix(Index rows, Index cols, double lo, double hi) const {
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      m(r, c) = uniform(static_cast<std::uint64_t>(r * cols + c), lo, hi);
    }
  }
  return m;
}

}  // namespace deepesn
