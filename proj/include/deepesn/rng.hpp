#pragma once

#include <cstdint>

#include "deepesn/common.hpp"

namespace deepesn {

/// Weight-matrix families that get their own random substream.
enum class Stream : std::uint32_t {
  input = 1,
  inter_layer = 2,
  recurrent = 3,
  drive = 4,  // synthetic input sequences (CLI checks, tests)
};

/// Identifies one substream: the family, the layer it feeds (1-based), and a
/// retry counter used when a recurrent draw cannot be rescaled.
struct StreamId {
  Stream stream;
  std::uint32_t layer;
  std::uint32_t retry = 0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Counter-based uniform generator. Element j of substream s under seed k is
/// a pure function of (k, s, j), so substreams never interact and adding a
/// layer leaves earlier matrices untouched.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, StreamId id) noexcept;

  /// Uniform on [0, 1) with 53 random mantissa bits.
  double unit(std::uint64_t counter) const noexcept;

  /// Uniform on [lo, hi]; returns lo exactly when lo == hi.
  double uniform(std::uint64_t counter, double lo, double hi) const noexcept;

  /// Fills a rows x cols matrix in row-major counter order with U[lo, hi].
  Matrix matrix(Index rows, Index cols, double lo, double hi) const;

 private:
  std::uint64_t key_;
};

}  // namespace deepesn
