#pragma once

#include "mkv/types.hpp"

#include <cstdint>
#include <limits>

namespace mkv {

/// SplitMix64; small state, good enough to drive std distributions.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

enum class Stream : std::uint64_t {
  initial = 1,
  forward_noise = 2,
  terminal = 3,
  reverse_noise = 4,
  paths = 5,
  samples = 6,
};

/// Counter-based normal draws: the value for (step, index) depends only on the
/// seed, the stream and the counter, never on evaluation order or thread count.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, Stream stream);

  /// Fills `out` with i.i.d. N(0,1) draws for counter (step, index).
  void normals(std::uint64_t step, std::uint64_t index, Eigen::Ref<Vec> out) const;
  Vec normals(std::uint64_t step, std::uint64_t index, int dim) const;

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
};

}  // namespace mkv
