#include "mkv/rng.hpp"

#include <random>

namespace mkv {

namespace {
std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  SplitMix64 g(a ^ (b * 0xd1b54a32d192ed03ULL));
  g();
  return g();
}
}  // namespace

CounterRng::CounterRng(std::uint64_t seed, Stream stream)
    : key_(mix(mix(seed, 0x5eed), static_cast<std::uint64_t>(stream))) {}

void CounterRng::normals(std::uint64_t step, std::uint64_t index, Eigen::Ref<Vec> out) const {
  SplitMix64 engine(mix(mix(key_, step), index));
  std::normal_distribution<double> dist(0.0, 1.0);
  for (Eigen::Index k = 0; k < out.size(); ++k) out[k] = dist(engine);
}

Vec CounterRng::normals(std::uint64_t step, std::uint64_t index, int dim) const {
  Vec out(dim);
  normals(step, index, out);
  return out;
}

}  // namespace mkv
