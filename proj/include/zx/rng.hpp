#pragma once
#include <array>
#include <cstdint>
#include <utility>

namespace zx {

// Philox 4x32-10 counter block cipher. Pure function of (counter, key):
// any (seed, stream, index) tuple can be drawn in any order, on any thread,
// with identical results.
struct Philox4x32 {
  static std::array<uint32_t, 4> block(std::array<uint32_t, 4> ctr,
                                       std::array<uint32_t, 2> key);
};

// One uniform double in [0, 1): top 53 bits of the block, u = (x >> 11) * 2^-53.
double keyed_uniform(uint64_t seed, uint64_t s1, uint64_t s2);

// One standard normal via Box-Muller on a single block. The log argument is
// shifted into (0, 1] so it never sees an exact zero.
double keyed_normal(uint64_t seed, uint64_t s1, uint64_t s2);

std::pair<double, double> keyed_normal_pair(uint64_t seed, uint64_t s1, uint64_t s2);

// Stable 64-bit sub-seed for fanning one seed out into independent streams.
uint64_t derive_seed(uint64_t seed, uint64_t stream);

// Convenience wrapper fixing (seed, stream).
class RngStream {
 public:
  RngStream(uint64_t seed, uint64_t stream) : seed_(seed), stream_(stream) {}
  double uniform(uint64_t i) const { return keyed_uniform(seed_, stream_, i); }
  double normal(uint64_t i) const { return keyed_normal(seed_, stream_, i); }
  uint64_t seed() const { return seed_; }
  uint64_t stream() const { return stream_; }

 private:
  uint64_t seed_, stream_;
};

}  // namespace zx
