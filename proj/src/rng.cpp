#include "zx/rng.hpp"

#include <cmath>

namespace zx {
namespace {

constexpr uint32_t kM0 = 0xD2511F53u;
constexpr uint32_t kM1 = 0xCD9E8D57u;
constexpr uint32_t kW0 = 0x9E3779B9u;
constexpr uint32_t kW1 = 0xBB67AE85u;

inline void round_once(std::array<uint32_t, 4>& x, const std::array<uint32_t, 2>& k) {
  uint64_t p0 = uint64_t(kM0) * x[0];
  uint64_t p1 = uint64_t(kM1) * x[2];
  uint32_t hi0 = uint32_t(p0 >> 32), lo0 = uint32_t(p0);
  uint32_t hi1 = uint32_t(p1 >> 32), lo1 = uint32_t(p1);
  x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

// Domain tag keeps normal and uniform draws decorrelated even when a call
// site reuses the same (seed, s1, s2) triple for both.
constexpr uint64_t kNormalTag = 0x6A09E667F3BCC909ull;

inline std::array<uint32_t, 4> block_at(uint64_t seed, uint64_t s1, uint64_t s2) {
  return Philox4x32::block(
      {uint32_t(s1), uint32_t(s1 >> 32), uint32_t(s2), uint32_t(s2 >> 32)},
      {uint32_t(seed), uint32_t(seed >> 32)});
}

inline uint64_t hi64(const std::array<uint32_t, 4>& b) {
  return (uint64_t(b[0]) << 32) | b[1];
}
inline uint64_t lo64(const std::array<uint32_t, 4>& b) {
  return (uint64_t(b[2]) << 32) | b[3];
}

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

}  // namespace

std::array<uint32_t, 4> Philox4x32::block(std::array<uint32_t, 4> ctr,
                                          std::array<uint32_t, 2> key) {
  for (int r = 0; r < 10; ++r) {
    round_once(ctr, key);
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

double keyed_uniform(uint64_t seed, uint64_t s1, uint64_t s2) {
  auto b = block_at(seed, s1, s2);
  return double(hi64(b) >> 11) * kTwoPow53Inv;
}

std::pair<double, double> keyed_normal_pair(uint64_t seed, uint64_t s1, uint64_t s2) {
  auto b = block_at(seed ^ kNormalTag, s1, s2);
  double u1 = double((hi64(b) >> 11) + 1) * kTwoPow53Inv;  // (0, 1]
  double u2 = double(lo64(b) >> 11) * kTwoPow53Inv;        // [0, 1)
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 6.283185307179586476925286766559 * u2;
  return {r * std::cos(a), r * std::sin(a)};
}

double keyed_normal(uint64_t seed, uint64_t s1, uint64_t s2) {
  return keyed_normal_pair(seed, s1, s2).first;
}

uint64_t derive_seed(uint64_t seed, uint64_t stream) {
  auto b = block_at(seed, stream, 0x5eed5eed5eed5eedull);
  return hi64(b) ^ (lo64(b) << 1);
}

}  // namespace zx
