#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace zx {

enum class MomentMode { exact, pnt };

struct BlockMoments {
  int k = 0;
  double value = 0.0;
  // Unsieved remainder of the 1/(8p^2) part, bounded by an integral tail.
  double square_tail_bound = 0.0;
  MomentMode mode = MomentMode::exact;
  bool empty_block = false;
};

// Primes partitioned into blocks by k(p) = max(0, ceil(log log p)):
// block k holds the primes with e^{k-1} < log p <= e^k, so block 0 = {2},
// block 1 = {3,5,7,11,13}, block 3 ends at floor(exp(e^3)) = 532048240.
class PrimePartition {
 public:
  static PrimePartition build(uint64_t sieve_limit);
  static PrimePartition load(const std::string& path);
  void save(const std::string& path) const;

  uint64_t sieve_limit() const { return limit_; }
  int k_max_exact() const;
  bool block_is_exact(int k) const;

  static int block_of(uint64_t p);
  static uint64_t block_lo(int k);  // smallest integer in block k (2 for k = 0)
  static uint64_t block_hi(int k);  // floor(exp(e^k))

  bool is_prime(uint64_t n) const;
  uint64_t count_primes(uint64_t lo, uint64_t hi) const;
  std::vector<uint64_t> primes_in(uint64_t lo, uint64_t hi) const;
  std::vector<uint64_t> block_primes(int k) const;

  // Calls f(p) for every prime in [lo, hi] ascending.
  template <class F>
  void for_each_prime(uint64_t lo, uint64_t hi, F&& f) const {
    if (hi > limit_ || hi < lo) throw_range(lo, hi);
    if (lo <= 2 && hi >= 2) f(uint64_t(2));
    uint64_t start = lo < 3 ? 3 : lo | 1;
    if (start > hi) return;
    uint64_t i0 = (start - 3) / 2, i1 = (hi - 3) / 2;
    for (uint64_t w = i0 / 64; w <= i1 / 64 && w < bits_.size(); ++w) {
      uint64_t word = bits_[w];
      if (w == i0 / 64) word &= ~0ull << (i0 % 64);
      if (w == i1 / 64 && (i1 % 64) != 63) word &= (1ull << ((i1 % 64) + 1)) - 1;
      while (word) {
        uint64_t b = word & (~word + 1);
        f(3 + 2 * (w * 64 + uint64_t(__builtin_ctzll(word))));
        word ^= b;
      }
    }
  }

 private:
  PrimePartition() = default;
  [[noreturn]] static void throw_range(uint64_t lo, uint64_t hi);
  uint64_t limit_ = 0;
  std::vector<uint64_t> bits_;  // bit i <-> 2i+3 prime
};

// Per-block variance s_k^2 = sum over the block of 1/(2p) + 1/(8p^2).
// pnt mode replaces the 1/(2p) part by its logarithmic-integral value, which
// the substitution u = log log t turns into exactly 1/2 per block; the square
// part stays an exact sum over sieved primes with the remainder bounded.
BlockMoments sk2(const PrimePartition& part, int k, MomentMode mode);

// Shifted covariance rho_k(delta_h); delta_h = 0 reduces to sk2.
BlockMoments rho_k(const PrimePartition& part, int k, double delta_h,
                   MomentMode mode);

// Quadrature route for the pnt-mode oscillatory integral (cross-check for the
// cosine-integral closed form used by rho_k).
double rho_k_pnt_quadrature(int k, double delta_h);

// s_j^2 - rho_j for j <= log(1/delta_h), else rho_j; block sieved -> exact mode.
double epsilon_j(const PrimePartition& part, int j, double delta_h);

}  // namespace zx
