#include "zx/primes.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "zx/quadrature.hpp"
#include "zx/special.hpp"

namespace zx {
namespace {

constexpr char kCacheMagic[5] = {'Z', 'X', 'L', 'B', '1'};

void put_varint(std::string& out, uint64_t v) {
  while (v >= 0x80) {
    out.push_back(char(uint8_t(v) | 0x80));
    v >>= 7;
  }
  out.push_back(char(uint8_t(v)));
}

uint64_t get_varint(const std::string& in, size_t& pos) {
  uint64_t v = 0;
  int shift = 0;
  for (;;) {
    if (pos >= in.size()) throw std::runtime_error("sieve cache truncated");
    uint8_t b = uint8_t(in[pos++]);
    v |= uint64_t(b & 0x7F) << shift;
    if (!(b & 0x80)) return v;
    shift += 7;
    if (shift > 63) throw std::runtime_error("sieve cache varint overflow");
  }
}

}  // namespace

void PrimePartition::throw_range(uint64_t lo, uint64_t hi) {
  throw std::out_of_range("prime range [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "] outside sieve");
}

// p <= exp(e^k), compared in long double so huge blocks never overflow.
static bool below_block_end(uint64_t p, int k) {
  return (long double)p <= expl(expl((long double)k));
}

int PrimePartition::block_of(uint64_t p) {
  if (p < 2) throw std::invalid_argument("block_of: p < 2");
  double ll = std::log(std::log(double(p)));
  int k = int(std::ceil(ll));
  // Guard against a boundary value landing on an integer through rounding.
  if (k >= 1 && below_block_end(p, k - 1)) --k;
  if (k >= 0 && !below_block_end(p, k)) ++k;
  return k < 0 ? 0 : k;
}

uint64_t PrimePartition::block_lo(int k) {
  if (k < 0) throw std::invalid_argument("block_lo: k < 0");
  if (k == 0) return 2;
  return block_hi(k - 1) + 1;
}

uint64_t PrimePartition::block_hi(int k) {
  if (k < 0 || k > 40) throw std::invalid_argument("block_hi: k out of range");
  long double v = expl(expl((long double)k));
  if (v > 1.8e19L) throw std::overflow_error("block_hi exceeds 2^64");
  return (uint64_t)v;
}

PrimePartition PrimePartition::build(uint64_t sieve_limit) {
  if (sieve_limit < 2) throw std::invalid_argument("sieve_limit < 2: empty range");
  PrimePartition part;
  part.limit_ = sieve_limit;
  if (sieve_limit == 2) return part;  // no odd table needed
  uint64_t nbits = (sieve_limit - 3) / 2 + 1;
  part.bits_.assign((nbits + 63) / 64, ~0ull);
  // Mask bits past the limit in the last word.
  if (nbits % 64) part.bits_.back() = (1ull << (nbits % 64)) - 1;

  uint64_t root = uint64_t(std::sqrt((long double)sieve_limit)) + 2;
  std::vector<uint32_t> base;  // odd primes <= root
  {
    std::vector<uint8_t> small((root >> 1) + 1, 1);
    for (uint64_t i = 1; 2 * i + 1 <= root; ++i) {
      if (!small[i]) continue;
      uint64_t p = 2 * i + 1;
      base.push_back(uint32_t(p));
      for (uint64_t j = (p * p) >> 1; j < small.size(); j += p) small[j] = 0;
    }
  }

  constexpr uint64_t kSegBits = 1ull << 21;  // odd numbers per segment
  for (uint64_t seg = 0; seg < nbits; seg += kSegBits) {
    uint64_t seg_end = std::min(nbits, seg + kSegBits);  // exclusive bit index
    uint64_t lo_val = 3 + 2 * seg, hi_val = 3 + 2 * (seg_end - 1);
    for (uint32_t p : base) {
      uint64_t p2 = uint64_t(p) * p;
      if (p2 > hi_val) break;
      uint64_t start = p2 >= lo_val ? p2 : ((lo_val + p - 1) / p) * p;
      if ((start & 1) == 0) start += p;
      if (start < p2) start = p2;
      for (uint64_t v = start; v <= hi_val; v += 2 * p)
        part.bits_[(v - 3) >> 7] &= ~(1ull << (((v - 3) >> 1) & 63));
    }
  }
  // A base prime p <= root is itself prime; the p*p start above never clears it.
  return part;
}

bool PrimePartition::is_prime(uint64_t n) const {
  if (n > limit_) throw_range(n, n);
  if (n == 2) return true;
  if (n < 2 || (n & 1) == 0) return false;
  uint64_t i = (n - 3) / 2;
  return (bits_[i / 64] >> (i % 64)) & 1;
}

uint64_t PrimePartition::count_primes(uint64_t lo, uint64_t hi) const {
  uint64_t c = 0;
  for_each_prime(lo, hi, [&](uint64_t) { ++c; });
  return c;
}

std::vector<uint64_t> PrimePartition::primes_in(uint64_t lo, uint64_t hi) const {
  std::vector<uint64_t> v;
  for_each_prime(lo, hi, [&](uint64_t p) { v.push_back(p); });
  return v;
}

// True iff floor(exp(e^k)) <= limit, i.e. block k lies inside the sieve;
// compared in long double so huge blocks never overflow.
static bool block_fits(int k, uint64_t limit) {
  long double v = expl(expl((long double)k));
  if (!(v < 1.8e19L)) return false;
  return (uint64_t)v <= limit;
}

int PrimePartition::k_max_exact() const {
  int k = 0;
  while (k + 1 <= 40 && block_fits(k + 1, limit_)) ++k;
  return block_fits(0, limit_) ? k : -1;
}

bool PrimePartition::block_is_exact(int k) const {
  return k >= 0 && block_fits(k, limit_);
}

std::vector<uint64_t> PrimePartition::block_primes(int k) const {
  if (!block_is_exact(k)) {
    std::string need;
    try {
      need = "sieve_limit >= " + std::to_string(block_hi(k));
    } catch (const std::exception&) {
      need = "a sieve_limit beyond 2^64";
    }
    throw std::out_of_range("block " + std::to_string(k) +
                            " not fully sieved; needs " + need);
  }
  return primes_in(block_lo(k), block_hi(k));
}

void PrimePartition::save(const std::string& path) const {
  std::string out;
  out.append(kCacheMagic, 5);
  uint64_t lim = limit_;
  for (int i = 0; i < 8; ++i) out.push_back(char(uint8_t(lim >> (8 * i))));
  // Per-block delta streams; the last block is the partial straddler.
  int k_last = block_of(limit_);
  put_varint(out, uint64_t(k_last + 1));
  for (int k = 0; k <= k_last; ++k) {
    uint64_t lo = block_lo(k);
    uint64_t hi = block_fits(k, limit_) ? block_hi(k) : limit_;
    std::string blk;
    uint64_t prev = 0, cnt = 0;
    for_each_prime(lo, hi, [&](uint64_t p) {
      put_varint(blk, p - prev);
      prev = p;
      ++cnt;
    });
    put_varint(out, uint64_t(k));
    put_varint(out, cnt);
    out += blk;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write sieve cache " + path);
  f.write(out.data(), std::streamsize(out.size()));
  if (!f) throw std::runtime_error("sieve cache write failed " + path);
}

PrimePartition PrimePartition::load(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read sieve cache " + path);
  std::string in((std::istreambuf_iterator<char>(f)),
                 std::istreambuf_iterator<char>());
  if (in.size() < 13 || std::memcmp(in.data(), kCacheMagic, 5) != 0)
    throw std::runtime_error("bad sieve cache magic");
  uint64_t lim = 0;
  for (int i = 0; i < 8; ++i) lim |= uint64_t(uint8_t(in[5 + i])) << (8 * i);
  PrimePartition part;
  part.limit_ = lim;
  if (lim < 2) throw std::runtime_error("sieve cache corrupt");
  uint64_t nbits = lim >= 3 ? (lim - 3) / 2 + 1 : 0;
  part.bits_.assign((nbits + 63) / 64, 0ull);
  size_t pos = 13;
  uint64_t nblocks = get_varint(in, pos);
  for (uint64_t b = 0; b < nblocks; ++b) {
    get_varint(in, pos);  // block index, implied by order
    uint64_t cnt = get_varint(in, pos);
    uint64_t p = 0;
    for (uint64_t i = 0; i < cnt; ++i) {
      p += get_varint(in, pos);
      if (p == 2) continue;
      if (p > lim || (p & 1) == 0 || p < 3)
        throw std::runtime_error("sieve cache corrupt");
      uint64_t idx = (p - 3) / 2;
      part.bits_[idx / 64] |= 1ull << (idx % 64);
    }
  }
  return part;
}

// Exact 1/(8p^2) part over sieved block primes (optionally cosine-weighted),
// plus a tail bound when the block extends past the sieve:
// int_L dt / (8 t^2 log t) <= 1/(8 L log L).
static void square_sum_and_tail(const PrimePartition& part, int k,
                                double two_delta_h, double& sum, double& tail) {
  uint64_t block_end;
  bool overflow = false;
  try {
    block_end = PrimePartition::block_hi(k);
  } catch (const std::overflow_error&) {
    block_end = ~0ull;
    overflow = true;
  }
  uint64_t lo = k >= 1 && overflow ? ~0ull : PrimePartition::block_lo(k);
  if (k >= 1) {
    // block_lo(k) = block_hi(k-1) + 1 may itself overflow for huge k.
    try {
      lo = PrimePartition::block_lo(k);
    } catch (const std::overflow_error&) {
      lo = ~0ull;
    }
  }
  uint64_t hi = std::min(part.sieve_limit(), block_end);
  long double s = 0.0L;
  if (lo <= hi) {
    part.for_each_prime(lo, hi, [&](uint64_t p) {
      long double inv = 1.0L / ((long double)p * (long double)p * 8.0L);
      s += two_delta_h == 0.0 ? inv
                              : inv * std::cos(two_delta_h * std::log(double(p)));
    });
  }
  sum = double(s);
  tail = 0.0;
  if (overflow || block_end > part.sieve_limit()) {
    long double L = lo <= part.sieve_limit()
                        ? (long double)part.sieve_limit()
                        : expl(expl((long double)(k - 1)));
    tail = double(1.0L / (8.0L * L * logl(L)));
  }
}

BlockMoments sk2(const PrimePartition& part, int k, MomentMode mode) {
  BlockMoments m;
  m.k = k;
  m.mode = mode;
  if (mode == MomentMode::exact) {
    if (!part.block_is_exact(k))
      throw std::out_of_range("sk2 exact: block not fully sieved");
    long double s = 0.0L;
    uint64_t cnt = 0;
    part.for_each_prime(PrimePartition::block_lo(k), PrimePartition::block_hi(k),
                        [&](uint64_t p) {
                          long double pd = (long double)p;
                          s += 1.0L / (2.0L * pd) + 1.0L / (8.0L * pd * pd);
                          ++cnt;
                        });
    m.value = double(s);
    m.empty_block = cnt == 0;
    return m;
  }
  if (k < 1) throw std::invalid_argument("sk2 pnt requires k >= 1");
  // int dt/(2 t log t) over (exp(e^{k-1}), exp(e^k)] under u = log log t is
  // int_{k-1}^{k} du/2 = 1/2 exactly.
  double sq, tail;
  square_sum_and_tail(part, k, 0.0, sq, tail);
  m.value = 0.5 + sq;
  m.square_tail_bound = tail;
  return m;
}

double rho_k_pnt_quadrature(int k, double delta_h) {
  // int cos(delta_h e^u)/2 du over (k-1, k], panels split at the cosine zeros
  // v_m = (pi/2 + m pi)/delta_h of the v = e^u form int cos(delta_h v)/(2v) dv.
  if (delta_h == 0.0) return 0.5;
  double a = std::exp(double(k - 1)), b = std::exp(double(k));
  const double pi = 3.14159265358979323846;
  std::vector<double> cuts{a};
  double m0 = std::ceil((a * delta_h - 0.5 * pi) / pi);
  for (double m = std::max(0.0, m0);; m += 1.0) {
    double v = (0.5 * pi + m * pi) / delta_h;
    if (v >= b) break;
    if (v > a) cuts.push_back(v);
    if (cuts.size() > 4000000)
      throw std::runtime_error("rho quadrature: too many panels");
  }
  cuts.push_back(b);
  double total = 0.0;
  for (size_t i = 0; i + 1 < cuts.size(); ++i)
    total += integrate_adaptive(
        [&](double v) { return std::cos(delta_h * v) / (2.0 * v); }, cuts[i],
        cuts[i + 1], 1e-12, 16, 24);
  return total;
}

BlockMoments rho_k(const PrimePartition& part, int k, double delta_h,
                   MomentMode mode) {
  if (delta_h < 0.0) throw std::invalid_argument("rho_k: delta_h < 0");
  BlockMoments m;
  m.k = k;
  m.mode = mode;
  if (mode == MomentMode::exact) {
    if (!part.block_is_exact(k))
      throw std::out_of_range("rho_k exact: block not fully sieved");
    long double s = 0.0L;
    uint64_t cnt = 0;
    part.for_each_prime(
        PrimePartition::block_lo(k), PrimePartition::block_hi(k),
        [&](uint64_t p) {
          long double pd = (long double)p;
          double lp = std::log(double(p));
          s += std::cos(delta_h * lp) / (2.0L * pd) +
               std::cos(2.0 * delta_h * lp) / (8.0L * pd * pd);
          ++cnt;
        });
    m.value = double(s);
    m.empty_block = cnt == 0;
    return m;
  }
  if (k < 1) throw std::invalid_argument("rho_k pnt requires k >= 1");
  double lead;
  if (delta_h == 0.0) {
    lead = 0.5;
  } else {
    // int_{e^{k-1}}^{e^k} cos(delta_h v)/(2v) dv = (Ci(d e^k) - Ci(d e^{k-1}))/2.
    double s1, c1, s2, c2;
    sici(delta_h * std::exp(double(k - 1)), s1, c1);
    sici(delta_h * std::exp(double(k)), s2, c2);
    lead = 0.5 * (c2 - c1);
  }
  double sq, tail;
  square_sum_and_tail(part, k, 2.0 * delta_h, sq, tail);
  m.value = lead + sq;
  m.square_tail_bound = tail;
  return m;
}

double epsilon_j(const PrimePartition& part, int j, double delta_h) {
  if (delta_h == 0.0)
    throw std::domain_error("epsilon_j: delta_h = 0 has no branching scale");
  if (delta_h < 0.0) throw std::invalid_argument("epsilon_j: delta_h < 0");
  MomentMode mode =
      part.block_is_exact(j) ? MomentMode::exact : MomentMode::pnt;
  double rho = rho_k(part, j, delta_h, mode).value;
  if (double(j) <= std::log(1.0 / delta_h))
    return sk2(part, j, mode).value - rho;
  return rho;
}

}  // namespace zx
