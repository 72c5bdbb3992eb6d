#include "zx/models.hpp"

#include <atomic>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "zx/quadrature.hpp"
#include "zx/rng.hpp"
#include "zx/special.hpp"

namespace zx {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// key-space partition for the sub-draw index (s2); levels/cells, exact-cov
// draws and tail aggregates must never collide under one (seed, replica)
constexpr uint64_t kExactCovBase = uint64_t(1) << 60;
constexpr uint64_t kTailBase = uint64_t(1) << 61;

// Packed lower-triangular Cholesky with diagonal jitter retries.
// a is row-major packed: a[i*(i+1)/2 + j], j <= i.
bool packed_cholesky(std::vector<double>& a, size_t n) {
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j <= i; ++j) {
      double s = a[i * (i + 1) / 2 + j];
      for (size_t k = 0; k < j; ++k)
        s -= a[i * (i + 1) / 2 + k] * a[j * (j + 1) / 2 + k];
      if (i == j) {
        if (s <= 0.0) return false;
        a[i * (i + 1) / 2 + j] = std::sqrt(s);
      } else {
        a[i * (i + 1) / 2 + j] = s / a[j * (j + 1) / 2 + j];
      }
    }
  }
  return true;
}

std::vector<double> cholesky_with_jitter(std::vector<double> cov, size_t n,
                                         const char* who) {
  double scale = 0.0;
  for (size_t i = 0; i < n; ++i)
    scale = std::max(scale, std::abs(cov[i * (i + 1) / 2 + i]));
  for (double jit : {0.0, 1e-14, 1e-12, 1e-10, 1e-8}) {
    std::vector<double> a = cov;
    for (size_t i = 0; i < n; ++i) a[i * (i + 1) / 2 + i] += jit * scale;
    if (packed_cholesky(a, n)) return a;
  }
  throw std::runtime_error(std::string(who) + ": covariance not PSD");
}

// Tail covariance across offsets for the primes in (cutoff, hi], plus the
// per-pass variance/third-moment sums. One sieve pass; cached because the
// top block holds ~3e7 primes.
struct TailStats {
  std::vector<double> chol;  // packed lower, size m(m+1)/2
  double var = 0.0;          // marginal tail variance
  double abs3 = 0.0;         // sum of E|X_p|^3 upper bounds
};

const TailStats& tail_stats(const PrimePartition& part,
                            const std::vector<double>& h_set, uint64_t cutoff,
                            uint64_t hi) {
  using Key = std::tuple<uint64_t, uint64_t, std::vector<double>>;
  static std::map<Key, TailStats> cache;
  static std::mutex mu;
  Key key{cutoff, hi, h_set};
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }

  const size_t m = h_set.size();
  std::vector<long double> cov(m * (m + 1) / 2, 0.0L);
  long double abs3 = 0.0L;
  // E|cos(theta)|^3 = 4/(3 pi); L3 triangle inequality for the square term
  const double c3 = 4.0 / (3.0 * M_PI);
  part.for_each_prime(cutoff + 1, hi, [&](uint64_t p) {
    const double lp = std::log(static_cast<double>(p));
    const double ip = 1.0 / static_cast<double>(p);
    const double isq = std::sqrt(ip);
    for (size_t i = 0; i < m; ++i) {
      for (size_t j = 0; j <= i; ++j) {
        const double d = h_set[i] - h_set[j];
        cov[i * (i + 1) / 2 + j] += 0.5 * ip * std::cos(d * lp) +
                                    0.125 * ip * ip * std::cos(2.0 * d * lp);
      }
    }
    const double w = isq + 0.5 * ip;
    abs3 += c3 * w * w * w;
  });

  TailStats ts;
  std::vector<double> covd(cov.begin(), cov.end());
  ts.var = (m > 0) ? covd[0] : 0.0;
  ts.abs3 = static_cast<double>(abs3);
  if (m > 0) ts.chol = cholesky_with_jitter(covd, m, "sample_steinhaus");

  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(std::move(key), std::move(ts)).first->second;
}

}  // namespace

SteinhausSample sample_steinhaus(uint64_t seed, const PrimePartition& part,
                                 const std::vector<double>& h_set, int k_max,
                                 uint64_t exact_cutoff) {
  if (k_max < 0 || k_max > part.k_max_exact())
    throw std::out_of_range("sample_steinhaus: block not sieved");
  const size_t m = h_set.size();
  SteinhausSample out;
  out.seed = seed;
  out.k_max = k_max;
  out.h_set = h_set;
  out.tail_component.assign(m, 0.0);

  const uint64_t top_hi =
      std::min(part.sieve_limit(), PrimePartition::block_hi(k_max));
  // blocks up to 2 are tiny; the cutoff only ever splits a larger top block
  uint64_t cutoff = std::max(
      exact_cutoff, PrimePartition::block_hi(std::min(k_max, 2)));
  cutoff = std::min(cutoff, top_hi);
  out.exact_cutoff = cutoff;

  std::vector<std::vector<long double>> acc(
      m, std::vector<long double>(static_cast<size_t>(k_max) + 1, 0.0L));
  part.for_each_prime(2, cutoff, [&](uint64_t p) {
    const int k = PrimePartition::block_of(p);
    if (k > k_max) return;
    const double theta = kTwoPi * keyed_uniform(seed, p, 0);
    out.theta.emplace_back(p, theta);
    const double lp = std::log(static_cast<double>(p));
    const double ip = 1.0 / static_cast<double>(p);
    const double isq = std::sqrt(ip);
    for (size_t i = 0; i < m; ++i) {
      const double a1 = theta - h_set[i] * lp;
      acc[i][static_cast<size_t>(k)] +=
          std::cos(a1) * isq + 0.5 * std::cos(2.0 * a1) * ip;
    }
  });

  if (cutoff < top_hi && m > 0) {
    const TailStats& ts = tail_stats(part, h_set, cutoff, top_hi);
    std::vector<double> z(m);
    for (size_t i = 0; i < m; ++i)
      z[i] = keyed_normal(seed, 0, kTailBase + i);
    for (size_t i = 0; i < m; ++i) {
      double s = 0.0;
      for (size_t j = 0; j <= i; ++j)
        s += ts.chol[i * (i + 1) / 2 + j] * z[j];
      out.tail_component[i] = s;
      acc[i][static_cast<size_t>(k_max)] += s;
    }
  }

  out.trajectories.assign(
      m, std::vector<double>(static_cast<size_t>(k_max) + 1, 0.0));
  for (size_t i = 0; i < m; ++i) {
    long double run = 0.0L;
    for (int k = 0; k <= k_max; ++k) {
      run += acc[i][static_cast<size_t>(k)];
      out.trajectories[i][static_cast<size_t>(k)] = static_cast<double>(run);
    }
  }
  return out;
}

GaussianWalkPair sample_gaussian_pair(uint64_t seed, double delta_h, int k_lo,
                                      int k_hi, const std::vector<double>& s2,
                                      const std::vector<double>& rho) {
  if (k_hi < k_lo)
    throw std::domain_error("sample_gaussian_pair: empty k range");
  const size_t n = static_cast<size_t>(k_hi - k_lo) + 1;
  if (s2.size() != n || rho.size() != n)
    throw std::domain_error(
        "sample_gaussian_pair: moment arrays must cover the k range");
  for (size_t i = 0; i < n; ++i)
    if (!(std::abs(rho[i]) <= s2[i]))
      throw std::domain_error("sample_gaussian_pair: covariance not PSD");

  GaussianWalkPair out;
  out.delta_h = delta_h;
  out.k_lo = k_lo;
  out.k_hi = k_hi;
  out.increments.resize(n);
  out.paths.resize(n);
  double c1 = 0.0, c2 = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const auto z =
        keyed_normal_pair(seed, 1, static_cast<uint64_t>(k_lo) + i);
    const double sd = std::sqrt(s2[i]);
    const double x = sd * z.first;
    const double cf = (s2[i] > 0.0) ? rho[i] / s2[i] : 0.0;
    const double resid = s2[i] - cf * rho[i];  // exactly 0 when rho == s2
    const double y = cf * x + std::sqrt(std::max(0.0, resid)) * z.second;
    out.increments[i] = {x, y};
    c1 += x;
    c2 += y;
    out.paths[i] = {c1, c2};
  }
  return out;
}

namespace {

inline uint64_t cell_key(size_t level, int64_t cell) {
  // levels stay far below 2^15; cells fit in 44 bits signed
  return (uint64_t(level) << 44) ^ uint64_t(cell + (int64_t(1) << 43));
}

void check_field_spec(const FieldSpec& spec) {
  if (spec.grid_points == 0)
    throw std::domain_error("sample_field: empty grid");
  if (spec.grid_points > 10000000)
    throw std::length_error("sample_field: grid larger than 1e7 points");
  if (spec.levels.empty())
    throw std::domain_error("sample_field: no levels");
}

// Adds level j's shared increments into val. Cells are monotone over the
// uniform grid, so each cell is drawn once, in grid order.
void add_level(uint64_t seed, uint64_t replica, const FieldSpec& spec,
               size_t j, std::vector<double>& val) {
  const double sd = std::sqrt(spec.levels[j].var);
  const double scale = spec.levels[j].scale;
  int64_t cur = INT64_MIN;
  double cur_val = 0.0;
  for (uint64_t i = 0; i < spec.grid_points; ++i) {
    const double h = spec.grid_lo + spec.grid_step * static_cast<double>(i);
    const int64_t c = static_cast<int64_t>(std::floor(h * scale));
    if (c != cur) {
      cur = c;
      cur_val = sd * keyed_normal(seed, replica, cell_key(j, c));
    }
    val[i] += cur_val;
  }
}

}  // namespace

FieldSample sample_field(uint64_t seed, const FieldSpec& spec,
                         uint64_t replica) {
  check_field_spec(spec);
  FieldSample out;
  out.grid.resize(spec.grid_points);
  for (uint64_t i = 0; i < spec.grid_points; ++i)
    out.grid[i] = spec.grid_lo + spec.grid_step * static_cast<double>(i);
  out.paths.assign(spec.levels.size(),
                   std::vector<double>(spec.grid_points, 0.0));
  std::vector<double> run(spec.grid_points, 0.0);
  for (size_t j = 0; j < spec.levels.size(); ++j) {
    add_level(seed, replica, spec, j, run);
    out.paths[j] = run;
  }
  return out;
}

std::vector<double> field_max_replicas(uint64_t seed, const FieldSpec& spec,
                                       uint64_t R, int n_threads) {
  check_field_spec(spec);
  std::vector<double> out(R);
  std::atomic<uint64_t> next{0};
  auto worker = [&]() {
    std::vector<double> val;
    for (;;) {
      const uint64_t r = next.fetch_add(1);
      if (r >= R) return;
      val.assign(spec.grid_points, 0.0);
      for (size_t j = 0; j < spec.levels.size(); ++j)
        add_level(seed, r, spec, j, val);
      double mx = val[0];
      for (double v : val) mx = std::max(mx, v);
      out[r] = mx;
    }
  };
  const int workers = std::max(1, n_threads);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return out;
}

ExactCovSampler build_exact_cov_sampler(const std::vector<double>& grid,
                                        const std::vector<double>& cov_by_lag) {
  const size_t n = grid.size();
  if (n == 0) throw std::domain_error("build_exact_cov_sampler: empty grid");
  if (n > 4096)
    throw std::length_error(
        "build_exact_cov_sampler: grid too large for dense factorization");
  if (cov_by_lag.size() < n)
    throw std::domain_error(
        "build_exact_cov_sampler: need one covariance per lag");
  std::vector<double> cov(n * (n + 1) / 2);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j <= i; ++j)
      cov[i * (i + 1) / 2 + j] = cov_by_lag[i - j];
  ExactCovSampler s;
  s.grid = grid;
  s.n = n;
  s.chol = cholesky_with_jitter(cov, n, "build_exact_cov_sampler");
  return s;
}

std::vector<double> exact_cov_sample(const ExactCovSampler& s, uint64_t seed,
                                     uint64_t replica) {
  std::vector<double> z(s.n), v(s.n, 0.0);
  for (size_t i = 0; i < s.n; ++i)
    z[i] = keyed_normal(seed, replica, kExactCovBase + i);
  for (size_t i = 0; i < s.n; ++i) {
    double acc = 0.0;
    const double* row = &s.chol[i * (i + 1) / 2];
    for (size_t j = 0; j <= i; ++j) acc += row[j] * z[j];
    v[i] = acc;
  }
  return v;
}

double gaussian_box_prob(double s2, double rho, Box a, Box b) {
  if (!(s2 > 0.0))
    throw std::domain_error("gaussian_box_prob: variance must be positive");
  if (std::abs(rho) > s2)
    throw std::domain_error("gaussian_box_prob: |rho| exceeds the variance");
  const double sd = std::sqrt(s2);
  const double cf = rho / s2;
  const double resid = s2 - cf * rho;
  if (resid <= 0.0) {
    // degenerate pair: Y = sign(rho) X
    const Box bb = (rho >= 0.0) ? b : Box{-b.hi, -b.lo};
    const double lo = std::max(a.lo, bb.lo);
    const double hi = std::min(a.hi, bb.hi);
    if (!(hi > lo)) return 0.0;
    return norm_prob_interval(lo, hi, 0.0, sd);
  }
  const double rsd = std::sqrt(resid);
  const double lo = std::max(a.lo, -10.0 * sd);
  const double hi = std::min(a.hi, 10.0 * sd);
  if (!(hi > lo)) return 0.0;
  auto f = [&](double x) {
    return norm_pdf(x / sd) / sd *
           norm_prob_interval(b.lo, b.hi, cf * x, rsd);
  };
  return integrate_adaptive(f, lo, hi, 1e-12, 16, 40);
}

BerryEsseenReport berry_esseen_gap(uint64_t seed, int k, Box a, Box b,
                                   double delta_h, uint64_t M,
                                   const PrimePartition& part, int n_threads,
                                   uint64_t exact_cutoff) {
  if (M < 10000)
    throw std::domain_error("berry_esseen_gap: need at least 1e4 draws");
  if (k < 0 || k > part.k_max_exact())
    throw std::out_of_range("berry_esseen_gap: block not sieved");

  const uint64_t blo = PrimePartition::block_lo(k);
  const uint64_t bhi = std::min(part.sieve_limit(), PrimePartition::block_hi(k));
  const uint64_t cutoff = std::min(bhi, std::max(exact_cutoff, blo));

  struct PrimeTrig {
    double isq, ip, c1, s1, c2, s2;
  };
  std::vector<PrimeTrig> head;
  long double h_s2 = 0.0L, h_rho = 0.0L;
  part.for_each_prime(blo, cutoff, [&](uint64_t p) {
    const double lp = std::log(static_cast<double>(p));
    PrimeTrig q;
    q.ip = 1.0 / static_cast<double>(p);
    q.isq = std::sqrt(q.ip);
    q.c1 = std::cos(delta_h * lp);
    q.s1 = std::sin(delta_h * lp);
    q.c2 = std::cos(2.0 * delta_h * lp);
    q.s2 = std::sin(2.0 * delta_h * lp);
    head.push_back(q);
    h_s2 += 0.5 * q.ip + 0.125 * q.ip * q.ip;
    h_rho += 0.5 * q.ip * q.c1 + 0.125 * q.ip * q.ip * q.c2;
  });

  double l11 = 0.0, l21 = 0.0, l22 = 0.0;
  double s2_model = static_cast<double>(h_s2);
  double rho_model = static_cast<double>(h_rho);
  BerryEsseenReport rep;
  const bool has_tail = cutoff < bhi;
  if (has_tail) {
    const TailStats& ts = tail_stats(part, {0.0, delta_h}, cutoff, bhi);
    const double tv = ts.chol[0] * ts.chol[0];
    const double tc = ts.chol[0] * ts.chol[1];
    l11 = ts.chol[0];
    l21 = ts.chol[1];
    l22 = ts.chol[2];
    s2_model += tv;
    rho_model += tc;
    // two marginals, union bound over the box faces
    rep.tail_gauss_bound = 2.0 * 0.56 * ts.abs3 / std::pow(tv, 1.5);
  }

  const uint64_t n_chunks = 256;
  std::vector<uint64_t> hits(n_chunks, 0);
  std::atomic<uint64_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const uint64_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      const uint64_t r0 = M * c / n_chunks;
      const uint64_t r1 = M * (c + 1) / n_chunks;
      uint64_t local = 0;
      for (uint64_t r = r0; r < r1; ++r) {
        double y0 = 0.0, y1 = 0.0;
        uint64_t idx = 0;
        for (const PrimeTrig& q : head) {
          const double th = kTwoPi * keyed_uniform(seed, r, idx++);
          const double ct = std::cos(th), st = std::sin(th);
          const double c2t = 2.0 * ct * ct - 1.0, s2t = 2.0 * st * ct;
          y0 += ct * q.isq + 0.5 * c2t * q.ip;
          y1 += (ct * q.c1 + st * q.s1) * q.isq +
                0.5 * (c2t * q.c2 + s2t * q.s2) * q.ip;
        }
        if (has_tail) {
          const auto z = keyed_normal_pair(seed, r, kTailBase);
          y0 += l11 * z.first;
          y1 += l21 * z.first + l22 * z.second;
        }
        if (y0 >= a.lo && y0 <= a.hi && y1 >= b.lo && y1 <= b.hi) ++local;
      }
      hits[c] = local;
    }
  };
  const int workers = std::max(1, n_threads);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  uint64_t total = 0;
  for (uint64_t hcount : hits) total += hcount;

  rep.mc = static_cast<double>(total) / static_cast<double>(M);
  rep.mc_se = std::sqrt(std::max(rep.mc * (1.0 - rep.mc), 1e-300) /
                        static_cast<double>(M));
  rep.quad = gaussian_box_prob(s2_model, rho_model, a, b);
  rep.gap = std::abs(rep.mc - rep.quad);
  return rep;
}

}  // namespace zx
