#include "zx/dirichlet.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "zx/quadrature.hpp"
#include "zx/zeta.hpp"

namespace zx {

double walk_term(uint64_t p, double t, double h) {
  const double lp = std::log(static_cast<double>(p));
  const double th = (t + h) * lp;
  return std::cos(th) / std::sqrt(static_cast<double>(p)) +
         0.5 * std::cos(2.0 * th) / static_cast<double>(p);
}

WalkSample partial_sums(double t, double h, int k_lo, int k_hi,
                        const PrimePartition& part, WalkConvention conv) {
  if (k_lo < 0 || k_hi < k_lo)
    throw std::domain_error("partial_sums: need 0 <= k_lo <= k_hi");
  if (k_hi > part.k_max_exact())
    throw std::out_of_range("partial_sums: block above the sieved range");

  std::vector<double> block_sum(static_cast<size_t>(k_hi) + 1, 0.0);
  for (int k = 0; k <= k_hi; ++k) {
    long double acc = 0.0L;
    const uint64_t hi = std::min(PrimePartition::block_hi(k),
                                 part.sieve_limit());
    part.for_each_prime(PrimePartition::block_lo(k), hi,
                        [&](uint64_t p) { acc += walk_term(p, t, h); });
    block_sum[static_cast<size_t>(k)] = static_cast<double>(acc);
  }

  WalkSample out;
  out.t = t;
  out.h = h;
  out.k_lo = k_lo;
  out.k_hi = k_hi;
  out.convention = conv;
  out.values.resize(static_cast<size_t>(k_hi - k_lo) + 1);
  for (int k = k_lo; k <= k_hi; ++k) {
    long double acc = 0.0L;
    const int first = (conv == WalkConvention::shifted) ? k_lo + 1 : 0;
    for (int b = first; b <= k; ++b) acc += block_sum[static_cast<size_t>(b)];
    out.values[static_cast<size_t>(k - k_lo)] = static_cast<double>(acc);
  }
  return out;
}

namespace {

double poly_abs2(const std::vector<std::complex<double>>& coef, double tau) {
  std::complex<long double> d(0.0L, 0.0L);
  for (size_t n = 1; n <= coef.size(); ++n) {
    const double ln = std::log(static_cast<double>(n));
    const double amp = 1.0 / std::sqrt(static_cast<double>(n));
    d += std::complex<long double>(coef[n - 1] *
                                   std::polar(amp, -tau * ln));
  }
  const std::complex<double> v(static_cast<double>(d.real()),
                               static_cast<double>(d.imag()));
  return std::norm(v);
}

}  // namespace

SupBound sup_bound_discretized(const std::vector<std::complex<double>>& coef,
                               double t, int k) {
  const size_t N = coef.size();
  if (N < 2)
    throw std::domain_error("sup_bound_discretized: need length >= 2");
  const double logN = std::log(static_cast<double>(N));
  // loglog N < 1 for very short polynomials; k = 1 stays admissible there.
  const double k_cap = std::max(1.0, std::log(logN));
  if (k < 1 || static_cast<double>(k) > k_cap)
    throw std::domain_error("sup_bound_discretized: k outside [1, loglog N]");

  const double step = 2.0 * M_PI / (8.0 * logN);
  const int64_t near_j =
      static_cast<int64_t>(std::floor(16.0 * std::exp(-k) * logN));
  // weight 1/(1+j^100) is below 1e-30 by near_j + 2; four extra columns
  // leave the dropped tail far under the 1e-12 relative contract
  const int64_t far_j = near_j + 4;

  long double sum = 0.0L;
  double max_d2 = 0.0;
  for (int64_t j = -far_j; j <= far_j; ++j) {
    const double v = poly_abs2(coef, t + step * static_cast<double>(j));
    max_d2 = std::max(max_d2, v);
    if (std::llabs(j) <= near_j)
      sum += v;
    else
      sum += v / (1.0 + std::pow(static_cast<double>(std::llabs(j)), 100.0));
  }
  const double value = static_cast<double>(sum);
  const double dropped =
      4.0 * max_d2 * std::pow(static_cast<double>(far_j + 1), -100.0);
  SupBound out;
  out.value = value;
  out.near_j = near_j;
  out.far_j = far_j;
  out.dropped_rel = dropped / std::max(value, 1e-300);
  return out;
}

MeanValueGap mean_value_gap(const std::vector<std::complex<double>>& coef,
                            double T) {
  const size_t N = coef.size();
  if (N == 0) throw std::domain_error("mean_value_gap: empty polynomial");
  if (T < 100.0) throw std::domain_error("mean_value_gap: requires T >= 100");
  if (static_cast<double>(N) > T)
    throw std::domain_error("mean_value_gap: polynomial longer than T");

  long double diag = 0.0L;
  for (const auto& a : coef) diag += std::norm(a);

  // (1/T) int_T^{2T} (m/n)^{i tau} d tau, m < n; the (n, m) term is the
  // conjugate, so the off-diagonal total is 2 Re of the m < n half.
  std::complex<long double> off(0.0L, 0.0L);
  for (size_t m = 1; m <= N; ++m) {
    if (coef[m - 1] == std::complex<double>(0.0, 0.0)) continue;
    for (size_t n = m + 1; n <= N; ++n) {
      if (coef[n - 1] == std::complex<double>(0.0, 0.0)) continue;
      const double lg =
          std::log(static_cast<double>(m) / static_cast<double>(n));
      const std::complex<double> num =
          std::exp(std::complex<double>(0.0, lg * 2.0 * T)) -
          std::exp(std::complex<double>(0.0, lg * T));
      const std::complex<double> integral =
          num / std::complex<double>(0.0, lg * T);
      off += std::complex<long double>(coef[m - 1] *
                                       std::conj(coef[n - 1]) * integral);
    }
  }
  MeanValueGap out;
  out.gap = std::abs(2.0 * static_cast<double>(off.real()));
  out.diag = static_cast<double>(diag);
  out.rel = (out.diag > 0.0) ? out.gap / out.diag : 0.0;
  return out;
}

double euler_kernel(double w) {
  const double half = 0.5 * w;
  if (std::abs(half) < 1e-8) {
    const double c = 1.0 - half * half / 3.0;
    return c / (2.0 * M_PI);
  }
  const double r = std::sin(half) / half;
  return r * r / (2.0 * M_PI);
}

double euler_kernel_hat(double u) {
  return std::max(0.0, 1.0 - 2.0 * M_PI * std::abs(u));
}

namespace {

std::vector<uint64_t> product_primes(const PrimePartition& part, double X) {
  const uint64_t cap = static_cast<uint64_t>(std::floor(X));
  if (cap > part.sieve_limit())
    throw std::domain_error("smoothed_euler_product: X beyond sieve");
  std::vector<uint64_t> ps;
  part.for_each_prime(2, cap, [&](uint64_t p) { ps.push_back(p); });
  return ps;
}

std::complex<double> finite_euler_log(const std::vector<uint64_t>& ps,
                                      double tau) {
  // sum of log(1 - p^{-1/2 - i tau}); exponentiated by the caller
  std::complex<double> acc(0.0, 0.0);
  for (uint64_t p : ps) {
    const double lp = std::log(static_cast<double>(p));
    const std::complex<double> ppow =
        std::polar(1.0 / std::sqrt(static_cast<double>(p)), -tau * lp);
    acc += std::log(1.0 - ppow);
  }
  return acc;
}

struct ScanShared {
  double tau0 = 0.0;  // t + h
  double x_lo = 0.0;
  double panel_w = 0.0;
  double logX = 0.0;
  uint64_t n_panels = 0;
  uint64_t n_terms = 0;
  const std::vector<uint64_t>* primes = nullptr;
  const GLRule* rule = nullptr;
};

struct ChunkResult {
  std::complex<long double> integral{0.0L, 0.0L};
  double max_em_err = 0.0;
  double max_zp = 0.0;
};

// One contiguous panel range. Phase state z[(n-1)*M + m] carries
// n^{-1/2} e^{-i (tau0 + x_{p,m}) ln n}; advancing a panel multiplies by
// step_n = e^{-i panel_w ln n}, identical for every node slot m.
ChunkResult scan_chunk(const ScanShared& sh, uint64_t p0, uint64_t p1) {
  const int M = static_cast<int>(sh.rule->x.size());
  const uint64_t nz = sh.n_terms - 1;
  std::vector<double> off(M), wgt(M);
  const double half = 0.5 * sh.panel_w;
  for (int m = 0; m < M; ++m) {
    off[m] = half * (1.0 + sh.rule->x[m]);
    wgt[m] = half * sh.rule->w[m];
  }
  std::vector<std::complex<double>> z(nz * M);
  std::vector<std::complex<double>> step(nz);
  const double base =
      sh.tau0 + sh.x_lo + static_cast<double>(p0) * sh.panel_w;
  for (uint64_t n = 1; n <= nz; ++n) {
    const double ln = std::log(static_cast<double>(n));
    const double amp = 1.0 / std::sqrt(static_cast<double>(n));
    for (int m = 0; m < M; ++m)
      z[(n - 1) * M + m] = std::polar(amp, -(base + off[m]) * ln);
    step[n - 1] = std::polar(1.0, -sh.panel_w * ln);
  }

  ChunkResult out;
  std::vector<std::complex<double>> main(M);
  for (uint64_t p = p0; p < p1; ++p) {
    for (int m = 0; m < M; ++m) main[m] = {0.0, 0.0};
    for (uint64_t n = 0; n < nz; ++n) {
      const std::complex<double> st = step[n];
      std::complex<double>* zn = &z[n * M];
      for (int m = 0; m < M; ++m) {
        main[m] += zn[m];
        zn[m] *= st;
      }
    }
    const double x_panel =
        sh.x_lo + static_cast<double>(p) * sh.panel_w;
    for (int m = 0; m < M; ++m) {
      const double x = x_panel + off[m];
      const std::complex<double> s(0.5, sh.tau0 + x);
      const ZetaPoint tail = zeta_em_tail(s, sh.n_terms);
      const std::complex<double> zeta = main[m] + tail.value;
      const std::complex<double> prod =
          std::exp(finite_euler_log(*sh.primes, sh.tau0 + x));
      const std::complex<double> zp = zeta * prod;
      out.max_em_err = std::max(out.max_em_err, tail.err_bound);
      out.max_zp = std::max(out.max_zp, std::abs(zp));
      const double fk = euler_kernel(x * sh.logX);
      out.integral += std::complex<long double>(wgt[m] * fk * zp);
    }
  }
  return out;
}

}  // namespace

std::complex<double> euler_product_integrand(double t, double h, double X,
                                             const PrimePartition& part,
                                             double x) {
  const std::vector<uint64_t> ps = product_primes(part, X);
  const double tau = t + h + x;
  const ZetaPoint z = zeta_eval({0.5, tau}, 1e-9);
  const std::complex<double> prod = std::exp(finite_euler_log(ps, tau));
  return z.value * prod * euler_kernel(x * std::log(X));
}

EulerProductResult smoothed_euler_product(double t, double h, double X,
                                          const PrimePartition& part,
                                          int panels_per_unit,
                                          double window_cap, int n_threads) {
  if (X < 3.0) throw std::domain_error("smoothed_euler_product: X < 3");
  if (t < 100.0) throw std::domain_error("smoothed_euler_product: t < 100");
  if (panels_per_unit < 1 || window_cap <= 1.0)
    throw std::domain_error("smoothed_euler_product: bad quadrature knobs");

  const double logX = std::log(X);
  // kernel falls below 1e-12 at |w| = sqrt(2e12/pi); the window is capped
  // and the certified envelope tail goes into abs_err instead
  const double w_spec = std::sqrt(2e12 / M_PI);
  const double W = std::min(w_spec / logX, window_cap);

  ScanShared sh;
  sh.tau0 = t + h;
  sh.panel_w = 1.0 / static_cast<double>(panels_per_unit);
  sh.n_panels = static_cast<uint64_t>(std::ceil(2.0 * W / sh.panel_w));
  sh.x_lo = -0.5 * static_cast<double>(sh.n_panels) * sh.panel_w;
  sh.logX = logX;
  const double tau_max = std::abs(sh.tau0) + W + 1.0;
  sh.n_terms =
      static_cast<uint64_t>(std::max(20.0, std::ceil(2.0 * tau_max)));
  const std::vector<uint64_t> ps = product_primes(part, X);
  sh.primes = &ps;
  const GLRule& rule = gauss_legendre(32);
  sh.rule = &rule;

  // fixed chunk grid keeps the reduction order independent of thread count
  const uint64_t n_chunks = std::min<uint64_t>(64, sh.n_panels);
  std::vector<ChunkResult> results(n_chunks);
  std::atomic<uint64_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const uint64_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      const uint64_t p0 = sh.n_panels * c / n_chunks;
      const uint64_t p1 = sh.n_panels * (c + 1) / n_chunks;
      results[c] = scan_chunk(sh, p0, p1);
    }
  };
  const int workers =
      std::max(1, std::min<int>(n_threads, static_cast<int>(n_chunks)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::complex<long double> integral(0.0L, 0.0L);
  double max_em = 0.0, max_zp = 0.0;
  for (const ChunkResult& r : results) {
    integral += r.integral;
    max_em = std::max(max_em, r.max_em_err);
    max_zp = std::max(max_zp, r.max_zp);
  }

  EulerProductResult out;
  out.value = logX * std::complex<double>(
                         static_cast<double>(integral.real()),
                         static_cast<double>(integral.imag()));
  // kernel mass beyond the window is <= 4/(pi W logX); the integrand there
  // is estimated by the largest magnitude seen inside the window
  const double tail_mass = 4.0 / (M_PI * W * logX);
  out.abs_err = max_zp * tail_mass + max_em + 1e-12 * (1.0 + std::abs(out.value));
  out.window = W;
  out.nodes = sh.n_panels * static_cast<uint64_t>(rule.x.size());
  return out;
}

}  // namespace zx
