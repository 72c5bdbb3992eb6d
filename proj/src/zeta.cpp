#include "zx/zeta.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "zx/special.hpp"

namespace zx {

namespace {

// B_{2k}/(2k)! for k = 1..7.
constexpr double kBernCoef[7] = {
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
};

struct EmResult {
  std::complex<double> value;
  double err_bound;
};

// Correction terms past the main sum, order 2K. The remainder after K
// Bernoulli terms is bounded by the first omitted term times
// |s + 2K + 1| / (sigma + 2K + 1).
EmResult em_tail_terms(std::complex<double> s, uint64_t n_terms, int K) {
  const double sigma = s.real();
  const double t = s.imag();
  const double lnN = std::log(static_cast<double>(n_terms));
  const std::complex<double> Ns =
      std::exp(std::complex<double>(-sigma * lnN, -t * lnN));  // N^{-s}
  const double N = static_cast<double>(n_terms);

  std::complex<double> total = Ns * N / (s - 1.0);  // N^{1-s}/(s-1)
  total += 0.5 * Ns;

  // Bernoulli corrections: coef_k * (s)(s+1)...(s+2k-2) * N^{-s-2k+1}.
  std::complex<double> poch = s;            // rising factorial, 2k-1 factors
  std::complex<double> npow = Ns / N;       // N^{-s-2k+1} at k = 1
  for (int k = 1; k <= K; ++k) {
    total += kBernCoef[k - 1] * poch * npow;
    poch *= (s + static_cast<double>(2 * k - 1)) *
            (s + static_cast<double>(2 * k));
    npow /= N * N;
  }
  // poch now has 2K+1 factors, npow = N^{-s-2K-1}: exactly the next term.
  const double next = std::abs(kBernCoef[K] * poch * npow);
  const double err =
      next * std::abs(s + static_cast<double>(2 * K + 1)) /
      (sigma + static_cast<double>(2 * K + 1));
  return {total, err};
}

EmResult euler_maclaurin(std::complex<double> s, uint64_t n_terms, int K) {
  const double sigma = s.real();
  const double t = s.imag();
  std::complex<long double> acc(0.0L, 0.0L);
  for (uint64_t n = 1; n < n_terms; ++n) {
    const double ln = std::log(static_cast<double>(n));
    const double mag = std::exp(-sigma * ln);
    acc += std::complex<long double>(mag * std::cos(t * ln),
                                     -mag * std::sin(t * ln));
  }
  EmResult tail = em_tail_terms(s, n_terms, K);
  tail.value += std::complex<double>(static_cast<double>(acc.real()),
                                     static_cast<double>(acc.imag()));
  return tail;
}

void check_strip(std::complex<double> s) {
  if (s.real() < 0.4 || s.real() > 3.0)
    throw std::domain_error("zeta_eval: Re s outside [0.4, 3]");
  if (std::abs(s.imag()) > 1e8)
    throw std::domain_error("zeta_eval: |Im s| above 1e8");
}

}  // namespace

ZetaPoint zeta_em_tail(std::complex<double> s, uint64_t n_terms) {
  EmResult r = em_tail_terms(s, n_terms, 6);
  return {s, r.value, r.err_bound};
}

ZetaPoint zeta_eval_fixed(std::complex<double> s, uint64_t n_terms, int order) {
  check_strip(s);
  if (order < 2 || order > 12 || order % 2 != 0)
    throw std::domain_error("zeta_eval_fixed: order must be even, in [2, 12]");
  EmResult r = euler_maclaurin(s, n_terms, order / 2);
  return {s, r.value, r.err_bound};
}

ZetaPoint zeta_eval(std::complex<double> s, double target_abs_err) {
  check_strip(s);
  if (target_abs_err < 1e-10)
    throw std::domain_error("zeta_eval: target below the supported 1e-10");
  uint64_t n = static_cast<uint64_t>(
      std::max(20.0, std::ceil(2.0 * std::abs(s.imag()))));
  EmResult best{{0.0, 0.0}, std::numeric_limits<double>::infinity()};
  for (int round = 0; round < 9; ++round) {
    EmResult r = euler_maclaurin(s, n, 6);
    if (r.err_bound < best.err_bound) best = r;
    if (best.err_bound <= target_abs_err) return {s, best.value, best.err_bound};
    n *= 2;
    if (n > (1ull << 31)) break;
  }
  std::ostringstream msg;
  msg << "zeta_eval: target " << target_abs_err
      << " unreachable, achievable bound " << best.err_bound;
  throw std::domain_error(msg.str());
}

std::complex<double> zeta_chi(std::complex<double> s) {
  if (s.real() >= 1.0)
    throw std::domain_error("zeta_chi: requires Re s < 1");
  const std::complex<double> w = 0.5 * M_PI * s;
  std::complex<double> log_sin;
  const double tau = w.imag();
  if (tau > 30.0) {
    // sin w = e^{-iw}(1 - e^{2iw}) * i/2 growth branch
    log_sin = std::complex<double>(0.0, -1.0) * w -
              std::complex<double>(M_LN2, -0.5 * M_PI) +
              std::log(1.0 - std::exp(std::complex<double>(0.0, 2.0) * w));
  } else if (tau < -30.0) {
    log_sin = std::complex<double>(0.0, 1.0) * w -
              std::complex<double>(M_LN2, 0.5 * M_PI) +
              std::log(1.0 - std::exp(std::complex<double>(0.0, -2.0) * w));
  } else {
    log_sin = std::log(std::sin(w));
  }
  const std::complex<double> log_chi =
      s * M_LN2 + (s - 1.0) * std::log(M_PI) + log_sin +
      lgamma_complex(1.0 - s);
  return std::exp(log_chi);
}

ZetaMax max_log_abs_zeta(double t, double half_width, double coarse_step,
                         int refine_depth) {
  if (t <= 10.0) throw std::domain_error("max_log_abs_zeta: t must exceed 10");
  if (half_width <= 0.0 || half_width > 2.0)
    throw std::domain_error("max_log_abs_zeta: half_width must be in (0, 2]");
  if (coarse_step <= 0.0)
    throw std::domain_error("max_log_abs_zeta: step must be positive");
  if (coarse_step > 2.0 * M_PI / std::log(t))
    throw std::domain_error(
        "max_log_abs_zeta: coarse_step exceeds 2*pi/log(t)");

  auto g = [t](double h) {
    ZetaPoint z = zeta_eval({0.5, t + h}, 1e-9);
    return std::log(std::abs(z.value));
  };

  double best_h = -half_width;
  double best_g = g(best_h);
  const int64_t steps =
      static_cast<int64_t>(std::ceil(2.0 * half_width / coarse_step));
  for (int64_t j = 1; j <= steps; ++j) {
    const double h = std::min(-half_width + coarse_step * j, half_width);
    const double v = g(h);
    if (v > best_g) {
      best_g = v;
      best_h = h;
    }
  }

  double lo = std::max(-half_width, best_h - coarse_step);
  double hi = std::min(half_width, best_h + coarse_step);
  for (int d = 0; d < refine_depth; ++d) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (g(m1) < g(m2))
      lo = m1;
    else
      hi = m2;
  }
  const double h_star = 0.5 * (lo + hi);
  return {h_star, g(h_star)};
}

}  // namespace zx
