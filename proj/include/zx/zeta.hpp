#pragma once
#include <complex>

namespace zx {

struct ZetaPoint {
  std::complex<double> s;
  std::complex<double> value;
  double err_bound = 0.0;  // rigorous truncation bound
};

// Euler-Maclaurin evaluation of zeta(s) for Re s in [0.4, 3], |Im s| <= 1e8.
// Starts from N ~ max(20, 2|Im s|) terms with Bernoulli corrections up to
// order 12 and doubles N until err_bound <= target_abs_err.
ZetaPoint zeta_eval(std::complex<double> s, double target_abs_err = 1e-10);

// Same machinery at a fixed truncation (for the monotone-error property).
ZetaPoint zeta_eval_fixed(std::complex<double> s, uint64_t n_terms, int order);

// Correction terms past the main sum sum_{n<N} n^{-s}: N^{1-s}/(s-1) +
// N^{-s}/2 + Bernoulli terms, with the truncation bound in err_bound.
// Exposed for scanners that share phase-stepped main sums across nodes.
ZetaPoint zeta_em_tail(std::complex<double> s, uint64_t n_terms);

// chi(s) = 2^s pi^{s-1} sin(pi s/2) Gamma(1-s), via Stirling; zeta(s) = chi(s) zeta(1-s).
std::complex<double> zeta_chi(std::complex<double> s);

struct ZetaMax {
  double h_star = 0.0;
  double max_log_abs = 0.0;
};

// Coarse scan of log|zeta(1/2+i(t+h))| over |h| <= half_width followed by
// trisection refinement around the best grid point.
ZetaMax max_log_abs_zeta(double t, double half_width, double coarse_step,
                         int refine_depth = 20);

}  // namespace zx
