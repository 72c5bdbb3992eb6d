#pragma once
#include <complex>
#include <cstdint>
#include <vector>

#include "zx/primes.hpp"

namespace zx {

enum class WalkConvention { shifted, from_two };

struct WalkSample {
  double t = 0.0;
  double h = 0.0;
  int k_lo = 0;
  int k_hi = 0;
  WalkConvention convention = WalkConvention::shifted;
  std::vector<double> values;  // values[i] = S_{k_lo + i}(t, h)
};

// Re sum of p^{-1/2-i(t+h)} + p^{-1-2i(t+h)}/2 over primes with block index
// in (k_lo, k] (shifted) or in [0, k] (from_two), reported for each k in
// [k_lo, k_hi]. Requires exact blocks up to k_hi.
WalkSample partial_sums(double t, double h, int k_lo, int k_hi,
                        const PrimePartition& part, WalkConvention conv);

// Single-prime term of the walk.
double walk_term(uint64_t p, double t, double h);

struct SupBound {
  double value = 0.0;      // discretized sup bound for |D|^2
  int64_t near_j = 0;      // half-width of the unit-weight grid range
  int64_t far_j = 0;       // grid cutoff past which the tail is dropped
  double dropped_rel = 0.0;  // bound on the omitted far tail, relative
};

// Grid bound for sup |D(1/2+it')|^2 near t: unit weight for
// |j| <= 16 e^{-k} log N, weight 1/(1+|j|^100) beyond, grid step
// 2 pi / (8 log N), N = coef.size().
SupBound sup_bound_discretized(const std::vector<std::complex<double>>& coef,
                               double t, int k);

struct MeanValueGap {
  double gap = 0.0;   // |(1/T) int_T^{2T} |D|^2 d tau  -  sum |a_n|^2|
  double diag = 0.0;  // sum |a_n|^2
  double rel = 0.0;
};

// Off-diagonal of the mean square of D(tau) = sum a_n n^{i tau} averaged
// over [T, 2T], in closed form.
MeanValueGap mean_value_gap(const std::vector<std::complex<double>>& coef,
                            double T);

struct EulerProductResult {
  std::complex<double> value;
  double abs_err = 0.0;  // window tail + zeta truncation + panel slack
  double window = 0.0;   // half-width in x actually integrated
  uint64_t nodes = 0;
};

// log X * int zeta(1/2+i(t+h+x)) prod_{p<=X} (1-p^{-1/2-i(t+h+x)})
//           * f(x log X) dx
// over a window where the kernel mass is certified, f as below. The zeta
// main sums across quadrature nodes share phase-increment tables, so the
// scan cost is panels * nodes_per_panel * N complex multiplies.
EulerProductResult smoothed_euler_product(double t, double h, double X,
                                          const PrimePartition& part,
                                          int panels_per_unit = 2,
                                          double window_cap = 2500.0,
                                          int n_threads = 1);

// Same integrand at a single offset x, via the generic zeta evaluator.
std::complex<double> euler_product_integrand(double t, double h, double X,
                                             const PrimePartition& part,
                                             double x);

// f(w) = (sin(w/2)/(w/2))^2 / (2 pi); hat f(u) = max(0, 1 - 2 pi |u|).
// Mass 1, Fourier support exactly [-1/(2 pi), 1/(2 pi)].
double euler_kernel(double w);
double euler_kernel_hat(double u);

}  // namespace zx
