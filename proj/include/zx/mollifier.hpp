#pragma once
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace zx {

// Fejer-square kernel (sin(x/2)/(x/2))^2; peak value 1, total mass 2pi.
double fejer_square(double x);

// fejer_square normalized to unit mass.
double approximate_identity(double x);

// CDF of the normalized kernel: int_{-inf}^v approximate_identity.
double kernel_cdf(double v);

struct ApproximationParams {
  double delta = 3.0;
  double A = 3.0;
  int nu = 8;
  double grid_lo = 0.0;
  double grid_hi = 0.0;
  uint64_t grid_points = 4001;

  void validate() const;
};

// Grid defaults to [-delta^{-A/2} - 1, delta^{-1} + delta^{-A/2} + 1].
ApproximationParams make_params(double delta, double A, int nu = 8);

enum class IndicatorSign { plus, minus };

struct SmoothedIndicator {
  IndicatorSign sign = IndicatorSign::plus;
  ApproximationParams params;
  double c = 0.0;  // indicator interval smoothed at scale delta^{-2A}
  double d = 0.0;
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<double> fourier_xi;  // covers [-delta^{2A}, delta^{2A}]
  std::vector<std::complex<double>> fourier_values;
};

SmoothedIndicator build_smoothed_indicator(const ApproximationParams& params,
                                           IndicatorSign sign);

// Closed form via the kernel CDF; absolute error well below 1e-10.
double indicator_value(const SmoothedIndicator& ind, double x);

// Direct convolution quadrature; throws with the achieved tolerance when the
// doubling check cannot certify abs_tol.
double indicator_value_quadrature(const SmoothedIndicator& ind, double x,
                                  double abs_tol = 1e-10);

// hat G(xi) under the cycle convention (e^{-2 pi i x xi}); exactly zero for
// |xi| > delta^{2A}/(2 pi).
std::complex<double> fourier_g(const SmoothedIndicator& ind, double xi);

// int_{-half_width}^{half_width} f(x) e^{-2 pi i xi x} dx on panels of
// panel_w (must resolve both f's and the phase's oscillation).
std::complex<double> numeric_fourier(const std::function<double(double)>& f,
                                     double xi, double half_width,
                                     double panel_w);

struct TruncationResult {
  int nu = 0;
  std::vector<double> coefficients;  // c_0..c_nu
  double window_lo = 0.0;
  double window_hi = 0.0;
  double sup_gap = 0.0;  // max |D(x) - G(x)| over the window
  bool window_flag = false;  // gap exceeded 1
  std::vector<double> coef_bound_log;  // log(2 delta^{2A(l+1)} (2pi)^l / l!)
  double deriv_route_rel = 0.0;  // max disagreement of the two moment routes
};

// D(x) = sum_{l<=nu} (2 pi i x)^l / l! * int xi^l hat G(xi) d xi.
TruncationResult truncate_to_polynomial(const SmoothedIndicator& ind, int nu,
                                        double window_lo, double window_hi);

double truncation_poly_eval(const TruncationResult& tr, double x);

// log of (10^nu / nu!) * delta^{9 A nu} * window^nu; the a priori growth
// scale a direct term-by-term expansion would demand, evaluated symbolically.
double crude_truncation_bound(double delta, double A, double nu,
                              double x_window);

struct SandwichCertificate {
  double delta = 0.0;
  double A = 0.0;
  // (1) fourier mass outside [-delta^{2A}, delta^{2A}], numeric transform
  double fourier_leak_minus = 0.0;
  double fourier_leak_plus = 0.0;
  double fourier_l1_minus = 0.0;  // int |hat G|
  double fourier_l1_plus = 0.0;
  bool item1 = false;
  // (2) 0 <= G- <= G+ <= 1 on the grid
  double order_violation = 0.0;
  bool item2 = false;
  // (3) G+ >= 1/(1+eps) on [0, 1/delta]
  double eps_plus = 0.0;
  bool item3 = false;
  // (4) G- <= 1(x in [0, 1/delta]) + eps, and the inner-interval deficit
  double eps_minus = 0.0;
  double eps_inner = 0.0;  // max of 1 - G- on [d^{-A/2}, 1/d - d^{-A/2}]
  bool item4 = false;
  // (5) int |hat G| <= 2 delta^{2A}
  double l1_margin_minus = 0.0;
  double l1_margin_plus = 0.0;
  bool item5 = false;
  // truncation gaps on |x| <= 0.5 per requested degree
  std::vector<int> nus;
  std::vector<double> gaps_minus;
  std::vector<double> gaps_plus;
  double coef_margin_min = 0.0;  // min over l of bound_log - log|c_l|
};

SandwichCertificate certify_sandwich(const ApproximationParams& params,
                                     const std::vector<int>& nus);

}  // namespace zx
