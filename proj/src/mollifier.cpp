#include "zx/mollifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "zx/quadrature.hpp"
#include "zx/special.hpp"

namespace zx {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kPi = 3.1415926535897932384626433832795;

std::complex<double> cis(double t) { return {std::cos(t), std::sin(t)}; }

// sin(z)/z with the small-argument series
double sinc(double z) {
  if (std::abs(z) < 1e-8) return 1.0 - z * z / 6.0;
  return std::sin(z) / z;
}

}  // namespace

double fejer_square(double x) {
  const double h = 0.5 * x;
  if (std::abs(h) < 1e-8) return 1.0 - x * x / 12.0;
  const double s = std::sin(h) / h;
  return s * s;
}

double approximate_identity(double x) { return fejer_square(x) / kTwoPi; }

double kernel_cdf(double v) { return 0.5 + sinc2_integral(v / kTwoPi); }

void ApproximationParams::validate() const {
  if (!(delta >= 3.0))
    throw std::domain_error("ApproximationParams: delta must be >= 3");
  if (!(A >= 3.0)) throw std::domain_error("ApproximationParams: A must be >= 3");
  if (nu < 1) throw std::domain_error("ApproximationParams: nu must be >= 1");
  if (grid_points < 2)
    throw std::domain_error("ApproximationParams: need at least two grid points");
  const double lo_req = -std::pow(delta, -A / 2.0) - 1.0;
  const double hi_req = 1.0 / delta + std::pow(delta, -A / 2.0) + 1.0;
  if (grid_lo > lo_req + 1e-12 || grid_hi < hi_req - 1e-12)
    throw std::domain_error("ApproximationParams: grid window too narrow");
}

ApproximationParams make_params(double delta, double A, int nu) {
  ApproximationParams p;
  p.delta = delta;
  p.A = A;
  p.nu = nu;
  p.grid_lo = -std::pow(delta, -A / 2.0) - 1.0;
  p.grid_hi = 1.0 / delta + std::pow(delta, -A / 2.0) + 1.0;
  p.validate();
  return p;
}

SmoothedIndicator build_smoothed_indicator(const ApproximationParams& params,
                                           IndicatorSign sign) {
  params.validate();
  SmoothedIndicator ind;
  ind.sign = sign;
  ind.params = params;
  const double da = std::pow(params.delta, -params.A);
  const double dh = std::pow(params.delta, -params.A / 2.0);
  if (sign == IndicatorSign::minus) {
    ind.c = dh - da;
    ind.d = 1.0 / params.delta - dh + da;
  } else {
    ind.c = -da;
    ind.d = 1.0 / params.delta + da;
  }
  if (!(ind.c < ind.d))
    throw std::domain_error(
        "build_smoothed_indicator: smoothing interval is empty at these "
        "parameters");

  ind.grid.resize(params.grid_points);
  ind.values.resize(params.grid_points);
  const double step =
      (params.grid_hi - params.grid_lo) / static_cast<double>(params.grid_points - 1);
  for (uint64_t i = 0; i < params.grid_points; ++i) {
    ind.grid[i] = params.grid_lo + step * static_cast<double>(i);
    ind.values[i] = indicator_value(ind, ind.grid[i]);
  }

  const double s2a = std::pow(params.delta, 2.0 * params.A);
  const uint64_t nf = 801;
  ind.fourier_xi.resize(nf);
  ind.fourier_values.resize(nf);
  for (uint64_t i = 0; i < nf; ++i) {
    const double xi = -s2a + 2.0 * s2a * static_cast<double>(i) / (nf - 1);
    ind.fourier_xi[i] = xi;
    ind.fourier_values[i] = fourier_g(ind, xi);
  }
  return ind;
}

double indicator_value(const SmoothedIndicator& ind, double x) {
  const double s = std::pow(ind.params.delta, 2.0 * ind.params.A);
  return kernel_cdf(s * (x - ind.c)) - kernel_cdf(s * (x - ind.d));
}

double indicator_value_quadrature(const SmoothedIndicator& ind, double x,
                                  double abs_tol) {
  // integral of the unit-mass kernel over u in [s(x-d), s(x-c)]
  const double s = std::pow(ind.params.delta, 2.0 * ind.params.A);
  const double lo = s * (x - ind.d);
  const double hi = s * (x - ind.c);
  const uint64_t n_panels =
      std::max<uint64_t>(8, static_cast<uint64_t>((hi - lo) / 1.5) + 1);
  double coarse = 0.0, fine = 0.0;
  const double w = (hi - lo) / static_cast<double>(n_panels);
  for (uint64_t p = 0; p < n_panels; ++p) {
    const double a = lo + w * static_cast<double>(p);
    const double b = (p + 1 == n_panels) ? hi : a + w;
    coarse += gl_integrate(approximate_identity, a, b, 16);
    fine += gl_integrate(approximate_identity, a, b, 32);
  }
  const double achieved = std::abs(fine - coarse);
  if (achieved > abs_tol)
    throw std::runtime_error(
        "indicator_value_quadrature: achieved tolerance " +
        std::to_string(achieved) + " above requested");
  return fine;
}

std::complex<double> fourier_g(const SmoothedIndicator& ind, double xi) {
  const double s2a = std::pow(ind.params.delta, 2.0 * ind.params.A);
  const double khat = 1.0 - kTwoPi * std::abs(xi) / s2a;
  if (khat <= 0.0) return {0.0, 0.0};
  const double len = ind.d - ind.c;
  const std::complex<double> interval =
      len * cis(-kPi * (ind.c + ind.d) * xi) * sinc(kPi * len * xi);
  return interval * khat;
}

std::complex<double> numeric_fourier(const std::function<double(double)>& f,
                                     double xi, double half_width,
                                     double panel_w) {
  if (!(half_width > 0.0) || !(panel_w > 0.0))
    throw std::domain_error("numeric_fourier: widths must be positive");
  const uint64_t n_panels =
      static_cast<uint64_t>(std::ceil(2.0 * half_width / panel_w));
  const GLRule& rule = gauss_legendre(16);
  std::complex<double> acc{0.0, 0.0};
  const double w = 2.0 * half_width / static_cast<double>(n_panels);
  for (uint64_t p = 0; p < n_panels; ++p) {
    const double a = -half_width + w * static_cast<double>(p);
    const double c = a + 0.5 * w, h = 0.5 * w;
    std::complex<double> panel{0.0, 0.0};
    for (size_t i = 0; i < rule.x.size(); ++i) {
      const double x = c + h * rule.x[i];
      panel += rule.w[i] * f(x) * cis(-kTwoPi * xi * x);
    }
    acc += panel * h;
  }
  return acc;
}

namespace {

// m-th derivative of the unit-mass kernel (1 - cos x)/(pi x^2), via the
// product rule on u = (1 - cos x)/pi, w = x^{-2}. Valid away from x = 0.
double kernel_derivative(int m, double x) {
  if (m == 0) return approximate_identity(x);
  if (std::abs(x) < 1e-3)
    throw std::domain_error("kernel_derivative: evaluation too close to 0");
  const double cx = std::cos(x), sx = std::sin(x);
  const double lax = std::log(std::abs(x));
  double total = 0.0;
  for (int j = 0; j <= m; ++j) {
    double uj;
    if (j == 0) {
      uj = (1.0 - cx) / kPi;
    } else {
      switch (j % 4) {  // -cos(x + j pi/2)/pi
        case 0: uj = -cx / kPi; break;
        case 1: uj = sx / kPi; break;
        case 2: uj = cx / kPi; break;
        default: uj = -sx / kPi; break;
      }
    }
    const int i = m - j;  // order of the x^{-2} derivative
    const double lt = std::lgamma(m + 1.0) - std::lgamma(j + 1.0) -
                      std::lgamma(i + 1.0) + std::lgamma(i + 2.0) -
                      (i + 2.0) * lax;
    double sign = (i % 2 == 0) ? 1.0 : -1.0;
    if (x < 0.0 && (i + 2) % 2 != 0) sign = -sign;
    total += sign * uj * std::exp(lt);
  }
  return total;
}

}  // namespace

TruncationResult truncate_to_polynomial(const SmoothedIndicator& ind, int nu,
                                        double window_lo, double window_hi) {
  if (nu < 0 || nu > 60)
    throw std::domain_error("truncate_to_polynomial: nu must lie in [0, 60]");
  if (!(window_lo < window_hi))
    throw std::domain_error("truncate_to_polynomial: empty window");

  TruncationResult tr;
  tr.nu = nu;
  tr.window_lo = window_lo;
  tr.window_hi = window_hi;

  const double delta = ind.params.delta;
  const double A = ind.params.A;
  const double s2a = std::pow(delta, 2.0 * A);
  const double edge = s2a / kTwoPi;  // hat G support boundary

  // moments int xi^l hat G(xi) d xi on a fixed panelization fine enough for
  // hat G's oscillation (period 1/(d - c)) and the monomial weight
  const uint64_t n_panels = std::max<uint64_t>(
      1024 + 32 * static_cast<uint64_t>(nu),
      static_cast<uint64_t>(4.0 * edge * (ind.d - ind.c)) + 1);
  const GLRule& rule = gauss_legendre(32);
  std::vector<std::complex<double>> moments(static_cast<size_t>(nu) + 1,
                                            {0.0, 0.0});
  const double w = 2.0 * edge / static_cast<double>(n_panels);
  for (uint64_t p = 0; p < n_panels; ++p) {
    const double a = -edge + w * static_cast<double>(p);
    const double c = a + 0.5 * w, h = 0.5 * w;
    for (size_t i = 0; i < rule.x.size(); ++i) {
      const double xi = c + h * rule.x[i];
      const std::complex<double> g = fourier_g(ind, xi) * (rule.w[i] * h);
      double pw = 1.0;
      for (int l = 0; l <= nu; ++l) {
        moments[static_cast<size_t>(l)] += g * pw;
        pw *= xi;
      }
    }
  }

  tr.coefficients.resize(static_cast<size_t>(nu) + 1);
  tr.coef_bound_log.resize(static_cast<size_t>(nu) + 1);
  for (int l = 0; l <= nu; ++l) {
    const std::complex<double> m = moments[static_cast<size_t>(l)];
    double re;  // Re(i^l m)
    switch (l % 4) {
      case 0: re = m.real(); break;
      case 1: re = -m.imag(); break;
      case 2: re = -m.real(); break;
      default: re = m.imag(); break;
    }
    const double scale =
        std::exp(l * std::log(kTwoPi) - std::lgamma(l + 1.0));
    tr.coefficients[static_cast<size_t>(l)] = re * scale;
    tr.coef_bound_log[static_cast<size_t>(l)] =
        std::log(2.0) + 2.0 * A * (l + 1.0) * std::log(delta) +
        l * std::log(kTwoPi) - std::lgamma(l + 1.0);
  }

  // second route: Taylor coefficients of G at 0 from kernel derivatives
  double max_rel = 0.0;
  for (int l = 0; l <= nu; ++l) {
    double dc;
    if (l == 0) {
      dc = indicator_value(ind, 0.0);
    } else {
      const double diff = kernel_derivative(l - 1, -s2a * ind.c) -
                          kernel_derivative(l - 1, -s2a * ind.d);
      dc = diff * std::exp(l * 2.0 * A * std::log(delta) -
                           std::lgamma(l + 1.0));
    }
    const double ql = tr.coefficients[static_cast<size_t>(l)];
    const double tiny =
        1e-12 * std::exp(std::min(700.0, tr.coef_bound_log[static_cast<size_t>(l)]));
    const double rel = std::abs(ql - dc) / (std::abs(ql) + std::abs(dc) + tiny);
    max_rel = std::max(max_rel, rel);
  }
  tr.deriv_route_rel = max_rel;

  const uint64_t n_scan = 2001;
  double gap = 0.0;
  for (uint64_t i = 0; i < n_scan; ++i) {
    const double x = window_lo + (window_hi - window_lo) *
                                     static_cast<double>(i) / (n_scan - 1);
    gap = std::max(gap, std::abs(truncation_poly_eval(tr, x) -
                                 indicator_value(ind, x)));
  }
  tr.sup_gap = gap;
  tr.window_flag = gap > 1.0;
  return tr;
}

double truncation_poly_eval(const TruncationResult& tr, double x) {
  double acc = 0.0;
  for (size_t l = tr.coefficients.size(); l-- > 0;)
    acc = acc * x + tr.coefficients[l];
  return acc;
}

double crude_truncation_bound(double delta, double A, double nu,
                              double x_window) {
  if (!(x_window > 0.0))
    throw std::domain_error("crude_truncation_bound: window must be positive");
  return nu * std::log(10.0) - std::lgamma(nu + 1.0) +
         9.0 * A * nu * std::log(delta) + nu * std::log(x_window);
}

SandwichCertificate certify_sandwich(const ApproximationParams& params,
                                     const std::vector<int>& nus) {
  params.validate();
  SandwichCertificate cert;
  cert.delta = params.delta;
  cert.A = params.A;
  const double s2a = std::pow(params.delta, 2.0 * params.A);
  const double inv_delta = 1.0 / params.delta;
  const double dh = std::pow(params.delta, -params.A / 2.0);

  const SmoothedIndicator gm =
      build_smoothed_indicator(params, IndicatorSign::minus);
  const SmoothedIndicator gp =
      build_smoothed_indicator(params, IndicatorSign::plus);

  // (1) transform mass just outside the stated support window, against the
  // numeric L1 mass of hat G
  const double xi_out = 1.05 * s2a;
  const double period = 1.0 / xi_out;
  auto leak = [&](const SmoothedIndicator& ind) {
    const auto f = [&](double x) { return indicator_value(ind, x); };
    const double a = std::abs(numeric_fourier(f, xi_out, 10.0, period / 3.0));
    const double b = std::abs(numeric_fourier(f, -xi_out, 10.0, period / 3.0));
    return std::max(a, b);
  };
  auto l1_mass = [&](const SmoothedIndicator& ind) {
    const double edge = s2a / kTwoPi;
    const uint64_t n_panels =
        static_cast<uint64_t>(4.0 * edge * (ind.d - ind.c)) + 64;
    const GLRule& rule = gauss_legendre(16);
    const double w = 2.0 * edge / static_cast<double>(n_panels);
    double acc = 0.0;
    for (uint64_t p = 0; p < n_panels; ++p) {
      const double lo = -edge + w * static_cast<double>(p);
      const double c = lo + 0.5 * w, h = 0.5 * w;
      for (size_t i = 0; i < rule.x.size(); ++i)
        acc += rule.w[i] * h * std::abs(fourier_g(ind, c + h * rule.x[i]));
    }
    return acc;
  };
  cert.fourier_leak_minus = leak(gm);
  cert.fourier_leak_plus = leak(gp);
  cert.fourier_l1_minus = l1_mass(gm);
  cert.fourier_l1_plus = l1_mass(gp);
  cert.item1 = cert.fourier_leak_minus <= 1e-8 * cert.fourier_l1_minus &&
               cert.fourier_leak_plus <= 1e-8 * cert.fourier_l1_plus;

  // (2) ordering on the shared grid
  double viol = 0.0;
  for (size_t i = 0; i < gm.grid.size(); ++i) {
    viol = std::max(viol, -gm.values[i]);
    viol = std::max(viol, gm.values[i] - gp.values[i]);
    viol = std::max(viol, gp.values[i] - 1.0);
  }
  cert.order_violation = std::max(viol, 0.0);
  cert.item2 = cert.order_violation <= 1e-8;

  // (3) concentration of G+ on [0, 1/delta]
  const uint64_t n_scan = 20001;
  double min_gp = 1.0;
  for (uint64_t i = 0; i < n_scan; ++i) {
    const double x = inv_delta * static_cast<double>(i) / (n_scan - 1);
    min_gp = std::min(min_gp, indicator_value(gp, x));
  }
  cert.eps_plus = (min_gp > 0.0) ? 1.0 / min_gp - 1.0
                                 : std::numeric_limits<double>::infinity();
  cert.item3 = cert.eps_plus <= 0.1;

  // (4) G- leakage outside [0, 1/delta] and deficit on the inner interval
  double leak_minus = 0.0;
  for (uint64_t i = 0; i < n_scan; ++i) {
    const double t = static_cast<double>(i) / (n_scan - 1);
    leak_minus = std::max(
        leak_minus, indicator_value(gm, params.grid_lo - t * params.grid_lo));
    leak_minus = std::max(
        leak_minus,
        indicator_value(gm, inv_delta + t * (params.grid_hi - inv_delta)));
  }
  cert.eps_minus = leak_minus;
  // the inner interval [dh, 1/delta - dh] is empty for small delta^{A/2}
  double min_inner = 1.0;
  if (2.0 * dh <= inv_delta) {
    for (uint64_t i = 0; i < n_scan; ++i) {
      const double x =
          dh + (inv_delta - 2.0 * dh) * static_cast<double>(i) / (n_scan - 1);
      min_inner = std::min(min_inner, indicator_value(gm, x));
    }
  }
  cert.eps_inner = 1.0 - min_inner;
  cert.item4 = cert.eps_minus <= 0.1 && cert.eps_inner <= 0.1;

  // (5) L1 bound on the transform
  cert.l1_margin_minus = 2.0 * s2a - cert.fourier_l1_minus;
  cert.l1_margin_plus = 2.0 * s2a - cert.fourier_l1_plus;
  cert.item5 = cert.l1_margin_minus >= 0.0 && cert.l1_margin_plus >= 0.0;

  double margin = std::numeric_limits<double>::infinity();
  for (int nu : nus) {
    const TruncationResult tm = truncate_to_polynomial(gm, nu, -0.5, 0.5);
    const TruncationResult tp = truncate_to_polynomial(gp, nu, -0.5, 0.5);
    cert.nus.push_back(nu);
    cert.gaps_minus.push_back(tm.sup_gap);
    cert.gaps_plus.push_back(tp.sup_gap);
    for (const TruncationResult* tr : {&tm, &tp}) {
      for (size_t l = 0; l < tr->coefficients.size(); ++l) {
        const double cl = std::abs(tr->coefficients[l]);
        if (cl == 0.0) continue;
        margin = std::min(margin, tr->coef_bound_log[l] - std::log(cl));
      }
    }
  }
  cert.coef_margin_min = margin;
  return cert;
}

}  // namespace zx
