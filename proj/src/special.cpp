#include "zx/special.hpp"

#include <cmath>
#include <stdexcept>

namespace zx {
namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kHalfPi = kPi / 2.0;

// Series for x in (0, 4].
void sici_series(double x, double& si, double& ci) {
  double x2 = x * x;
  double a = x;  // (-1)^k x^{2k+1} / (2k+1)!
  double s = x;
  for (int k = 1; k < 40; ++k) {
    a *= -x2 / double((2 * k) * (2 * k + 1));
    double t = a / double(2 * k + 1);
    s += t;
    if (std::fabs(t) < 1e-18 * std::fabs(s)) break;
  }
  double b = 0.0, cin = 0.0;  // (-1)^{k+1} x^{2k} / (2k)!
  b = x2 / 2.0;
  cin = b / 2.0;
  for (int k = 2; k < 40; ++k) {
    b *= -x2 / double((2 * k - 1) * (2 * k));
    double t = b / double(2 * k);
    cin += t;
    if (std::fabs(t) < 1e-18 * std::fabs(cin)) break;
  }
  si = s;
  ci = kEulerGamma + std::log(x) - cin;
}

// Lentz continued fraction for E1(ix), x > 0; gives both integrals at once.
void sici_cf(double x, double& si, double& ci) {
  constexpr double kFpMin = 1e-290;
  std::complex<double> b(1.0, x), c(1.0 / kFpMin, 0.0);
  std::complex<double> d = 1.0 / b, h = d;
  for (int i = 2; i < 400; ++i) {
    double a = -double(i - 1) * double(i - 1);
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    std::complex<double> del = c * d;
    h *= del;
    if (std::fabs(del.real() - 1.0) + std::fabs(del.imag()) < 1e-16) break;
  }
  h *= std::complex<double>(std::cos(x), -std::sin(x));
  ci = -h.real();
  si = kHalfPi + h.imag();
}

}  // namespace

void sici(double x, double& si, double& ci) {
  if (!(x > 0.0)) throw std::domain_error("sici requires x > 0");
  if (x <= 4.0)
    sici_series(x, si, ci);
  else
    sici_cf(x, si, ci);
}

double si_int(double x) {
  if (x == 0.0) return 0.0;
  double si, ci;
  sici(std::fabs(x), si, ci);
  return x > 0 ? si : -si;
}

double sinc2_integral(double z) {
  double az = std::fabs(z);
  if (az < 1e-8) return z * (1.0 - kPi * kPi * z * z / 9.0);
  double v = (si_int(2.0 * kPi * az) -
              std::pow(std::sin(kPi * az), 2) / (kPi * az)) /
             kPi;
  return z > 0 ? v : -v;
}

double norm_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

double norm_pdf(double x) {
  return 0.39894228040143267794 * std::exp(-0.5 * x * x);
}

double norm_prob_interval(double lo, double hi, double mu, double sigma) {
  if (!(hi >= lo)) return 0.0;
  double a = (lo - mu) / (sigma * 1.41421356237309504880);
  double b = (hi - mu) / (sigma * 1.41421356237309504880);
  double p;
  if (a >= 0.0)
    p = 0.5 * (std::erfc(a) - std::erfc(b));
  else if (b <= 0.0)
    p = 0.5 * (std::erfc(-b) - std::erfc(-a));
  else
    p = 0.5 * (std::erf(b) - std::erf(a));
  return p < 0.0 ? 0.0 : p;
}

std::complex<double> lgamma_complex(std::complex<double> z) {
  if (z.real() <= 0.0) throw std::domain_error("lgamma_complex requires Re z > 0");
  static const double c[7] = {1.0 / 12, -1.0 / 360,      1.0 / 1260, -1.0 / 1680,
                              1.0 / 1188, -691.0 / 360360, 1.0 / 156};
  std::complex<double> shift(0.0, 0.0);
  while (std::abs(z) < 12.0) {
    shift += std::log(z);
    z += 1.0;
  }
  std::complex<double> res = (z - 0.5) * std::log(z) - z +
                             0.91893853320467274178032973640562;  // log sqrt(2 pi)
  std::complex<double> zp = z;
  std::complex<double> z2 = z * z;
  for (int i = 0; i < 7; ++i) {
    res += c[i] / zp;
    zp *= z2;
  }
  return res - shift;
}

}  // namespace zx
