#include "zx/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace zx {

double pairwise_sum(std::span<const double> v) {
  size_t n = v.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  size_t h = n / 2;
  return pairwise_sum(v.subspan(0, h)) + pairwise_sum(v.subspan(h));
}

EstimateCI mean_ci(std::span<const double> v) {
  EstimateCI e;
  e.n = v.size();
  if (e.n == 0) return e;
  double m = pairwise_sum(v) / double(e.n);
  std::vector<double> sq(v.size());
  for (size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - m) * (v[i] - m);
  double var = e.n > 1 ? pairwise_sum(sq) / double(e.n - 1) : 0.0;
  e.value = m;
  e.se = std::sqrt(var / double(e.n));
  e.lo = m - 1.959963984540054 * e.se;
  e.hi = m + 1.959963984540054 * e.se;
  return e;
}

EstimateCI binomial_ci(uint64_t successes, uint64_t trials) {
  if (trials == 0) throw std::invalid_argument("binomial_ci: zero trials");
  const double z = 1.959963984540054;
  double n = double(trials), p = double(successes) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (p + z2 / (2.0 * n)) / denom;
  double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  EstimateCI e;
  e.value = p;
  e.se = std::sqrt(p * (1.0 - p) / n);
  e.lo = std::max(0.0, center - half);
  e.hi = std::min(1.0, center + half);
  e.n = trials;
  return e;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_distance: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    double fa = double(i) / double(a.size());
    double fb = double(j) / double(b.size());
    d = std::max(d, std::fabs(fa - fb));
  }
  return d;
}

LinFit wls_fit(std::span<const double> x, std::span<const double> y,
               std::span<const double> w) {
  if (x.size() != y.size() || x.size() != w.size() || x.size() < 2)
    throw std::invalid_argument("wls_fit: bad sizes");
  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    swx += w[i] * x[i];
    swy += w[i] * y[i];
    swxx += w[i] * x[i] * x[i];
    swxy += w[i] * x[i] * y[i];
  }
  double det = sw * swxx - swx * swx;
  if (det <= 0) throw std::runtime_error("wls_fit: degenerate design");
  LinFit f;
  f.slope = (sw * swxy - swx * swy) / det;
  f.intercept = (swxx * swy - swx * swxy) / det;
  f.se_slope = std::sqrt(sw / det);
  f.se_intercept = std::sqrt(swxx / det);
  return f;
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile: empty");
  std::sort(v.begin(), v.end());
  double pos = q * double(v.size() - 1);
  size_t i = size_t(pos);
  if (i + 1 >= v.size()) return v.back();
  double frac = pos - double(i);
  return v[i] * (1.0 - frac) + v[i + 1] * frac;
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

double interquartile_range(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double pos25 = 0.25 * double(v.size() - 1);
  double pos75 = 0.75 * double(v.size() - 1);
  auto interp = [&](double pos) {
    size_t i = size_t(pos);
    if (i + 1 >= v.size()) return v.back();
    double frac = pos - double(i);
    return v[i] * (1.0 - frac) + v[i + 1] * frac;
  };
  return interp(pos75) - interp(pos25);
}

}  // namespace zx
