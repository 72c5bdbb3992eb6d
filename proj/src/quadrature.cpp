#include "zx/quadrature.hpp"

#include <map>
#include <mutex>
#include <stdexcept>

namespace zx {
namespace {

GLRule make_rule(int n) {
  GLRule r;
  r.x.resize(n);
  r.w.resize(n);
  const double pi = 3.14159265358979323846;
  int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  return r;
}

}  // namespace

const GLRule& gauss_legendre(int n) {
  if (n < 1 || n > 4096) throw std::invalid_argument("gauss_legendre order");
  static std::mutex mu;
  static std::map<int, GLRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_rule(n)).first;
  return it->second;
}

namespace {

double adapt_rec(const std::function<double(double)>& f, double a, double b,
                 double tol, const GLRule& lo, const GLRule& hi, int depth,
                 int max_depth) {
  double v1 = gl_integrate(f, a, b, lo);
  double v2 = gl_integrate(f, a, b, hi);
  if (std::fabs(v2 - v1) <= tol || depth >= max_depth) return v2;
  double m = 0.5 * (a + b);
  return adapt_rec(f, a, m, tol * 0.5, lo, hi, depth + 1, max_depth) +
         adapt_rec(f, m, b, tol * 0.5, lo, hi, depth + 1, max_depth);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double abs_tol, int order, int max_depth) {
  if (a == b) return 0.0;
  const GLRule& lo = gauss_legendre(order);
  const GLRule& hi = gauss_legendre(2 * order);
  return adapt_rec(f, a, b, abs_tol, lo, hi, 0, max_depth);
}

}  // namespace zx
