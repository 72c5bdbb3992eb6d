#pragma once
#include <cmath>
#include <functional>
#include <vector>

namespace zx {

struct GLRule {
  std::vector<double> x;  // nodes on (-1, 1)
  std::vector<double> w;
};

// Cached Gauss-Legendre rule; thread-safe, nodes from Newton iteration.
const GLRule& gauss_legendre(int n);

template <class F>
double gl_integrate(F&& f, double a, double b, const GLRule& r) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * f(c + h * r.x[i]);
  return s * h;
}

template <class F>
double gl_integrate(F&& f, double a, double b, int n = 32) {
  return gl_integrate(std::forward<F>(f), a, b, gauss_legendre(n));
}

// Panel-bisecting adaptive integration: a panel is accepted when its order-n
// and order-2n values agree to tol scaled by the interval fraction.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double abs_tol, int order = 16,
                          int max_depth = 40);

}  // namespace zx
