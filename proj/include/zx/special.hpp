#pragma once
#include <complex>

namespace zx {

// Sine and cosine integrals Si(x) = int_0^x sin t / t dt,
// Ci(x) = gamma + log x + int_0^x (cos t - 1)/t dt, for x > 0.
// Power series below the switch point, complex Lentz continued fraction above;
// absolute error ~1e-14 across the range.
void sici(double x, double& si, double& ci);
double si_int(double x);  // Si extended to all reals (odd)

// int_0^z (sin(pi w) / (pi w))^2 dw, the Fejer-kernel CDF building block (odd in z).
double sinc2_integral(double z);

double norm_cdf(double x);
double norm_pdf(double x);
// P(N(mu, sigma^2) in [lo, hi]), evaluated cancellation-safely via erfc halves.
double norm_prob_interval(double lo, double hi, double mu, double sigma);

// log Gamma(z) for Re z > 0 via Stirling with argument shifting.
std::complex<double> lgamma_complex(std::complex<double> z);

}  // namespace zx
