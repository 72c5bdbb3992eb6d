#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "testutil.hpp"
#include "zx/mollifier.hpp"

using namespace zx;

TEST_SUITE_BEGIN("mollifier");

TEST_CASE("kernel and its cdf behave like a unit-mass bump") {
  CHECK(fejer_square(0.0) == 1.0);
  CHECK(fejer_square(1.7) == fejer_square(-1.7));
  const double hp = 0.5 * M_PI;
  const double sp = std::sin(hp) / hp;
  CHECK(fejer_square(M_PI) == sp * sp);
  CHECK(fejer_square(2.0 * M_PI) <= 1e-30);
  CHECK(approximate_identity(0.9) ==
        fejer_square(0.9) / 6.283185307179586476925286766559);

  CHECK(kernel_cdf(0.0) == 0.5);
  CHECK(kernel_cdf(1e6) <= 1.0);
  CHECK(kernel_cdf(1e6) > 0.999);
  CHECK(kernel_cdf(-1e6) < 0.001);
  double prev = -1.0;
  for (double v = -30.0; v <= 30.0; v += 0.37) {
    double c = kernel_cdf(v);
    CHECK(c >= prev);
    CHECK(kernel_cdf(v) + kernel_cdf(-v) == doctest::Approx(1.0).epsilon(1e-14));
    prev = c;
  }
  // cdf' = density
  for (double v : {0.3, 1.0, -2.0, 5.0}) {
    const double h = 1e-5;
    double fd = (kernel_cdf(v + h) - kernel_cdf(v - h)) / (2.0 * h);
    CHECK(std::abs(fd - approximate_identity(v)) <= 1e-6);
  }
}

TEST_CASE("parameter defaults and their validation") {
  ApproximationParams p = make_params(3.0, 3.0, 8);
  CHECK(p.grid_lo == -std::pow(3.0, -3.0 / 2.0) - 1.0);
  CHECK(p.grid_hi == 1.0 / 3.0 + std::pow(3.0, -3.0 / 2.0) + 1.0);
  CHECK(p.grid_points == 4001);
  CHECK(p.nu == 8);

  CHECK_THROWS_AS(make_params(2.9, 3.0, 8), std::domain_error);
  CHECK_THROWS_AS(make_params(3.0, 2.0, 8), std::domain_error);
  CHECK_THROWS_AS(make_params(3.0, 3.0, 0), std::domain_error);
  ApproximationParams bad = make_params(3.0, 3.0, 8);
  bad.grid_points = 1;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  ApproximationParams narrow = make_params(3.0, 3.0, 8);
  narrow.grid_hi = 1.0;  // window must reach past 1/delta + delta^{-A/2}
  CHECK_THROWS_AS(narrow.validate(), std::domain_error);
}

TEST_CASE("smoothed indicators pin their interval and sampled arrays") {
  ApproximationParams p = make_params(3.0, 3.0, 32);
  SmoothedIndicator gm = build_smoothed_indicator(p, IndicatorSign::minus);
  SmoothedIndicator gp = build_smoothed_indicator(p, IndicatorSign::plus);

  const double da = std::pow(3.0, -3.0);
  const double dh = std::pow(3.0, -3.0 / 2.0);
  CHECK(gm.c == dh - da);
  CHECK(gm.d == 1.0 / 3.0 - dh + da);
  CHECK(gp.c == -da);
  CHECK(gp.d == 1.0 / 3.0 + da);
  CHECK(gm.c < gm.d);

  REQUIRE(gm.grid.size() == 4001);
  CHECK(gm.grid.front() == p.grid_lo);
  for (size_t i : {size_t(0), size_t(1000), size_t(4000)})
    CHECK(gm.values[i] == indicator_value(gm, gm.grid[i]));

  REQUIRE(gm.fourier_xi.size() == 801);
  const double s2a = std::pow(3.0, 2.0 * 3.0);
  CHECK(gm.fourier_xi.front() == -s2a);
  CHECK(gm.fourier_xi.back() == s2a);
  for (size_t k : {size_t(0), size_t(400), size_t(613)})
    CHECK(gm.fourier_values[k] == fourier_g(gm, gm.fourier_xi[k]));

  CHECK(indicator_value(gp, 1.0 / 6.0) == zxt::frozen(0.99573433015304902));
  CHECK(indicator_value(gm, 1.0 / 6.0) == zxt::frozen(0.91346303282647634));
  CHECK(indicator_value(gp, 0.0) == zxt::frozen(0.986609077184742));

  for (double x : {-0.8, -0.1, 0.0, 0.1, 1.0 / 6.0, 0.3, 0.9}) {
    CHECK(indicator_value(gm, x) <= indicator_value(gp, x));
    CHECK(indicator_value(gm, x) >= -1e-12);
    CHECK(indicator_value(gp, x) <= 1.0 + 1e-12);
  }
}

TEST_CASE("quadrature route reproduces the closed form") {
  ApproximationParams p = make_params(3.0, 3.0, 8);
  SmoothedIndicator gm = build_smoothed_indicator(p, IndicatorSign::minus);
  SmoothedIndicator gp = build_smoothed_indicator(p, IndicatorSign::plus);
  for (double x : {0.0, 1.0 / 6.0, 0.3, -0.05}) {
    CHECK(std::abs(indicator_value_quadrature(gm, x) - indicator_value(gm, x)) <=
          1e-8);
    CHECK(std::abs(indicator_value_quadrature(gp, x) - indicator_value(gp, x)) <=
          1e-8);
  }
  // an impossible tolerance reports the achieved one
  CHECK_THROWS_AS(indicator_value_quadrature(gm, 1.0 / 6.0, 1e-30),
                  std::runtime_error);
}

TEST_CASE("transform is compactly supported and matches direct quadrature") {
  ApproximationParams p = make_params(3.0, 3.0, 8);
  SmoothedIndicator gp = build_smoothed_indicator(p, IndicatorSign::plus);
  const double edge = std::pow(3.0, 6.0) / 6.283185307179586476925286766559;

  CHECK(fourier_g(gp, edge * 1.01) == std::complex<double>(0.0, 0.0));
  CHECK(fourier_g(gp, -edge * 1.01) == std::complex<double>(0.0, 0.0));
  CHECK(fourier_g(gp, 5000.0) == std::complex<double>(0.0, 0.0));
  std::complex<double> at0 = fourier_g(gp, 0.0);
  CHECK(at0.real() == gp.d - gp.c);
  CHECK(at0.imag() == 0.0);
  // hermitian symmetry of a real function's transform
  std::complex<double> fwd = fourier_g(gp, 13.7);
  std::complex<double> bwd = fourier_g(gp, -13.7);
  CHECK(fwd.real() == bwd.real());
  CHECK(fwd.imag() == -bwd.imag());

  // rectangle transform sin(pi xi)/(pi xi)
  auto one = [](double) { return 1.0; };
  std::complex<double> rect = numeric_fourier(one, 0.75, 0.5, 0.05);
  CHECK(rect.real() ==
        doctest::Approx(std::sin(M_PI * 0.75) / (M_PI * 0.75)).epsilon(1e-12));
  CHECK(std::abs(rect.imag()) <= 1e-13);

  // the closed-form transform against brute-force integration; half-width 10
  // truncates kernel tails at the 1e-5 level
  auto g = [&gp](double x) { return indicator_value(gp, x); };
  std::complex<double> brute = numeric_fourier(g, 2.0, 10.0, 0.002);
  std::complex<double> closed = fourier_g(gp, 2.0);
  CHECK(std::abs(brute - closed) <= 1e-4);

  CHECK_THROWS_AS(numeric_fourier(one, 1.0, 0.0, 0.1), std::domain_error);
  CHECK_THROWS_AS(numeric_fourier(one, 1.0, 1.0, -0.5), std::domain_error);
}

TEST_CASE("narrow-window truncation converges in the degree") {
  ApproximationParams p = make_params(3.0, 3.0, 32);
  SmoothedIndicator gp = build_smoothed_indicator(p, IndicatorSign::plus);

  TruncationResult t20 = truncate_to_polynomial(gp, 20, -0.01, 0.01);
  TruncationResult t40 = truncate_to_polynomial(gp, 40, -0.01, 0.01);
  CHECK(t20.sup_gap == zxt::frozen(6.9943317060339183e-06));
  CHECK(t40.sup_gap < 1e-13);  // double-precision floor
  CHECK(t40.sup_gap > 0.0);
  CHECK(t40.sup_gap < t20.sup_gap);
  CHECK_FALSE(t20.window_flag);
  CHECK_FALSE(t40.window_flag);
  CHECK(t40.deriv_route_rel < 1e-10);
  CHECK(t20.deriv_route_rel < 1e-10);

  // constant term is the function value at 0
  CHECK(std::abs(t40.coefficients[0] - indicator_value(gp, 0.0)) <= 1e-8);

  REQUIRE(t40.coefficients.size() == 41);
  REQUIRE(t40.coef_bound_log.size() == 41);
  for (size_t l = 0; l < t40.coefficients.size(); ++l) {
    const double cl = std::abs(t40.coefficients[l]);
    if (cl > 0.0) CHECK(std::log(cl) <= t40.coef_bound_log[l]);
  }

  // evaluation on the scan lattice never exceeds the reported sup
  for (uint64_t i : {uint64_t(0), uint64_t(600), uint64_t(1140), uint64_t(2000)}) {
    const double x =
        t20.window_lo +
        (t20.window_hi - t20.window_lo) * static_cast<double>(i) / 2000.0;
    CHECK(std::abs(truncation_poly_eval(t20, x) - indicator_value(gp, x)) <=
          t20.sup_gap);
  }

  CHECK_THROWS_AS(truncate_to_polynomial(gp, 61, -0.01, 0.01),
                  std::domain_error);
  CHECK_THROWS_AS(truncate_to_polynomial(gp, -1, -0.01, 0.01),
                  std::domain_error);
  CHECK_THROWS_AS(truncate_to_polynomial(gp, 8, 0.2, 0.2), std::domain_error);
}

TEST_CASE("sandwich certificate is frozen end to end") {
  ApproximationParams p = make_params(3.0, 3.0, 32);
  SandwichCertificate cert = certify_sandwich(p, {4, 8, 16, 32});

  // transform leakage past the support window: cancellation remainders, so
  // pinned loosely; the certified comparison is against the L1 mass
  CHECK(cert.fourier_leak_minus ==
        doctest::Approx(2.7397442094536519e-12).epsilon(1e-2));
  CHECK(cert.fourier_leak_plus ==
        doctest::Approx(2.7954160197674335e-11).epsilon(1e-2));
  CHECK(cert.fourier_l1_minus == zxt::frozen(1.1553779954359291));
  CHECK(cert.fourier_l1_plus == zxt::frozen(2.329877197440549));
  CHECK(cert.item1);

  CHECK(cert.order_violation == 0.0);
  CHECK(cert.item2);

  CHECK(cert.eps_plus == zxt::frozen(0.013572673437658445));
  CHECK(cert.item3);

  CHECK(cert.eps_minus == zxt::frozen(0.00038996480119801724));
  CHECK(cert.eps_inner == 0.0);  // inner interval empty at delta = A = 3
  CHECK(cert.item4);

  CHECK(cert.l1_margin_minus == zxt::frozen(1456.8446220045641));
  CHECK(cert.l1_margin_plus == zxt::frozen(1455.6701228025595));
  CHECK(cert.item5);

  CHECK(cert.coef_margin_min == zxt::frozen(7.2983023023223632));

  REQUIRE(cert.nus == std::vector<int>{4, 8, 16, 32});
  REQUIRE(cert.gaps_minus.size() == 4);
  REQUIRE(cert.gaps_plus.size() == 4);
  CHECK(cert.gaps_minus[0] == zxt::frozen(16106.063116394043));
  CHECK(cert.gaps_minus[1] == zxt::frozen(189612136695.28943));
  CHECK(cert.gaps_minus[2] == zxt::frozen(1.3515791284413079e23));
  CHECK(cert.gaps_minus[3] == zxt::frozen(1.2476560184732168e42));
  CHECK(cert.gaps_plus[0] == zxt::frozen(280214.41809706535));
  CHECK(cert.gaps_plus[1] == zxt::frozen(2268664521788.5376));
  CHECK(cert.gaps_plus[2] == zxt::frozen(4.1186398899750691e23));
  CHECK(cert.gaps_plus[3] == zxt::frozen(3.6763517361532188e42));

  // the certificate's first truncation is reproducible standalone
  SmoothedIndicator gm = build_smoothed_indicator(p, IndicatorSign::minus);
  TruncationResult t4 = truncate_to_polynomial(gm, 4, -0.5, 0.5);
  CHECK(t4.sup_gap == cert.gaps_minus[0]);
  CHECK(t4.window_flag);  // gap far above 1 on the unit window
}

TEST_CASE("symbolic degree bound from the source construction") {
  const double v1 = crude_truncation_bound(3.0, 3.0, std::pow(3.0, 30.0), 1.0);
  const double v2 = crude_truncation_bound(4.0, 3.0, std::pow(4.0, 30.0), 1.0);
  const double v3 = crude_truncation_bound(3.0, 3.0, 10.0, std::pow(3.0, 18.0));
  CHECK(v1 == zxt::frozen(1389400094528.0));
  CHECK(v2 == zxt::frozen(-9.8724436744415642e17));
  CHECK(v3 == zxt::frozen(502.29696825751432));

  const double nu = 10.0, A = 3.0, delta = 3.0, xw = std::pow(3.0, 18.0);
  CHECK(v3 == nu * std::log(10.0) - std::lgamma(nu + 1.0) +
                  9.0 * A * nu * std::log(delta) + nu * std::log(xw));

  // log-bound falls once the factorial takes over
  CHECK(crude_truncation_bound(2.0, 1.0, 4e4, 1.0) <
        crude_truncation_bound(2.0, 1.0, 3e4, 1.0));

  CHECK_THROWS_AS(crude_truncation_bound(3.0, 3.0, 8.0, 0.0),
                  std::domain_error);
  CHECK_THROWS_AS(crude_truncation_bound(3.0, 3.0, 8.0, -1.0),
                  std::domain_error);
}

TEST_SUITE_END();
