#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "testutil.hpp"
#include "zx/zeta.hpp"

using namespace zx;
using cplx = std::complex<double>;

TEST_SUITE_BEGIN("zeta");

TEST_CASE("real-axis values are frozen and match pi^2/6") {
  ZetaPoint z2 = zeta_eval(cplx(2.0, 0.0), 1e-12);
  CHECK(z2.value.real() == zxt::frozen(1.6449340668482266));
  CHECK(std::abs(z2.value.real() - M_PI * M_PI / 6.0) <= z2.err_bound + 1e-15);
  CHECK(std::abs(z2.value.imag()) < 1e-14);

  ZetaPoint zh = zeta_eval(cplx(0.5, 0.0), 1e-12);
  CHECK(zh.value.real() == zxt::frozen(-1.4603545088095871));
}

TEST_CASE("fixed truncations agree within their stated bounds") {
  cplx s(0.5, 30.0);
  ZetaPoint a = zeta_eval_fixed(s, 2000, 8);
  ZetaPoint b = zeta_eval_fixed(s, 2000, 12);
  CHECK(std::abs(a.value - b.value) <= a.err_bound + b.err_bound);

  // raising the order at fixed N cannot loosen the bound
  std::vector<uint64_t> ns;
  for (uint64_t n = 200; n <= 2000; n += 95) ns.push_back(n);
  for (uint64_t n : ns) {
    ZetaPoint lo = zeta_eval_fixed(s, n, 8);
    ZetaPoint hi = zeta_eval_fixed(s, n, 12);
    CHECK(hi.err_bound <= lo.err_bound * (1.0 + 1e-12));
  }

  CHECK_THROWS(zeta_eval_fixed(s, 500, 7));
}

TEST_CASE("conjugate symmetry on the critical line") {
  ZetaPoint up = zeta_eval(cplx(0.5, 30.0), 1e-11);
  ZetaPoint dn = zeta_eval(cplx(0.5, -30.0), 1e-11);
  CHECK(std::abs(dn.value - std::conj(up.value)) <=
        2.0 * (up.err_bound + dn.err_bound) + 1e-14);
}

TEST_CASE("explicit tail matches the packaged fixed evaluation") {
  cplx s(0.5, 100.0);
  uint64_t N = 500;
  cplx main_sum = 0.0;
  for (uint64_t n = 1; n < N; ++n)
    main_sum += std::pow(cplx(double(n), 0.0), -s);
  ZetaPoint tail = zeta_em_tail(s, N);
  ZetaPoint whole = zeta_eval_fixed(s, N, 12);
  CHECK(std::abs(main_sum + tail.value - whole.value) <= 1e-12);
  CHECK(tail.err_bound > 0.0);
}

TEST_CASE("functional equation holds along the critical line") {
  // |zeta(1/2+it)| = |chi| |zeta(1/2-it)| with |chi| = 1 on the line
  for (int j = 0; j < 100; ++j) {
    double t = 10.0 * std::pow(1e4 / 10.0, j / 99.0);
    cplx s(0.5, t);
    ZetaPoint z = zeta_eval(s, 1e-9);
    ZetaPoint z1 = zeta_eval(cplx(0.5, -t), 1e-9);
    cplx chi = zeta_chi(s);
    double lhs = std::abs(z.value);
    double rhs = std::abs(chi * z1.value);
    CHECK(std::abs(lhs - rhs) <=
          z.err_bound + z1.err_bound + 1e-8 * (1.0 + lhs));
  }
}

TEST_CASE("chi has unit modulus on the critical line") {
  CHECK(std::abs(zeta_chi(cplx(0.5, 50.0))) ==
        zxt::frozen(0.99999999999997147));
  for (double t : {15.0, 137.0, 4000.0, 77777.0})
    CHECK(std::abs(std::abs(zeta_chi(cplx(0.5, t))) - 1.0) < 1e-10);
}

TEST_CASE("local maximum scan is frozen and dominates its own grid") {
  double step = 2.0 * M_PI / (8.0 * std::log(100.0));
  ZetaMax zm = max_log_abs_zeta(100.0, 0.5, step, 20);
  CHECK(zm.h_star == zxt::frozen(0.050647800240757462));
  CHECK(zm.max_log_abs == zxt::frozen(0.99263182244293691));
  CHECK(std::abs(zm.h_star) <= 0.5);
  // every coarse node the scan visited lies at or below the refined value
  for (int j = 0;; ++j) {
    double h = std::min(-0.5 + step * j, 0.5);
    ZetaPoint z = zeta_eval(cplx(0.5, 100.0 + h), 1e-10);
    CHECK(std::log(std::abs(z.value)) <= zm.max_log_abs + 1e-9);
    if (h >= 0.5) break;
  }
  // an independent lattice converges to the same peak
  ZetaMax fine = max_log_abs_zeta(100.0, 0.5, 0.1, 8);
  CHECK(std::abs(fine.max_log_abs - zm.max_log_abs) < 1e-3);
}

TEST_CASE("halving the coarse step barely moves the refined maximum") {
  ZetaMax a = max_log_abs_zeta(1e5, 0.2, 0.05, 20);
  ZetaMax b = max_log_abs_zeta(1e5, 0.2, 0.025, 20);
  CHECK(std::abs(a.max_log_abs - b.max_log_abs) < 1e-3);
}

TEST_CASE("degenerate window reduces to a point evaluation") {
  ZetaMax zm = max_log_abs_zeta(1000.0, 1e-9, 1e-9, 4);
  ZetaPoint z = zeta_eval(cplx(0.5, 1000.0), 1e-12);
  CHECK(std::abs(zm.max_log_abs - std::log(std::abs(z.value))) < 1e-6);
}

TEST_CASE("scan and evaluation preconditions") {
  CHECK_THROWS_AS(max_log_abs_zeta(10.0, 0.5, 0.1, 4), std::domain_error);
  CHECK_THROWS_AS(max_log_abs_zeta(100.0, 2.5, 0.1, 4), std::domain_error);
  CHECK_THROWS_AS(max_log_abs_zeta(100.0, 0.5, 7.0, 4), std::domain_error);
  CHECK_THROWS_AS(max_log_abs_zeta(1e8, 1.0, 0.1, 4), std::domain_error);

  CHECK_THROWS_AS(zeta_eval(cplx(0.5, 10.0), 1e-12 / 100.0), std::domain_error);
  CHECK_THROWS_AS(zeta_eval(cplx(0.3, 10.0), 1e-10), std::domain_error);
  CHECK_THROWS_AS(zeta_eval(cplx(3.5, 0.0), 1e-10), std::domain_error);
  CHECK_THROWS_AS(zeta_eval(cplx(0.5, 2e8), 1e-10), std::domain_error);
}

TEST_SUITE_END();
