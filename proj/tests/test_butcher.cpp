#include <doctest.h>

#include <cmath>

#include "wildac/butcher.hpp"

using namespace wac;

namespace {

// n-th Taylor coefficient of (1 - 2 s z)^(-1/2), s = +-1
Rational closed_coeff(int n, int s) {
  Rational c = 1;
  for (int k = 1; k <= n; ++k) c *= Rational(2 * k - 1, k) * s;
  return c;
}

}  // namespace

TEST_CASE("taylor coefficients") {
  auto h = minus_cube();
  CHECK(taylor_coefficient(h, 1, 0) == 1);
  CHECK(taylor_coefficient(h, 1, 1) == -1);
  CHECK(taylor_coefficient(h, 1, 2) == Rational(3, 2));
  for (int n = 0; n <= 8; ++n) {
    CHECK(taylor_coefficient(h, 1, n) == closed_coeff(n, -1));
    CHECK(taylor_coefficient(plus_cube(), 1, n) == closed_coeff(n, 1));
  }
}

TEST_CASE("class sums agree with tree enumeration") {
  RCubic g{{Rational(1, 2), -1, 3, Rational(-2, 5)}};
  Rational y0(3, 7);
  auto a = butcher_class_sums(g, y0, 10);
  for (int n = 0; n <= 10; ++n) CHECK(a[n] == taylor_coefficient(g, y0, n));
  auto terms = butcher_terms(g, y0, 6);
  Rational s4 = 0;
  for (const auto& t : terms) {
    CHECK(t.power == t.tree.size());
    CHECK(t.coefficient * Rational(t.factorial * t.symmetry) == t.differential);
    if (t.power == 4) s4 += t.coefficient;
  }
  CHECK(s4 == a[4]);
}

TEST_CASE("partial sums") {
  auto h = minus_cube();
  CHECK(butcher_partial_sum(h, 1, 0.0, 7).value == 1.0);
  auto r = butcher_partial_sum(h, 1, 0.1, 20);
  CHECK(std::abs(r.value - std::pow(1.2, -0.5)) < 1e-9);
  CHECK_FALSE(r.outside_disc);
  CHECK(r.radius == doctest::Approx(0.5));
  auto p = butcher_partial_sum(plus_cube(), 1, 0.1, 20);
  CHECK(std::abs(p.value - std::pow(0.8, -0.5)) < 1e-9);
  CHECK(butcher_partial_sum(h, 1, 0.6, 5).outside_disc);
  for (int k = 0; k <= 9; ++k) {
    double z = 0.05 * k, target = std::pow(1 + 2 * z, -0.5);
    double prev = 1e300;
    for (int n = 4; n <= 16; n += 4) {
      auto s = butcher_partial_sum(h, 1, z, n);
      double err = std::abs(s.value - target);
      double next = std::abs(s.class_sums[n].convert_to<double>()) * std::pow(z, n);
      // alternating series: error bounded by the first omitted class
      CHECK(err <= next * 2 * z + 1e-15);
      CHECK(err <= prev + 1e-15);
      prev = err;
    }
  }
}

TEST_CASE("cubic flow closed form") {
  CHECK(cubic_flow_exact(-1, 0.1) == doctest::Approx(std::pow(1.2, -0.5)).epsilon(1e-15));
  CHECK(cubic_flow_exact(1, 0.1) == doctest::Approx(std::pow(0.8, -0.5)).epsilon(1e-15));
  CHECK(std::isnan(cubic_flow_exact(1, 0.5)));
  // y' = -y^3 checked by a central difference
  double z = 0.3, h = 1e-5;
  double d = (cubic_flow_exact(-1, z + h) - cubic_flow_exact(-1, z - h)) / (2 * h);
  CHECK(d == doctest::Approx(-std::pow(cubic_flow_exact(-1, z), 3)).epsilon(1e-8));
}

TEST_CASE("sigma limit") {
  CHECK(sigma_limit(0) == 1.0);
  CHECK(sigma_limit(std::sqrt(M_PI / 3)) == doctest::Approx(1 / std::sqrt(2.0)).epsilon(1e-12));
  double lam = 0.5, z = 3 * lam * lam / (2 * M_PI);
  CHECK(std::abs(sigma_limit(lam) - butcher_partial_sum(minus_cube(), 1, z, 25).value) < 1e-8);
}
