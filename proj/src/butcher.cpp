#include "wildac/butcher.hpp"

#include <cmath>

namespace wac {

std::vector<ButcherTerm> butcher_terms(const RCubic& h, const Rational& y0, int n, int cap) {
  std::vector<ButcherTerm> out;
  for (const auto& t : enumerate_subternary(n, cap)) {
    ButcherTerm b;
    b.tree = t;
    b.factorial = tree_factorial(t);
    b.symmetry = symmetry_factor(t);
    b.differential = elementary_differential(t, h, y0);
    b.coefficient = b.differential / Rational(b.factorial * b.symmetry);
    b.power = t.size();
    out.push_back(std::move(b));
  }
  return out;
}

// Grouping equal children turns the tree sum into
//   a_m = (1/m) sum_k h^(k)(y0)/k! [x^(m-1)] W(x)^k,  W = sum_{j>=1} a_j x^j.
std::vector<Rational> butcher_class_sums(const RCubic& h, const Rational& y0, int n) {
  std::vector<Rational> a(n + 1, Rational(0));
  a[0] = y0;
  Rational d[4];
  for (int k = 0; k < 4; ++k) d[k] = h.deriv(k, y0);
  d[2] /= 2;
  d[3] /= 6;
  for (int m = 1; m <= n; ++m) {
    // powers of W truncated at degree m-1, using a_1..a_{m-1}
    std::vector<Rational> w(m, Rational(0)), w2(m, Rational(0)), w3(m, Rational(0));
    for (int j = 1; j < m; ++j) w[j] = a[j];
    for (int i = 1; i < m; ++i)
      for (int j = 1; i + j < m; ++j) w2[i + j] += w[i] * w[j];
    for (int i = 1; i < m; ++i)
      for (int j = 2; i + j < m; ++j) w3[i + j] += w[i] * w2[j];
    Rational s = (m == 1) ? d[0] : Rational(0);
    s += d[1] * w[m - 1] + d[2] * w2[m - 1] + d[3] * w3[m - 1];
    a[m] = s / m;
  }
  return a;
}

ButcherSum butcher_partial_sum(const RCubic& h, const Rational& y0, double zeta, int n) {
  ButcherSum r;
  r.class_sums = butcher_class_sums(h, y0, n);
  // Horner in zeta, summing whole size classes
  double v = 0;
  for (int m = n; m >= 0; --m) v = v * zeta + r.class_sums[m].convert_to<double>();
  r.value = v;
  // pure cubic: y' = c y^3 gives y0 (1 - 2 c y0^2 zeta)^(-1/2)
  if (h.c[0] == 0 && h.c[1] == 0 && h.c[2] == 0 && h.c[3] != 0 && y0 != 0) {
    double c = h.c[3].convert_to<double>(), y = y0.convert_to<double>();
    r.radius = 1.0 / (2.0 * std::abs(c) * y * y);
    r.outside_disc = std::abs(zeta) >= r.radius;
  }
  return r;
}

Rational taylor_coefficient(const RCubic& h, const Rational& y0, int n, int cap) {
  Rational s = 0;
  for (const auto& t : enumerate_subternary(n, cap)) {
    if (t.size() != n) continue;
    s += elementary_differential(t, h, y0) / Rational(tree_factorial(t) * symmetry_factor(t));
  }
  return s;
}

double cubic_flow_exact(int sign, double zeta) {
  double a = 1.0 - 2.0 * sign * zeta;
  return a > 0 ? 1.0 / std::sqrt(a) : std::nan("");
}

double sigma_limit(double lambda_hat) { return 1.0 / std::sqrt(1.0 + 3.0 * lambda_hat * lambda_hat / M_PI); }

}  // namespace wac
