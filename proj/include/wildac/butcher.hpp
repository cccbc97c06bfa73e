#pragma once

#include <vector>

#include "wildac/tree.hpp"

namespace wac {

struct ButcherTerm {
  Tree tree;
  BigInt factorial;
  BigInt symmetry;
  Rational differential;  // h^(tau)(y0)
  Rational coefficient;   // differential / (factorial * symmetry)
  int power = 0;
};

struct ButcherSum {
  double value = 0;
  double radius = 0;  // radius of convergence, 0 when unknown
  bool outside_disc = false;
  std::vector<Rational> class_sums;  // index n: sum over trees of size n
};

// one term per sub-ternary tree with |tau| <= n, in canonical order
std::vector<ButcherTerm> butcher_terms(const RCubic& h, const Rational& y0, int n, int cap = kDefaultEnumCap);

// size-class sums a_0..a_n without enumerating trees
std::vector<Rational> butcher_class_sums(const RCubic& h, const Rational& y0, int n);

ButcherSum butcher_partial_sum(const RCubic& h, const Rational& y0, double zeta, int n);

// sum over |tau| = n by explicit enumeration
Rational taylor_coefficient(const RCubic& h, const Rational& y0, int n, int cap = kDefaultEnumCap);

// y(zeta) for y' = sign y^3, y(0) = 1; NaN past the blow-up
double cubic_flow_exact(int sign, double zeta);

double sigma_limit(double lambda_hat);

}  // namespace wac
