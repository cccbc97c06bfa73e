#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wildac/tree.hpp"

namespace wac {

struct KernelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct KernelParams {
  double epsilon = 0.01;
  double lambda_hat = 1.0;
  double mass = 0.0;

  KernelParams() = default;
  KernelParams(double eps, double lam, double m);
  double lambda_eps_sq() const;
  double mbar() const { return mass > 0 ? mass : 0.0; }
  double log_inv_eps() const;
  void validate() const;
};

struct QuadResult {
  double value = 0;
  double abs_error_estimate = 0;
  std::uint64_t evaluations = 0;
};

// lambda_eps^2 e^{2 m s} / (4 pi (s + eps^2))
double one_cycle_weight(double s, const KernelParams& p);

// integral of one_cycle_weight over [0, t]; closed form when m = 0
double one_cycle_integral(double t, const KernelParams& p);
// same integral by adaptive Gauss-Kronrod in u = log(s + eps^2), any mass
QuadResult one_cycle_quadrature(double t, const KernelParams& p, double tol = 1e-12);

// (1 / (2 log(1/eps))) int_0^t e^{2ms} / (s + eps^2) ds
double c_eps(double t, const KernelParams& p);
// right-hand side of the bound |c_eps(t) - 1| <= ...
double c_eps_error_bound(double t, const KernelParams& p);
// bound on |c_eps(t)^k - 1|
double c_eps_power_bound(int k, double t, const KernelParams& p);

// cyclic product over s of lambda_eps^2 e^{m(s_k+s_{k+1})} / (2 pi (s_k+s_{k+1}+2eps^2))
double vcycle_kernel(const std::vector<double>& s, const KernelParams& p);

struct VCycleOptions {
  int gl_points = 24;            // Gauss-Legendre nodes per panel, m <= 2
  int qmc_log2_points = 17;      // points per random shift, m >= 3
  int qmc_shifts = 8;
  std::uint64_t seed = 0x5eedULL;
};

// integral of vcycle_kernel over [0, t]^m, m <= 4
QuadResult vcycle_integral(int m, double t, const KernelParams& p, const VCycleOptions& opt = {});
// (lambda_eps e^{mbar t})^{2m} / (2^m pi) log(1 + t/eps^2)
double vcycle_bound(int m, double t, const KernelParams& p);

// volume of the tree time-simplex of tau over [0,t]: t^{i} / trim(tau)!
Rational simplex_volume(const Tree& tau, const Rational& t);
// number of orderings of the inner vertices compatible with ancestry
BigInt linear_extensions(const Tree& tau);

struct SimplexBoxResult {
  double simplex = 0, simplex_sigma = 0;
  double box = 0, box_sigma = 0;  // already divided by trim(tau)!
  int dim = 0;
  bool agree(double k = 3.0) const;
};

using SymmetricFn = std::function<double(const std::vector<double>&)>;

// Monte Carlo estimates of the simplex integral and of the rescaled box
// integral of a symmetric f, from independent sample streams
SimplexBoxResult simplex_vs_box(const Tree& tau, const SymmetricFn& f, double t, std::uint64_t n_samples,
                                std::uint64_t seed = 1);

// (1 / trim(tau)!) one_cycle_integral(t)^{|trim(tau)|}
double red_tau_eval(const Tree& tau, double t, const KernelParams& p);

// (average of M^{K(pi)} over S_n by brute force, binom(n+M-1, n)); n <= 8
std::pair<Rational, Rational> perm_cycle_gf(int n, int M);

struct NonIdReport {
  int n = 0;                  // 2 i(tau)
  double lhs = 0, lhs_error = 0;
  double rhs = 0;
  std::vector<QuadResult> cycle_integrals;  // index m-1: m-fold v-cycle integral
  bool holds() const { return lhs + lhs_error <= rhs; }
};

// sum over non-identity pi in S_{2i} of the factorised cycle integrals,
// divided by trim(tau)!^2, against the closed-form bound; i(tau) <= 2
NonIdReport nonid_psi_bound_check(const Tree& tau, double t, const KernelParams& p, const VCycleOptions& opt = {});
double nonid_psi_rhs(const Tree& tau, double t, const KernelParams& p);

struct ReportRow {
  std::string quantity;
  std::string params;
  double value = 0;
  double bound_or_oracle = 0;
  double margin = 0;
  std::uint64_t n_evals = 0;
};

std::vector<ReportRow> kernel_report(bool fast);
std::string to_csv(const std::vector<ReportRow>& rows);

}  // namespace wac
