#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "wildac/butcher.hpp"
#include "wildac/kernels.hpp"
#include "wildac/tree.hpp"

namespace wac {

struct SpdeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Real field on the torus [0, L)^2 sampled on an N x N grid, row major.
struct ScalarField2D {
  int n = 0;
  double box_length = 0;
  std::vector<double> values;

  ScalarField2D() = default;
  ScalarField2D(int n_, double L) : n(n_), box_length(L), values(std::size_t(n_) * n_, 0.0) {}
  double dx() const { return box_length / n; }
  double& at(int i, int j) { return values[std::size_t(i) * n + j]; }
  double at(int i, int j) const { return values[std::size_t(i) * n + j]; }
  double mean_square() const;
};

// Half-spectrum (r2c layout, N x (N/2+1)) with the convention
// f(x_j) = sum_k c_k e^{i k.x_j}; coefficients are normalised, not FFTW-scaled.
struct SpectralField {
  int n = 0;
  double box_length = 0;
  std::vector<std::complex<double>> coeffs;

  SpectralField() = default;
  SpectralField(int n_, double L) : n(n_), box_length(L), coeffs(std::size_t(n_) * (n_ / 2 + 1)) {}
};

SpectralField to_spectral(const ScalarField2D& f);
ScalarField2D to_physical(const SpectralField& f);
// |k|^2 in r2c layout for side N and box length L
std::vector<double> wavenumber_sq(int n, double L);

struct SimConfig {
  double epsilon = 1.0 / 64;
  double lambda_hat = 0.5;
  double mass = 0.0;
  double t_final = 1.0;
  int grid_n = 256;
  double box_length = 8.0;
  double dt = 0.0;        // cap on the time step; 0 means dx^2
  double dt_rel = 0.05;   // graded step: dt_k <= dt_rel * (s_k + eps^2)
  int n_realizations = 100;
  std::uint64_t master_seed = 1;
  int truncation_n = -1;  // -1 means floor(log(1/eps))
  double coupling = 1.0;  // multiplies the cubic term; 0 gives the linear equation
  bool relax_invariants = false;

  static SimConfig parse(const std::string& text);
  static SimConfig from_file(const std::string& path);
  void set(const std::string& key, const std::string& value);
  std::string str() const;

  double dx() const { return box_length / grid_n; }
  double dt_cap() const { return dt > 0 ? dt : dx() * dx(); }
  double beta() const;  // coupling / log(1/eps)
  int truncation() const;
  KernelParams kernel_params() const { return KernelParams(epsilon, lambda_hat, mass); }

  std::vector<std::string> violations() const;
  // throws on hard errors; soft invariants only when relax_invariants is off
  void validate() const;
};

// 0 = s_0 < ... < s_n = t_final with steps min(dt_cap, dt_rel (s + eps^2))
std::vector<double> time_grid(const SimConfig& cfg);
// inserts midpoints
std::vector<double> refine(const std::vector<double>& grid);

std::uint64_t realization_seed(std::uint64_t master, std::uint64_t index);

// spectral coefficients of p_{eps^2} * eta
SpectralField sample_noise_spectrum(const SimConfig& cfg, std::uint64_t seed);
ScalarField2D sample_mollified_noise(const SimConfig& cfg, std::uint64_t seed);

// e^{mt} P_t f
SpectralField heat_evolve(const SpectralField& f, double t, double mass);
ScalarField2D heat_evolve(const ScalarField2D& f, double t, double mass);

// U(t_final) started from lambda_hat * noise, Strang splitting on the given grid
ScalarField2D simulate_ac(const SimConfig& cfg, const SpectralField& noise, const std::vector<double>& grid);
ScalarField2D simulate_ac(const SimConfig& cfg, std::uint64_t seed);

// X^tau(t_final) for every tree in trees and all their subtrees
std::map<Tree, ScalarField2D> wild_terms(const std::vector<Tree>& trees, const SpectralField& noise,
                                         const SimConfig& cfg, const std::vector<double>& grid);
ScalarField2D wild_term_field(const Tree& tau, const SpectralField& noise, const SimConfig& cfg,
                              const std::vector<double>& grid);
// sum of X^tau over ternary trees with at most n inner vertices
ScalarField2D wild_sum(int n, const SpectralField& noise, const SimConfig& cfg, const std::vector<double>& grid);

// sigma_{lambda_hat, eps}(t), solution of the mean-field amplitude ODE
double mkv_amplitude(double t, const SimConfig& cfg);
// lambda_hat sigma(t) e^{mt} P_t (p_{eps^2} * eta)
ScalarField2D mkv_field(const SimConfig& cfg, const SpectralField& noise, double t);

struct RealizationStats {
  std::uint64_t index = 0, seed = 0;
  double center = 0;          // U at the grid centre
  double mean_square = 0;     // spatial mean of U^2
  double coupled_dist = 0;    // spatial mean of (U - MKV field)^2
};

struct VarianceReport {
  double empirical_var = 0, stderr_ = 0;
  double center_var = 0, center_stderr = 0;
  double coupled_dist = 0, coupled_stderr = 0;
  double theory_linear = 0, theory_limit = 0, theory_mkv = 0;
  int n_realizations = 0;
  std::vector<RealizationStats> rows;

  double ratio_linear() const { return empirical_var / theory_linear; }
  std::string csv() const;
  std::string json() const;
};

// threads from WILDAC_THREADS, else hardware concurrency
int thread_count();
// realizations 0..count-1 of the experiment, in index order
std::vector<RealizationStats> run_realizations(const SimConfig& cfg, int count);
VarianceReport summarize(const SimConfig& cfg, std::vector<RealizationStats> rows);
// requires n_realizations >= 100
VarianceReport variance_experiment(const SimConfig& cfg);

}  // namespace wac
