#include "wildac/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/random/sobol.hpp>

namespace wac {

namespace {

constexpr double kPi = 3.14159265358979323846;

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::string fmt(const char* name, double v) {
  std::ostringstream os;
  os.precision(6);
  os << name << '=' << v;
  return os.str();
}

}  // namespace

KernelParams::KernelParams(double eps, double lam, double m) : epsilon(eps), lambda_hat(lam), mass(m) { validate(); }

void KernelParams::validate() const {
  if (!(epsilon > 0 && epsilon < 0.5)) throw KernelError("epsilon must lie in (0, 1/2)");
  if (!(lambda_hat >= 0) || !std::isfinite(mass)) throw KernelError("bad lambda_hat or mass");
}

double KernelParams::log_inv_eps() const { return -std::log(epsilon); }

double KernelParams::lambda_eps_sq() const { return lambda_hat * lambda_hat / log_inv_eps(); }

double one_cycle_weight(double s, const KernelParams& p) {
  if (s < 0) throw KernelError("one_cycle_weight: s < 0");
  double e2 = p.epsilon * p.epsilon;
  return p.lambda_eps_sq() * std::exp(2 * p.mass * s) / (4 * kPi * (s + e2));
}

QuadResult one_cycle_quadrature(double t, const KernelParams& p, double tol) {
  if (t < 0) throw KernelError("one_cycle_integral: t < 0");
  QuadResult r;
  if (t == 0) return r;
  double e2 = p.epsilon * p.epsilon;
  std::uint64_t evals = 0;
  // in x = log(1 + s/eps^2) the integrand e^{2ms}/(s+eps^2) ds becomes e^{2ms} dx;
  // mapped onto [-1, 1] because boost reports the error of the unscaled rule
  double half = 0.5 * std::log1p(t / e2);
  auto f = [&](double y) {
    ++evals;
    return half * std::exp(2 * p.mass * e2 * std::expm1(half * (y + 1)));
  };
  double err = 0, l1 = 0;
  double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -1.0, 1.0, 20, tol, &err, &l1);
  double scale = p.lambda_eps_sq() / (4 * kPi);
  if (!std::isfinite(v) || err > 100 * tol * std::max(l1, 1e-300))
    throw KernelError("one_cycle_integral: quadrature did not converge");
  r.value = scale * v;
  r.abs_error_estimate = scale * err;
  r.evaluations = evals;
  return r;
}

double one_cycle_integral(double t, const KernelParams& p) {
  if (t < 0) throw KernelError("one_cycle_integral: t < 0");
  if (t == 0) return 0;
  if (p.mass == 0) {
    double e2 = p.epsilon * p.epsilon;
    return p.lambda_eps_sq() / (4 * kPi) * std::log1p(t / e2);
  }
  return one_cycle_quadrature(t, p, 1e-12).value;
}

double c_eps(double t, const KernelParams& p) {
  KernelParams q = p;
  q.lambda_hat = 1;
  return one_cycle_integral(t, q) * 2 * kPi;
}

double c_eps_error_bound(double t, const KernelParams& p) {
  double e2 = p.epsilon * p.epsilon;
  return (std::exp(2 * std::abs(p.mass) * t) + std::abs(std::log(t + e2))) / (2 * p.log_inv_eps());
}

double c_eps_power_bound(int k, double t, const KernelParams& p) {
  return k * std::pow(3 * std::exp(2 * p.mbar() * t), k - 1) * c_eps_error_bound(t, p);
}

double vcycle_kernel(const std::vector<double>& s, const KernelParams& p) {
  if (s.empty()) throw KernelError("vcycle_kernel: empty time vector");
  double e2 = p.epsilon * p.epsilon, l2 = p.lambda_eps_sq();
  double r = 1;
  size_t m = s.size();
  for (size_t k = 0; k < m; ++k) {
    double a = s[k], b = s[(k + 1) % m];
    if (a < 0 || b < 0) throw KernelError("vcycle_kernel: negative time");
    r *= l2 * std::exp(p.mass * (a + b)) / (2 * kPi * (a + b + 2 * e2));
  }
  return r;
}

namespace {

// integrand in log variables u_k = log(s_k + eps^2), Jacobian included
struct LogCycle {
  const KernelParams& p;
  double e2, l2;
  explicit LogCycle(const KernelParams& q) : p(q), e2(q.epsilon * q.epsilon), l2(q.lambda_eps_sq()) {}
  double operator()(const double* u, int m) const {
    double r = 1;
    for (int k = 0; k < m; ++k) {
      double a = u[k], b = u[(k + 1) % m];
      double sa = std::exp(a) - e2, sb = std::exp(b) - e2;
      r *= l2 * std::exp(p.mass * (sa + sb)) / (4 * kPi * std::cosh(0.5 * (a - b)));
    }
    return r;
  }
};

template <int N>
double tensor2(const LogCycle& g, double lo, double hi, int panels, std::uint64_t& evals) {
  using GL = boost::math::quadrature::gauss<double, N>;
  double h = (hi - lo) / panels;
  double total = 0;
  for (int i = 0; i < panels; ++i)
    for (int j = 0; j < panels; ++j) {
      double a1 = lo + i * h, a2 = lo + j * h;
      total += GL::integrate(
          [&](double x) {
            return GL::integrate(
                [&](double y) {
                  ++evals;
                  double u[2] = {x, y};
                  return g(u, 2);
                },
                a2, a2 + h);
          },
          a1, a1 + h);
    }
  return total;
}

}  // namespace

QuadResult vcycle_integral(int m, double t, const KernelParams& p, const VCycleOptions& opt) {
  if (m < 1 || m > 4) throw KernelError("vcycle_integral: m must be in 1..4");
  if (t < 0) throw KernelError("vcycle_integral: t < 0");
  QuadResult r;
  if (t == 0) return r;
  if (m == 1) return one_cycle_quadrature(t, p, 1e-12);

  LogCycle g(p);
  double lo = std::log(g.e2), hi = std::log(t + g.e2);
  double vol = hi - lo;
  if (m == 2) {
    int panels = std::max(4, static_cast<int>(std::ceil(vol / 0.5)));
    std::uint64_t evals = 0;
    double fine = tensor2<20>(g, lo, hi, panels, evals);
    double coarse = tensor2<10>(g, lo, hi, panels, evals);
    r.value = fine;
    r.abs_error_estimate = std::abs(fine - coarse);
    r.evaluations = evals;
    return r;
  }

  // randomly shifted Sobol points; the spread of the shift means gives the error
  std::uint64_t npts = std::uint64_t(1) << opt.qmc_log2_points;
  boost::random::sobol gen(m);
  std::vector<double> pts(npts * m);
  for (auto& x : pts) x = std::ldexp(static_cast<double>(gen()), -64);
  std::mt19937_64 rng(opt.seed);
  std::uniform_real_distribution<double> U(0, 1);
  std::vector<double> means;
  double u[4], shift[4];
  for (int sft = 0; sft < opt.qmc_shifts; ++sft) {
    for (int k = 0; k < m; ++k) shift[k] = U(rng);
    double acc = 0;
    for (std::uint64_t i = 0; i < npts; ++i) {
      for (int k = 0; k < m; ++k) {
        double x = pts[i * m + k] + shift[k];
        if (x >= 1) x -= 1;
        u[k] = lo + vol * x;
      }
      acc += g(u, m);
    }
    means.push_back(acc / npts * std::pow(vol, m));
  }
  double mean = std::accumulate(means.begin(), means.end(), 0.0) / means.size();
  double var = 0;
  for (double v : means) var += (v - mean) * (v - mean);
  var /= (means.size() - 1);
  r.value = mean;
  r.abs_error_estimate = 3 * std::sqrt(var / means.size());
  r.evaluations = npts * opt.qmc_shifts;
  return r;
}

double vcycle_bound(int m, double t, const KernelParams& p) {
  double e2 = p.epsilon * p.epsilon;
  double base = p.lambda_eps_sq() * std::exp(2 * p.mbar() * t);
  return std::pow(base, m) / (std::pow(2.0, m) * kPi) * std::log1p(t / e2);
}

namespace {

// parent index among inner vertices, -1 for the root
std::vector<int> inner_parents(const Tree& t) {
  std::vector<int> par;
  auto go = [&](auto& self, const Tree& s, int up) -> void {
    if (s.is_empty() || s.is_leaf()) return;
    int me = static_cast<int>(par.size());
    par.push_back(up);
    for (const auto& k : s.children()) self(self, k, me);
  };
  go(go, t, -1);
  return par;
}

}  // namespace

BigInt linear_extensions(const Tree& tau) {
  auto par = inner_parents(tau);
  int n = static_cast<int>(par.size());
  if (n > 22) throw KernelError("linear_extensions: too many inner vertices");
  // count[S]: orderings of S top-down, S closed under ancestors
  std::vector<BigInt> count(std::size_t(1) << n);
  count[0] = 1;
  for (std::size_t S = 0; S < count.size(); ++S) {
    if (count[S] == 0) continue;
    for (int v = 0; v < n; ++v) {
      if (S >> v & 1) continue;
      if (par[v] >= 0 && !(S >> par[v] & 1)) continue;
      count[S | (std::size_t(1) << v)] += count[S];
    }
  }
  return count.back();
}

Rational simplex_volume(const Tree& tau, const Rational& t) {
  int n = static_cast<int>(inner_parents(tau).size());
  BigInt nf = 1;
  for (int k = 2; k <= n; ++k) nf *= k;
  Rational tp = 1;
  for (int k = 0; k < n; ++k) tp *= t;
  return tp * Rational(linear_extensions(tau), nf);
}

bool SimplexBoxResult::agree(double k) const {
  return std::abs(simplex - box) <= k * std::hypot(simplex_sigma, box_sigma);
}

SimplexBoxResult simplex_vs_box(const Tree& tau, const SymmetricFn& f, double t, std::uint64_t n_samples,
                                std::uint64_t seed) {
  auto par = inner_parents(tau);
  int d = static_cast<int>(par.size());
  SimplexBoxResult r;
  r.dim = d;
  std::vector<double> s(d);
  if (d == 0) {
    r.simplex = r.box = f(s);
    return r;
  }
  if (n_samples < 2) throw KernelError("simplex_vs_box: need at least two samples");
  double vol = std::pow(t, d);
  double red = to_double(Rational(tree_factorial(trim(tau))));
  std::seed_seq sa{seed, std::uint64_t(1)}, sb{seed, std::uint64_t(2)};
  std::mt19937_64 ga(sa), gb(sb);
  std::uniform_real_distribution<double> U(0, t);

  auto estimate = [&](std::mt19937_64& g, bool restrict, double& mean, double& sigma) {
    double sum = 0, sum2 = 0;
    for (std::uint64_t i = 0; i < n_samples; ++i) {
      for (auto& x : s) x = U(g);
      bool in = true;
      if (restrict)
        for (int v = 0; v < d && in; ++v) in = par[v] < 0 || s[v] <= s[par[v]];
      double y = in ? f(s) : 0.0;
      sum += y;
      sum2 += y * y;
    }
    double m = sum / n_samples;
    double var = std::max(0.0, (sum2 - n_samples * m * m) / (n_samples - 1));
    mean = vol * m;
    sigma = vol * std::sqrt(var / n_samples);
  };
  estimate(ga, true, r.simplex, r.simplex_sigma);
  estimate(gb, false, r.box, r.box_sigma);
  r.box /= red;
  r.box_sigma /= red;
  return r;
}

double red_tau_eval(const Tree& tau, double t, const KernelParams& p) {
  Tree tr = trim(tau);
  double fact = to_double(Rational(tree_factorial(tr)));
  return std::pow(one_cycle_integral(t, p), tr.size()) / fact;
}

std::pair<Rational, Rational> perm_cycle_gf(int n, int M) {
  if (n < 0 || n > 8) throw KernelError("perm_cycle_gf: n must be in 0..8");
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  BigInt total = 0, count = 0;
  do {
    std::vector<char> seen(n, 0);
    int cycles = 0;
    for (int i = 0; i < n; ++i) {
      if (seen[i]) continue;
      ++cycles;
      for (int j = i; !seen[j]; j = perm[j]) seen[j] = 1;
    }
    BigInt w = 1;
    for (int c = 0; c < cycles; ++c) w *= M;
    total += w;
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  BigInt binom = 1;
  for (int k = 1; k <= n; ++k) binom = binom * (M - 1 + k) / k;
  return {Rational(total, count), Rational(binom)};
}

double nonid_psi_rhs(const Tree& tau, double t, const KernelParams& p) {
  int i = tau.inner();
  double red = to_double(Rational(tree_factorial(trim(tau))));
  return std::pow(p.lambda_hat * std::exp(p.mbar() * t), 4 * i) / (4 * std::pow(kPi, 2 * i - 1)) *
         std::exp(2 * (2 + 2 * kPi) * i) / (red * red) / p.log_inv_eps();
}

NonIdReport nonid_psi_bound_check(const Tree& tau, double t, const KernelParams& p, const VCycleOptions& opt) {
  if (!is_ternary(tau)) throw KernelError("nonid_psi_bound_check: tree must be ternary");
  int i = tau.inner();
  if (i > 2) throw KernelError("nonid_psi_bound_check: i(tau) <= 2 required");
  NonIdReport rep;
  rep.n = 2 * i;
  rep.rhs = nonid_psi_rhs(tau, t, p);
  if (rep.n == 0) return rep;
  for (int m = 1; m <= rep.n; ++m) rep.cycle_integrals.push_back(vcycle_integral(m, t, p, opt));

  std::vector<int> perm(rep.n);
  std::iota(perm.begin(), perm.end(), 0);
  double sum = 0, err = 0;
  do {
    std::vector<char> seen(rep.n, 0);
    std::vector<int> lens;
    for (int a = 0; a < rep.n; ++a) {
      if (seen[a]) continue;
      int len = 0;
      for (int j = a; !seen[j]; j = perm[j]) seen[j] = 1, ++len;
      lens.push_back(len);
    }
    if (static_cast<int>(lens.size()) == rep.n) continue;  // identity
    double prod = 1, rel = 0;
    for (int len : lens) {
      const auto& q = rep.cycle_integrals[len - 1];
      prod *= q.value;
      rel += q.abs_error_estimate / q.value;
    }
    sum += prod;
    err += prod * rel;
  } while (std::next_permutation(perm.begin(), perm.end()));
  double red = to_double(Rational(tree_factorial(trim(tau))));
  rep.lhs = sum / (red * red);
  rep.lhs_error = err / (red * red);
  return rep;
}

std::vector<ReportRow> kernel_report(bool fast) {
  std::vector<ReportRow> rows;
  auto params = [](const KernelParams& p, double t) {
    return fmt("eps", p.epsilon) + ";" + fmt("lambda_hat", p.lambda_hat) + ";" + fmt("mass", p.mass) + ";" +
           fmt("t", t);
  };

  for (double eps : {1e-2, 1e-4, 1e-6})
    for (double t : {0.1, 1.0, 2.0}) {
      KernelParams p(eps, 1.0, 0.0);
      auto q = one_cycle_quadrature(t, p);
      double c = one_cycle_integral(t, p);
      rows.push_back({"one_cycle_integral", params(p, t), q.value, c, std::abs(q.value - c), q.evaluations});
    }
  for (double m : {-1.0, 0.5, 1.0})
    for (double eps : {1e-2, 1e-4}) {
      KernelParams p(eps, 1.0, m);
      double t = 1.0, dev = std::abs(c_eps(t, p) - 1), b = c_eps_error_bound(t, p);
      rows.push_back({"c_eps_deviation", params(p, t), dev, b, b - dev, 0});
    }
  int max_m = fast ? 2 : 4;
  for (double eps : {1e-2, 1e-3, 1e-4})
    for (int m = 1; m <= max_m; ++m) {
      KernelParams p(eps, 1.0, 0.0);
      auto q = vcycle_integral(m, 1.0, p);
      double b = vcycle_bound(m, 1.0, p);
      rows.push_back({"vcycle_integral_m" + std::to_string(m), params(p, 1.0), q.value, b, b - q.value, q.evaluations});
    }
  for (int n = 1; n <= (fast ? 6 : 7); ++n)
    for (int M = 1; M <= 5; ++M) {
      auto [avg, binom] = perm_cycle_gf(n, M);
      rows.push_back({"perm_cycle_gf", "n=" + std::to_string(n) + ";M=" + std::to_string(M), to_double(avg),
                      to_double(binom), to_double(avg - binom), 0});
    }
  for (const auto& tau : enumerate_ternary(fast ? 3 : 4)) {
    Rational v = simplex_volume(tau, 2);
    Rational closed = Rational(BigInt(1) << tau.inner(), tree_factorial(trim(tau)));
    rows.push_back({"simplex_volume", "tree=" + tau.str() + ";t=2", to_double(v), to_double(closed),
                    to_double(v - closed), 0});
  }
  for (const auto& tau : enumerate_ternary(2)) {
    KernelParams p(1e-3, 1.0, 0.0);
    double v = red_tau_eval(tau, 1.0, p);
    Tree tr = trim(tau);
    double lim = std::pow(0.5 / kPi, tr.size()) / to_double(Rational(tree_factorial(tr)));
    rows.push_back({"red_tau_eval", "tree=" + tau.str() + ";" + params(p, 1.0), v, lim, std::abs(v - lim), 0});
  }
  for (const auto& tau : enumerate_ternary(fast ? 1 : 2)) {
    if (tau.inner() == 0) continue;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      KernelParams p(eps, 1.0, 0.0);
      auto rep = nonid_psi_bound_check(tau, 1.0, p);
      std::uint64_t ev = 0;
      for (const auto& q : rep.cycle_integrals) ev += q.evaluations;
      rows.push_back({"nonid_psi", "tree=" + tau.str() + ";" + params(p, 1.0), rep.lhs, rep.rhs, rep.rhs - rep.lhs, ev});
    }
  }
  return rows;
}

std::string to_csv(const std::vector<ReportRow>& rows) {
  std::ostringstream os;
  os.precision(12);
  os << "quantity,params,value,bound_or_oracle,margin,n_evals\n";
  for (const auto& r : rows)
    os << r.quantity << ',' << r.params << ',' << r.value << ',' << r.bound_or_oracle << ',' << r.margin << ','
       << r.n_evals << '\n';
  return os.str();
}

}  // namespace wac
