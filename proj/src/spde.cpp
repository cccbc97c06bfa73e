#include "wildac/spde.hpp"

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace wac {

namespace {

constexpr double kPi = 3.14159265358979323846;
using cplx = std::complex<double>;

template <class T>
struct FftwBuf {
  T* p = nullptr;
  std::size_t n = 0;
  explicit FftwBuf(std::size_t n_) : p(static_cast<T*>(fftw_malloc(sizeof(T) * n_))), n(n_) {
    if (!p) throw SpdeError("out of memory allocating a field buffer");
  }
  FftwBuf(const FftwBuf&) = delete;
  FftwBuf& operator=(const FftwBuf&) = delete;
  ~FftwBuf() { fftw_free(p); }
  T& operator[](std::size_t i) { return p[i]; }
  const T& operator[](std::size_t i) const { return p[i]; }
};
using RealBuf = FftwBuf<double>;
using CplxBuf = FftwBuf<cplx>;

struct Plans {
  fftw_plan r2c = nullptr, c2r = nullptr;
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

// planning is not thread safe; execution on fresh arrays is
const Plans& plans_for(int n) {
  static std::map<int, Plans> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  RealBuf r(std::size_t(n) * n);
  CplxBuf c(std::size_t(n) * (n / 2 + 1));
  // measured plans vary between runs and so do the last bits of the output
  unsigned flags = FFTW_ESTIMATE;
  Plans p;
  p.r2c = fftw_plan_dft_r2c_2d(n, n, r.p, reinterpret_cast<fftw_complex*>(c.p), flags);
  p.c2r = fftw_plan_dft_c2r_2d(n, n, reinterpret_cast<fftw_complex*>(c.p), r.p, flags);
  if (!p.r2c || !p.c2r) throw SpdeError("FFTW planning failed");
  return cache.emplace(n, p).first->second;
}

// spectral coefficients (normalised) -> physical; destroys c
void c2r(int n, CplxBuf& c, RealBuf& r) {
  fftw_execute_dft_c2r(plans_for(n).c2r, reinterpret_cast<fftw_complex*>(c.p), r.p);
}

// physical -> normalised spectral coefficients
void r2c(int n, RealBuf& r, CplxBuf& c) {
  fftw_execute_dft_r2c(plans_for(n).r2c, r.p, reinterpret_cast<fftw_complex*>(c.p));
  double s = 1.0 / (double(n) * n);
  for (std::size_t i = 0; i < c.n; ++i) c[i] *= s;
}

std::size_t half_size(int n) { return std::size_t(n) * (n / 2 + 1); }

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::string trim_ws(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_num(const std::string& key, const std::string& v) {
  std::size_t pos = 0;
  T out{};
  try {
    if constexpr (std::is_same_v<T, double>)
      out = std::stod(v, &pos);
    else if constexpr (std::is_same_v<T, int>)
      out = std::stoi(v, &pos);
    else
      out = std::stoull(v, &pos);
  } catch (const std::exception&) {
    throw SpdeError("config: bad value for " + key + ": '" + v + "'");
  }
  if (pos != v.size()) throw SpdeError("config: bad value for " + key + ": '" + v + "'");
  return out;
}

double mean(const std::vector<double>& x) {
  double s = 0;
  for (double v : x) s += v;
  return s / x.size();
}

double stderr_of(const std::vector<double>& x) {
  if (x.size() < 2) return 0;
  double m = mean(x), s = 0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / (x.size() - 1) / x.size());
}

}  // namespace

double ScalarField2D::mean_square() const {
  double s = 0;
  for (double v : values) s += v * v;
  return s / values.size();
}

std::vector<double> wavenumber_sq(int n, double L) {
  std::vector<double> k2(half_size(n));
  double w = 2 * kPi / L;
  int h = n / 2 + 1;
  for (int i = 0; i < n; ++i) {
    double kx = w * (i <= n / 2 ? i : i - n);
    for (int j = 0; j < h; ++j) {
      double ky = w * j;
      k2[std::size_t(i) * h + j] = kx * kx + ky * ky;
    }
  }
  return k2;
}

SpectralField to_spectral(const ScalarField2D& f) {
  RealBuf r(f.values.size());
  std::copy(f.values.begin(), f.values.end(), r.p);
  CplxBuf c(half_size(f.n));
  r2c(f.n, r, c);
  SpectralField out(f.n, f.box_length);
  std::copy(c.p, c.p + c.n, out.coeffs.begin());
  return out;
}

ScalarField2D to_physical(const SpectralField& f) {
  CplxBuf c(f.coeffs.size());
  std::copy(f.coeffs.begin(), f.coeffs.end(), c.p);
  RealBuf r(std::size_t(f.n) * f.n);
  c2r(f.n, c, r);
  ScalarField2D out(f.n, f.box_length);
  std::copy(r.p, r.p + r.n, out.values.begin());
  return out;
}

// ---- configuration ----

void SimConfig::set(const std::string& key, const std::string& v) {
  if (key == "epsilon") epsilon = parse_num<double>(key, v);
  else if (key == "lambda_hat") lambda_hat = parse_num<double>(key, v);
  else if (key == "mass") mass = parse_num<double>(key, v);
  else if (key == "t_final") t_final = parse_num<double>(key, v);
  else if (key == "grid_n") grid_n = parse_num<int>(key, v);
  else if (key == "box_length") box_length = parse_num<double>(key, v);
  else if (key == "dt") dt = parse_num<double>(key, v);
  else if (key == "dt_rel") dt_rel = parse_num<double>(key, v);
  else if (key == "n_realizations") n_realizations = parse_num<int>(key, v);
  else if (key == "master_seed") master_seed = parse_num<std::uint64_t>(key, v);
  else if (key == "truncation_n") truncation_n = parse_num<int>(key, v);
  else if (key == "coupling") coupling = parse_num<double>(key, v);
  else if (key == "relax_invariants") {
    if (v == "true" || v == "1") relax_invariants = true;
    else if (v == "false" || v == "0") relax_invariants = false;
    else throw SpdeError("config: relax_invariants must be true or false");
  } else
    throw SpdeError("config: unknown key '" + key + "'");
}

SimConfig SimConfig::parse(const std::string& text) {
  SimConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim_ws(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw SpdeError("config line " + std::to_string(lineno) + ": expected key=value");
    c.set(trim_ws(line.substr(0, eq)), trim_ws(line.substr(eq + 1)));
  }
  return c;
}

SimConfig SimConfig::from_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw SpdeError("cannot open config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

std::string SimConfig::str() const {
  std::ostringstream os;
  os.precision(17);
  os << "epsilon=" << epsilon << "\nlambda_hat=" << lambda_hat << "\nmass=" << mass << "\nt_final=" << t_final
     << "\ngrid_n=" << grid_n << "\nbox_length=" << box_length << "\ndt=" << dt << "\ndt_rel=" << dt_rel
     << "\nn_realizations=" << n_realizations << "\nmaster_seed=" << master_seed << "\ntruncation_n=" << truncation()
     << "\ncoupling=" << coupling << "\nrelax_invariants=" << (relax_invariants ? "true" : "false") << "\n";
  return os.str();
}

double SimConfig::beta() const { return coupling / -std::log(epsilon); }

int SimConfig::truncation() const {
  return truncation_n >= 0 ? truncation_n : static_cast<int>(std::floor(-std::log(epsilon)));
}

std::vector<std::string> SimConfig::violations() const {
  std::vector<std::string> v;
  if (dx() > epsilon / 2) v.push_back("dx > epsilon/2");
  if (box_length < 8 * std::sqrt(t_final + epsilon * epsilon)) v.push_back("box_length < 8 sqrt(t_final + eps^2)");
  if (dt_cap() > dx() * dx() * (1 + 1e-12)) v.push_back("dt > dx^2");
  return v;
}

void SimConfig::validate() const {
  if (!(epsilon > 0 && epsilon < 0.5)) throw SpdeError("config: epsilon must lie in (0, 1/2)");
  if (!(lambda_hat >= 0)) throw SpdeError("config: lambda_hat must be >= 0");
  if (!std::isfinite(mass)) throw SpdeError("config: mass must be finite");
  if (!(t_final > 0)) throw SpdeError("config: t_final must be > 0");
  if (!is_pow2(grid_n) || grid_n < 8) throw SpdeError("config: grid_n must be a power of two >= 8");
  if (!(box_length > 0)) throw SpdeError("config: box_length must be > 0");
  if (!(dt >= 0) || !(dt_rel > 0)) throw SpdeError("config: dt must be >= 0 and dt_rel > 0");
  if (n_realizations < 1) throw SpdeError("config: n_realizations must be >= 1");
  if (truncation_n < -1) throw SpdeError("config: truncation_n must be >= 0 (or -1 for the default)");
  if (!(coupling >= 0)) throw SpdeError("config: coupling must be >= 0");
  if (!relax_invariants) {
    auto v = violations();
    if (!v.empty()) throw SpdeError("config invariant violated: " + v.front() + " (set relax_invariants=true to override)");
  }
}

std::vector<double> time_grid(const SimConfig& cfg) {
  double e2 = cfg.epsilon * cfg.epsilon, cap = cfg.dt_cap();
  std::vector<double> g{0.0};
  double s = 0;
  while (s < cfg.t_final) {
    double h = std::min(cap, cfg.dt_rel * (s + e2));
    // avoid a sliver at the end
    s = (s + 1.5 * h >= cfg.t_final) ? cfg.t_final : s + h;
    g.push_back(s);
  }
  return g;
}

std::vector<double> refine(const std::vector<double>& grid) {
  std::vector<double> out;
  out.reserve(2 * grid.size());
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    out.push_back(grid[i]);
    out.push_back(0.5 * (grid[i] + grid[i + 1]));
  }
  out.push_back(grid.back());
  return out;
}

std::uint64_t realization_seed(std::uint64_t master, std::uint64_t index) {
  // splitmix64 applied to a counter offset by the master seed
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// ---- noise and linear flow ----

namespace {

// standard normal pair attached to the integer wavevector (kx, ky), so a
// given seed puts the same amplitudes on shared modes of different grids
std::pair<double, double> mode_normals(std::uint64_t seed, int kx, int ky) {
  std::uint64_t key = (std::uint64_t(std::uint32_t(kx)) << 32) | std::uint32_t(ky);
  std::uint64_t h = realization_seed(seed, realization_seed(0x6d6f646573ULL, key));
  double u1 = double(realization_seed(h, 0) >> 11) * 0x1.0p-53;
  double u2 = double(realization_seed(h, 1) >> 11) * 0x1.0p-53;
  double r = std::sqrt(-2.0 * std::log1p(-u1));
  return {r * std::cos(2 * kPi * u2), r * std::sin(2 * kPi * u2)};
}

}  // namespace

SpectralField sample_noise_spectrum(const SimConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  int n = cfg.grid_n, h = n / 2 + 1;
  double L = cfg.box_length, e2 = cfg.epsilon * cfg.epsilon;
  auto k2 = wavenumber_sq(n, L);
  SpectralField out(n, L);
  const double r2 = std::sqrt(0.5);
  auto mult = [&](std::size_t idx) { return std::exp(-0.5 * e2 * k2[idx]) / L; };
  auto signed_k = [&](int i) { return i <= n / 2 ? i : i - n; };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < h; ++j) {
      std::size_t idx = std::size_t(i) * h + j;
      bool self_column = (j == 0 || j == n / 2);
      if (!self_column) {
        auto [a, b] = mode_normals(seed, signed_k(i), j);
        out.coeffs[idx] = mult(idx) * cplx(a * r2, b * r2);
        continue;
      }
      int p = (n - i) % n;
      if (i == p) {
        out.coeffs[idx] = mult(idx) * mode_normals(seed, signed_k(i), j).first;
      } else if (i < p) {
        auto [a, b] = mode_normals(seed, signed_k(i), j);
        out.coeffs[idx] = mult(idx) * cplx(a * r2, b * r2);
        out.coeffs[std::size_t(p) * h + j] = std::conj(out.coeffs[idx]);
      }
    }
  return out;
}

ScalarField2D sample_mollified_noise(const SimConfig& cfg, std::uint64_t seed) {
  return to_physical(sample_noise_spectrum(cfg, seed));
}

SpectralField heat_evolve(const SpectralField& f, double t, double mass) {
  if (t < 0) throw SpdeError("heat_evolve: t < 0");
  auto k2 = wavenumber_sq(f.n, f.box_length);
  SpectralField out = f;
  for (std::size_t i = 0; i < k2.size(); ++i) out.coeffs[i] *= std::exp(t * (mass - 0.5 * k2[i]));
  return out;
}

ScalarField2D heat_evolve(const ScalarField2D& f, double t, double mass) {
  return to_physical(heat_evolve(to_spectral(f), t, mass));
}

// ---- nonlinear simulation ----

ScalarField2D simulate_ac(const SimConfig& cfg, const SpectralField& noise, const std::vector<double>& grid) {
  cfg.validate();
  int n = cfg.grid_n;
  if (noise.n != n) throw SpdeError("simulate_ac: noise grid does not match config");
  if (grid.size() < 2 || grid.front() != 0 || std::abs(grid.back() - cfg.t_final) > 1e-12 * cfg.t_final)
    throw SpdeError("simulate_ac: time grid must run from 0 to t_final");
  auto k2 = wavenumber_sq(n, cfg.box_length);
  std::size_t hs = k2.size(), np = std::size_t(n) * n;
  CplxBuf u_hat(hs);
  RealBuf u(np);
  for (std::size_t i = 0; i < hs; ++i) u_hat[i] = cfg.lambda_hat * noise.coeffs[i];
  double beta = cfg.beta();

  auto linear = [&](double tau) {
    if (tau == 0) return;
    for (std::size_t i = 0; i < hs; ++i) u_hat[i] *= std::exp(tau * (cfg.mass - 0.5 * k2[i]));
  };

  if (beta == 0) {
    linear(cfg.t_final);
  } else {
    double pending = 0;
    for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
      double h = grid[k + 1] - grid[k];
      linear(pending + 0.5 * h);
      c2r(n, u_hat, u);
      bool finite = true;
      for (std::size_t i = 0; i < np; ++i) {
        double x = u[i];
        u[i] = x / std::sqrt(1 + 2 * beta * h * x * x);
        finite = finite && std::isfinite(u[i]);
      }
      if (!finite)
        throw SpdeError("simulate_ac: non-finite values at t=" + std::to_string(grid[k + 1]));
      r2c(n, u, u_hat);
      pending = 0.5 * h;
    }
    linear(pending);
  }
  c2r(n, u_hat, u);
  ScalarField2D out(n, cfg.box_length);
  std::copy(u.p, u.p + np, out.values.begin());
  return out;
}

ScalarField2D simulate_ac(const SimConfig& cfg, std::uint64_t seed) {
  return simulate_ac(cfg, sample_noise_spectrum(cfg, seed), time_grid(cfg));
}

// ---- Wild expansion ----

namespace {

void collect(const Tree& t, std::map<Tree, int>& out) {
  if (!is_ternary(t)) throw SpdeError("wild terms need ternary trees, got " + t.str());
  if (out.count(t)) return;
  for (const auto& k : t.children()) collect(k, out);
  out.emplace(t, 0);
}

// phi1(z) = (e^z - 1)/z, phi2(z) = (e^z - 1 - z)/z^2
void phis(double z, double& p1, double& p2) {
  if (std::abs(z) < 0.1) {
    double t = 1, s1 = 0, s2 = 0;
    // t runs through z^k / (k+2)!
    for (int k = 0; k < 12; ++k) {
      if (k == 0) t = 0.5;
      else t *= z / (k + 2);
      s2 += t;
      s1 += t * (k + 2);  // z^k/(k+1)!
    }
    p1 = s1;
    p2 = s2;
    return;
  }
  double em1 = std::expm1(z);
  p1 = em1 / z;
  p2 = (em1 - z) / (z * z);
}

}  // namespace

std::map<Tree, ScalarField2D> wild_terms(const std::vector<Tree>& trees, const SpectralField& noise,
                                         const SimConfig& cfg, const std::vector<double>& grid) {
  cfg.validate();
  if (grid.size() < 64) throw SpdeError("wild_terms: time grid needs at least 64 points");
  if (grid.front() != 0 || std::abs(grid.back() - cfg.t_final) > 1e-12 * cfg.t_final)
    throw SpdeError("wild_terms: time grid must run from 0 to t_final");
  std::map<Tree, int> index;
  for (const auto& t : trees) {
    if (t.inner() > 4) throw SpdeError("wild_terms: i(tau) <= 4 required");
    collect(t, index);
  }
  // children precede parents in the canonical order (they are smaller)
  std::vector<Tree> order;
  for (auto& [t, id] : index) {
    id = static_cast<int>(order.size());
    order.push_back(t);
  }
  int n = cfg.grid_n;
  if (noise.n != n) throw SpdeError("wild_terms: noise grid does not match config");
  auto k2 = wavenumber_sq(n, cfg.box_length);
  std::size_t hs = k2.size(), np = std::size_t(n) * n;
  int m = static_cast<int>(order.size());
  double beta = cfg.beta();

  std::vector<std::unique_ptr<CplxBuf>> X, F;
  std::vector<std::unique_ptr<RealBuf>> phys;
  std::vector<std::array<int, 3>> kids(m, {-1, -1, -1});
  std::vector<double> coef(m, 0);
  for (int a = 0; a < m; ++a) {
    X.push_back(std::make_unique<CplxBuf>(hs));
    F.push_back(std::make_unique<CplxBuf>(hs));
    phys.push_back(std::make_unique<RealBuf>(np));
    std::fill(X[a]->p, X[a]->p + hs, cplx(0));
    if (!order[a].is_leaf()) {
      const auto& ch = order[a].children();
      for (int c = 0; c < 3; ++c) kids[a][c] = index.at(ch[c]);
      coef[a] = -a_factor(ch[0], ch[1], ch[2]) * beta;
    }
  }
  CplxBuf scratch(hs);
  RealBuf prod(np);
  std::vector<double> ez(hs), w0(hs), w1(hs);

  auto to_phys = [&](int a) {
    std::copy(X[a]->p, X[a]->p + hs, scratch.p);
    c2r(n, scratch, *phys[a]);
  };
  auto product = [&](int a, CplxBuf& out) {
    const auto& c = kids[a];
    const double *p0 = phys[c[0]]->p, *p1 = phys[c[1]]->p, *p2 = phys[c[2]]->p;
    for (std::size_t i = 0; i < np; ++i) prod[i] = p0[i] * p1[i] * p2[i];
    r2c(n, prod, out);
  };
  auto set_leaf = [&](int a, double t) {
    for (std::size_t i = 0; i < hs; ++i)
      (*X[a])[i] = cfg.lambda_hat * std::exp(t * (cfg.mass - 0.5 * k2[i])) * noise.coeffs[i];
  };

  // t = 0: only the leaf is nonzero
  for (int a = 0; a < m; ++a) {
    if (order[a].is_leaf()) set_leaf(a, 0);
    to_phys(a);
    if (!order[a].is_leaf()) product(a, *F[a]);
  }
  CplxBuf fnew(hs);
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    double h = grid[k + 1] - grid[k];
    for (std::size_t i = 0; i < hs; ++i) {
      double z = h * (cfg.mass - 0.5 * k2[i]), p1, p2;
      phis(z, p1, p2);
      ez[i] = std::exp(z);
      w0[i] = h * (p1 - p2);
      w1[i] = h * p2;
    }
    for (int a = 0; a < m; ++a) {
      if (order[a].is_leaf()) {
        set_leaf(a, grid[k + 1]);
      } else {
        // exact exponential against the linear interpolant of the source
        product(a, fnew);
        CplxBuf& x = *X[a];
        CplxBuf& f = *F[a];
        for (std::size_t i = 0; i < hs; ++i) {
          x[i] = ez[i] * x[i] + coef[a] * (w0[i] * f[i] + w1[i] * fnew[i]);
          f[i] = fnew[i];
        }
      }
      to_phys(a);
    }
  }
  std::map<Tree, ScalarField2D> out;
  for (int a = 0; a < m; ++a) {
    ScalarField2D f(n, cfg.box_length);
    std::copy(phys[a]->p, phys[a]->p + np, f.values.begin());
    out.emplace(order[a], std::move(f));
  }
  return out;
}

ScalarField2D wild_term_field(const Tree& tau, const SpectralField& noise, const SimConfig& cfg,
                              const std::vector<double>& grid) {
  return wild_terms({tau}, noise, cfg, grid).at(tau);
}

ScalarField2D wild_sum(int n, const SpectralField& noise, const SimConfig& cfg, const std::vector<double>& grid) {
  auto trees = enumerate_ternary(n);
  auto terms = wild_terms(trees, noise, cfg, grid);
  ScalarField2D s(cfg.grid_n, cfg.box_length);
  for (const auto& t : trees) {
    const auto& f = terms.at(t);
    for (std::size_t i = 0; i < s.values.size(); ++i) s.values[i] += f.values[i];
  }
  return s;
}

// ---- mean-field comparison and experiments ----

double mkv_amplitude(double t, const SimConfig& cfg) {
  if (t < 0) throw SpdeError("mkv_amplitude: t < 0");
  if (t == 0) return 1;
  double c = c_eps(t, cfg.kernel_params());
  return 1 / std::sqrt(1 + cfg.coupling * 3 * cfg.lambda_hat * cfg.lambda_hat / kPi * c);
}

ScalarField2D mkv_field(const SimConfig& cfg, const SpectralField& noise, double t) {
  auto f = heat_evolve(noise, t, cfg.mass);
  double a = cfg.lambda_hat * mkv_amplitude(t, cfg);
  for (auto& c : f.coeffs) c *= a;
  return to_physical(f);
}

int thread_count() {
  if (const char* s = std::getenv("WILDAC_THREADS")) {
    int v = std::atoi(s);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

RealizationStats run_one(const SimConfig& cfg, const std::vector<double>& grid, std::uint64_t index) {
  RealizationStats r;
  r.index = index;
  r.seed = realization_seed(cfg.master_seed, index);
  auto noise = sample_noise_spectrum(cfg, r.seed);
  auto u = simulate_ac(cfg, noise, grid);
  auto v = mkv_field(cfg, noise, cfg.t_final);
  int c = cfg.grid_n / 2;
  r.center = u.at(c, c);
  double s2 = 0, d2 = 0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    s2 += u.values[i] * u.values[i];
    double d = u.values[i] - v.values[i];
    d2 += d * d;
  }
  r.mean_square = s2 / u.values.size();
  r.coupled_dist = d2 / u.values.size();
  return r;
}

}  // namespace

std::vector<RealizationStats> run_realizations(const SimConfig& cfg, int count) {
  cfg.validate();
  auto grid = time_grid(cfg);
  std::vector<RealizationStats> rows(count);
  plans_for(cfg.grid_n);
  int nt = std::min(thread_count(), count);
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::string error;
  auto work = [&] {
    for (int i; (i = next++) < count;) {
      try {
        rows[i] = run_one(cfg, grid, i);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (error.empty()) error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 1; t < nt; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (!error.empty()) throw SpdeError(error);
  return rows;
}

VarianceReport summarize(const SimConfig& cfg, std::vector<RealizationStats> rows) {
  VarianceReport rep;
  rep.n_realizations = static_cast<int>(rows.size());
  std::vector<double> ms, cs, ds;
  for (const auto& r : rows) {
    ms.push_back(r.mean_square);
    cs.push_back(r.center * r.center);
    ds.push_back(r.coupled_dist);
  }
  rep.empirical_var = mean(ms);
  rep.stderr_ = stderr_of(ms);
  rep.center_var = mean(cs);
  rep.center_stderr = stderr_of(cs);
  rep.coupled_dist = mean(ds);
  rep.coupled_stderr = stderr_of(ds);
  double t = cfg.t_final, e2 = cfg.epsilon * cfg.epsilon, l2 = cfg.lambda_hat * cfg.lambda_hat;
  double g = std::exp(2 * cfg.mass * t);
  double sl = sigma_limit(cfg.lambda_hat * std::sqrt(cfg.coupling)), sm = mkv_amplitude(t, cfg);
  rep.theory_linear = l2 * g / (4 * kPi * (t + e2));
  rep.theory_limit = l2 * sl * sl * g / (4 * kPi * t);
  rep.theory_mkv = l2 * sm * sm * g / (4 * kPi * (t + e2));
  rep.rows = std::move(rows);
  return rep;
}

VarianceReport variance_experiment(const SimConfig& cfg) {
  if (cfg.n_realizations < 100) throw SpdeError("variance_experiment: n_realizations must be >= 100");
  return summarize(cfg, run_realizations(cfg, cfg.n_realizations));
}

std::string VarianceReport::csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "realization,seed,center,mean_square,coupled_dist\n";
  for (const auto& r : rows)
    os << r.index << ',' << r.seed << ',' << r.center << ',' << r.mean_square << ',' << r.coupled_dist << '\n';
  return os.str();
}

std::string VarianceReport::json() const {
  nlohmann::ordered_json j;
  j["empirical_var"] = empirical_var;
  j["stderr"] = stderr_;
  j["center_var"] = center_var;
  j["center_stderr"] = center_stderr;
  j["coupled_dist"] = coupled_dist;
  j["coupled_stderr"] = coupled_stderr;
  j["theory_linear"] = theory_linear;
  j["theory_limit"] = theory_limit;
  j["theory_mkv"] = theory_mkv;
  j["n_realizations"] = n_realizations;
  j["ratio_columns"] = {{"empirical_over_linear", empirical_var / theory_linear},
                        {"empirical_over_limit", empirical_var / theory_limit},
                        {"empirical_over_mkv", empirical_var / theory_mkv},
                        {"mkv_over_linear", theory_mkv / theory_linear}};
  return j.dump(2);
}

}  // namespace wac
