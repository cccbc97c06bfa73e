// wildac: command-line front end for the tree, chaos, kernel and SPDE modules.

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "wildac/butcher.hpp"
#include "wildac/chaos.hpp"
#include "wildac/checks.hpp"
#include "wildac/kernels.hpp"
#include "wildac/spde.hpp"
#include "wildac/tree.hpp"

using namespace wac;

namespace {

constexpr int kUsage = 2;
constexpr int kFailed = 1;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void header(const std::string& cmd, const std::vector<std::pair<std::string, std::string>>& kv) {
  std::cout << "# wildac " << cmd << '\n';
  for (const auto& [k, v] : kv) std::cout << "# " << k << '=' << v << '\n';
}

std::string num(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

std::string pairs_str(const Contraction& c) {
  std::string s;
  for (auto [a, b] : c.pairs) s += "(" + std::to_string(a) + "," + std::to_string(b) + ")";
  return s.empty() ? "()" : s;
}

int cmd_trees(int max_inner) {
  if (max_inner < 0 || max_inner > kDefaultEnumCap) throw UsageError("--max-inner must be in [0, 10]");
  header("trees", {{"max_inner", std::to_string(max_inner)}});
  std::cout << "tree,inner,leaves,symmetry,factorial,wild_coefficient\n";
  for (const auto& t : enumerate_ternary(max_inner)) {
    auto s = stats(t);
    std::cout << t.str() << ',' << s.inner << ',' << s.leaves << ',' << s.symmetry << ',' << s.factorial << ','
              << wild_coefficient(t).str() << '\n';
  }
  return 0;
}

int cmd_butcher(double zeta, int max_size) {
  if (max_size < 0 || max_size > 200) throw UsageError("--max-size must be in [0, 200]");
  header("butcher", {{"zeta", num(zeta)}, {"max_size", std::to_string(max_size)}, {"y0", "1"}});
  double exact_minus = cubic_flow_exact(-1, zeta), exact_plus = cubic_flow_exact(1, zeta);
  std::cout << "# target h=-y^3: " << num(exact_minus) << '\n';
  std::cout << "# target h=+y^3: " << num(exact_plus) << '\n';
  std::cout << "n,sum_minus_cube,error_minus_cube,sum_plus_cube,error_plus_cube\n";
  ButcherSum sm, sp;
  for (int n = 0; n <= max_size; ++n) {
    sm = butcher_partial_sum(minus_cube(), 1, zeta, n);
    sp = butcher_partial_sum(plus_cube(), 1, zeta, n);
    std::cout << n << ',' << num(sm.value) << ',' << num(std::abs(sm.value - exact_minus)) << ',' << num(sp.value)
              << ',' << num(std::abs(sp.value - exact_plus)) << '\n';
  }
  if (sm.outside_disc) std::cout << "# h=-y^3: zeta outside the disc of convergence\n";
  if (sp.outside_disc) std::cout << "# h=+y^3: zeta outside the disc of convergence\n";
  return 0;
}

int cmd_chaos(const std::string& spec, bool all_traces) {
  Tree t;
  try {
    t = Tree::parse(spec);
  } catch (const TreeError& e) {
    throw UsageError(std::string("--tree: ") + e.what());
  }
  if (!is_ternary(t)) throw UsageError("--tree: tree is not ternary");
  if (2 * t.leaves() > kMaxBruteLeaves) throw UsageError("--tree: too many leaves for brute force");
  header("chaos", {{"tree", t.str()}, {"all_traces", all_traces ? "true" : "false"}});
  auto ks = contractions(t);
  auto ys = pairings(t, t);
  auto cs = contributing_contractions(t);
  std::cout << "contractions=" << ks.size() << '\n';
  std::cout << "pairings=" << ys.size() << '\n';
  std::cout << "contributing=" << cs.size() << '\n';
  for (const auto& k : cs) std::cout << "contributing " << pairs_str(k) << '\n';
  std::map<std::string, std::int64_t> hist;
  std::size_t shown = 0;
  for (const auto& g : ys) {
    auto e = extract_permutation(t, g);
    ++hist[e.perm.str()];
    if (!all_traces && shown >= 50) continue;
    ++shown;
    std::cout << "trace " << pairs_str(g) << " ->";
    for (const auto& c : e.cycles) {
      std::cout << " [";
      for (size_t i = 0; i < c.path.size(); ++i) std::cout << (i ? " " : "") << c.path[i];
      std::cout << ']';
    }
    std::cout << " perm=" << e.perm.str() << " terminal=" << e.terminal.root << ':' << e.terminal.leaf_a << ','
              << e.terminal.leaf_b << '\n';
  }
  if (shown < ys.size()) std::cout << "# " << ys.size() - shown << " further traces omitted (--all-traces)\n";
  for (const auto& [p, n] : hist) std::cout << "preimage " << p << ' ' << n << '\n';
  return 0;
}

int cmd_kernels(bool fast) {
  header("kernels", {{"fast", fast ? "true" : "false"}});
  std::cout << to_csv(kernel_report(fast));
  return 0;
}

int cmd_simulate(const std::string& path, const std::vector<std::string>& sets, const std::string& csv_out,
                 const std::string& json_out) {
  SimConfig cfg;
  try {
    cfg = SimConfig::from_file(path);
    for (const auto& s : sets) {
      auto eq = s.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + s + "'");
      cfg.set(s.substr(0, eq), s.substr(eq + 1));
    }
    cfg.validate();
    if (cfg.n_realizations < 100) throw UsageError("n_realizations must be at least 100");
  } catch (const SpdeError& e) {
    throw UsageError(e.what());
  }
  std::cout << "# wildac simulate\n# config_file=" << path << '\n';
  std::istringstream lines(cfg.str());
  for (std::string l; std::getline(lines, l);) std::cout << "# " << l << '\n';
  auto rep = variance_experiment(cfg);
  if (!csv_out.empty()) {
    std::ofstream f(csv_out);
    if (!f) throw std::runtime_error("cannot write " + csv_out);
    f << rep.csv();
  }
  if (!json_out.empty()) {
    std::ofstream f(json_out);
    if (!f) throw std::runtime_error("cannot write " + json_out);
    f << rep.json() << '\n';
  }
  std::cout << rep.json() << '\n';
  return 0;
}

int cmd_verify(bool fast, const std::vector<int>& only, const std::string& log_path) {
  std::string ids;
  for (int i : only) ids += (ids.empty() ? "" : ",") + std::to_string(i);
  header("verify-all", {{"fast", fast ? "true" : "false"}, {"only", ids.empty() ? "all" : ids}});
  std::ofstream log;
  CheckOptions opt;
  opt.fast = fast;
  if (!log_path.empty()) {
    log.open(log_path);
    if (!log) throw std::runtime_error("cannot write " + log_path);
    opt.log = &log;
  }
  std::vector<int> todo = only;
  if (todo.empty())
    for (int i = 1; i <= kNumCriteria; ++i) todo.push_back(i);
  int failed = 0;
  for (int id : todo) {
    if (opt.log) *opt.log << "criterion " << id << '\n';
    auto r = run_check(id, opt);
    if (opt.log) *opt.log << "  seconds " << r.seconds << '\n';
    std::cout << format_line(r) << '\n' << std::flush;
    if (!r.pass) ++failed;
  }
  std::cout << "# " << todo.size() - failed << '/' << todo.size() << " passed\n";
  return failed ? kFailed : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wildac: Wild expansions, chaos combinatorics and a weakly coupled Allen-Cahn simulator"};
  app.require_subcommand(1);
  app.allow_extras(false);

  int max_inner = 2;
  auto* trees = app.add_subcommand("trees", "table of ternary trees with i(tau) <= N");
  trees->add_option("--max-inner", max_inner, "largest inner-vertex count")->required();

  double zeta = 0.1;
  int max_size = 20;
  auto* butcher = app.add_subcommand("butcher", "Butcher partial sums for h = -y^3 and h = +y^3, y0 = 1");
  butcher->add_option("--zeta", zeta, "expansion variable")->required();
  butcher->add_option("--max-size", max_size, "largest tree size");

  std::string tree_spec;
  bool all_traces = false;
  auto* chaos = app.add_subcommand("chaos", "contractions, pairings and extraction traces of a ternary tree");
  chaos->add_option("--tree", tree_spec, "tree in bracket form, e.g. [ooo]")->required();
  chaos->add_flag("--all-traces", all_traces, "print every extraction trace");

  bool kfast = false;
  auto* kernels = app.add_subcommand("kernels", "kernel integral report (CSV)");
  kernels->add_flag("--fast", kfast, "skip the expensive v-cycle integrals");

  std::string config, csv_out, json_out;
  std::vector<std::string> sets;
  auto* simulate = app.add_subcommand("simulate", "variance experiment from a config file");
  simulate->add_option("--config", config, "key=value config file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--set", sets, "override a config key (key=value), repeatable");
  simulate->add_option("--csv", csv_out, "write per-realization rows here");
  simulate->add_option("--json", json_out, "write the summary JSON here");

  bool vfast = false;
  std::vector<int> only;
  std::string log_path;
  auto* verify = app.add_subcommand("verify-all", "run every acceptance check");
  verify->add_flag("--fast", vfast, "reduced sizes for quick runs");
  verify->add_option("--only", only, "run only these criteria")->check(CLI::Range(1, kNumCriteria))->delimiter(',');
  verify->add_option("--log", log_path, "write diagnostics to this file");

  for (auto* s : {trees, butcher, chaos, kernels, simulate, verify}) s->allow_extras(false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*trees) return cmd_trees(max_inner);
    if (*butcher) return cmd_butcher(zeta, max_size);
    if (*chaos) return cmd_chaos(tree_spec, all_traces);
    if (*kernels) return cmd_kernels(kfast);
    if (*simulate) return cmd_simulate(config, sets, csv_out, json_out);
    if (*verify) return cmd_verify(vfast, only, log_path);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailed;
  }
  return kUsage;
}
