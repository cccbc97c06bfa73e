// Acceptance run: one PASS/FAIL line per criterion. Diagnostics go to stderr.
// WILDAC_ACCEPTANCE_FAST=1 selects the reduced sizes used by `verify-all --fast`.

#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <string>

#include "wildac/checks.hpp"

int main() {
  wac::CheckOptions opt;
  const char* f = std::getenv("WILDAC_ACCEPTANCE_FAST");
  opt.fast = f && std::string(f) == "1";
  opt.log = &std::cerr;
  std::cout << "acceptance mode=" << (opt.fast ? "fast" : "full") << '\n' << std::flush;
  int failed = 0;
  for (int id = 1; id <= wac::kNumCriteria; ++id) {
    std::cerr << "criterion " << id << '\n';
    auto r = wac::run_check(id, opt);
    std::cout << wac::format_line(r) << "  [" << std::fixed << std::setprecision(1) << r.seconds << "s]\n"
              << std::defaultfloat << std::flush;
    if (!r.pass) ++failed;
  }
  std::cout << (wac::kNumCriteria - failed) << '/' << wac::kNumCriteria << " criteria passed\n";
  return failed ? 1 : 0;
}
