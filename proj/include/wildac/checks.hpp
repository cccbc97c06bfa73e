#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace wac {

struct CheckOptions {
  bool fast = false;
  std::ostream* log = nullptr;  // per-criterion diagnostics
};

struct CheckResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

constexpr int kNumCriteria = 12;

CheckResult run_check(int id, const CheckOptions& opt);
std::vector<CheckResult> run_all_checks(const CheckOptions& opt, std::ostream* progress = nullptr);
std::string format_line(const CheckResult& r);

}  // namespace wac
