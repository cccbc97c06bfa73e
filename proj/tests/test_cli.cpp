#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#ifndef WILDAC_CLI_PATH
#error "WILDAC_CLI_PATH must point at the wildac executable"
#endif

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string("\"") + WILDAC_CLI_PATH + "\" " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  for (size_t n; (n = fread(buf, 1, sizeof buf, p)) > 0;) r.out.append(buf, n);
  int st = pclose(p);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

int count_rows(const std::string& s) {
  int n = 0;
  size_t i = 0;
  while (i < s.size()) {
    size_t e = s.find('\n', i);
    if (e == std::string::npos) e = s.size();
    if (e > i && s[i] != '#') ++n;
    i = e + 1;
  }
  return n;
}

}  // namespace

TEST_CASE("cli trees") {
  auto r = run("trees --max-inner 1");
  CHECK(r.code == 0);
  CHECK(r.out.rfind("# wildac trees\n# max_inner=1\n", 0) == 0);
  CHECK(count_rows(r.out) == 3);  // header row plus two trees
  CHECK(r.out.find("\no,0,1,1,1,1\n") != std::string::npos);
  CHECK(r.out.find("\n[ooo],1,3,6,4,-1\n") != std::string::npos);
  CHECK(run("trees --max-inner 1").out == r.out);
}

TEST_CASE("cli chaos on the trident") {
  auto r = run("chaos --tree \"[ooo]\"");
  CHECK(r.code == 0);
  CHECK(r.out.find("contractions=4\n") != std::string::npos);
  CHECK(r.out.find("pairings=15\n") != std::string::npos);
  CHECK(r.out.find("contributing=3\n") != std::string::npos);
  CHECK(r.out.find("preimage (1)(2) 9\n") != std::string::npos);
}

TEST_CASE("cli butcher") {
  auto r = run("butcher --zeta 0.1 --max-size 20");
  CHECK(r.code == 0);
  CHECK(r.out.find("# target h=-y^3: 0.9128709291752769") != std::string::npos);
  CHECK(r.out.find("\n20,0.91287092917") != std::string::npos);
}

TEST_CASE("cli exit codes") {
  CHECK(run("").code == 2);
  CHECK(run("bogus").code == 2);
  CHECK(run("trees").code == 2);
  CHECK(run("trees --max-inner 1 --nope").code == 2);
  CHECK(run("trees --max-inner -1").code == 2);
  CHECK(run("chaos --tree \"[oo]\"").code == 2);
  CHECK(run("chaos --tree \"[o\"").code == 2);
  CHECK(run("simulate --config /nonexistent/file.cfg").code == 2);
  CHECK(run("verify-all --only 13").code == 2);
  CHECK(run("--help").code == 0);

  auto dir = std::filesystem::temp_directory_path();
  auto bad = dir / "wildac_cli_bad.cfg";
  std::ofstream(bad) << "epsilon=0.0625\nunknown_key=3\n";
  CHECK(run("simulate --config " + bad.string()).code == 2);
  auto few = dir / "wildac_cli_few.cfg";
  std::ofstream(few) << "epsilon=0.0625\nn_realizations=10\n";
  CHECK(run("simulate --config " + few.string()).code == 2);
  std::filesystem::remove(bad);
  std::filesystem::remove(few);
}

TEST_CASE("cli verify-all subset") {
  auto r = run("verify-all --fast --only 1,2,7");
  CHECK(r.code == 0);
  CHECK(r.out.find("criterion  1 PASS") != std::string::npos);
  CHECK(r.out.find("criterion  7 PASS") != std::string::npos);
  CHECK(r.out.find("# 3/3 passed") != std::string::npos);
  CHECK(run("verify-all --fast --only 1,2,7").out == r.out);
}

TEST_CASE("cli simulate") {
  auto dir = std::filesystem::temp_directory_path();
  auto cfg = dir / "wildac_cli_sim.cfg";
  std::ofstream(cfg) << "# small linear run\nepsilon=0.0625\ngrid_n=64\nbox_length=2\nt_final=0.05\n"
                        "coupling=0\nn_realizations=100\n";
  auto json = dir / "wildac_cli_sim.json";
  auto r = run("simulate --config " + cfg.string() + " --json " + json.string());
  CHECK(r.code == 0);
  CHECK(r.out.find("# epsilon=0.0625") != std::string::npos);
  CHECK(r.out.find("\"empirical_var\"") != std::string::npos);
  CHECK(std::filesystem::exists(json));
  CHECK(run("simulate --config " + cfg.string()).out == r.out);
  std::filesystem::remove(cfg);
  std::filesystem::remove(json);
}
