#include <doctest.h>

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

#include "wildac/tree.hpp"

using namespace wac;

namespace {

Tree T(const char* s) { return Tree::parse(s); }

// plane tree as parent array, vertex 0 the root
struct Plane {
  std::vector<int> parent;
};

Plane to_plane(const Tree& t) {
  Plane p;
  std::function<void(const Tree&, int)> go = [&](const Tree& s, int par) {
    int me = static_cast<int>(p.parent.size());
    p.parent.push_back(par);
    for (const auto& k : s.children()) go(k, me);
  };
  go(t, -1);
  return p;
}

// automorphisms by brute force over vertex permutations fixing the parent map
long automorphisms(const Tree& t) {
  auto p = to_plane(t).parent;
  int n = static_cast<int>(p.size());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  long count = 0;
  do {
    bool ok = true;
    for (int v = 0; v < n && ok; ++v) {
      int pv = p[v] < 0 ? -1 : perm[p[v]];
      ok = (p[perm[v]] == pv);
    }
    count += ok;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return count;
}

// tree factorial as the product of all subtree sizes
long subtree_product(const Tree& t) {
  auto p = to_plane(t).parent;
  std::vector<long> sz(p.size(), 1);
  for (int v = static_cast<int>(p.size()) - 1; v > 0; --v) sz[p[v]] += sz[v];
  long r = 1;
  for (long s : sz) r *= s;
  return r;
}

// canonical string by sorting child strings; independent of Tree ordering
std::string canon(const std::string& s, size_t& i) {
  if (s[i] == 'o') {
    ++i;
    return "o";
  }
  ++i;
  std::vector<std::string> kids;
  while (s[i] != ']') kids.push_back(canon(s, i));
  ++i;
  std::sort(kids.begin(), kids.end());
  std::string r = "[";
  for (auto& k : kids) r += k;
  return r + "]";
}

// all plane ternary trees with exactly n inner vertices, as strings
std::vector<std::string> plane_ternary(int n) {
  if (n == 0) return {"o"};
  std::vector<std::string> out;
  for (int a = 0; a < n; ++a)
    for (int b = 0; a + b < n; ++b) {
      int c = n - 1 - a - b;
      for (auto& x : plane_ternary(a))
        for (auto& y : plane_ternary(b))
          for (auto& z : plane_ternary(c)) out.push_back("[" + x + y + z + "]");
    }
  return out;
}

size_t distinct_ternary_upto(int n) {
  std::set<std::string> s;
  for (int k = 0; k <= n; ++k)
    for (auto& x : plane_ternary(k)) {
      size_t i = 0;
      s.insert(canon(x, i));
    }
  return s.size();
}

}  // namespace

TEST_CASE("graft and parsing") {
  CHECK(Tree::graft({Tree()}) == Tree::leaf());
  CHECK(Tree::graft({}) == Tree::leaf());
  CHECK(Tree::graft({Tree(), Tree::leaf()}) == Tree::graft({Tree::leaf()}));
  CHECK(T("[o[ooo]o]") == T("[[ooo]oo]"));
  CHECK(T("[[ooo]oo]").str() == "[oo[ooo]]");
  CHECK(T("1").is_empty());
  CHECK(trident().str() == "[ooo]");
  CHECK_THROWS_AS(T("[oo"), TreeError);
  CHECK_THROWS_AS(T("[ox]"), TreeError);
  auto a = T("[o[oo]]"), b = T("[[oo][ooo]]");
  CHECK(Tree::graft({a, b}) == Tree::graft({b, a}));
}

TEST_CASE("canonical order") {
  CHECK(Tree() < Tree::leaf());
  CHECK(Tree::leaf() < trident());
  CHECK(T("[o]") < T("[oo]"));
  // same size, fewer children first
  CHECK(T("[[oo]]") < T("[o[o]]"));
}

TEST_CASE("symmetry factor and tree factorial") {
  CHECK(symmetry_factor(Tree()) == 1);
  CHECK(symmetry_factor(Tree::leaf()) == 1);
  CHECK(symmetry_factor(trident()) == 6);
  CHECK(symmetry_factor(T("[[ooo]oo]")) == 12);
  CHECK(tree_factorial(Tree::leaf()) == 1);
  CHECK(tree_factorial(trident()) == 4);
  BigInt f = 1;
  for (int n = 1; n <= 10; ++n) {
    f *= n;
    CHECK(tree_factorial(chain(n)) == f);
  }
  for (const auto& t : enumerate_subternary(6)) {
    if (t.is_empty()) continue;
    CHECK(symmetry_factor(t) == automorphisms(t));
    CHECK(tree_factorial(t) == subtree_product(t));
  }
  for (const auto& t : enumerate_ternary(2)) CHECK(symmetry_factor(t) == automorphisms(t));
}

TEST_CASE("stats") {
  auto s = stats(T("[[ooo]oo]"));
  CHECK(s.size == 7);
  CHECK(s.leaves == 5);
  CHECK(s.inner == 2);
  CHECK(s.size == s.leaves + s.inner);
}

TEST_CASE("elementary differentials") {
  auto h = minus_cube();
  CHECK(elementary_differential(Tree(), h, Rational(5)) == 5);
  CHECK(elementary_differential(Tree::leaf(), h, Rational(1)) == -1);
  CHECK(elementary_differential(T("[o]"), h, Rational(1)) == 3);
  // four children: fourth derivative of a cubic vanishes
  CHECK(elementary_differential(T("[oooo]"), h, Rational(2)) == 0);
  CHECK_THROWS_AS(elementary_differential(T("[oooo]"), h, Rational(2), true), TreeError);
  RCubic g{{1, 2, 3, 4}};
  Rational y(1, 3);
  CHECK(g(y) == Rational(1) + Rational(2, 3) + Rational(3, 9) + Rational(4, 27));
  CHECK(g.deriv(1, y) == Rational(2) + Rational(6, 3) + Rational(12, 9));
  CHECK(g.deriv(2, y) == Rational(6) + Rational(24, 3));
  CHECK(g.deriv(3, y) == 24);
}

TEST_CASE("trim and untrim") {
  CHECK(trim(Tree::leaf()).is_empty());
  CHECK(trim(trident()) == Tree::leaf());
  CHECK(trim(T("[[ooo]oo]")) == T("[o]"));
  CHECK(untrim(Tree()) == Tree::leaf());
  CHECK(untrim(Tree::leaf()) == trident());
  CHECK_THROWS_AS(trim(T("[oo]")), TreeError);
  CHECK_THROWS_AS(untrim(T("[oooo]")), TreeError);
  for (const auto& t : enumerate_ternary(5)) {
    CHECK(untrim(trim(t)) == t);
    CHECK(trim(t).size() == t.inner());
  }
  for (const auto& t : enumerate_subternary(5)) CHECK(trim(untrim(t)) == t);
  auto t3 = enumerate_ternary(3);
  for (const auto& a : t3)
    for (const auto& b : t3)
      for (const auto& c : t3) CHECK(trim(Tree::graft({a, b, c})) == Tree::graft({trim(a), trim(b), trim(c)}));
}

TEST_CASE("enumeration") {
  CHECK(enumerate_ternary(0).size() == 1);
  CHECK(enumerate_ternary(1).size() == 2);
  CHECK(enumerate_ternary(2).size() == 3);
  CHECK(enumerate_ternary(4).size() == 9);
  for (int n = 0; n <= 6; ++n) CHECK(enumerate_ternary(n).size() == distinct_ternary_upto(n));
  for (int n = 0; n <= 8; ++n) CHECK(enumerate_ternary(n).size() == enumerate_subternary(n).size());
  CHECK(enumerate_subternary(0).size() == 1);
  CHECK(enumerate_subternary(2).size() == 3);
  for (const auto& t : enumerate_ternary(6)) {
    CHECK(is_ternary(t));
    CHECK(t.leaves() == 2 * t.inner() + 1);
  }
  auto e = enumerate_ternary(5);
  CHECK(std::is_sorted(e.begin(), e.end()));
  CHECK(std::adjacent_find(e.begin(), e.end()) == e.end());
  CHECK_THROWS_AS(enumerate_ternary(11), TreeError);
  CHECK(enumerate_ternary(11, 11).size() > enumerate_ternary(10).size());
}

TEST_CASE("wild coefficient and a factor") {
  CHECK(wild_coefficient(Tree::leaf()) == 1);
  CHECK(wild_coefficient(trident()) == -1);
  CHECK(wild_coefficient(T("[[ooo]oo]")) == 3);
  auto o = Tree::leaf(), tri = trident(), t2 = T("[[ooo]oo]");
  CHECK(a_factor(o, o, o) == 1);
  CHECK(a_factor(o, o, tri) == 3);
  CHECK(a_factor(o, tri, t2) == 6);
  auto t3 = enumerate_ternary(3);
  for (const auto& a : t3)
    for (const auto& b : t3)
      for (const auto& c : t3) {
        auto s = symmetry_factor(Tree::graft({a, b, c}));
        CHECK(a_factor(a, b, c) * s == 6 * symmetry_factor(a) * symmetry_factor(b) * symmetry_factor(c));
      }
  // coefficient recursion c(o) = 1, c([t1 t2 t3]) = -a c1 c2 c3 against the trimmed formula
  std::function<Rational(const Tree&)> rec = [&](const Tree& t) -> Rational {
    if (t.is_leaf()) return 1;
    const auto& k = t.children();
    return -a_factor(k[0], k[1], k[2]) * rec(k[0]) * rec(k[1]) * rec(k[2]);
  };
  for (const auto& t : enumerate_ternary(5)) CHECK(wild_coefficient(t) == rec(t));
}
