#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "wildac/chaos.hpp"

using namespace wac;

namespace {

Tree T(const char* s) { return Tree::parse(s); }

Contraction C(std::vector<std::pair<int, int>> p) {
  Contraction c{std::move(p)};
  c.normalize();
  return c;
}

std::uint64_t factorial(int n) {
  std::uint64_t r = 1;
  for (int k = 2; k <= n; ++k) r *= k;
  return r;
}

// reachability closure of "lo <= hi" over labels -1..n-1
std::vector<std::vector<char>> closure(const std::vector<TimeConstraint>& cs, int n) {
  int m = n + 1;
  std::vector<std::vector<char>> r(m, std::vector<char>(m, 0));
  for (int i = 0; i < m; ++i) r[i][i] = 1;
  for (auto [lo, hi] : cs) r[lo + 1][hi + 1] = 1;
  for (int k = 0; k < m; ++k)
    for (int i = 0; i < m; ++i)
      if (r[i][k])
        for (int j = 0; j < m; ++j)
          if (r[k][j]) r[i][j] = 1;
  return r;
}

}  // namespace

TEST_CASE("labels are breadth first, inner before leaves") {
  std::vector<int> ma, mb;
  auto ct = ContractedTree::glued(T("[[ooo]oo]"), T("[[ooo]oo]"), &ma, &mb);
  CHECK(ct.size() == 15);
  CHECK(ct.n_inner == 4);
  CHECK(ct.parent[1] == 0);
  CHECK(ct.parent[2] == 0);
  CHECK(ct.parent[3] == 1);
  CHECK(ct.parent[4] == 2);
  CHECK(ct.leaf_labels() == std::vector<int>{5, 6, 7, 8, 9, 10, 11, 12, 13, 14});
  CHECK(ct.parent[5] == 1);
  CHECK(ct.parent[7] == 2);
  CHECK(ct.parent[9] == 3);
  CHECK(ct.parent[12] == 4);
  // own labels: root 0, trident base 1, leaves 2..6
  CHECK(ma[0] == 1);
  CHECK(mb[0] == 2);
  CHECK(ma[1] == 3);
  CHECK(mb[1] == 4);
  CHECK(ma[2] == 5);
  CHECK(mb[6] == 14);
}

TEST_CASE("contractions and pairings") {
  CHECK(contractions(Tree::leaf()).size() == 1);
  CHECK(contractions(trident()).size() == 4);
  CHECK(contractions(T("[[ooo]oo]")).size() == 26);
  for (int n = 0; n <= 9; ++n) {
    // involution numbers by a direct sum over pair counts
    std::uint64_t s = 0;
    for (int p = 0; 2 * p <= n; ++p) s += factorial(n) / (factorial(p) * factorial(n - 2 * p) * (1ull << p));
    CHECK(involution_number(n) == s);
  }
  for (const auto& t : enumerate_ternary(3)) CHECK(contractions(t).size() == involution_number(t.leaves()));
  CHECK(pairings(Tree::leaf(), Tree::leaf()).size() == 1);
  CHECK(pairings(trident(), trident()).size() == 15);
  CHECK(pairings(trident(), Tree::leaf()).size() == 3);
  CHECK(pairings(T("[oo]"), Tree::leaf()).empty());
  CHECK_THROWS_AS(pairings(T("[[ooo][ooo][ooo]]"), T("[[ooo][ooo][ooo]]")), ChaosError);
}

TEST_CASE("split pairing and partition") {
  auto tri = trident();
  auto ps = pairings(tri, tri);
  int crossing = 0, internal = 0;
  for (const auto& g : ps) {
    auto [ka, kb] = split_pairing(tri, tri, g);
    CHECK(ka.pairs.size() == kb.pairs.size());
    (ka.pairs.empty() ? crossing : internal)++;
  }
  CHECK(crossing == 6);
  CHECK(internal == 9);
  auto [a0, b0] = split_pairing(tri, tri, C({{3, 6}, {4, 7}, {5, 8}}));
  CHECK(a0.pairs.empty());
  CHECK(b0.pairs.empty());
  auto [a1, b1] = split_pairing(tri, tri, C({{3, 4}, {6, 7}, {5, 8}}));
  CHECK(a1 == C({{1, 2}}));
  CHECK(b1 == C({{1, 2}}));

  for (const auto& t : enumerate_ternary(3)) {
    if (t.inner() == 3) continue;
    std::map<std::pair<Contraction, Contraction>, std::uint64_t> cls;
    for (const auto& g : pairings(t, t)) ++cls[split_pairing(t, t, g)];
    std::uint64_t total = 0;
    for (auto& [k, n] : cls) {
      int free_a = t.leaves() - 2 * static_cast<int>(k.first.pairs.size());
      int free_b = t.leaves() - 2 * static_cast<int>(k.second.pairs.size());
      CHECK(free_a == free_b);
      CHECK(n == factorial(free_a));
      total += n;
    }
    CHECK(total == double_factorial(2 * t.leaves() - 1));
  }
}

TEST_CASE("v-cycles") {
  auto ct = ContractedTree::from_tree(trident());
  ct.apply(C({{1, 2}}));
  auto cs = find_vcycles(ct);
  REQUIRE(cs.size() == 1);
  CHECK(cs[0].length() == 1);
  CHECK(cs[0].path == std::vector<int>{0, 1, 2});

  auto g = ContractedTree::glued(trident(), trident());
  g.apply(C({{3, 6}, {4, 7}, {5, 8}}));
  cs = find_vcycles(g);
  CHECK(std::any_of(cs.begin(), cs.end(), [](const VCycle& c) { return c.length() == 2; }));
  CHECK(std::is_sorted(cs.begin(), cs.end(), [](const VCycle& x, const VCycle& y) { return x.path < y.path; }));
  for (const auto& c : cs) {
    CHECK(c.path[1] < c.path.back());
    auto in = c.inner();
    CHECK(in[0] == *std::min_element(in.begin(), in.end()));
  }
}

TEST_CASE("cycle removal") {
  auto ct = ContractedTree::from_tree(T("[[ooo]]"));
  ct.apply(C({{2, 3}}));
  auto cs = find_vcycles(ct);
  REQUIRE(cs.size() == 1);
  auto r = remove_cycle(ct, cs[0]);
  CHECK(r.alive_count() == ct.alive_count() - 3);
  CHECK(r.kids[0] == std::vector<int>{4});
  CHECK(r.leaf[4]);
  CHECK(r.free_leaves() == std::vector<int>{4});
  CHECK_THROWS_AS(remove_cycle(r, cs[0]), ChaosError);

  auto root_cycle = ContractedTree::from_tree(trident());
  root_cycle.apply(C({{1, 2}}));
  CHECK_THROWS_AS(remove_cycle(root_cycle, find_vcycles(root_cycle)[0]), ChaosError);
}

TEST_CASE("permutation extraction") {
  auto tri = trident();
  auto id = extract_permutation(tri, C({{3, 4}, {6, 7}, {5, 8}}));
  CHECK(id.perm.is_identity());
  CHECK(id.cycles.size() == 2);
  auto sw = extract_permutation(tri, C({{3, 6}, {4, 7}, {5, 8}}));
  CHECK(sw.perm.str() == "(1 2)");

  // the worked example: tridents labeled 3 and 4, bases 1 and 2
  auto t = T("[[ooo]oo]");
  auto ex = extract_permutation(t, C({{9, 14}, {10, 13}, {11, 5}, {6, 12}, {7, 8}}));
  CHECK(ex.perm.str() == "(1 3 4)(2)");
  CHECK(ex.cycles[0].path == std::vector<int>{1, 5, 11, 3, 9, 14, 4, 12, 6});
  CHECK(preimage_size(t, ex.perm) >= 2);

  auto e0 = extract_permutation(Tree::leaf(), C({{1, 2}}));
  CHECK(e0.cycles.empty());
  CHECK(e0.perm.n == 0);
  CHECK(e0.perm.is_identity());

  CHECK_THROWS_AS(extract_permutation(tri, C({{3, 6}, {4, 7}})), ChaosError);

  for (const auto& s : enumerate_ternary(2))
    for (const auto& g : pairings(s, s)) {
      auto e = extract_permutation(s, g);
      size_t tot = 0;
      bool all_one = true;
      for (const auto& c : e.cycles) {
        tot += c.length();
        all_one = all_one && c.length() == 1;
      }
      CHECK(tot == static_cast<size_t>(2 * s.inner()));
      CHECK(e.cycles.size() == Permutation::from_image(e.perm.image()).cycles.size());
      CHECK(e.perm.is_identity() == all_one);
      auto tl = e.terminal;
      CHECK(tl.leaf_a >= 0);
      CHECK(tl.leaf_b >= 0);
    }
}

TEST_CASE("identity permutations come from contributing contractions") {
  for (const auto& s : enumerate_ternary(2)) {
    auto cc = contributing_contractions(s);
    std::set<Contraction> cset(cc.begin(), cc.end());
    for (const auto& g : pairings(s, s)) {
      auto [ka, kb] = split_pairing(s, s, g);
      bool single_cross = g.pairs.size() == ka.pairs.size() + kb.pairs.size() + 1;
      bool expect = cset.count(ka) && cset.count(kb) && single_cross;
      CHECK(extract_permutation(s, g).perm.is_identity() == expect);
    }
  }
}

TEST_CASE("time simplex constraints") {
  for (const auto& s : enumerate_ternary(2)) {
    if (s.is_leaf()) continue;
    auto base = ContractedTree::glued(s, s);
    int n = base.size();
    auto want = closure(tree_simplex_constraints(base), n);
    for (const auto& g : pairings(s, s)) {
      auto got = closure(extract_permutation(s, g).constraints, n);
      for (int u = 1; u <= base.n_inner; ++u)
        for (int v = 0; v <= base.n_inner; ++v) CHECK(got[u + 1][v + 1] == want[u + 1][v + 1]);
    }
  }
}

TEST_CASE("contributing contractions") {
  auto c0 = contributing_contractions(Tree::leaf());
  REQUIRE(c0.size() == 1);
  CHECK(c0[0].pairs.empty());
  auto c1 = contributing_contractions(trident());
  CHECK(c1.size() == 3);
  for (const auto& k : c1) CHECK(k.pairs.size() == 1);
  for (const auto& s : enumerate_ternary(3)) {
    auto cc = contributing_contractions(s);
    std::size_t p = 1;
    for (int k = 0; k < s.inner(); ++k) p *= 3;
    CHECK(cc.size() == p);
    for (const auto& k : cc) CHECK(s.leaves() - 2 * static_cast<int>(k.pairs.size()) == 1);
  }
}

TEST_CASE("preimages") {
  Permutation id2{2, {{1}, {2}}};
  CHECK(preimage_size(trident(), id2) == 9);
  CHECK(preimage_size(Tree::leaf(), Permutation{}) == 1);
  auto h = extraction_histogram(trident());
  std::int64_t tot = 0;
  for (auto& [k, n] : h) tot += n;
  CHECK(tot == 15);
  CHECK(h.size() == 2);
}

TEST_CASE("dead ends") {
  CHECK(dead_end_count_check(trident()) == std::pair<int, int>{0, 1});
  CHECK(dead_end_count_check(T("[[ooo]oo]")) == std::pair<int, int>{0, 1});
  CHECK(dead_end_count_check(T("[[ooo][ooo]o]")) == std::pair<int, int>{1, 2});
  CHECK_THROWS_AS(dead_end_count_check(Tree::leaf()), ChaosError);
  for (const auto& s : enumerate_ternary(6)) {
    if (s.is_leaf()) continue;
    auto [l, t] = dead_end_count_check(s);
    CHECK(l <= t - 1);
  }
}

TEST_CASE("json") {
  auto e = extract_permutation(trident(), C({{3, 6}, {4, 7}, {5, 8}}));
  auto j = to_json(e);
  CHECK(j["permutation"] == "(1 2)");
  CHECK(j["cycles"][0]["cycle_length"] == 2);
  CHECK(j["cycles"][0]["cycle_inner_labels"] == nlohmann::json({1, 2}));
  auto g = ContractedTree::glued(trident(), trident());
  g.apply(C({{3, 6}}));
  auto jt = to_json(g);
  CHECK(jt["vertices"].size() == 9);
  CHECK(jt["pairs"].size() == 1);
}

TEST_CASE("representative independence") {
  auto a = T("[oo[ooo]]"), b = T("[[ooo]oo]");
  auto g = C({{9, 14}, {10, 13}, {11, 5}, {6, 12}, {7, 8}});
  CHECK(extract_permutation(a, g).perm.str() == extract_permutation(b, g).perm.str());
}
