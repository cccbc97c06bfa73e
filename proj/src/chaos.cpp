#include "wildac/chaos.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <sstream>

namespace wac {

void Contraction::normalize() {
  for (auto& p : pairs)
    if (p.first > p.second) std::swap(p.first, p.second);
  std::sort(pairs.begin(), pairs.end());
}

namespace {

struct Slot {
  const Tree* t;
  int parent;  // slot index, -1 for root
  int copy;    // which top-level tree, -1 for a synthetic root
  int pos;     // breadth-first index inside its copy
};

ContractedTree build(const std::vector<const Tree*>& tops, bool synthetic, std::vector<Slot>* out_slots) {
  std::vector<Slot> slots;
  std::deque<int> q;
  std::vector<int> per_copy(tops.size(), 0);
  if (synthetic) {
    slots.push_back({nullptr, -1, -1, 0});
    for (size_t c = 0; c < tops.size(); ++c) {
      if (tops[c]->is_empty()) throw ChaosError("cannot glue the empty tree");
      slots.push_back({tops[c], 0, static_cast<int>(c), per_copy[c]++});
      q.push_back(static_cast<int>(slots.size()) - 1);
    }
  } else {
    if (tops[0]->is_empty()) throw ChaosError("empty tree has no vertices");
    slots.push_back({tops[0], -1, 0, per_copy[0]++});
    q.push_back(0);
  }
  while (!q.empty()) {
    int s = q.front();
    q.pop_front();
    for (const auto& k : slots[s].t->children()) {
      int c = slots[s].copy;
      slots.push_back({&k, s, c, per_copy[c]++});
      q.push_back(static_cast<int>(slots.size()) - 1);
    }
  }
  int n = static_cast<int>(slots.size());
  auto is_leaf = [&](int s) { return slots[s].t && slots[s].t->is_leaf(); };
  std::vector<int> label(n, -1);
  int next = 0;
  label[0] = next++;
  for (int s = 1; s < n; ++s)
    if (!is_leaf(s)) label[s] = next++;
  int n_inner = next - 1;
  for (int s = 1; s < n; ++s)
    if (is_leaf(s)) label[s] = next++;

  ContractedTree ct;
  ct.parent.assign(n, -1);
  ct.kids.assign(n, {});
  ct.leaf.assign(n, 0);
  ct.alive.assign(n, 1);
  ct.partner.assign(n, -1);
  ct.n_inner = n_inner;
  for (int s = 0; s < n; ++s) {
    int v = label[s];
    ct.leaf[v] = is_leaf(s) ? 1 : 0;
    if (slots[s].parent >= 0) {
      ct.parent[v] = label[slots[s].parent];
      ct.kids[ct.parent[v]].push_back(v);
    }
  }
  if (out_slots) {
    // reuse the slot vector to report labels
    for (int s = 0; s < n; ++s) slots[s].parent = label[s];
    *out_slots = std::move(slots);
  }
  return ct;
}

}  // namespace

ContractedTree ContractedTree::from_tree(const Tree& t) { return build({&t}, false, nullptr); }

ContractedTree ContractedTree::glued(const Tree& a, const Tree& b, std::vector<int>* map_a, std::vector<int>* map_b) {
  std::vector<Slot> slots;
  ContractedTree ct = build({&a, &b}, true, &slots);
  if (map_a || map_b) {
    // from_tree labels indexed by breadth-first position within each copy
    std::vector<Slot> sa, sb;
    build({&a}, false, &sa);
    build({&b}, false, &sb);
    std::vector<int> pos_label_a(sa.size()), pos_label_b(sb.size());
    for (const auto& s : sa) pos_label_a[s.pos] = s.parent;
    for (const auto& s : sb) pos_label_b[s.pos] = s.parent;
    if (map_a) map_a->assign(sa.size(), -1);
    if (map_b) map_b->assign(sb.size(), -1);
    for (const auto& s : slots) {
      if (s.copy == 0 && map_a) (*map_a)[pos_label_a[s.pos]] = s.parent;
      if (s.copy == 1 && map_b) (*map_b)[pos_label_b[s.pos]] = s.parent;
    }
  }
  return ct;
}

void ContractedTree::apply(const Contraction& c) {
  for (auto [a, b] : c.pairs) {
    if (a == b || a < 0 || b < 0 || a >= size() || b >= size()) throw ChaosError("pair with invalid labels");
    if (!leaf[a] || !leaf[b]) throw ChaosError("pair touches a non-leaf vertex");
    if (!alive[a] || !alive[b]) throw ChaosError("pair touches a removed vertex");
    if (partner[a] >= 0 || partner[b] >= 0) throw ChaosError("leaf occurs in more than one pair");
    partner[a] = b;
    partner[b] = a;
  }
}

std::vector<int> ContractedTree::leaf_labels() const {
  std::vector<int> v;
  for (int i = 0; i < size(); ++i)
    if (leaf[i]) v.push_back(i);
  return v;
}

std::vector<int> ContractedTree::free_leaves() const {
  std::vector<int> v;
  for (int i = 0; i < size(); ++i)
    if (leaf[i] && alive[i] && partner[i] < 0) v.push_back(i);
  return v;
}

int ContractedTree::alive_count() const { return static_cast<int>(std::count(alive.begin(), alive.end(), 1)); }

bool ContractedTree::terminal() const {
  if (leaf[root] || kids[root].size() != 2) return false;
  int a = kids[root][0], b = kids[root][1];
  return leaf[a] && leaf[b] && partner[a] == b;
}

std::vector<int> VCycle::inner() const {
  std::vector<int> v;
  for (size_t k = 0; k < path.size(); k += 3) v.push_back(path[k]);
  return v;
}

std::vector<int> VCycle::leaves() const {
  std::vector<int> v;
  for (size_t k = 0; k < path.size(); k += 3) {
    v.push_back(path[k + 1]);
    v.push_back(path[k + 2]);
  }
  return v;
}

bool VCycle::through(int v) const { return std::find(path.begin(), path.end(), v) != path.end(); }

std::vector<int> Permutation::image() const {
  std::vector<int> img(n);
  std::iota(img.begin(), img.end(), 1);
  for (const auto& c : cycles)
    for (size_t k = 0; k < c.size(); ++k) img[c[k] - 1] = c[(k + 1) % c.size()];
  return img;
}

bool Permutation::is_identity() const {
  auto img = image();
  for (int k = 0; k < n; ++k)
    if (img[k] != k + 1) return false;
  return true;
}

std::string Permutation::str() const {
  if (cycles.empty()) return "()";
  std::ostringstream os;
  for (const auto& c : cycles) {
    os << '(';
    for (size_t k = 0; k < c.size(); ++k) os << (k ? " " : "") << c[k];
    os << ')';
  }
  return os.str();
}

Permutation Permutation::from_image(const std::vector<int>& img) {
  Permutation p;
  p.n = static_cast<int>(img.size());
  std::vector<char> seen(img.size(), 0);
  for (int s = 1; s <= p.n; ++s) {
    if (seen[s - 1]) continue;
    std::vector<int> c;
    for (int x = s; !seen[x - 1]; x = img[x - 1]) {
      seen[x - 1] = 1;
      c.push_back(x);
    }
    p.cycles.push_back(std::move(c));
  }
  return p;
}

namespace {

void check_leaves(int n, bool override_guard) {
  if (!override_guard && n > kMaxBruteLeaves)
    throw ChaosError("brute force over " + std::to_string(n) + " leaves exceeds the guard of " +
                     std::to_string(kMaxBruteLeaves));
}

void matchings(const std::vector<int>& pts, bool perfect, std::vector<Contraction>& out) {
  std::vector<char> used(pts.size(), 0);
  Contraction cur;
  auto rec = [&](auto&& self, size_t i) -> void {
    while (i < pts.size() && used[i]) ++i;
    if (i == pts.size()) {
      out.push_back(cur);
      out.back().normalize();
      return;
    }
    used[i] = 1;
    if (!perfect) self(self, i + 1);
    for (size_t j = i + 1; j < pts.size(); ++j) {
      if (used[j]) continue;
      used[j] = 1;
      cur.pairs.push_back({pts[i], pts[j]});
      self(self, i + 1);
      cur.pairs.pop_back();
      used[j] = 0;
    }
    used[i] = 0;
  };
  rec(rec, 0);
}

}  // namespace

std::vector<Contraction> contractions(const Tree& t, bool override_guard) {
  auto ct = ContractedTree::from_tree(t);
  auto lv = ct.leaf_labels();
  check_leaves(static_cast<int>(lv.size()), override_guard);
  std::vector<Contraction> out;
  matchings(lv, false, out);
  return out;
}

std::vector<Pairing> pairings(const Tree& a, const Tree& b, bool override_guard) {
  auto ct = ContractedTree::glued(a, b);
  auto lv = ct.leaf_labels();
  check_leaves(static_cast<int>(lv.size()), override_guard);
  std::vector<Pairing> out;
  if (lv.size() % 2) return out;
  matchings(lv, true, out);
  return out;
}

std::pair<Contraction, Contraction> split_pairing(const Tree& a, const Tree& b, const Pairing& g) {
  std::vector<int> ma, mb;
  auto ct = ContractedTree::glued(a, b, &ma, &mb);
  std::vector<int> side(ct.size(), -1), own(ct.size(), -1);
  for (size_t i = 0; i < ma.size(); ++i) side[ma[i]] = 0, own[ma[i]] = static_cast<int>(i);
  for (size_t i = 0; i < mb.size(); ++i) side[mb[i]] = 1, own[mb[i]] = static_cast<int>(i);
  ct.apply(g);
  if (!ct.free_leaves().empty()) throw ChaosError("split_pairing: pairing is not complete");
  Contraction ka, kb;
  for (auto [x, y] : g.pairs) {
    if (side[x] == 0 && side[y] == 0) ka.pairs.push_back({own[x], own[y]});
    if (side[x] == 1 && side[y] == 1) kb.pairs.push_back({own[x], own[y]});
  }
  ka.normalize();
  kb.normalize();
  return {ka, kb};
}

std::vector<VCycle> find_vcycles(const ContractedTree& t) {
  std::vector<VCycle> out;
  int n = t.size();
  std::vector<char> on_path(n, 0);
  std::vector<int> path;
  int v0 = 0;
  auto rec = [&](auto&& self, int v, int entry) -> void {
    for (int a : t.kids[v]) {
      if (!t.alive[a] || !t.leaf[a] || a == entry) continue;
      int b = t.partner[a];
      if (b < 0 || !t.alive[b]) continue;
      int w = t.parent[b];
      if (w < 0 || !t.alive[w]) continue;
      if (w == v0) {
        if (path.size() == 1) {
          // two sibling leaves of v0 paired together
          if (a < b) out.push_back({{v0, a, b}});
        } else if (b != path[1] && path[1] < b) {
          path.push_back(a);
          path.push_back(b);
          out.push_back({path});
          path.pop_back();
          path.pop_back();
        }
        continue;
      }
      if (w < v0 || on_path[w]) continue;
      path.push_back(a);
      path.push_back(b);
      path.push_back(w);
      on_path[w] = 1;
      self(self, w, b);
      on_path[w] = 0;
      path.resize(path.size() - 3);
    }
  };
  for (v0 = 0; v0 < n; ++v0) {
    if (!t.alive[v0] || t.leaf[v0]) continue;
    path.assign(1, v0);
    on_path[v0] = 1;
    rec(rec, v0, -1);
    on_path[v0] = 0;
  }
  std::sort(out.begin(), out.end(), [](const VCycle& x, const VCycle& y) {
    return std::lexicographical_compare(x.path.begin(), x.path.end(), y.path.begin(), y.path.end());
  });
  return out;
}

ContractedTree remove_cycle(const ContractedTree& t, const VCycle& c, std::vector<TimeConstraint>* rec) {
  const auto& p = c.path;
  int m = c.length();
  if (m < 1 || p.size() % 3) throw ChaosError("remove_cycle: malformed cycle");
  if (c.through(t.root)) throw ChaosError("remove_cycle: cycle passes through the root");
  for (int k = 0; k < m; ++k) {
    int v = p[3 * k], a = p[3 * k + 1], b = p[3 * k + 2], w = p[(3 * k + 3) % p.size()];
    bool ok = v >= 0 && v < t.size() && a >= 0 && a < t.size() && b >= 0 && b < t.size() && t.alive[v] && t.alive[a] &&
              t.alive[b] && !t.leaf[v] && t.leaf[a] && t.leaf[b] && t.parent[a] == v && t.partner[a] == b &&
              t.parent[b] == w;
    if (!ok) throw ChaosError("remove_cycle: not a v-cycle of this tree");
  }
  ContractedTree r = t;
  std::vector<int> rest(m, -1);
  for (int k = 0; k < m; ++k) {
    int v = p[3 * k];
    int out_leaf = p[3 * k + 1];
    int in_leaf = p[(3 * k + p.size() - 1) % p.size()];
    for (int x : t.kids[v])
      if (x != out_leaf && x != in_leaf) {
        if (rest[k] >= 0) throw ChaosError("remove_cycle: inner vertex has more than one off-cycle child");
        rest[k] = x;
      }
    if (rest[k] < 0) throw ChaosError("remove_cycle: inner vertex has no off-cycle child");
    if (rec) {
      rec->push_back({t.leaf[rest[k]] ? -1 : rest[k], v});
      rec->push_back({v, t.parent[v]});
    }
  }
  for (int x : c.leaves()) {
    r.alive[x] = 0;
    r.partner[x] = -1;
    auto& ks = r.kids[r.parent[x]];
    ks.erase(std::find(ks.begin(), ks.end(), x));
  }
  for (int k = 0; k < m; ++k) {
    // the surviving child may itself have been spliced already
    int v = p[3 * k], ch = r.kids[v].at(0), up = r.parent[v];
    auto& ks = r.kids[up];
    *std::find(ks.begin(), ks.end(), v) = ch;
    r.parent[ch] = up;
    r.kids[v].clear();
    r.alive[v] = 0;
  }
  return r;
}

Extraction extract_cycles(ContractedTree t, int n_labels, bool stop_on_long_cycle) {
  Extraction e;
  while (!t.terminal()) {
    auto cs = find_vcycles(t);
    const VCycle* pick = nullptr;
    for (const auto& c : cs)
      if (!c.through(t.root)) {
        pick = &c;
        break;
      }
    if (!pick) throw ChaosError("no v-cycle avoiding the root in a non-terminal state");
    if (stop_on_long_cycle && pick->length() > 1) {
      e.aborted = true;
      return e;
    }
    t = remove_cycle(t, *pick, &e.constraints);
    e.cycles.push_back(*pick);
  }
  e.terminal = {t.root, t.kids[t.root][0], t.kids[t.root][1]};
  e.perm.n = n_labels;
  for (const auto& c : e.cycles) e.perm.cycles.push_back(c.inner());
  return e;
}

Extraction extract_permutation(const Tree& t, const Pairing& g) {
  if (!is_ternary(t)) throw ChaosError("extract_permutation: tree is not ternary");
  auto ct = ContractedTree::glued(t, t);
  ct.apply(g);
  if (!ct.free_leaves().empty()) throw ChaosError("extract_permutation: pairing is not complete");
  return extract_cycles(std::move(ct), 2 * t.inner());
}

std::vector<Contraction> contributing_contractions(const Tree& t, bool override_guard) {
  if (!is_ternary(t)) throw ChaosError("contributing_contractions: tree is not ternary");
  if (!override_guard && t.inner() > 5) throw ChaosError("contributing_contractions: more than 5 inner vertices");
  std::vector<int> ma, mb;
  const auto base = ContractedTree::glued(t, t, &ma, &mb);
  std::vector<Contraction> out;
  for (const auto& k : contractions(t, true)) {
    Contraction both;
    for (auto [x, y] : k.pairs) {
      both.pairs.push_back({ma[x], ma[y]});
      both.pairs.push_back({mb[x], mb[y]});
    }
    auto ct = base;
    ct.apply(both);
    std::vector<int> left, right;
    for (int x : ct.free_leaves()) {
      bool in_a = std::find(ma.begin(), ma.end(), x) != ma.end();
      (in_a ? left : right).push_back(x);
    }
    bool found = false;
    do {
      auto g = ct;
      for (size_t i = 0; i < left.size(); ++i) {
        g.partner[left[i]] = right[i];
        g.partner[right[i]] = left[i];
      }
      auto e = extract_cycles(std::move(g), 2 * t.inner(), true);
      if (!e.aborted && e.perm.is_identity()) found = true;
    } while (!found && std::next_permutation(right.begin(), right.end()));
    if (found) out.push_back(k);
  }
  return out;
}

std::map<std::vector<int>, std::int64_t> extraction_histogram(const Tree& t, bool override_guard) {
  if (!is_ternary(t)) throw ChaosError("extraction_histogram: tree is not ternary");
  if (!override_guard && t.inner() > 3) throw ChaosError("preimage counting limited to 3 inner vertices");
  std::map<std::vector<int>, std::int64_t> h;
  for (const auto& g : pairings(t, t, override_guard)) ++h[extract_permutation(t, g).perm.image()];
  return h;
}

std::int64_t preimage_size(const Tree& t, const Permutation& p, bool override_guard) {
  if (p.n != 2 * t.inner()) throw ChaosError("preimage_size: permutation degree does not match 2 i(tau)");
  auto h = extraction_histogram(t, override_guard);
  auto it = h.find(p.image());
  return it == h.end() ? 0 : it->second;
}

std::pair<int, int> dead_end_count_check(const Tree& t) {
  if (!is_ternary(t)) throw ChaosError("dead_end_count_check: tree is not ternary");
  if (t.is_leaf()) throw ChaosError("dead_end_count_check: undefined for the single vertex tree");
  int lolli = 0, tri = 0;
  auto rec = [&](auto&& self, const Tree& s) -> void {
    if (s.is_leaf()) return;
    int l = 0;
    for (const auto& k : s.children()) {
      l += k.is_leaf();
      self(self, k);
    }
    lolli += (l == 1);
    tri += (l == 3);
  };
  rec(rec, t);
  return {lolli, tri};
}

std::vector<TimeConstraint> tree_simplex_constraints(const ContractedTree& t) {
  std::vector<TimeConstraint> v;
  for (int x = 0; x < t.size(); ++x)
    if (x != t.root && t.alive[x] && !t.leaf[x]) v.push_back({x, t.parent[x]});
  return v;
}

std::uint64_t involution_number(int n) {
  std::uint64_t a = 1, b = 1;  // a(k-1), a(k)
  for (int k = 2; k <= n; ++k) {
    std::uint64_t c = b + static_cast<std::uint64_t>(k - 1) * a;
    a = b;
    b = c;
  }
  return n <= 0 ? 1 : b;
}

std::uint64_t double_factorial(int n) {
  std::uint64_t r = 1;
  for (int k = n; k > 1; k -= 2) r *= static_cast<std::uint64_t>(k);
  return r;
}

nlohmann::json to_json(const ContractedTree& t) {
  nlohmann::json j;
  j["root"] = t.root;
  auto& vs = j["vertices"] = nlohmann::json::array();
  for (int x = 0; x < t.size(); ++x) {
    if (!t.alive[x]) continue;
    vs.push_back({{"label", x}, {"parent", t.parent[x]}, {"leaf", static_cast<bool>(t.leaf[x])}});
  }
  auto& ps = j["pairs"] = nlohmann::json::array();
  for (int x = 0; x < t.size(); ++x)
    if (t.alive[x] && t.partner[x] > x) ps.push_back({x, t.partner[x]});
  return j;
}

nlohmann::json to_json(const Extraction& e) {
  nlohmann::json j;
  auto& cs = j["cycles"] = nlohmann::json::array();
  for (const auto& c : e.cycles)
    cs.push_back({{"cycle_inner_labels", c.inner()}, {"cycle_length", c.length()}, {"path", c.path}});
  j["permutation"] = e.perm.str();
  j["terminal"] = {{"root", e.terminal.root}, {"leaves", {e.terminal.leaf_a, e.terminal.leaf_b}}};
  return j;
}

}  // namespace wac
