#include "wildac/tree.hpp"

#include <algorithm>
#include <map>

namespace wac {

Tree Tree::leaf() {
  Tree t;
  t.empty_ = false;
  t.size_ = 1;
  t.leaves_ = 1;
  return t;
}

Tree Tree::graft(std::vector<Tree> children) {
  Tree t;
  t.empty_ = false;
  for (auto& c : children)
    if (!c.is_empty()) t.kids_.push_back(std::move(c));
  std::sort(t.kids_.begin(), t.kids_.end());
  t.size_ = 1;
  for (const auto& c : t.kids_) {
    t.size_ += c.size_;
    t.leaves_ += c.leaves_;
  }
  if (t.kids_.empty()) t.leaves_ = 1;
  return t;
}

std::strong_ordering operator<=>(const Tree& a, const Tree& b) {
  if (a.empty_ || b.empty_) return b.empty_ <=> a.empty_;
  if (auto c = a.size_ <=> b.size_; c != 0) return c;
  if (auto c = a.kids_.size() <=> b.kids_.size(); c != 0) return c;
  for (size_t i = 0; i < a.kids_.size(); ++i)
    if (auto c = a.kids_[i] <=> b.kids_[i]; c != 0) return c;
  return std::strong_ordering::equal;
}

std::string Tree::str() const {
  if (empty_) return "1";
  if (kids_.empty()) return "o";
  std::string s = "[";
  for (const auto& k : kids_) s += k.str();
  s += ']';
  return s;
}

namespace {

struct Parser {
  std::string_view s;
  size_t pos = 0;

  void skip() {
    while (pos < s.size() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }

  Tree node() {
    skip();
    if (pos >= s.size()) throw TreeError("unexpected end of tree string");
    char c = s[pos];
    if (c == 'o' || c == '.') {
      ++pos;
      return Tree::leaf();
    }
    if (c == '[') {
      ++pos;
      std::vector<Tree> kids;
      for (;;) {
        skip();
        if (pos >= s.size()) throw TreeError("unbalanced '[' in tree string");
        if (s[pos] == ']') {
          ++pos;
          break;
        }
        if (s[pos] == '1') {  // grafting 1 is a no-op
          ++pos;
          continue;
        }
        kids.push_back(node());
      }
      return Tree::graft(std::move(kids));
    }
    throw TreeError(std::string("unexpected character '") + c + "' in tree string");
  }
};

}  // namespace

Tree Tree::parse(std::string_view s) {
  Parser p{s};
  p.skip();
  if (p.pos < s.size() && s[p.pos] == '1') {
    ++p.pos;
    p.skip();
    if (p.pos != s.size()) throw TreeError("trailing characters in tree string");
    return Tree();
  }
  Tree t = p.node();
  p.skip();
  if (p.pos != s.size()) throw TreeError("trailing characters in tree string");
  return t;
}

BigInt symmetry_factor(const Tree& t) {
  BigInt s = 1;
  const auto& k = t.children();
  for (size_t i = 0; i < k.size();) {
    size_t j = i;
    while (j < k.size() && k[j] == k[i]) ++j;
    BigInt si = symmetry_factor(k[i]);
    for (size_t m = 1; m <= j - i; ++m) s *= BigInt(m) * si;
    i = j;
  }
  return s;
}

BigInt tree_factorial(const Tree& t) {
  if (t.is_empty()) return 1;
  BigInt f = t.size();
  for (const auto& k : t.children()) f *= tree_factorial(k);
  return f;
}

TreeStats stats(const Tree& t) {
  return {t.size(), t.leaves(), t.inner(), symmetry_factor(t), tree_factorial(t)};
}

bool is_ternary(const Tree& t) {
  if (t.is_empty()) return false;
  if (t.is_leaf()) return true;
  if (t.children().size() != 3) return false;
  return std::all_of(t.children().begin(), t.children().end(), is_ternary);
}

bool is_subternary(const Tree& t) {
  if (t.is_empty()) return true;
  if (t.children().size() > 3) return false;
  return std::all_of(t.children().begin(), t.children().end(), is_subternary);
}

Tree trim(const Tree& t) {
  if (!is_ternary(t)) throw TreeError("trim: tree is not ternary: " + t.str());
  if (t.is_leaf()) return Tree();
  std::vector<Tree> k;
  for (const auto& c : t.children()) k.push_back(trim(c));
  return Tree::graft(std::move(k));
}

Tree untrim(const Tree& t) {
  if (t.is_empty()) return Tree::leaf();
  if (t.children().size() > 3) throw TreeError("untrim: vertex with more than 3 children: " + t.str());
  std::vector<Tree> k;
  for (const auto& c : t.children()) k.push_back(untrim(c));
  while (k.size() < 3) k.push_back(Tree::leaf());
  return Tree::graft(std::move(k));
}

namespace {

void check_cap(int n, int cap) {
  if (n < 0) throw TreeError("enumeration bound must be nonnegative");
  if (n > cap) throw TreeError("enumeration bound " + std::to_string(n) + " exceeds cap " + std::to_string(cap));
}

// groups[k] holds all trees of weight k; fills groups up to n by choosing
// multisets of at most `arity` children whose weights sum to k - 1
template <class Weight>
std::vector<std::vector<Tree>> build_groups(int n, int min_arity, int max_arity, Weight weight_of_root_children,
                                            std::vector<Tree> base) {
  std::vector<std::vector<Tree>> g(n + 1);
  g[0] = std::move(base);
  for (int k = 1; k <= n; ++k) {
    int need = weight_of_root_children(k);
    // flat index of all trees with smaller weight, in canonical order
    std::vector<std::pair<const Tree*, int>> pool;
    for (int w = 0; w < k; ++w)
      for (const auto& t : g[w]) pool.push_back({&t, w});
    std::sort(pool.begin(), pool.end(), [](auto& a, auto& b) { return *a.first < *b.first; });
    std::vector<Tree> out;
    std::vector<int> idx;
    auto rec = [&](auto&& self, int start, int left, int slots) -> void {
      int used = static_cast<int>(idx.size());
      if (left == 0 && used >= min_arity) {
        std::vector<Tree> kids;
        for (int i : idx) kids.push_back(*pool[i].first);
        out.push_back(Tree::graft(std::move(kids)));
      }
      if (slots == 0) return;
      for (int i = start; i < static_cast<int>(pool.size()); ++i) {
        int w = pool[i].second;
        if (w > left) continue;
        if (w == 0 && pool[i].first->is_empty()) continue;
        idx.push_back(i);
        self(self, i, left - w, slots - 1);
        idx.pop_back();
      }
    };
    rec(rec, 0, need, max_arity);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    g[k] = std::move(out);
  }
  return g;
}

}  // namespace

std::vector<Tree> enumerate_ternary(int max_inner, int cap) {
  check_cap(max_inner, cap);
  // weight = inner count; children of a new root carry max_inner - 1 in total
  std::vector<std::vector<Tree>> g(max_inner + 1);
  g[0] = {Tree::leaf()};
  for (int k = 1; k <= max_inner; ++k) {
    std::vector<Tree> out;
    for (int a = 0; a <= k - 1; ++a)
      for (int b = a; a + b <= k - 1; ++b) {
        int c = k - 1 - a - b;
        if (c < b) continue;
        for (const auto& ta : g[a])
          for (const auto& tb : g[b])
            for (const auto& tc : g[c]) {
              if (a == b && tb < ta) continue;
              if (b == c && tc < tb) continue;
              out.push_back(Tree::graft({ta, tb, tc}));
            }
      }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    g[k] = std::move(out);
  }
  std::vector<Tree> all;
  for (auto& v : g) all.insert(all.end(), v.begin(), v.end());
  std::sort(all.begin(), all.end());
  return all;
}

std::vector<Tree> enumerate_subternary(int max_size, int cap) {
  check_cap(max_size, cap);
  auto g = build_groups(max_size, 0, 3, [](int k) { return k - 1; }, std::vector<Tree>{Tree()});
  std::vector<Tree> all;
  for (auto& v : g) all.insert(all.end(), v.begin(), v.end());
  std::sort(all.begin(), all.end());
  return all;
}

Rational wild_coefficient(const Tree& t) {
  Tree r = trim(t);
  Rational h = elementary_differential<Rational>(r, minus_cube(), Rational(1));
  return h / Rational(symmetry_factor(r));
}

int a_factor(const Tree& a, const Tree& b, const Tree& c) {
  if (a == b && b == c) return 1;
  if (a == b || b == c || a == c) return 3;
  return 6;
}

Tree trident() { return Tree::graft({Tree::leaf(), Tree::leaf(), Tree::leaf()}); }

Tree chain(int n) {
  if (n <= 0) return Tree();
  Tree t = Tree::leaf();
  for (int i = 1; i < n; ++i) t = Tree::graft({t});
  return t;
}

}  // namespace wac
