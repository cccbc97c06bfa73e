#pragma once

#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace wac {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

constexpr int kDefaultEnumCap = 10;

struct TreeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unordered rooted tree kept in canonical form: children sorted
// nondecreasing, Empty never a child.
class Tree {
 public:
  Tree() = default;  // the empty tree 1

  static Tree empty() { return Tree(); }
  static Tree leaf();
  static Tree graft(std::vector<Tree> children);

  bool is_empty() const { return empty_; }
  bool is_leaf() const { return !empty_ && kids_.empty(); }
  const std::vector<Tree>& children() const { return kids_; }

  int size() const { return size_; }
  int leaves() const { return leaves_; }
  int inner() const { return size_ - leaves_; }

  std::string str() const;
  static Tree parse(std::string_view s);

  friend std::strong_ordering operator<=>(const Tree& a, const Tree& b);
  friend bool operator==(const Tree& a, const Tree& b) {
    return (a <=> b) == std::strong_ordering::equal;
  }

 private:
  bool empty_ = true;
  std::vector<Tree> kids_;
  int size_ = 0;
  int leaves_ = 0;
};

struct TreeStats {
  int size = 0;
  int leaves = 0;
  int inner = 0;
  BigInt symmetry;
  BigInt factorial;
};

// h(y) = c[0] + c[1] y + c[2] y^2 + c[3] y^3
template <class T>
struct Cubic {
  T c[4] = {0, 0, 0, 0};

  T deriv(int n, const T& y) const {
    if (n > 3) return T(0);
    static const int fall[4][4] = {{1, 1, 1, 1}, {0, 1, 2, 3}, {0, 0, 2, 6}, {0, 0, 0, 6}};
    T acc = 0, p = 1;
    for (int k = n; k <= 3; ++k) {
      acc += T(fall[n][k]) * c[k] * p;
      p *= y;
    }
    return acc;
  }
  T operator()(const T& y) const { return deriv(0, y); }
};

using RCubic = Cubic<Rational>;

inline RCubic minus_cube() { return RCubic{{0, 0, 0, -1}}; }
inline RCubic plus_cube() { return RCubic{{0, 0, 0, 1}}; }

BigInt symmetry_factor(const Tree& t);
BigInt tree_factorial(const Tree& t);
TreeStats stats(const Tree& t);

template <class T>
T elementary_differential(const Tree& t, const Cubic<T>& h, const T& y, bool strict = false) {
  if (t.is_empty()) return y;
  const auto& kids = t.children();
  int n = static_cast<int>(kids.size());
  if (strict && n > 3) throw TreeError("vertex with more than 3 children under strict mode");
  T v = h.deriv(n, y);
  for (const auto& k : kids) {
    if (v == 0) break;
    v *= elementary_differential(k, h, y, strict);
  }
  return v;
}

bool is_ternary(const Tree& t);
bool is_subternary(const Tree& t);

Tree trim(const Tree& t);
Tree untrim(const Tree& t);

std::vector<Tree> enumerate_ternary(int max_inner, int cap = kDefaultEnumCap);
std::vector<Tree> enumerate_subternary(int max_size, int cap = kDefaultEnumCap);

Rational wild_coefficient(const Tree& t);
int a_factor(const Tree& a, const Tree& b, const Tree& c);

// frequently used shapes
Tree trident();
Tree chain(int n);

}  // namespace wac
