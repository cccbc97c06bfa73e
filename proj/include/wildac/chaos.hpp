#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wildac/tree.hpp"

namespace wac {

constexpr int kMaxBruteLeaves = 14;

struct ChaosError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Set of disjoint leaf pairs (a < b), kept sorted. Also used for pairings.
struct Contraction {
  std::vector<std::pair<int, int>> pairs;

  void normalize();
  auto operator<=>(const Contraction&) const = default;
};
using Pairing = Contraction;

// Labeled graph of a tree (or two glued trees) plus leaf pairs.
// Vertex id equals label: root 0, other inner vertices 1..I and leaves
// I+1..I+L, each block in breadth-first order of the canonical representative.
struct ContractedTree {
  std::vector<int> parent;
  std::vector<std::vector<int>> kids;
  std::vector<char> leaf;
  std::vector<char> alive;
  std::vector<int> partner;
  int root = 0;
  int n_inner = 0;  // non-root inner vertices

  static ContractedTree from_tree(const Tree& t);
  // new root whose children are the roots of a and b; the maps send the
  // from_tree labels of a (resp. b) to labels in the glued tree
  static ContractedTree glued(const Tree& a, const Tree& b, std::vector<int>* map_a = nullptr,
                              std::vector<int>* map_b = nullptr);

  int size() const { return static_cast<int>(parent.size()); }
  void apply(const Contraction& c);
  std::vector<int> leaf_labels() const;
  std::vector<int> free_leaves() const;
  int alive_count() const;
  bool terminal() const;
};

struct VCycle {
  std::vector<int> path;  // (i1, j1, j2, i2, j3, j4, ...)
  int length() const { return static_cast<int>(path.size() / 3); }
  std::vector<int> inner() const;
  std::vector<int> leaves() const;
  bool through(int v) const;
  auto operator<=>(const VCycle&) const = default;
};

struct Permutation {
  int n = 0;
  std::vector<std::vector<int>> cycles;  // extraction order, labels 1..n

  std::vector<int> image() const;  // image()[k-1] = pi(k)
  bool is_identity() const;
  std::string str() const;
  static Permutation from_image(const std::vector<int>& img);
};

struct TerminalLoop {
  int root = 0;
  int leaf_a = -1;
  int leaf_b = -1;
};

// ordering constraint s_lo <= s_hi; label -1 stands for time 0
using TimeConstraint = std::pair<int, int>;

struct Extraction {
  std::vector<VCycle> cycles;
  Permutation perm;
  TerminalLoop terminal;
  std::vector<TimeConstraint> constraints;
  bool aborted = false;
};

std::vector<Contraction> contractions(const Tree& t, bool override_guard = false);
std::vector<Pairing> pairings(const Tree& a, const Tree& b, bool override_guard = false);
std::pair<Contraction, Contraction> split_pairing(const Tree& a, const Tree& b, const Pairing& g);

std::vector<VCycle> find_vcycles(const ContractedTree& t);
ContractedTree remove_cycle(const ContractedTree& t, const VCycle& c, std::vector<TimeConstraint>* rec = nullptr);

// stop_on_long_cycle: give up at the first cycle longer than 1 (aborted = true)
Extraction extract_cycles(ContractedTree t, int n_labels, bool stop_on_long_cycle = false);
Extraction extract_permutation(const Tree& t, const Pairing& g);

std::vector<Contraction> contributing_contractions(const Tree& t, bool override_guard = false);

// key: permutation image
std::map<std::vector<int>, std::int64_t> extraction_histogram(const Tree& t, bool override_guard = false);
std::int64_t preimage_size(const Tree& t, const Permutation& p, bool override_guard = false);

// (inner vertices with exactly one leaf child, inner vertices with three)
std::pair<int, int> dead_end_count_check(const Tree& t);

std::vector<TimeConstraint> tree_simplex_constraints(const ContractedTree& t);

std::uint64_t involution_number(int n);
std::uint64_t double_factorial(int n);

nlohmann::json to_json(const ContractedTree& t);
nlohmann::json to_json(const Extraction& e);

}  // namespace wac
