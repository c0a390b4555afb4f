#pragma once

#include <cstdint>
#include <vector>

#include "srbm/graph.hpp"

namespace srbm {

// Rooted tree in contiguous node arrays. Nodes are stored in BFS order, so
// the children of v occupy the index range [child_lo[v], child_hi[v]).
// `leaves` is the declared leaf set: depth-R nodes plus parents exposed by
// Marked-leaf removal; childless internal nodes are never leaves.
struct Tree {
  std::vector<int> parent;  // -1 for the root
  std::vector<int> child_lo, child_hi;
  std::vector<int> depth;
  std::vector<int8_t> spin;
  std::vector<Marking> mark;
  std::vector<int> leaves;
  int R = 0;  // declared depth

  int size() const { return int(parent.size()); }
  int num_children(int v) const { return child_hi[v] - child_lo[v]; }
  bool is_root(int v) const { return parent[v] < 0; }
  // Tree-as-graph degree: children plus the parent edge for non-roots.
  int graph_degree(int v) const { return num_children(v) + (is_root(v) ? 0 : 1); }
  std::vector<uint8_t> leaf_flags() const;

  void check_consistency() const;
};

// Incremental construction helper. Nodes may be added in any order that adds
// parents before children; finalize() re-sorts into BFS order and rebuilds
// the contiguous child ranges.
class TreeBuilder {
 public:
  int add_root(int8_t spin, Marking mark = Marking::None);
  int add_child(int parent, int8_t spin, Marking mark = Marking::None);
  int size() const { return int(parent_.size()); }
  int8_t spin(int v) const { return spin_[v]; }
  void set_spin(int v, int8_t s) { spin_[v] = s; }
  void set_mark(int v, Marking m) { mark_[v] = m; }

  // Leaf set defaults to all depth-R nodes; pass explicit builder-node ids to
  // override (e.g. exposed parents).
  Tree finalize(int R) const;
  Tree finalize(int R, const std::vector<int>& leaf_ids) const;

 private:
  std::vector<int> parent_;
  std::vector<int8_t> spin_;
  std::vector<Marking> mark_;
};

// Effective noise after marginalizing a Marked node:
// 1/2 - (1/2) sqrt((1-3 eps)/(1+eps)) for eps <= 1/3, else 1/2.
double eps_prime(double eps);

// Relative-spin law of the two children of a Marked, uncut root:
// {++, +-, -+, --} with probabilities {(1-eps)^2, eps(1-eps), eps(1-eps),
// eps^2 (1-delta)} / (1 - delta eps^2).
struct DPlus {
  double pp, pm, mp, mm;
};
DPlus dplus_table(double eps);

// Plain broadcast tree of depth R: root spin fair, each node's child count
// Poisson(k) (branching = Poisson) or exactly k (branching = Regular), each
// child's spin flipped independently with probability eps. Leaves are the
// depth-R nodes.
enum class Branching { Poisson, Regular };
Tree sample_plain(double k, double eps, int R, Branching branching, uint64_t seed);

// Distribution 2: grow a Poisson(a/2)-same / Poisson(b/2)-opposite spin tree
// to depth R+3; apply the graph adversary (markings with tree-as-graph
// degree, Bernoulli(delta) cuts of Marked nodes whose two neighbors oppose
// them); keep the root component; drop depth > R; remove surviving Marked
// depth-R nodes with all their siblings, exposing the parent as a leaf.
Tree sample_dist2(double k, double eps, int R, uint64_t seed);

// Distribution 4: grow an unlabeled Poisson(k) tree to depth R+3; assign
// markings; cut each Marked node independently with probability eps^2 delta;
// put noise eps' on Marked-incident edges and eps elsewhere; a Marked uncut
// root draws its two children's relative spins from D+; propagate; trim as
// in Distribution 2.
Tree sample_dist4(double k, double eps, int R, uint64_t seed);

// Deletes every leaf-parent edge whose leaf spin equals the root spin while
// the parent spin opposes the leaf (a different-label edge, hence a legal
// monotone cut); returns the root component. Surviving members of the old
// leaf set remain the leaf set.
Tree cutting_adversary_majority_breaker(const Tree& t);

// Replaces each maximal subtree hanging from a spin-flip edge by a path down
// to depth R ending in a single leaf of spin opposite to the root.
Tree strong_adversary_opposite_path(const Tree& t);

// Simulates the asymmetric chain with matrix [[1-e+d, e+d],[e-d, 1-e-d]]
// (columns indexed by parent spin +/-) from a symmetric tree of noise
// eps + asym: scans top-down for transitions of the designated sign
// (+1-to--1 when sign > 0) and flips the entire subtree with probability
// 2 asym / (eps + asym), recursing into flipped subtrees.
Tree strong_adversary_asymmetric(const Tree& t, double eps, double asym, int sign,
                                 uint64_t seed);

// Negates every odd-depth spin: the coupling that turns a dissortative tree
// (flip probability 1 - eps > 1/2) into an assortative one.
Tree flip_odd_levels(const Tree& t);

// Marking pass on trees using the tree-as-graph degree. The modified rule
// ("three children of degree != 2, disregarding the parent") is the
// Appendix-style variant used only by the periodic-process harness check.
enum class TreeMarkingRule { Graph, ChildrenOnly };
void assign_tree_markings(const std::vector<int>& parent,
                          const std::vector<int>& child_count,
                          std::vector<Marking>& mark, TreeMarkingRule rule);

}  // namespace srbm
