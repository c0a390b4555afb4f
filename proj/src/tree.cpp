#include "srbm/tree.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "srbm/adversary.hpp"
#include "srbm/rng.hpp"

namespace srbm {

namespace {
constexpr long long kGrowthCap = 50'000'000;
}  // namespace

std::vector<uint8_t> Tree::leaf_flags() const {
  std::vector<uint8_t> f(size(), 0);
  for (int v : leaves) f[v] = 1;
  return f;
}

void Tree::check_consistency() const {
  const size_t n = parent.size();
  if (child_lo.size() != n || child_hi.size() != n || depth.size() != n || spin.size() != n ||
      mark.size() != n)
    throw std::logic_error("Tree: field lengths disagree");
  if (n == 0) throw std::logic_error("Tree: empty");
  if (parent[0] != -1 || depth[0] != 0) throw std::logic_error("Tree: node 0 must be the root");
  long long child_total = 0;
  for (size_t v = 0; v < n; ++v) {
    if (spin[v] != 1 && spin[v] != -1) throw std::logic_error("Tree: bad spin");
    if (v > 0) {
      if (parent[v] < 0 || parent[v] >= (int)v)
        throw std::logic_error("Tree: nodes must follow their parent (BFS order)");
      if (depth[v] != depth[parent[v]] + 1) throw std::logic_error("Tree: bad depth");
    }
    if (child_lo[v] > child_hi[v] || child_lo[v] < 0 || child_hi[v] > (int)n)
      throw std::logic_error("Tree: bad child range");
    for (int c = child_lo[v]; c < child_hi[v]; ++c)
      if (parent[c] != (int)v) throw std::logic_error("Tree: child range disagrees with parent");
    child_total += child_hi[v] - child_lo[v];
  }
  if (child_total != (long long)n - 1) throw std::logic_error("Tree: child ranges do not cover");
  for (size_t i = 0; i < leaves.size(); ++i) {
    int v = leaves[i];
    if (v < 0 || v >= (int)n) throw std::logic_error("Tree: leaf id out of range");
    if (i > 0 && leaves[i - 1] >= v) throw std::logic_error("Tree: leaves must be sorted unique");
    if (depth[v] > R) throw std::logic_error("Tree: leaf deeper than R");
  }
}

int TreeBuilder::add_root(int8_t spin, Marking mark) {
  if (!parent_.empty()) throw std::logic_error("TreeBuilder: root already added");
  parent_.push_back(-1);
  spin_.push_back(spin);
  mark_.push_back(mark);
  return 0;
}

int TreeBuilder::add_child(int parent, int8_t spin, Marking mark) {
  if (parent < 0 || parent >= size()) throw std::logic_error("TreeBuilder: bad parent id");
  parent_.push_back(parent);
  spin_.push_back(spin);
  mark_.push_back(mark);
  return size() - 1;
}

Tree TreeBuilder::finalize(int R) const {
  std::vector<int> leaf_ids;
  {
    // Default leaf set: all depth-R nodes.
    std::vector<int> d(size(), 0);
    for (int v = 1; v < size(); ++v) d[v] = d[parent_[v]] + 1;
    for (int v = 0; v < size(); ++v)
      if (d[v] == R) leaf_ids.push_back(v);
  }
  return finalize(R, leaf_ids);
}

Tree TreeBuilder::finalize(int R, const std::vector<int>& leaf_ids) const {
  const int n = size();
  if (n == 0) throw std::logic_error("TreeBuilder: no root");
  std::vector<std::vector<int>> children(n);
  for (int v = 1; v < n; ++v) children[parent_[v]].push_back(v);

  std::vector<int> order, new_id(n, -1);
  order.reserve(n);
  order.push_back(0);
  new_id[0] = 0;
  for (size_t i = 0; i < order.size(); ++i)
    for (int c : children[order[i]]) {
      new_id[c] = (int)order.size();
      order.push_back(c);
    }
  if ((int)order.size() != n) throw std::logic_error("TreeBuilder: unreachable nodes");

  Tree t;
  t.R = R;
  t.parent.resize(n);
  t.child_lo.resize(n);
  t.child_hi.resize(n);
  t.depth.resize(n);
  t.spin.resize(n);
  t.mark.resize(n);
  int next = 1;
  for (int i = 0; i < n; ++i) {
    int v = order[i];
    t.parent[i] = v == 0 ? -1 : new_id[parent_[v]];
    t.depth[i] = v == 0 ? 0 : t.depth[t.parent[i]] + 1;
    t.spin[i] = spin_[v];
    t.mark[i] = mark_[v];
    t.child_lo[i] = next;
    next += (int)children[v].size();
    t.child_hi[i] = next;
  }
  t.leaves.reserve(leaf_ids.size());
  for (int v : leaf_ids) t.leaves.push_back(new_id[v]);
  std::sort(t.leaves.begin(), t.leaves.end());
  t.leaves.erase(std::unique(t.leaves.begin(), t.leaves.end()), t.leaves.end());
  return t;
}

double eps_prime(double eps) {
  if (!(eps >= 0.0) || !(eps < 0.5))
    throw std::invalid_argument("eps_prime: requires 0 <= eps < 1/2");
  if (eps > 1.0 / 3.0) return 0.5;
  return 0.5 - 0.5 * std::sqrt((1.0 - 3.0 * eps) / (1.0 + eps));
}

DPlus dplus_table(double eps) {
  double delta = delta_of_eps(eps);
  double z = 1.0 - delta * eps * eps;
  DPlus d;
  d.pp = (1.0 - eps) * (1.0 - eps) / z;
  d.pm = eps * (1.0 - eps) / z;
  d.mp = d.pm;
  d.mm = eps * eps * (1.0 - delta) / z;
  return d;
}

void assign_tree_markings(const std::vector<int>& parent, const std::vector<int>& child_count,
                          std::vector<Marking>& mark, TreeMarkingRule rule) {
  const int n = (int)parent.size();
  std::vector<int> degree(n);
  for (int v = 0; v < n; ++v) degree[v] = child_count[v] + (parent[v] >= 0 ? 1 : 0);

  std::vector<int> nontwo_children(n, 0);
  for (int v = 0; v < n; ++v)
    if (parent[v] >= 0 && degree[v] != 2) ++nontwo_children[parent[v]];

  mark.assign(n, Marking::None);
  for (int v = 0; v < n; ++v) {
    int nontwo = nontwo_children[v];
    if (rule == TreeMarkingRule::Graph && parent[v] >= 0 && degree[parent[v]] != 2) ++nontwo;
    if (nontwo >= 3) mark[v] = Marking::Good;
  }

  std::vector<int> good_neighbors(n, 0);
  for (int v = 0; v < n; ++v)
    if (parent[v] >= 0) {
      if (mark[v] == Marking::Good) ++good_neighbors[parent[v]];
      if (mark[parent[v]] == Marking::Good) ++good_neighbors[v];
    }
  for (int v = 0; v < n; ++v)
    if (degree[v] == 2 && good_neighbors[v] == 2) mark[v] = Marking::Marked;
}

namespace {

// Growth-phase arrays; creation order is BFS order, so children of node v
// occupy the contiguous range [child_lo[v], child_hi[v]).
struct Grown {
  std::vector<int> parent, child_lo, child_hi, depth;
  std::vector<int8_t> spin;

  int size() const { return (int)parent.size(); }
  int child_count(int v) const { return child_hi[v] - child_lo[v]; }

  void add_root() {
    parent.push_back(-1);
    depth.push_back(0);
  }
  void add_child(int p) {
    parent.push_back(p);
    depth.push_back(depth[p] + 1);
    if ((long long)parent.size() > kGrowthCap)
      throw std::runtime_error("tree growth exceeded capacity");
  }
};

// Compact a kept subset of a grown tree into a Tree, carrying spins and
// markings; `leaf_orig` lists leaf ids in the grown tree's numbering.
Tree compact(const Grown& g, const std::vector<uint8_t>& keep,
             const std::vector<Marking>& mark, const std::vector<int>& leaf_orig, int R) {
  TreeBuilder b;
  std::vector<int> to_builder(g.size(), -1);
  for (int v = 0; v < g.size(); ++v) {
    if (!keep[v]) continue;
    if (g.parent[v] < 0)
      to_builder[v] = b.add_root(g.spin[v], mark[v]);
    else
      to_builder[v] = b.add_child(to_builder[g.parent[v]], g.spin[v], mark[v]);
  }
  std::vector<int> leaf_ids;
  leaf_ids.reserve(leaf_orig.size());
  for (int v : leaf_orig) leaf_ids.push_back(to_builder[v]);
  return b.finalize(R, leaf_ids);
}

void check_tree_params(double k, double eps, int R) {
  if (!(k > 0)) throw std::invalid_argument("tree sampler: requires k > 0");
  if (!(eps >= 0.0) || !(eps < 0.5))
    throw std::invalid_argument("tree sampler: requires 0 <= eps < 1/2");
  if (R < 0) throw std::invalid_argument("tree sampler: requires R >= 0");
}

// Shared tail of Distributions 2 and 4: given grown topology with markings
// and per-node cut flags, keep the root component, drop depth > R, then drop
// every surviving Marked depth-R node together with all its siblings,
// exposing their common parent as a leaf. Returns keep flags, leaf list
// (grown ids), and whether the root survives alone.
struct TrimResult {
  std::vector<uint8_t> keep;
  std::vector<int> leaf_orig;
};

TrimResult trim_adversaried(const Grown& g, const std::vector<Marking>& mark,
                            const std::vector<uint8_t>& cut, int R) {
  const int n = g.size();
  std::vector<uint8_t> reach(n, 0);
  reach[0] = 1;  // the root component contains the root even when it is cut
  for (int v = 1; v < n; ++v) {
    int p = g.parent[v];
    reach[v] = reach[p] && !cut[p] && !cut[v];
  }

  std::vector<uint8_t> keep(n, 0);
  for (int v = 0; v < n; ++v) keep[v] = reach[v] && g.depth[v] <= R;

  std::vector<uint8_t> exposed(n, 0);
  for (int v = 0; v < n; ++v)
    if (keep[v] && mark[v] == Marking::Marked && g.depth[v] == R && g.parent[v] >= 0)
      exposed[g.parent[v]] = 1;
  for (int v = 0; v < n; ++v)
    if (keep[v] && g.parent[v] >= 0 && exposed[g.parent[v]]) keep[v] = 0;

  TrimResult r;
  r.keep = keep;
  for (int v = 0; v < n; ++v)
    if (keep[v] && (g.depth[v] == R || exposed[v])) r.leaf_orig.push_back(v);
  return r;
}

}  // namespace

Tree sample_plain(double k, double eps, int R, Branching branching, uint64_t seed) {
  check_tree_params(k, eps, R);
  Rng root_rng = Rng(seed).stream("root");
  Rng grow = Rng(seed).stream("grow");

  Grown g;
  g.add_root();
  g.spin.push_back(root_rng.fair_spin());
  const int k_reg = (int)std::llround(k);
  for (int v = 0; v < g.size(); ++v) {
    g.child_lo.push_back(g.size());
    if (g.depth[v] < R) {
      int c = branching == Branching::Poisson ? grow.poisson(k) : k_reg;
      for (int i = 0; i < c; ++i) {
        g.add_child(v);
        g.spin.push_back(grow.bernoulli(eps) ? (int8_t)-g.spin[v] : g.spin[v]);
      }
    }
    g.child_hi.push_back(g.size());
  }

  std::vector<Marking> mark(g.size(), Marking::None);
  std::vector<uint8_t> keep(g.size(), 1);
  std::vector<int> leaf_orig;
  for (int v = 0; v < g.size(); ++v)
    if (g.depth[v] == R) leaf_orig.push_back(v);
  return compact(g, keep, mark, leaf_orig, R);
}

Tree sample_dist2(double k, double eps, int R, uint64_t seed) {
  check_tree_params(k, eps, R);
  if (R < 1) throw std::invalid_argument("sample_dist2: requires R >= 1");
  Rng root_rng = Rng(seed).stream("root");
  Rng grow = Rng(seed).stream("grow");
  Rng cuts = Rng(seed).stream("cuts");

  const double mean_same = k * (1.0 - eps);  // a/2
  const double mean_opp = k * eps;           // b/2
  const int grow_depth = R + 3;

  Grown g;
  g.add_root();
  g.spin.push_back(root_rng.fair_spin());
  for (int v = 0; v < g.size(); ++v) {
    g.child_lo.push_back(g.size());
    if (g.depth[v] < grow_depth) {
      int same = grow.poisson(mean_same);
      int opp = grow.poisson(mean_opp);
      for (int i = 0; i < same; ++i) {
        g.add_child(v);
        g.spin.push_back(g.spin[v]);
      }
      for (int i = 0; i < opp; ++i) {
        g.add_child(v);
        g.spin.push_back((int8_t)-g.spin[v]);
      }
    }
    g.child_hi.push_back(g.size());
  }

  std::vector<int> child_count(g.size());
  for (int v = 0; v < g.size(); ++v) child_count[v] = g.child_count(v);
  std::vector<Marking> mark;
  assign_tree_markings(g.parent, child_count, mark, TreeMarkingRule::Graph);

  const double delta = delta_of_eps(eps);
  std::vector<uint8_t> cut(g.size(), 0);
  for (int v = 0; v < g.size(); ++v) {
    if (mark[v] != Marking::Marked) continue;
    // A Marked node has graph degree 2: either the root with two children or
    // an internal node with its parent and a single child.
    int n1 = g.parent[v] >= 0 ? g.parent[v] : g.child_lo[v];
    int n2 = g.parent[v] >= 0 ? g.child_lo[v] : g.child_lo[v] + 1;
    bool cuttable = g.spin[n1] != g.spin[v] && g.spin[n2] != g.spin[v];
    if (cuttable && cuts.bernoulli(delta)) cut[v] = 1;
  }

  TrimResult trim = trim_adversaried(g, mark, cut, R);
  Tree t = compact(g, trim.keep, mark, trim.leaf_orig, R);
  t.check_consistency();
  return t;
}

Tree sample_dist4(double k, double eps, int R, uint64_t seed) {
  check_tree_params(k, eps, R);
  if (R < 1) throw std::invalid_argument("sample_dist4: requires R >= 1");
  Rng root_rng = Rng(seed).stream("root");
  Rng grow = Rng(seed).stream("grow");
  Rng cuts = Rng(seed).stream("cuts");
  Rng dplus_rng = Rng(seed).stream("dplus");
  Rng flips = Rng(seed).stream("flips");

  const int grow_depth = R + 3;
  Grown g;
  g.add_root();
  for (int v = 0; v < g.size(); ++v) {
    g.child_lo.push_back(g.size());
    if (g.depth[v] < grow_depth) {
      int c = grow.poisson(k);
      for (int i = 0; i < c; ++i) g.add_child(v);
    }
    g.child_hi.push_back(g.size());
  }

  std::vector<int> child_count(g.size());
  for (int v = 0; v < g.size(); ++v) child_count[v] = g.child_count(v);
  std::vector<Marking> mark;
  assign_tree_markings(g.parent, child_count, mark, TreeMarkingRule::Graph);

  const double delta = delta_of_eps(eps);
  const double cut_prob = eps * eps * delta;
  std::vector<uint8_t> cut(g.size(), 0);
  for (int v = 0; v < g.size(); ++v)
    if (mark[v] == Marking::Marked && cuts.bernoulli(cut_prob)) cut[v] = 1;

  TrimResult trim = trim_adversaried(g, mark, cut, R);

  // Spin assignment on the surviving structure: fair root; a Marked uncut
  // root draws its two children's relative spins jointly from D+; every
  // other surviving edge flips independently with eps' when Marked-incident
  // and eps otherwise.
  const double ep = eps_prime(eps);
  g.spin.assign(g.size(), 0);
  g.spin[0] = root_rng.fair_spin();
  bool root_dplus = mark[0] == Marking::Marked && !cut[0];
  int8_t rel1 = 0, rel2 = 0;
  if (root_dplus) {
    DPlus d = dplus_table(eps);
    double u = dplus_rng.uniform();
    if (u < d.pp) {
      rel1 = rel2 = 1;
    } else if (u < d.pp + d.pm) {
      rel1 = 1, rel2 = -1;
    } else if (u < d.pp + d.pm + d.mp) {
      rel1 = -1, rel2 = 1;
    } else {
      rel1 = rel2 = -1;
    }
  }
  for (int v = 1; v < g.size(); ++v) {
    if (!trim.keep[v]) continue;
    int p = g.parent[v];
    if (root_dplus && p == 0) {
      g.spin[v] = (int8_t)(g.spin[0] * (v == g.child_lo[0] ? rel1 : rel2));
      continue;
    }
    double e = (mark[v] == Marking::Marked || mark[p] == Marking::Marked) ? ep : eps;
    g.spin[v] = flips.bernoulli(e) ? (int8_t)-g.spin[p] : g.spin[p];
  }

  Tree t = compact(g, trim.keep, mark, trim.leaf_orig, R);
  t.check_consistency();
  return t;
}

Tree cutting_adversary_majority_breaker(const Tree& t) {
  std::vector<uint8_t> is_leaf = t.leaf_flags();
  std::vector<uint8_t> keep(t.size(), 1);
  const int8_t root_spin = t.spin[0];
  for (int v : t.leaves) {
    int p = t.parent[v];
    if (p >= 0 && t.spin[v] == root_spin && t.spin[p] == -t.spin[v]) keep[v] = 0;
  }

  TreeBuilder b;
  std::vector<int> to_builder(t.size(), -1);
  std::vector<int> leaf_ids;
  for (int v = 0; v < t.size(); ++v) {
    if (!keep[v]) continue;
    if (t.parent[v] < 0)
      to_builder[v] = b.add_root(t.spin[v], t.mark[v]);
    else
      to_builder[v] = b.add_child(to_builder[t.parent[v]], t.spin[v], t.mark[v]);
    if (is_leaf[v]) leaf_ids.push_back(to_builder[v]);
  }
  return b.finalize(t.R, leaf_ids);
}

Tree strong_adversary_opposite_path(const Tree& t) {
  const int8_t sigma = t.spin[0];
  TreeBuilder b;
  b.add_root(sigma, t.mark[0]);
  std::vector<int> leaf_ids;

  // Iterative DFS over the all-sigma skeleton; flip edges spawn replacement
  // paths of spin -sigma down to depth R.
  std::vector<std::pair<int, int>> stack;  // (original node, builder node)
  stack.push_back({0, 0});
  if (t.depth[0] == t.R) leaf_ids.push_back(0);
  while (!stack.empty()) {
    auto [v, bv] = stack.back();
    stack.pop_back();
    for (int c = t.child_lo[v]; c < t.child_hi[v]; ++c) {
      if (t.spin[c] == sigma) {
        int bc = b.add_child(bv, sigma, t.mark[c]);
        if (t.depth[c] == t.R) leaf_ids.push_back(bc);
        stack.push_back({c, bc});
      } else {
        int cur = b.add_child(bv, (int8_t)-sigma);
        for (int d = t.depth[c] + 1; d <= t.R; ++d) cur = b.add_child(cur, (int8_t)-sigma);
        leaf_ids.push_back(cur);
      }
    }
  }
  return b.finalize(t.R, leaf_ids);
}

Tree strong_adversary_asymmetric(const Tree& t, double eps, double asym, int sign,
                                 uint64_t seed) {
  if (!(asym >= 0.0) || asym > eps)
    throw std::invalid_argument("strong_adversary_asymmetric: requires 0 <= asym <= eps");
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("strong_adversary_asymmetric: sign must be +1 or -1");
  if (asym == 0.0) return t;

  const double flip_prob = 2.0 * asym / (eps + asym);
  const int8_t from = sign > 0 ? (int8_t)1 : (int8_t)-1;
  Rng rng = Rng(seed).stream("asym-flips");

  // parity[v] = +1/-1 multiplier accumulated from whole-subtree flips above v.
  Tree out = t;
  std::vector<int8_t> parity(t.size(), 1);
  for (int v = 1; v < t.size(); ++v) {
    int p = t.parent[v];
    parity[v] = parity[p];
    int8_t eff_p = (int8_t)(t.spin[p] * parity[p]);
    int8_t eff_v = (int8_t)(t.spin[v] * parity[v]);
    if (eff_p == from && eff_v == -from && rng.bernoulli(flip_prob)) parity[v] = (int8_t)-parity[v];
    out.spin[v] = (int8_t)(t.spin[v] * parity[v]);
  }
  return out;
}

Tree flip_odd_levels(const Tree& t) {
  Tree out = t;
  for (int v = 0; v < t.size(); ++v)
    if (t.depth[v] % 2 == 1) out.spin[v] = (int8_t)-out.spin[v];
  return out;
}

}  // namespace srbm
