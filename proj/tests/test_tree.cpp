#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "srbm/tree.hpp"

using namespace srbm;

namespace {

bool same_tree(const Tree& a, const Tree& b) {
  return a.parent == b.parent && a.child_lo == b.child_lo && a.child_hi == b.child_hi &&
         a.depth == b.depth && a.spin == b.spin && a.mark == b.mark && a.leaves == b.leaves &&
         a.R == b.R;
}

}  // namespace

TEST_CASE("TreeBuilder: BFS normalization and child ranges") {
  // Add in a deliberately non-BFS order: root, child, grandchild, then a
  // second child of the root.
  TreeBuilder b;
  int r = b.add_root(+1);
  int c1 = b.add_child(r, -1, Marking::Good);
  int g1 = b.add_child(c1, +1);
  int c2 = b.add_child(r, -1);
  (void)g1;
  (void)c2;
  Tree t = b.finalize(2);
  t.check_consistency();
  REQUIRE(t.size() == 4);
  // BFS order: root, c1, c2, g1.
  CHECK(t.parent == std::vector<int>{-1, 0, 0, 1});
  CHECK(t.depth == std::vector<int>{0, 1, 1, 2});
  CHECK(t.spin == std::vector<int8_t>{+1, -1, -1, +1});
  CHECK(t.mark[1] == Marking::Good);
  CHECK(t.num_children(0) == 2);
  CHECK(t.num_children(1) == 1);
  CHECK(t.graph_degree(0) == 2);  // root: children only
  CHECK(t.graph_degree(1) == 2);  // parent + one child
  CHECK(t.leaves == std::vector<int>{3});  // default: depth-R nodes
  auto lf = t.leaf_flags();
  CHECK(lf == std::vector<uint8_t>{0, 0, 0, 1});

  // Explicit leaf set overrides the default.
  Tree t2 = b.finalize(2, {c2, g1});
  CHECK(t2.leaves == std::vector<int>{2, 3});

  // A declared leaf deeper than R is inconsistent.
  Tree t3 = b.finalize(1, {g1});
  CHECK_THROWS(t3.check_consistency());
}

TEST_CASE("eps_prime: rational grid and domain") {
  // (1-3e)/(1+e) is a perfect square at these rationals.
  CHECK(eps_prime(3.0 / 13.0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(eps_prime(2.0 / 7.0) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(eps_prime(4.0 / 21.0) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(eps_prime(0.0) == 0.0);
  // double(1/3) sits just below the branch point, so the radicand is ~1e-16
  // and the value lands within sqrt-of-ulp of 1/2.
  CHECK(eps_prime(1.0 / 3.0) == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(eps_prime(0.4) == 0.5);
  CHECK_THROWS(eps_prime(0.5));
  CHECK_THROWS(eps_prime(-0.01));
}

TEST_CASE("dplus_table: hand values, normalization, eased identity") {
  // eps <= 1/3: delta = 1 kills the -- cell.
  DPlus d1 = dplus_table(0.25);
  CHECK(d1.pp == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(d1.pm == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(d1.mp == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(d1.mm == 0.0);

  DPlus d2 = dplus_table(0.4);  // delta = 1/4
  CHECK(d2.pp == doctest::Approx(0.375).epsilon(1e-14));
  CHECK(d2.pm == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(d2.mm == doctest::Approx(0.125).epsilon(1e-14));

  for (double eps : {0.05, 0.2, 1.0 / 3.0, 0.38, 0.45}) {
    DPlus d = dplus_table(eps);
    CHECK(d.pp + d.pm + d.mp + d.mm == doctest::Approx(1.0).epsilon(1e-12));
    // Diagonal mass of D+ equals that of two independent eps' flips.
    double ep = eps_prime(eps);
    CHECK(d.pp + d.mm ==
          doctest::Approx((1 - ep) * (1 - ep) + ep * ep).epsilon(1e-12));
  }
}

TEST_CASE("sample_plain: regular branching is an exact k-ary tree") {
  Tree t = sample_plain(2, 0.15, 3, Branching::Regular, 42);
  t.check_consistency();
  CHECK(t.size() == 15);  // 1 + 2 + 4 + 8
  CHECK(t.leaves.size() == 8);
  for (int v : t.leaves) CHECK(t.depth[v] == 3);
  for (int v = 0; v < t.size(); ++v)
    CHECK(t.num_children(v) == (t.depth[v] < 3 ? 2 : 0));

  Tree u = sample_plain(2, 0.15, 3, Branching::Regular, 42);
  CHECK(same_tree(t, u));
  Tree w = sample_plain(2, 0.15, 3, Branching::Regular, 43);
  CHECK_FALSE(same_tree(t, w));
}

TEST_CASE("sample_plain: flip frequency matches eps, root spin fair") {
  const double eps = 0.15;
  long long flips = 0, edges = 0, plus_roots = 0;
  const int reps = 60;
  for (int s = 0; s < reps; ++s) {
    Tree t = sample_plain(2, eps, 10, Branching::Regular, 100 + s);
    plus_roots += (t.spin[0] == 1);
    for (int v = 1; v < t.size(); ++v) {
      ++edges;
      flips += (t.spin[v] != t.spin[t.parent[v]]);
    }
  }
  CHECK(std::abs(double(flips) / double(edges) - eps) < 0.01);

  // Root spin over many seeds.
  for (int s = 0; s < 2000; ++s)
    plus_roots += (sample_plain(1, 0.1, 0, Branching::Regular, 5000 + s).spin[0] == 1);
  CHECK(std::abs(double(plus_roots) / (2000 + reps) - 0.5) < 0.05);
}

TEST_CASE("sample_plain: Poisson branching has the right mean size") {
  double total = 0;
  const int reps = 3000;
  for (int s = 0; s < reps; ++s) total += sample_plain(2.0, 0.1, 3, Branching::Poisson, s).size();
  CHECK(std::abs(total / reps - 15.0) < 1.5);  // E = 1+2+4+8
}

TEST_CASE("sample_plain: eps = 0 propagates the root spin everywhere") {
  Tree t = sample_plain(3, 0.0, 4, Branching::Poisson, 7);
  for (int v = 0; v < t.size(); ++v) CHECK(t.spin[v] == t.spin[0]);
  CHECK_THROWS(sample_plain(0.0, 0.1, 3, Branching::Poisson, 1));
  CHECK_THROWS(sample_plain(2, 0.5, 3, Branching::Poisson, 1));
  CHECK_THROWS(sample_plain(2, 0.1, -1, Branching::Poisson, 1));
}

TEST_CASE("assign_tree_markings: Graph vs ChildrenOnly rules") {
  // Node 1 has two non-degree-2 children plus a non-degree-2 parent: GOOD
  // under the Graph rule, not under ChildrenOnly.
  std::vector<int> parent = {-1, 0, 0, 0, 1, 1, 2, 6};
  std::vector<int> child_count = {3, 2, 1, 0, 0, 0, 1, 0};
  std::vector<Marking> mg, mc;
  assign_tree_markings(parent, child_count, mg, TreeMarkingRule::Graph);
  assign_tree_markings(parent, child_count, mc, TreeMarkingRule::ChildrenOnly);
  CHECK(mg == std::vector<Marking>{Marking::None, Marking::Good, Marking::None, Marking::None,
                                   Marking::None, Marking::None, Marking::None, Marking::None});
  CHECK(mc == std::vector<Marking>(8, Marking::None));
}

TEST_CASE("assign_tree_markings: Marked between two GOOD nodes") {
  // 0 (root, 4 children incl. three leaves) - 1 (single child) - 2 (4 leaves).
  std::vector<int> parent = {-1, 0, 1, 2, 2, 2, 2, 0, 0, 0};
  std::vector<int> child_count = {4, 1, 4, 0, 0, 0, 0, 0, 0, 0};
  for (auto rule : {TreeMarkingRule::Graph, TreeMarkingRule::ChildrenOnly}) {
    std::vector<Marking> m;
    assign_tree_markings(parent, child_count, m, rule);
    CHECK(m[0] == Marking::Good);
    CHECK(m[2] == Marking::Good);
    CHECK(m[1] == Marking::Marked);  // degree 2, both neighbors GOOD
    for (int v : {3, 4, 5, 6, 7, 8, 9}) CHECK(m[v] == Marking::None);
  }
}

TEST_CASE("sample_dist2: determinism, depth bound, no Marked depth-R survivors") {
  Tree t = sample_dist2(3, 0.25, 3, 11);
  Tree u = sample_dist2(3, 0.25, 3, 11);
  CHECK(same_tree(t, u));

  for (int s = 0; s < 300; ++s) {
    Tree w = sample_dist2(3, 0.3, 3, s);
    w.check_consistency();
    for (int v = 0; v < w.size(); ++v) {
      CHECK(w.depth[v] <= 3);
      // Surviving depth-R Marked nodes were removed with their siblings.
      if (w.depth[v] == 3) CHECK(w.mark[v] != Marking::Marked);
    }
    // Every kept depth-R node is a declared leaf; leaves above R are
    // exposed parents and must be childless.
    auto lf = w.leaf_flags();
    for (int v = 0; v < w.size(); ++v) {
      if (w.depth[v] == 3) CHECK(lf[v] == 1);
      if (lf[v] && w.depth[v] < 3) CHECK(w.num_children(v) == 0);
    }
  }
  CHECK_THROWS(sample_dist2(3, 0.25, 0, 1));
}

TEST_CASE("sample_dist2: eps = 0 grows a pure same-spin tree, never cut") {
  for (int s = 0; s < 20; ++s) {
    Tree t = sample_dist2(2.5, 0.0, 2, s);
    for (int v = 0; v < t.size(); ++v) CHECK(t.spin[v] == t.spin[0]);
  }
}

TEST_CASE("sample_dist4: determinism and trimming invariants") {
  Tree t = sample_dist4(3, 0.3, 3, 21);
  Tree u = sample_dist4(3, 0.3, 3, 21);
  CHECK(same_tree(t, u));
  for (int s = 0; s < 300; ++s) {
    Tree w = sample_dist4(3, 0.3, 3, s);
    w.check_consistency();
    for (int v = 0; v < w.size(); ++v) {
      CHECK(w.depth[v] <= 3);
      if (w.depth[v] == 3) CHECK(w.mark[v] != Marking::Marked);
    }
  }
  CHECK_THROWS(sample_dist4(3, 0.3, 0, 1));
}

TEST_CASE("sample_dist4: eps = 0 propagates the root spin") {
  for (int s = 0; s < 20; ++s) {
    Tree t = sample_dist4(2.5, 0.0, 2, s);
    for (int v = 0; v < t.size(); ++v) CHECK(t.spin[v] == t.spin[0]);
  }
}

TEST_CASE("sample_dist4: D+ root law and eased edge noise") {
  const double eps = 0.4;  // delta = 1/4, eps' = 1/2, D+ = {3/8, 1/4, 1/4, 1/8}
  const DPlus d = dplus_table(eps);
  long long n_pp = 0, n_pm = 0, n_mp = 0, n_mm = 0;
  long long eased_flips = 0, eased_edges = 0, plain_flips = 0, plain_edges = 0;
  const int reps = 60000;
  for (int s = 0; s < reps; ++s) {
    Tree t = sample_dist4(3, eps, 2, s);
    if (t.mark[0] == Marking::Marked && t.num_children(0) == 2) {
      int c1 = t.child_lo[0], c2 = c1 + 1;
      int r1 = t.spin[c1] * t.spin[0], r2 = t.spin[c2] * t.spin[0];
      if (r1 > 0 && r2 > 0) ++n_pp;
      else if (r1 > 0) ++n_pm;
      else if (r2 > 0) ++n_mp;
      else ++n_mm;
    }
    for (int v = 1; v < t.size(); ++v) {
      int p = t.parent[v];
      if (p == 0) continue;  // root edges may come from the joint draw
      bool eased = t.mark[v] == Marking::Marked || t.mark[p] == Marking::Marked;
      bool flip = t.spin[v] != t.spin[p];
      (eased ? eased_edges : plain_edges)++;
      if (flip) (eased ? eased_flips : plain_flips)++;
    }
  }
  long long hits = n_pp + n_pm + n_mp + n_mm;
  REQUIRE(hits > 300);
  CHECK(std::abs(double(n_pp) / hits - d.pp) < 0.08);
  CHECK(std::abs(double(n_pm) / hits - d.pm) < 0.08);
  CHECK(std::abs(double(n_mp) / hits - d.mp) < 0.08);
  CHECK(std::abs(double(n_mm) / hits - d.mm) < 0.06);
  CHECK(n_mm > 0);  // delta < 1 keeps the -- cell alive

  REQUIRE(eased_edges > 4000);
  CHECK(std::abs(double(eased_flips) / eased_edges - eps_prime(eps)) < 0.025);
  CHECK(std::abs(double(plain_flips) / plain_edges - eps) < 0.01);
}

TEST_CASE("majority breaker: hand fixture") {
  TreeBuilder b;
  int r = b.add_root(+1);
  int a = b.add_child(r, -1);
  int bb = b.add_child(r, +1);
  int u = b.add_child(a, +1);  // leaf == root, parent opposite: deleted
  int v = b.add_child(a, -1);  // leaf != root: kept
  int w = b.add_child(bb, +1); // parent agrees with leaf: kept
  int x = b.add_child(bb, -1); // kept
  (void)u, (void)v, (void)w, (void)x;
  Tree t = b.finalize(2);
  REQUIRE(t.leaves.size() == 4);

  Tree cut = cutting_adversary_majority_breaker(t);
  cut.check_consistency();
  CHECK(cut.size() == 6);
  REQUIRE(cut.leaves.size() == 3);
  int plus = 0, minus = 0;
  for (int lv : cut.leaves) (cut.spin[lv] > 0 ? plus : minus)++;
  CHECK(plus == 1);   // only w survives among root-agreeing leaves
  CHECK(minus == 2);  // v and x
}

TEST_CASE("majority breaker: only root-agreeing leaves are ever deleted") {
  for (int s = 0; s < 40; ++s) {
    Tree t = sample_plain(3, 0.2, 4, Branching::Poisson, 900 + s);
    Tree cut = cutting_adversary_majority_breaker(t);
    cut.check_consistency();
    int before_minus = 0, after_minus = 0;
    for (int lv : t.leaves) before_minus += (t.spin[lv] != t.spin[0]);
    for (int lv : cut.leaves) after_minus += (cut.spin[lv] != cut.spin[0]);
    CHECK(after_minus == before_minus);  // disagreeing leaves all survive
    CHECK(int(cut.leaves.size()) - after_minus <=
          int(t.leaves.size()) - before_minus);
  }
}

TEST_CASE("opposite-path adversary: hand fixture") {
  TreeBuilder b;
  int r = b.add_root(+1);
  int a = b.add_child(r, +1);
  b.add_child(r, -1);  // flip edge at depth 1 -> path of two -1 nodes
  b.add_child(a, +1);  // skeleton leaf at depth 2
  b.add_child(a, -1);  // flip edge at depth 2 -> single -1 leaf
  Tree t = b.finalize(2);

  Tree adv = strong_adversary_opposite_path(t);
  adv.check_consistency();
  CHECK(adv.size() == 6);
  REQUIRE(adv.leaves.size() == 3);
  int plus = 0, minus = 0;
  for (int lv : adv.leaves) {
    CHECK(adv.depth[lv] == 2);  // every replacement path reaches depth R
    (adv.spin[lv] > 0 ? plus : minus)++;
  }
  CHECK(plus == 1);
  CHECK(minus == 2);
  // Non-skeleton nodes all carry -root spin.
  for (int v = 0; v < adv.size(); ++v)
    if (adv.spin[v] == adv.spin[0])
      for (int c = adv.child_lo[v]; c < adv.child_hi[v]; ++c)
        CHECK((adv.spin[c] == adv.spin[0] || adv.num_children(c) <= 1));
}

TEST_CASE("opposite-path adversary: every leaf sits at depth R") {
  for (int s = 0; s < 30; ++s) {
    Tree t = sample_plain(3, 0.25, 4, Branching::Poisson, 300 + s);
    Tree adv = strong_adversary_opposite_path(t);
    adv.check_consistency();
    for (int lv : adv.leaves) {
      CHECK(adv.depth[lv] == 4);
      if (adv.spin[lv] != adv.spin[0]) {
        // Path leaves hang off chains of -root spins.
        int p = adv.parent[lv];
        CHECK((adv.spin[p] == adv.spin[lv] || adv.num_children(p) >= 1));
      }
    }
    // The all-sigma skeleton is preserved: same number of depth-R leaves
    // agreeing with the root whose whole ancestry agrees with the root.
    auto count_skeleton_leaves = [](const Tree& tr) {
      int c = 0;
      std::vector<char> onpath(tr.size(), 0);
      onpath[0] = 1;
      for (int v = 1; v < tr.size(); ++v)
        onpath[v] = onpath[tr.parent[v]] && tr.spin[v] == tr.spin[0];
      for (int lv : tr.leaves) c += onpath[lv];
      return c;
    };
    CHECK(count_skeleton_leaves(adv) == count_skeleton_leaves(t));
  }
}

TEST_CASE("asymmetric adversary: asym = 0 is the identity, bad args throw") {
  Tree t = sample_plain(3, 0.2, 3, Branching::Poisson, 17);
  Tree out = strong_adversary_asymmetric(t, 0.2, 0.0, +1, 99);
  CHECK(same_tree(t, out));
  CHECK_THROWS(strong_adversary_asymmetric(t, 0.2, 0.3, +1, 1));   // asym > eps
  CHECK_THROWS(strong_adversary_asymmetric(t, 0.2, -0.1, +1, 1));  // negative
  CHECK_THROWS(strong_adversary_asymmetric(t, 0.2, 0.1, 0, 1));    // bad sign
}

TEST_CASE("asymmetric adversary: transition frequencies match the chain") {
  // Base tree at eps + asym = 0.3; after flips, +1 parents emit -1 children
  // with probability eps - asym = 0.1 and -1 parents emit +1 children with
  // probability eps + asym = 0.3.
  const double eps = 0.2, asym = 0.1;
  long long from_plus = 0, plus_to_minus = 0, from_minus = 0, minus_to_plus = 0;
  for (int s = 0; s < 30; ++s) {
    Tree base = sample_plain(5, eps + asym, 6, Branching::Regular, 400 + s);
    Tree t = strong_adversary_asymmetric(base, eps, asym, +1, 400 + s);
    CHECK(t.size() == base.size());  // flips never change the shape
    for (int v = 1; v < t.size(); ++v) {
      int p = t.parent[v];
      if (t.spin[p] == 1) {
        ++from_plus;
        plus_to_minus += (t.spin[v] == -1);
      } else {
        ++from_minus;
        minus_to_plus += (t.spin[v] == 1);
      }
    }
  }
  CHECK(std::abs(double(plus_to_minus) / from_plus - (eps - asym)) < 0.01);
  CHECK(std::abs(double(minus_to_plus) / from_minus - (eps + asym)) < 0.01);

  // sign = -1 mirrors the roles.
  long long m_from_minus = 0, m_minus_to_plus = 0;
  for (int s = 0; s < 30; ++s) {
    Tree base = sample_plain(5, eps + asym, 6, Branching::Regular, 800 + s);
    Tree t = strong_adversary_asymmetric(base, eps, asym, -1, 800 + s);
    for (int v = 1; v < t.size(); ++v) {
      if (t.spin[t.parent[v]] == -1) {
        ++m_from_minus;
        m_minus_to_plus += (t.spin[v] == 1);
      }
    }
  }
  CHECK(std::abs(double(m_minus_to_plus) / m_from_minus - (eps - asym)) < 0.01);
}

TEST_CASE("asymmetric adversary: deterministic given seed") {
  Tree base = sample_plain(4, 0.25, 5, Branching::Poisson, 3);
  Tree a = strong_adversary_asymmetric(base, 0.2, 0.05, +1, 31);
  Tree b = strong_adversary_asymmetric(base, 0.2, 0.05, +1, 31);
  Tree c = strong_adversary_asymmetric(base, 0.2, 0.05, +1, 32);
  CHECK(same_tree(a, b));
  CHECK_FALSE(same_tree(a, c));
}

TEST_CASE("flip_odd_levels: involution that negates odd depths") {
  Tree t = sample_plain(3, 0.2, 4, Branching::Poisson, 12);
  Tree f = flip_odd_levels(t);
  for (int v = 0; v < t.size(); ++v)
    CHECK(f.spin[v] == (t.depth[v] % 2 ? -t.spin[v] : t.spin[v]));
  CHECK(same_tree(flip_odd_levels(f), t));

  // It converts flip probability e into 1 - e on every edge.
  long long flips = 0, edges = 0;
  for (int s = 0; s < 40; ++s) {
    Tree u = flip_odd_levels(sample_plain(4, 0.2, 5, Branching::Regular, 600 + s));
    for (int v = 1; v < u.size(); ++v) {
      ++edges;
      flips += (u.spin[v] != u.spin[u.parent[v]]);
    }
  }
  CHECK(std::abs(double(flips) / edges - 0.8) < 0.01);
}
