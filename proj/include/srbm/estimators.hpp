#pragma once

#include <cstdint>
#include <vector>

#include "srbm/tree.hpp"

namespace srbm {

struct RootEstimate {
  int8_t spin = +1;
  double confidence = 0.5;  // posterior of the returned spin (exact_posterior only)
};

// Sign of the leaf-spin sum; ties and empty leaf sets resolved by a fair coin
// from the seed's substream.
RootEstimate majority_vote(const Tree& t, uint64_t seed);

// Bottom-up majority of children's reports. A leaf reports its own spin. At
// a tie an internal node reports a uniformly chosen child's report (an
// independent fair coin at every tie, drawn from the per-node substream, and
// exactly equivariant under global spin flips). Childless internal nodes
// report a per-node fair coin.
RootEstimate recursive_majority(const Tree& t, uint64_t seed);

// Model tag for exact_posterior.
struct PosteriorModel {
  enum Kind {
    Plain,    // uniform noise eps on every edge
    Dist4,    // eps' on Marked-incident edges, D+ at a Marked root
    Dist4Eased,  // as Dist4 but root edges are noiseless (zero-noise first level)
  } kind = Plain;
  double eps = 0;
};

// argmax_s P(root = s | topology, markings, leaf spins) with exact
// confidence, by leaf-to-root belief recursion in log space. The
// Distribution-2 law posterior equals the Dist4 evaluation: in Distribution 4
// the topology, markings, and cuts are independent of the spins, so the
// marking-derived edge noises (with D+ at a Marked root) carry the entire
// conditional law. Capacity: 1e4 nodes.
RootEstimate exact_posterior(const Tree& t, const PosteriorModel& model);

// Per-node noise of the edge to the parent (root entry 0): 0 on root edges
// when eased, eps' when either endpoint is Marked, else eps.
std::vector<double> edge_noises(const Tree& t, double eps, bool eased);

// sqrt(2 sum_leaves Theta_v^2), Theta_v = prod_path (1 - 2 eps_e).
double advantage_bound(const Tree& t, const std::vector<double>& noises);

namespace detail {

// Likelihood recursion templated on the scalar so the exhaustive oracles can
// run in exact rational arithmetic. Computes L(v, s) = P(leaf pattern below v
// | spin of v = s) for the given per-node edge noises; pattern[i] is the
// spin forced at leaf i (entries for non-leaves ignored).
template <typename T>
void belief_likelihoods(const Tree& t, const std::vector<uint8_t>& is_leaf,
                        const std::vector<int8_t>& pattern,
                        const std::vector<T>& noise, std::vector<T>& Lp,
                        std::vector<T>& Lm) {
  const int n = t.size();
  Lp.assign(n, T(0));
  Lm.assign(n, T(0));
  // Nodes are in BFS order, so a reverse scan is a post-order evaluation.
  for (int v = n - 1; v >= 0; --v) {
    if (is_leaf[v]) {
      Lp[v] = pattern[v] > 0 ? T(1) : T(0);
      Lm[v] = pattern[v] > 0 ? T(0) : T(1);
      continue;
    }
    T up(1), um(1);
    for (int c = t.child_lo[v]; c < t.child_hi[v]; ++c) {
      const T& e = noise[c];
      T same = T(1) - e;
      up *= same * Lp[c] + e * Lm[c];
      um *= same * Lm[c] + e * Lp[c];
    }
    Lp[v] = up;
    Lm[v] = um;
  }
}

}  // namespace detail

}  // namespace srbm
