#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "srbm/graph.hpp"

namespace srbm {

using BigInt = boost::multiprecision::cpp_int;

// Cut probability: 1 for eps <= 1/3, else (1-2 eps)^2 / eps^2.
double delta_of_eps(double eps);

// Marks v Good iff at least 3 neighbors of v have degree != 2, then Marked
// iff v has degree exactly 2 and both neighbors are Good. Topology only.
// Input must be unmarked (markings are assigned once, on the precursor).
Graph assign_markings(const Graph& g);

struct AdversaryOutcome {
  Graph graph;                 // post-adversary, markings retained
  std::vector<int> cut_nodes;  // nodes whose two incident edges were deleted
  long long w = 0;             // cuttable Marked nodes left uncut
  long long m = 0;             // cut (now isolated) Marked nodes
  double delta = 1.0;          // cut probability used
};

// For each Marked node whose two neighbors both have opposite spin
// (assortative; same spin in dissortative mode), delete both incident edges
// with probability delta, one Bernoulli per cuttable node in ascending node
// order. Cut nodes stay Marked.
AdversaryOutcome apply_adversary(const Graph& g, const ModelParams& params, uint64_t seed);

struct PrecursorCensus {
  long long g = 0;       // Good nodes
  long long m = 0;       // isolated Marked nodes
  long long alpha2 = 0;  // 2*alpha: excess +1 spins among isolated Marked, doubled
  long long beta2 = 0;   // 2*beta: excess +1 spins among Good, doubled
  double alpha() const { return alpha2 / 2.0; }
  double beta() const { return beta2 / 2.0; }
};

// Number of precursors consistent with a post-adversary graph:
// C(g/2+beta, 2)^(m/2-alpha) * C(g/2-beta, 2)^(m/2+alpha), which in exact
// integer counts is C(g_plus, 2)^(m_minus) * C(g_minus, 2)^(m_plus);
// dissortative mode swaps the exponents. The census keeps alpha and beta as
// exact half-integers (stored doubled).
std::pair<BigInt, PrecursorCensus> count_precursors(const Graph& g, Mode mode);

// (1-delta)^w * delta^m with 0^0 = 1.
double precursor_probability(long long w, long long m, double delta);

// Structure checks on a replayed (precursor, outcome) pair:
//   (i) every Good node has degree >= 3 in the output graph;
//  (ii) no new degree-2 nodes, and surviving degree-2 nodes keep their
//       neighbor pairs;
// (iii) the Good markings equal the goodness rule recomputed on the output;
//  (iv) Marked nodes are exactly the degree-2-with-two-Good-neighbors nodes
//       plus the isolated cut nodes.
// Returns human-readable violation reports; empty means all checks hold.
std::vector<std::string> verify_structure(const Graph& pre, const AdversaryOutcome& post);

}  // namespace srbm
