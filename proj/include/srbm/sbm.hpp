#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "srbm/graph.hpp"

namespace srbm {

// Samples the precursor graph G(n, a/n, b/n): i.i.d. fair spins, then each
// same-spin pair is an edge with probability a/n and each cross pair with
// probability b/n, via geometric skip sampling over the pair spaces.
// Markings are left None. Deterministic given (params, seed).
Graph sample_precursor(const ModelParams& params, uint64_t seed);

// Sum of spins.
long long census(const std::vector<int8_t>& spins);

// R = floor(log n / (10 log(2(a+b)))) - 3. Ratios within 1e-9 (relative) of
// an integer snap to it before the floor, so exact-integer inputs are stable
// against last-ulp log error. The value can be negative at desk scale; the
// formula is asymptotic and is reported as computed.
int coupling_radius(const ModelParams& params);

// Induced subgraph on nodes within distance <= radius of center, plus the
// set of nodes at distance exactly radius. Node ids are remapped to
// 0..size-1 in BFS order; spins and markings carry over.
struct Ball {
  Graph subgraph;
  std::vector<int> boundary;       // ids in the subgraph's numbering
  std::vector<int> original_ids;   // subgraph id -> input graph id
};
Ball extract_ball(const Graph& g, int center, int radius);

// max(agreement, n - agreement) / n: fraction recovered up to global flip.
double partial_recovery_score(const std::vector<int8_t>& est,
                              const std::vector<int8_t>& truth);

}  // namespace srbm
