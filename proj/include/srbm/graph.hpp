#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace srbm {

enum class Marking : uint8_t { None, Good, Marked };

enum class Mode { Assortative, Dissortative };

// Model parameters (n, a, b): within-community edge probability a/n, cross
// probability b/n, average degree k = (a+b)/2, raw noise eps = b/(a+b).
struct ModelParams {
  int n = 0;
  double a = 0;
  double b = 0;
  Mode mode = Mode::Assortative;

  double k() const { return (a + b) / 2.0; }
  double eps() const { return b / (a + b); }
  // Flip noise below 1/2 regardless of mode; the dissortative model couples
  // to the assortative one via eps -> 1 - eps.
  double flip_noise() const { return mode == Mode::Assortative ? eps() : a / (a + b); }

  void validate() const;
};

// Undirected graph over nodes 0..n-1 with per-node spin and marking.
// Immutable by convention once a sampler or adversary returns it; adversaries
// copy and edit, so (precursor, outcome) pairs can be replayed.
struct Graph {
  int n = 0;
  std::vector<std::vector<int>> adj;  // sorted neighbor lists
  std::vector<int8_t> spins;          // +1 / -1
  std::vector<Marking> markings;      // None until assign_markings

  int degree(int v) const { return int(adj[v].size()); }
  bool has_edge(int u, int v) const;
  long long edge_count() const;

  void add_edge(int u, int v);
  void remove_edge(int u, int v);

  // Validates symmetry, sortedness, no self-loops, field lengths.
  void check_consistency() const;
};

Graph make_graph(int n);

// Text formats: graph file "n m" then m lines "u v" (0-indexed, u < v,
// lexicographically sorted); spins file one "+1"/"-1" per line; markings file
// one "G"/"M"/"N" per line. Readers validate symmetry and self-loop freedom.
void write_graph_files(const Graph& g, const std::string& prefix);
Graph read_graph_files(const std::string& prefix);

// Companion metadata (key=value: n, a, b, mode, seed) written by `gen` so
// downstream subcommands can recover (a, b) without repeating flags.
void write_meta_file(const ModelParams& params, uint64_t seed, const std::string& prefix);
ModelParams read_meta_file(const std::string& prefix, uint64_t* seed_out = nullptr);

}  // namespace srbm
