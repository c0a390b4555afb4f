#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace srbm {

// Declarative experiment configuration parsed from a plain-text key=value
// file (one pair per line, '#' comments, comma-separated lists for grids).
// Keys: kind (required), k, eps, depth, dist, adversary, algo, n, a, b,
// lambda, change_budget, pairs, iterations, trials, seed.
struct ExperimentSpec {
  std::string kind;
  std::map<std::string, std::vector<std::string>> grids;
  long long trials = 1;
  uint64_t seed = 0;

  const std::vector<std::string>& grid(const std::string& key) const;
  bool has(const std::string& key) const;
};

ExperimentSpec parse_experiment_spec(const std::string& path);

// Formats one CSV cell with 12 significant digits for doubles.
std::string csv_double(double x);

// Runs the experiment named by spec.kind and writes DIR/results.csv plus
// DIR/spec-echo.txt. Byte-identical output for identical specs; trials run
// on a worker pool (SRBM_WORKERS, default hardware concurrency) but rows are
// buffered and written in trial-index order.
void run_experiment(const ExperimentSpec& spec, const std::string& out_dir);

// Individual runners (also reachable through run_experiment). Each returns
// the CSV lines it wrote (header first).
std::vector<std::string> run_tree_sweep(const ExperimentSpec& spec, const std::string& csv_path);
std::vector<std::string> run_cobweb(int k, double eps, int iterations, const std::string& csv_path);
std::vector<std::string> run_graph_recovery(const ExperimentSpec& spec, const std::string& csv_path);
std::vector<std::string> run_appendix_a_check(double k, double eps, long long trials,
                                              uint64_t seed, const std::string& csv_path);
std::vector<std::string> run_relative_spin(const ExperimentSpec& spec, const std::string& csv_path);

// Worker count: SRBM_WORKERS if set, else hardware concurrency.
int worker_count();

// Evaluates f(0..n-1) on the worker pool and returns results indexed by i.
std::vector<std::string> parallel_map_ordered(long long n,
                                              const std::function<std::string(long long)>& f);

// Monte-Carlo estimate of E[cut leaves per level-2 subtree] for the
// six-level periodic process with the children-only marking rule, and the
// Wald-identity estimate of (k')^6 = k^6 - k^2 E[cut leaves per subtree].
struct PeriodicEstimate {
  double k_prime6_hat;
  double stderr_;
  double mean_cut_leaves;
};
PeriodicEstimate periodic_process_estimate(double k, double eps, long long subtree_samples,
                                           uint64_t seed);

}  // namespace srbm
