#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "srbm/graph.hpp"

namespace srbm {

struct LambdaRule {
  enum Kind { Model, Fixed, Explicit } kind = Model;
  double value = 0;  // used by Explicit
};

struct SdpInstance {
  Eigen::MatrixXd B;  // A - lambda J, with unit diagonal on A
  double lambda = 0;
  int n = 0;
  Mode mode = Mode::Assortative;
};

// A from adjacency with ones on the diagonal; B = A - lambda J with lambda =
// (a+b)/2n (Model), log n / n (Fixed), or an explicit value. In dissortative
// mode the solver maximizes <lambda J - A, Z>, which build_objective encodes
// by negating B.
SdpInstance build_objective(const Graph& g, const ModelParams& params, LambdaRule rule);

struct SdpSolution {
  Eigen::MatrixXd Z;
  double objective = 0;
  int iterations = 0;
  double primal_residual = 0;
  double dual_residual = 0;
  bool converged = false;
};

// Maximizes <B, Z> over Omega = {Z PSD, diag(Z) <= 1} by alternating-
// direction splitting between the PSD cone (projection via full symmetric
// eigendecomposition) and the diagonal box, linear objective folded into the
// proximal step; penalty starts at 1.0 with residual-balancing adaptation
// over the first 100 iterations only (each adjustment rescales the dual
// variable, so perpetual adaptation cycles instead of converging); stops
// when max(primal, dual) residual <= tol * n or at max_iter. The returned Z
// is the PSD-projected iterate rescaled so diag(Z) <= 1 holds exactly;
// non-convergence is reported in the diagnostics, not thrown.
SdpSolution solve_sdp(const SdpInstance& inst, double tol = 1e-6, int max_iter = 5000);

struct Rounding {
  std::vector<int8_t> spins;
  bool degenerate = false;  // top eigenvalue gap below 1e-8 relative
  double top_eig = 0;
  double second_eig = 0;
};

// Signs of the top eigenvector of Z by power iteration (deterministic start,
// 1e-8 relative tolerance, deflation for the gap diagnostic, full
// eigendecomposition on stagnation); exact zeros round to +1.
Rounding round_solution(const SdpSolution& sol);

struct MonotoneChange {
  // Entries (u, v, s) with u < v; s = +1 adds a within-community edge on a
  // non-edge, s = -1 removes a cross-community edge (assortative; mirrored
  // in dissortative mode).
  std::vector<std::array<int, 3>> entries;
};

struct ChangeBudget {
  enum Kind { None, AllCross, ProbPerPair } kind = None;
  double p = 0;  // ProbPerPair: independent probability per eligible pair
};

MonotoneChange sample_monotone_change(const Graph& g, const std::vector<int8_t>& truth,
                                      const ChangeBudget& budget, Mode mode,
                                      uint64_t seed);

bool validate_monotone_change(const MonotoneChange& s, const Graph& g,
                              const std::vector<int8_t>& truth, Mode mode);

// B + S (entrywise on the symmetric pair).
void apply_change_to_objective(SdpInstance& inst, const MonotoneChange& s);
// A + S as a graph edit (edge additions/removals).
Graph apply_change_to_graph(const Graph& g, const MonotoneChange& s);

struct CertificateReport {
  Eigen::VectorXd gamma;
  double gamma_min = 0;
  double lambda_sigma_inf = 0;  // max |(Lambda sigma)_v|
  double lambda_min_eig = 0;
  bool gamma_nonneg = false;
  bool sigma_in_kernel = false;
  bool psd = false;
};

// gamma_v = (a-b)/2 + (lambda - lambda') (|C_v| - |C_bar_v|) with lambda =
// (a+b)/2n and lambda' the regularizer (the (a+b)/2n coefficient is what
// makes Lambda sigma vanish identically); Lambda = diag(gamma) - R' with
// R' = (a-b)/(2n) sigma sigma^T + (lambda - lambda') J. Signs mirror in
// dissortative mode. The certificate depends only on the spins and rates;
// the graph supplies n and a consistency check.
CertificateReport dual_certificate(const Graph& g, const ModelParams& params,
                                   const std::vector<int8_t>& truth, double lambda_prime);

// max_{x in {-1,+1}^n} ||Mx||_1. Exact mode enumerates sign vectors by Gray
// code (n <= 24); heuristic mode runs greedy coordinate ascent from seeded
// random starts and returns the best value found (a valid lower bound).
enum class CutNormMode { Exact, Heuristic };
double cut_norm(const Eigen::MatrixXd& m, CutNormMode mode, uint64_t seed = 0);

}  // namespace srbm
