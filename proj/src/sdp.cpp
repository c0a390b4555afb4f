#include "srbm/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "srbm/rng.hpp"

namespace srbm {

namespace {

Eigen::MatrixXd adjacency_matrix(const Graph& g) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(g.n, g.n);
  for (int u = 0; u < g.n; ++u)
    for (int v : g.adj[u]) a(u, v) = 1.0;
  return a;
}

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

SdpInstance build_objective(const Graph& g, const ModelParams& params, LambdaRule rule) {
  params.validate();
  if (params.n != g.n) throw std::invalid_argument("build_objective: params.n disagrees with graph");
  double lambda;
  switch (rule.kind) {
    case LambdaRule::Model: lambda = (params.a + params.b) / (2.0 * g.n); break;
    case LambdaRule::Fixed: lambda = std::log((double)g.n) / g.n; break;
    default: lambda = rule.value; break;
  }
  SdpInstance inst;
  inst.n = g.n;
  inst.lambda = lambda;
  inst.mode = params.mode;
  inst.B = adjacency_matrix(g);
  inst.B.array() -= lambda;
  if (params.mode == Mode::Dissortative) inst.B = -inst.B;  // maximize <lambda J - A, Z>
  return inst;
}

SdpSolution solve_sdp(const SdpInstance& inst, double tol, int max_iter) {
  const int n = inst.n;
  if (n < 1 || inst.B.rows() != n || inst.B.cols() != n)
    throw std::invalid_argument("solve_sdp: malformed instance");

  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(n, n);
  double rho = 1.0;

  SdpSolution sol;
  double r = 0, s = 0;
  int it = 0;
  for (it = 1; it <= max_iter; ++it) {
    X = project_psd(Y - U + inst.B / rho);
    Eigen::MatrixXd y_prev = std::move(Y);
    Y = X + U;
    for (int i = 0; i < n; ++i) Y(i, i) = std::min(Y(i, i), 1.0);
    U += X - Y;

    r = (X - Y).norm();
    s = rho * (Y - y_prev).norm();
    if (std::max(r, s) <= tol * n) {
      sol.converged = true;
      break;
    }
    // Residual balancing, frozen after an early window: each adjustment
    // rescales U and re-injects energy, so a perpetually adapting penalty
    // settles into a limit cycle instead of converging.
    if (it % 10 == 0 && it <= 100) {
      if (r > 10.0 * s && rho < 1e4) {
        rho *= 2.0;
        U /= 2.0;
      } else if (s > 10.0 * r && rho > 1e-4) {
        rho /= 2.0;
        U *= 2.0;
      }
    }
  }

  double scale = std::max(1.0, X.diagonal().maxCoeff());
  sol.Z = X / scale;
  sol.objective = (inst.B.array() * sol.Z.array()).sum();
  sol.iterations = std::min(it, max_iter);
  sol.primal_residual = r;
  sol.dual_residual = s;
  return sol;
}

Rounding round_solution(const SdpSolution& sol) {
  const int n = (int)sol.Z.rows();
  Rounding out;

  Rng rng = Rng(0x5eedULL).stream("rounding-start");
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.uniform() - 0.5;
  v.normalize();

  // Power iteration with Rayleigh-quotient stopping; Z is PSD so the dominant
  // eigenvalue is the top one.
  auto power = [&](const Eigen::MatrixXd& m, Eigen::VectorXd& x, double& eig) {
    double prev = 0.0;
    for (int it = 0; it < 20000; ++it) {
      Eigen::VectorXd y = m * x;
      double nrm = y.norm();
      if (nrm == 0.0) {
        eig = 0.0;
        return true;
      }
      x = y / nrm;
      double rq = x.dot(m * x);
      if (it > 0 && std::abs(rq - prev) <= 1e-8 * std::max(1.0, std::abs(rq))) {
        eig = rq;
        return true;
      }
      prev = rq;
    }
    return false;  // stagnation
  };

  Eigen::VectorXd top = v;
  double l1 = 0, l2 = 0;
  bool ok = power(sol.Z, top, l1);
  if (ok) {
    Eigen::MatrixXd deflated = sol.Z - l1 * top * top.transpose();
    Eigen::VectorXd second(n);
    for (int i = 0; i < n; ++i) second(i) = rng.uniform() - 0.5;
    second -= top * top.dot(second);
    second.normalize();
    ok = power(deflated, second, l2);
  }
  if (!ok) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sol.Z);
    l1 = es.eigenvalues()(n - 1);
    l2 = n > 1 ? es.eigenvalues()(n - 2) : 0.0;
    top = es.eigenvectors().col(n - 1);
  }

  out.top_eig = l1;
  out.second_eig = l2;
  out.degenerate = (l1 - l2) <= 1e-8 * std::max(1.0, l1);
  out.spins.resize(n);
  for (int i = 0; i < n; ++i) out.spins[i] = top(i) < 0.0 ? -1 : 1;
  return out;
}

namespace {

// Eligibility of a (u,v,s) entry: s=+1 adds a missing within-community edge,
// s=-1 deletes an existing cross edge (assortative; mirrored in dissortative
// mode, where "helpful" means adding cross edges and deleting within edges).
bool entry_eligible(const Graph& g, const std::vector<int8_t>& truth, Mode mode, int u, int v,
                    int s) {
  bool same = truth[u] == truth[v];
  bool edge = g.has_edge(u, v);
  bool add_same = mode == Mode::Assortative;
  if (s == +1) return !edge && (same == add_same);
  if (s == -1) return edge && (same != add_same);
  return false;
}

}  // namespace

MonotoneChange sample_monotone_change(const Graph& g, const std::vector<int8_t>& truth,
                                      const ChangeBudget& budget, Mode mode, uint64_t seed) {
  if ((int)truth.size() != g.n)
    throw std::invalid_argument("sample_monotone_change: truth length mismatch");
  MonotoneChange s;
  if (budget.kind == ChangeBudget::None) return s;

  if (budget.kind == ChangeBudget::AllCross) {
    // Delete every adversary-eligible edge (cross edges in assortative mode,
    // within-community edges in dissortative mode).
    for (int u = 0; u < g.n; ++u)
      for (int v : g.adj[u])
        if (u < v && entry_eligible(g, truth, mode, u, v, -1))
          s.entries.push_back({u, v, -1});
    return s;
  }

  // ProbPerPair: Bernoulli(p) per eligible pair, realized by skip-sampling
  // the linearized u<v pair index and filtering for eligibility (an
  // independent thinning, so eligible pairs still see probability p).
  if (!(budget.p >= 0.0 && budget.p <= 1.0))
    throw std::invalid_argument("sample_monotone_change: p outside [0,1]");
  Rng rng = Rng(seed).stream("monotone-change");
  const uint64_t total = (uint64_t)g.n * (g.n - 1) / 2;
  uint64_t pos = rng.geometric_skip(budget.p);
  while (pos < total) {
    // Unrank: row u has n-1-u pairs starting at offset u*n - u(u+1)/2... use
    // the quadratic inverse via search from the high side.
    uint64_t lo = 0, hi = (uint64_t)g.n - 1;
    auto offset = [&](uint64_t u) { return u * (uint64_t)(g.n - 1) - u * (u - 1) / 2; };
    while (lo + 1 < hi) {
      uint64_t mid = (lo + hi) / 2;
      if (offset(mid) <= pos)
        lo = mid;
      else
        hi = mid;
    }
    int u = (int)lo, v = u + 1 + (int)(pos - offset(lo));
    if (entry_eligible(g, truth, mode, u, v, +1))
      s.entries.push_back({u, v, +1});
    else if (entry_eligible(g, truth, mode, u, v, -1))
      s.entries.push_back({u, v, -1});
    uint64_t step = rng.geometric_skip(budget.p);
    if (step >= total - pos - 1) break;
    pos += step + 1;
  }
  return s;
}

bool validate_monotone_change(const MonotoneChange& s, const Graph& g,
                              const std::vector<int8_t>& truth, Mode mode) {
  if ((int)truth.size() != g.n) return false;
  std::vector<std::pair<int, int>> seen;
  seen.reserve(s.entries.size());
  for (const auto& e : s.entries) {
    int u = e[0], v = e[1], sg = e[2];
    if (u < 0 || v < 0 || u >= g.n || v >= g.n || u >= v) return false;
    if (sg != 1 && sg != -1) return false;
    if (!entry_eligible(g, truth, mode, u, v, sg)) return false;
    seen.push_back({u, v});
  }
  std::sort(seen.begin(), seen.end());
  return std::adjacent_find(seen.begin(), seen.end()) == seen.end();
}

void apply_change_to_objective(SdpInstance& inst, const MonotoneChange& s) {
  // The change acts on the adjacency matrix; in dissortative mode the stored
  // objective is -(A - lambda J), so the sign flips.
  double f = inst.mode == Mode::Dissortative ? -1.0 : 1.0;
  for (const auto& e : s.entries) {
    inst.B(e[0], e[1]) += f * e[2];
    inst.B(e[1], e[0]) += f * e[2];
  }
}

Graph apply_change_to_graph(const Graph& g, const MonotoneChange& s) {
  Graph out = g;
  for (const auto& e : s.entries) {
    if (e[2] > 0)
      out.add_edge(e[0], e[1]);
    else
      out.remove_edge(e[0], e[1]);
  }
  return out;
}

CertificateReport dual_certificate(const Graph& g, const ModelParams& params,
                                   const std::vector<int8_t>& truth, double lambda_prime) {
  params.validate();
  if ((int)truth.size() != g.n)
    throw std::invalid_argument("dual_certificate: truth length mismatch");
  const int n = g.n;
  const double lambda = (params.a + params.b) / (2.0 * n);
  const double shift = lambda - lambda_prime;
  const double diff = params.mode == Mode::Assortative ? (params.a - params.b) / 2.0
                                                       : (params.b - params.a) / 2.0;
  const double sign = params.mode == Mode::Assortative ? 1.0 : -1.0;

  long long cen = 0;
  for (int8_t x : truth) cen += x;

  Eigen::VectorXd sigma(n);
  for (int v = 0; v < n; ++v) sigma(v) = truth[v];

  CertificateReport rep;
  rep.gamma.resize(n);
  // |C_v| - |C_bar_v| = census * sigma_v.
  for (int v = 0; v < n; ++v) rep.gamma(v) = diff + sign * shift * cen * truth[v];

  // Lambda = diag(gamma) - (diff/n) sigma sigma^T - sign * shift * J; only
  // the J coefficient flips with the mode ((b-a)/2 stays the sigma sigma^T
  // weight in dissortative mode, where diff is already (b-a)/2).
  Eigen::MatrixXd lam = rep.gamma.asDiagonal();
  lam -= (diff / n) * sigma * sigma.transpose();
  lam -= Eigen::MatrixXd::Constant(n, n, sign * shift);

  rep.gamma_min = rep.gamma.minCoeff();
  rep.lambda_sigma_inf = (lam * sigma).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lam);
  rep.lambda_min_eig = es.eigenvalues()(0);
  rep.gamma_nonneg = rep.gamma_min >= 0.0;
  rep.sigma_in_kernel = rep.lambda_sigma_inf <= 1e-8 * n;
  rep.psd = rep.lambda_min_eig >= -1e-6;
  return rep;
}

double cut_norm(const Eigen::MatrixXd& m, CutNormMode mode, uint64_t seed) {
  const int n = (int)m.cols();
  if (n == 0) return 0.0;
  if (m.rows() != n) throw std::invalid_argument("cut_norm: matrix must be square");

  if (mode == CutNormMode::Exact) {
    if (n > 24) throw std::invalid_argument("cut_norm: exact mode requires n <= 24");
    // Gray-code walk over x in {-1,+1}^n with x_0 fixed (global flip
    // symmetry); each step flips one coordinate and updates y = Mx in O(n).
    Eigen::VectorXd y = m.rowwise().sum();  // x = all ones
    Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
    double best = y.lpNorm<1>();
    const uint64_t steps = n > 1 ? (1ULL << (n - 1)) : 1;
    for (uint64_t i = 1; i < steps; ++i) {
      // Gray code flips bit ctz(i); offset by one to keep x_0 fixed.
      int j = 1 + __builtin_ctzll(i);
      x(j) = -x(j);
      y += 2.0 * x(j) * m.col(j);
      best = std::max(best, y.lpNorm<1>());
    }
    return best;
  }

  Rng rng = Rng(seed).stream("cut-norm");
  double best = 0.0;
  const int starts = 20;
  for (int s = 0; s < starts; ++s) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = rng.bernoulli(0.5) ? 1.0 : -1.0;
    Eigen::VectorXd y = m * x;
    double cur = y.lpNorm<1>();
    bool improved = true;
    while (improved) {
      improved = false;
      for (int j = 0; j < n; ++j) {
        Eigen::VectorXd y2 = y - 2.0 * x(j) * m.col(j);
        double v2 = y2.lpNorm<1>();
        if (v2 > cur + 1e-12) {
          x(j) = -x(j);
          y = std::move(y2);
          cur = v2;
          improved = true;
        }
      }
    }
    best = std::max(best, cur);
  }
  return best;
}

}  // namespace srbm
