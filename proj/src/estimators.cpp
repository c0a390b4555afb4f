#include "srbm/estimators.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "srbm/rng.hpp"

namespace srbm {

RootEstimate majority_vote(const Tree& t, uint64_t seed) {
  long long sum = 0;
  for (int v : t.leaves) sum += t.spin[v];
  RootEstimate e;
  if (sum > 0)
    e.spin = 1;
  else if (sum < 0)
    e.spin = -1;
  else
    e.spin = Rng(seed).stream("majority-tie").fair_spin();
  return e;
}

RootEstimate recursive_majority(const Tree& t, uint64_t seed) {
  const std::vector<uint8_t> is_leaf = t.leaf_flags();
  Rng base = Rng(seed).stream("recursive-majority");
  std::vector<int8_t> report(t.size());
  // BFS storage order: a reverse scan visits children before parents.
  for (int v = t.size() - 1; v >= 0; --v) {
    if (is_leaf[v]) {
      report[v] = t.spin[v];
      continue;
    }
    const int nc = t.num_children(v);
    if (nc == 0) {
      // Childless internal node: no information below, fair coin.
      report[v] = base.stream((uint64_t)v).fair_spin();
      continue;
    }
    long long sum = 0;
    for (int c = t.child_lo[v]; c < t.child_hi[v]; ++c) sum += report[c];
    if (sum > 0)
      report[v] = 1;
    else if (sum < 0)
      report[v] = -1;
    else
      // Tie: adopt a uniformly chosen child's report — a fair coin by
      // symmetry, and exactly equivariant under global spin flips.
      report[v] = report[t.child_lo[v] + (int)base.stream((uint64_t)v).below((uint64_t)nc)];
  }
  RootEstimate e;
  e.spin = report[0];
  return e;
}

std::vector<double> edge_noises(const Tree& t, double eps, bool eased) {
  const double ep = eps_prime(eps);
  std::vector<double> noise(t.size(), 0.0);
  for (int v = 1; v < t.size(); ++v) {
    int p = t.parent[v];
    if (eased && p == 0)
      noise[v] = 0.0;
    else if (t.mark[v] == Marking::Marked || t.mark[p] == Marking::Marked)
      noise[v] = ep;
    else
      noise[v] = eps;
  }
  return noise;
}

double advantage_bound(const Tree& t, const std::vector<double>& noises) {
  if ((int)noises.size() != t.size())
    throw std::invalid_argument("advantage_bound: noise vector length mismatch");
  std::vector<double> theta(t.size(), 1.0);
  for (int v = 1; v < t.size(); ++v) theta[v] = theta[t.parent[v]] * (1.0 - 2.0 * noises[v]);
  double sum = 0.0;
  for (int v : t.leaves) sum += theta[v] * theta[v];
  return std::sqrt(2.0 * sum);
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log((1-e) * exp(l_same) + e * exp(l_opp))
double log_mix(double e, double l_same, double l_opp) {
  double m = std::max(l_same, l_opp);
  if (m == kNegInf) return kNegInf;
  return m + std::log((1.0 - e) * std::exp(l_same - m) + e * std::exp(l_opp - m));
}

}  // namespace

RootEstimate exact_posterior(const Tree& t, const PosteriorModel& model) {
  if (t.size() > 10000) throw std::runtime_error("exact_posterior: tree exceeds 1e4 nodes");
  if (!(model.eps >= 0.0) || !(model.eps < 0.5))
    throw std::invalid_argument("exact_posterior: requires 0 <= eps < 1/2");

  const bool eased = model.kind == PosteriorModel::Dist4Eased;
  std::vector<double> noise;
  if (model.kind == PosteriorModel::Plain)
    noise.assign(t.size(), model.eps);
  else
    noise = edge_noises(t, model.eps, eased);

  const std::vector<uint8_t> is_leaf = t.leaf_flags();
  std::vector<double> lp(t.size()), lm(t.size());
  for (int v = t.size() - 1; v >= 1; --v) {
    if (is_leaf[v]) {
      lp[v] = t.spin[v] > 0 ? 0.0 : kNegInf;
      lm[v] = t.spin[v] > 0 ? kNegInf : 0.0;
      continue;
    }
    double up = 0.0, um = 0.0;
    for (int c = t.child_lo[v]; c < t.child_hi[v]; ++c) {
      up += log_mix(noise[c], lp[c], lm[c]);
      um += log_mix(noise[c], lm[c], lp[c]);
    }
    lp[v] = up;
    lm[v] = um;
  }

  // Root combine step.
  double root_p, root_m;
  const bool marked_root =
      model.kind != PosteriorModel::Plain && t.mark[0] == Marking::Marked && t.num_children(0) == 2;
  if (is_leaf[0]) {
    root_p = t.spin[0] > 0 ? 0.0 : kNegInf;
    root_m = t.spin[0] > 0 ? kNegInf : 0.0;
  } else if (marked_root && !eased) {
    // Surviving Marked root: children's relative spins follow D+ jointly.
    DPlus d = dplus_table(model.eps);
    int c1 = t.child_lo[0], c2 = c1 + 1;
    auto combine = [&](double l1s, double l1o, double l2s, double l2o) {
      double m = std::max(std::max(l1s + l2s, l1s + l2o), std::max(l1o + l2s, l1o + l2o));
      if (m == kNegInf) return kNegInf;
      return m + std::log(d.pp * std::exp(l1s + l2s - m) + d.pm * std::exp(l1s + l2o - m) +
                          d.mp * std::exp(l1o + l2s - m) + d.mm * std::exp(l1o + l2o - m));
    };
    root_p = combine(lp[c1], lm[c1], lp[c2], lm[c2]);
    root_m = combine(lm[c1], lp[c1], lm[c2], lp[c2]);
  } else {
    root_p = 0.0;
    root_m = 0.0;
    // In the eased variant root edges are noiseless (a Marked root then
    // propagates deterministic copies), so noise[c] is already 0 there.
    for (int c = t.child_lo[0]; c < t.child_hi[0]; ++c) {
      root_p += log_mix(noise[c], lp[c], lm[c]);
      root_m += log_mix(noise[c], lm[c], lp[c]);
    }
  }

  RootEstimate e;
  if (root_p == kNegInf && root_m == kNegInf) return e;  // impossible pattern under the model
  if (root_p >= root_m) {
    e.spin = 1;
    e.confidence = 1.0 / (1.0 + std::exp(root_m - root_p));
  } else {
    e.spin = -1;
    e.confidence = 1.0 / (1.0 + std::exp(root_p - root_m));
  }
  return e;
}

}  // namespace srbm
