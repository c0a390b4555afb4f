#include "srbm/sbm.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "srbm/rng.hpp"

namespace srbm {

namespace {

// Unrank pair index t (lexicographic over i<j, class size s) to local indices.
std::pair<int, int> unrank_triangular(uint64_t t, int s) {
  // Row i starts at offset(i) = i*(s-1) - i*(i-1)/2 and holds s-1-i pairs.
  auto offset = [&](uint64_t i) { return i * (uint64_t)(s - 1) - i * (i - 1) / 2; };
  uint64_t lo = 0, hi = (uint64_t)s - 1;  // find largest i with offset(i) <= t
  while (lo + 1 < hi) {
    uint64_t mid = (lo + hi) / 2;
    if (offset(mid) <= t)
      lo = mid;
    else
      hi = mid;
  }
  int i = (int)lo;
  int j = i + 1 + (int)(t - offset(lo));
  return {i, j};
}

// Bernoulli(p) sweep over `total` linearly indexed slots via geometric skips.
template <typename Emit>
void skip_sample(Rng& rng, uint64_t total, double p, Emit&& emit) {
  if (p <= 0 || total == 0) return;
  uint64_t pos = rng.geometric_skip(p);
  while (pos < total) {
    emit(pos);
    uint64_t step = rng.geometric_skip(p);
    if (step >= total - pos - 1) break;  // also covers the UINT64_MAX sentinel
    pos += step + 1;
  }
}

}  // namespace

Graph sample_precursor(const ModelParams& params, uint64_t seed) {
  params.validate();
  const int n = params.n;
  Graph g = make_graph(n);
  Rng root(seed);

  Rng spin_rng = root.stream("spins");
  std::vector<int> plus, minus;
  for (int v = 0; v < n; ++v) {
    g.spins[v] = spin_rng.fair_spin();
    (g.spins[v] > 0 ? plus : minus).push_back(v);
  }

  const double p_in = params.a / n;
  const double p_cross = params.b / n;

  auto sample_within = [&](const std::vector<int>& cls, Rng rng) {
    const int s = (int)cls.size();
    if (s < 2) return;
    uint64_t total = (uint64_t)s * (s - 1) / 2;
    skip_sample(rng, total, p_in, [&](uint64_t t) {
      auto [i, j] = unrank_triangular(t, s);
      g.adj[cls[i]].push_back(cls[j]);
      g.adj[cls[j]].push_back(cls[i]);
    });
  };
  sample_within(plus, root.stream("edges-pp"));
  sample_within(minus, root.stream("edges-mm"));

  if (!plus.empty() && !minus.empty()) {
    Rng rng = root.stream("edges-cross");
    uint64_t total = (uint64_t)plus.size() * minus.size();
    skip_sample(rng, total, p_cross, [&](uint64_t t) {
      int i = (int)(t / minus.size()), j = (int)(t % minus.size());
      g.adj[plus[i]].push_back(minus[j]);
      g.adj[minus[j]].push_back(plus[i]);
    });
  }

  for (auto& row : g.adj) std::sort(row.begin(), row.end());
  return g;
}

long long census(const std::vector<int8_t>& spins) {
  long long s = 0;
  for (int8_t x : spins) s += x;
  return s;
}

int coupling_radius(const ModelParams& params) {
  const double base = 2.0 * (params.a + params.b);
  if (base <= 1.0) throw std::invalid_argument("coupling_radius: requires a + b > 1/2");
  double x = std::log((double)params.n) / (10.0 * std::log(base));
  double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) x = r;
  return (int)std::floor(x) - 3;
}

Ball extract_ball(const Graph& g, int center, int radius) {
  if (center < 0 || center >= g.n) throw std::invalid_argument("extract_ball: center out of range");
  if (radius < 0) throw std::invalid_argument("extract_ball: negative radius");

  std::vector<int> dist(g.n, -1), order;
  dist[center] = 0;
  order.push_back(center);
  std::deque<int> queue{center};
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    if (dist[v] == radius) continue;
    for (int u : g.adj[v])
      if (dist[u] < 0) {
        dist[u] = dist[v] + 1;
        order.push_back(u);
        queue.push_back(u);
      }
  }

  Ball ball;
  ball.original_ids = order;
  std::vector<int> local(g.n, -1);
  for (int i = 0; i < (int)order.size(); ++i) local[order[i]] = i;

  ball.subgraph = make_graph((int)order.size());
  for (int i = 0; i < (int)order.size(); ++i) {
    int v = order[i];
    ball.subgraph.spins[i] = g.spins[v];
    ball.subgraph.markings[i] = g.markings[v];
    for (int u : g.adj[v])
      if (local[u] >= 0) ball.subgraph.adj[i].push_back(local[u]);
    std::sort(ball.subgraph.adj[i].begin(), ball.subgraph.adj[i].end());
    if (dist[v] == radius) ball.boundary.push_back(i);
  }
  return ball;
}

double partial_recovery_score(const std::vector<int8_t>& est, const std::vector<int8_t>& truth) {
  if (est.size() != truth.size())
    throw std::invalid_argument("partial_recovery_score: length mismatch");
  if (est.empty()) throw std::invalid_argument("partial_recovery_score: empty input");
  long long agree = 0;
  for (size_t v = 0; v < est.size(); ++v) agree += (est[v] == truth[v]);
  long long n = (long long)est.size();
  return (double)std::max(agree, n - agree) / (double)n;
}

}  // namespace srbm
