#include "srbm/adversary.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "srbm/rng.hpp"

namespace srbm {

double delta_of_eps(double eps) {
  if (!(eps >= 0.0) || !(eps < 0.5))
    throw std::invalid_argument("delta_of_eps: requires 0 <= eps < 1/2");
  if (eps <= 1.0 / 3.0) return 1.0;
  double r = (1.0 - 2.0 * eps) / eps;
  return r * r;
}

namespace {

bool has_goodness_property(const Graph& g, int v) {
  int nontwo = 0;
  for (int u : g.adj[v])
    if (g.degree(u) != 2 && ++nontwo == 3) return true;
  return false;
}

bool is_cuttable(const Graph& g, int v, Mode mode) {
  if (g.markings[v] != Marking::Marked || g.degree(v) != 2) return false;
  int w1 = g.adj[v][0], w2 = g.adj[v][1];
  if (mode == Mode::Assortative)
    return g.spins[w1] != g.spins[v] && g.spins[w2] != g.spins[v];
  return g.spins[w1] == g.spins[v] && g.spins[w2] == g.spins[v];
}

}  // namespace

Graph assign_markings(const Graph& g) {
  for (Marking m : g.markings)
    if (m != Marking::None)
      throw std::invalid_argument("assign_markings: markings already assigned");
  Graph out = g;
  for (int v = 0; v < g.n; ++v)
    if (has_goodness_property(g, v)) out.markings[v] = Marking::Good;
  for (int v = 0; v < g.n; ++v)
    if (g.degree(v) == 2 && out.markings[v] != Marking::Good &&
        out.markings[g.adj[v][0]] == Marking::Good && out.markings[g.adj[v][1]] == Marking::Good)
      out.markings[v] = Marking::Marked;
  return out;
}

AdversaryOutcome apply_adversary(const Graph& g, const ModelParams& params, uint64_t seed) {
  const double delta = delta_of_eps(params.flip_noise());
  AdversaryOutcome out;
  out.graph = g;
  out.delta = delta;
  Rng rng = Rng(seed).stream("adversary-cuts");
  for (int v = 0; v < g.n; ++v) {
    if (!is_cuttable(g, v, params.mode)) continue;
    if (rng.bernoulli(delta)) {
      out.graph.remove_edge(v, g.adj[v][0]);
      out.graph.remove_edge(v, g.adj[v][1]);
      out.cut_nodes.push_back(v);
      ++out.m;
    } else {
      ++out.w;
    }
  }
  return out;
}

std::pair<BigInt, PrecursorCensus> count_precursors(const Graph& g, Mode mode) {
  PrecursorCensus c;
  long long good_plus = 0, good_minus = 0, iso_plus = 0, iso_minus = 0;
  for (int v = 0; v < g.n; ++v) {
    if (g.markings[v] == Marking::Good) {
      ++c.g;
      (g.spins[v] > 0 ? good_plus : good_minus)++;
    } else if (g.markings[v] == Marking::Marked && g.degree(v) == 0) {
      ++c.m;
      (g.spins[v] > 0 ? iso_plus : iso_minus)++;
    }
  }
  c.alpha2 = iso_plus - iso_minus;
  c.beta2 = good_plus - good_minus;

  auto choose2 = [](long long s) { return BigInt(s) * (s - 1) / 2; };
  // Each isolated MARKED node reconnects to an unordered pair of GOOD nodes of
  // the opposite spin (same spin in dissortative mode).
  BigInt base_for_plus = (mode == Mode::Assortative) ? choose2(good_minus) : choose2(good_plus);
  BigInt base_for_minus = (mode == Mode::Assortative) ? choose2(good_plus) : choose2(good_minus);
  BigInt count = 1;
  for (long long i = 0; i < iso_plus; ++i) count *= base_for_plus;
  for (long long i = 0; i < iso_minus; ++i) count *= base_for_minus;
  return {count, c};
}

double precursor_probability(long long w, long long m, double delta) {
  if (w < 0 || m < 0) throw std::invalid_argument("precursor_probability: negative count");
  if (!(delta >= 0.0 && delta <= 1.0))
    throw std::invalid_argument("precursor_probability: delta outside [0,1]");
  auto int_pow = [](double x, long long e) {
    if (e == 0) return 1.0;  // 0^0 = 1 by convention
    double r = 1.0;
    for (long long i = 0; i < e; ++i) r *= x;
    return r;
  };
  return int_pow(1.0 - delta, w) * int_pow(delta, m);
}

std::vector<std::string> verify_structure(const Graph& pre, const AdversaryOutcome& post) {
  std::vector<std::string> violations;
  const Graph& p = post.graph;
  auto report = [&](int v, const std::string& what) {
    std::ostringstream os;
    os << "node " << v << ": " << what;
    violations.push_back(os.str());
  };

  if (pre.n != p.n) {
    violations.push_back("node count changed");
    return violations;
  }

  std::vector<char> cut(p.n, 0);
  for (int v : post.cut_nodes) cut[v] = 1;

  for (int v = 0; v < p.n; ++v) {
    // (i) Every GOOD node keeps degree >= 3 after cutting.
    if (p.markings[v] == Marking::Good && p.degree(v) < 3)
      report(v, "GOOD node with degree < 3 in post graph");

    // (ii) Degree-2 nodes in post existed as degree-2 in pre with the same
    // neighbor pair (cutting can only remove degree-2 nodes, not create them).
    if (p.degree(v) == 2 && (pre.degree(v) != 2 || pre.adj[v] != p.adj[v]))
      report(v, "new or altered degree-2 node in post graph");

    // (iii) GOOD markings coincide with the goodness property recomputed on post.
    bool good_now = has_goodness_property(p, v);
    if ((p.markings[v] == Marking::Good) != good_now)
      report(v, good_now ? "unmarked node acquired goodness property"
                         : "GOOD node lost goodness property");

    // (iv) MARKED nodes are exactly: degree 2 with two GOOD neighbors, or
    // isolated cut nodes; and every degree-2-two-GOOD node is MARKED.
    bool deg2_two_good = p.degree(v) == 2 && p.markings[p.adj[v][0]] == Marking::Good &&
                         p.markings[p.adj[v][1]] == Marking::Good;
    if (p.markings[v] == Marking::Marked) {
      if (!deg2_two_good && !(p.degree(v) == 0 && cut[v]))
        report(v, "MARKED node neither degree-2-with-GOOD-neighbors nor a cut node");
    } else if (deg2_two_good && p.markings[v] != Marking::Good) {
      report(v, "degree-2 node with two GOOD neighbors not MARKED");
    }
  }
  return violations;
}

}  // namespace srbm
