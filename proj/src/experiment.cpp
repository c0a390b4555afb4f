#include "srbm/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "srbm/adversary.hpp"
#include "srbm/estimators.hpp"
#include "srbm/rng.hpp"
#include "srbm/sbm.hpp"
#include "srbm/sdp.hpp"
#include "srbm/thresholds.hpp"
#include "srbm/tree.hpp"

namespace srbm {

const std::vector<std::string>& ExperimentSpec::grid(const std::string& key) const {
  auto it = grids.find(key);
  if (it == grids.end() || it->second.empty())
    throw std::invalid_argument("experiment spec: missing key '" + key + "'");
  return it->second;
}

bool ExperimentSpec::has(const std::string& key) const {
  auto it = grids.find(key);
  return it != grids.end() && !it->second.empty();
}

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double as_double(const std::string& s) { return std::stod(s); }
int as_int(const std::string& s) { return std::stoi(s); }

// Fixed defaults keep one-line specs usable.
std::vector<std::string> grid_or(const ExperimentSpec& spec, const std::string& key,
                                 const std::string& fallback) {
  return spec.has(key) ? spec.grid(key) : std::vector<std::string>{fallback};
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  if (path.empty()) return;
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  for (const auto& l : lines) f << l << "\n";
}

}  // namespace

ExperimentSpec parse_experiment_spec(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open experiment spec: " + path);
  ExperimentSpec spec;
  bool saw_seed = false;
  std::string line;
  while (std::getline(f, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("experiment spec: expected key=value, got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key == "kind") {
      spec.kind = val;
    } else if (key == "trials") {
      spec.trials = std::stoll(val);
    } else if (key == "seed") {
      spec.seed = std::stoull(val);
      saw_seed = true;
    } else {
      spec.grids[key] = split_list(val);
    }
  }
  if (spec.kind.empty()) throw std::runtime_error("experiment spec: missing 'kind'");
  if (spec.trials < 1) throw std::runtime_error("experiment spec: trials must be >= 1");
  if (!saw_seed) throw std::runtime_error("experiment spec: missing 'seed' (no ambient randomness)");
  return spec;
}

std::string csv_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

int worker_count() {
  if (const char* env = std::getenv("SRBM_WORKERS")) {
    int w = std::atoi(env);
    if (w > 0) return w;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? (int)hc : 1;
}

std::vector<std::string> parallel_map_ordered(long long n,
                                              const std::function<std::string(long long)>& f) {
  std::vector<std::string> out((size_t)n);
  const int workers = std::min<long long>(worker_count(), std::max(1LL, n));
  if (workers <= 1) {
    for (long long i = 0; i < n; ++i) out[(size_t)i] = f(i);
    return out;
  }
  std::atomic<long long> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        long long i = next.fetch_add(1);
        if (i >= n) return;
        try {
          out[(size_t)i] = f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return out;
}

namespace {

// --- tree sweep ------------------------------------------------------------

Tree sample_for(const std::string& dist, double k, double eps, int R, uint64_t seed) {
  if (dist == "plain") return sample_plain(k, eps, R, Branching::Poisson, seed);
  if (dist == "regular") return sample_plain(k, eps, R, Branching::Regular, seed);
  if (dist == "d2" || dist == "d3") return sample_dist2(k, eps, R, seed);
  if (dist == "d4") return sample_dist4(k, eps, R, seed);
  throw std::invalid_argument("unknown dist '" + dist + "'");
}

struct TreePoint {
  double k, eps, asym;
  int R, asym_sign;
  std::string dist, adversary, algo;
};

bool tree_trial_success(const TreePoint& pt, uint64_t base_seed, long long point_idx,
                        long long trial) {
  Rng tr = Rng(base_seed).stream("tree-sweep").stream((uint64_t)point_idx).stream((uint64_t)trial);
  uint64_t tree_seed = tr.next_u64();
  uint64_t est_seed = tr.next_u64();
  uint64_t adv_seed = tr.next_u64();

  double grow_eps = pt.adversary == "asym" ? pt.eps + pt.asym : pt.eps;
  Tree t = sample_for(pt.dist, pt.k, grow_eps, pt.R, tree_seed);
  int8_t root = t.spin[0];

  if (pt.adversary == "cutting")
    t = cutting_adversary_majority_breaker(t);
  else if (pt.adversary == "opp-path")
    t = strong_adversary_opposite_path(t);
  else if (pt.adversary == "asym")
    t = strong_adversary_asymmetric(t, pt.eps, pt.asym, pt.asym_sign, adv_seed);
  else if (pt.adversary != "none")
    throw std::invalid_argument("unknown adversary '" + pt.adversary + "'");

  RootEstimate est;
  if (pt.algo == "maj")
    est = majority_vote(t, est_seed);
  else if (pt.algo == "recmaj")
    est = recursive_majority(t, est_seed);
  else if (pt.algo == "map") {
    PosteriorModel model;
    model.kind = (pt.dist == "plain" || pt.dist == "regular") ? PosteriorModel::Plain
                                                              : PosteriorModel::Dist4;
    model.eps = pt.eps;
    est = exact_posterior(t, model);
  } else {
    throw std::invalid_argument("unknown algo '" + pt.algo + "'");
  }
  return est.spin == root;
}

}  // namespace

std::vector<std::string> run_tree_sweep(const ExperimentSpec& spec, const std::string& csv_path) {
  std::vector<std::string> lines;
  lines.push_back("k,eps,R,dist,adversary,algo,trials,successes,success_rate,stderr");

  long long point_idx = 0;
  for (const auto& ks : grid_or(spec, "k", "3"))
    for (const auto& es : grid_or(spec, "eps", "0.1"))
      for (const auto& rs : grid_or(spec, "depth", "4"))
        for (const auto& ds : grid_or(spec, "dist", "plain"))
          for (const auto& as : grid_or(spec, "adversary", "none"))
            for (const auto& gs : grid_or(spec, "algo", "maj")) {
              TreePoint pt;
              pt.k = as_double(ks);
              pt.eps = as_double(es);
              pt.R = as_int(rs);
              pt.dist = ds;
              pt.adversary = as;
              pt.algo = gs;
              pt.asym = spec.has("asym") ? as_double(spec.grid("asym")[0]) : 0.0;
              pt.asym_sign = spec.has("asym_sign") ? as_int(spec.grid("asym_sign")[0]) : 1;

              long long idx = point_idx++;
              std::vector<std::string> bits = parallel_map_ordered(
                  spec.trials, [&](long long i) {
                    return tree_trial_success(pt, spec.seed, idx, i) ? "1" : "0";
                  });
              long long succ = 0;
              for (const auto& b : bits) succ += b == "1";
              double rate = (double)succ / spec.trials;
              double se = std::sqrt(rate * (1.0 - rate) / spec.trials);
              std::ostringstream row;
              row << ks << "," << es << "," << pt.R << "," << ds << "," << as << "," << gs << ","
                  << spec.trials << "," << succ << "," << csv_double(rate) << ","
                  << csv_double(se);
              lines.push_back(row.str());
            }
  write_lines(csv_path, lines);
  return lines;
}

std::vector<std::string> run_cobweb(int k, double eps, int iterations,
                                    const std::string& csv_path) {
  if (k < 3) throw std::invalid_argument("run_cobweb: requires k >= 3");
  std::vector<std::string> lines;
  lines.push_back("t,q,m_of_q,line");
  double q = 1.0 - eps;
  for (int t = 0; t <= iterations; ++t) {
    double m = majority_fn(k, q);
    std::ostringstream row;
    row << t << "," << csv_double(q) << "," << csv_double(m) << ","
        << csv_double(q / (1.0 - eps));
    lines.push_back(row.str());
    q = m * (1.0 - eps);
  }
  write_lines(csv_path, lines);
  return lines;
}

namespace {

// --- graph recovery ---------------------------------------------------------

struct GraphPoint {
  int n;
  double a, b;
  Mode mode;
  std::string adversary, budget_str, algo;
  LambdaRule rule;
  double sdp_tol;
  int sdp_max_iter;
};

ChangeBudget parse_budget(const std::string& s) {
  ChangeBudget b;
  if (s == "none") {
    b.kind = ChangeBudget::None;
  } else if (s == "all-cross") {
    b.kind = ChangeBudget::AllCross;
  } else if (s.rfind("prob:", 0) == 0) {
    b.kind = ChangeBudget::ProbPerPair;
    b.p = as_double(s.substr(5));
  } else {
    throw std::invalid_argument("unknown change budget '" + s + "'");
  }
  return b;
}

LambdaRule parse_lambda(const std::string& s) {
  LambdaRule r;
  if (s == "model") {
    r.kind = LambdaRule::Model;
  } else if (s == "fixed") {
    r.kind = LambdaRule::Fixed;
  } else {
    r.kind = LambdaRule::Explicit;
    r.value = as_double(s);
  }
  return r;
}

struct RecoveryResult {
  double score = 0.5;
  double objective = 0;
  int iterations = 0;
  bool converged = false;
  std::vector<int8_t> est;
  std::vector<int8_t> truth;
};

RecoveryResult run_one_recovery(const GraphPoint& pt, uint64_t base_seed, long long point_idx,
                                long long trial, const char* tag) {
  Rng tr = Rng(base_seed).stream(tag).stream((uint64_t)point_idx).stream((uint64_t)trial);
  uint64_t gen_seed = tr.next_u64();
  uint64_t adv_seed = tr.next_u64();
  uint64_t chg_seed = tr.next_u64();

  ModelParams params;
  params.n = pt.n;
  params.a = pt.a;
  params.b = pt.b;
  params.mode = pt.mode;

  Graph g = sample_precursor(params, gen_seed);
  if (pt.adversary == "dist1") {
    g = apply_adversary(assign_markings(g), params, adv_seed).graph;
  } else if (pt.adversary != "none") {
    throw std::invalid_argument("unknown graph adversary '" + pt.adversary + "'");
  }

  RecoveryResult res;
  res.truth = g.spins;
  if (pt.algo == "truth") {
    res.est = g.spins;
    res.score = 1.0;
    res.converged = true;
    return res;
  }
  if (pt.algo != "sdp") throw std::invalid_argument("unknown graph algo '" + pt.algo + "'");

  SdpInstance inst = build_objective(g, params, pt.rule);
  ChangeBudget budget = parse_budget(pt.budget_str);
  if (budget.kind != ChangeBudget::None) {
    MonotoneChange change = sample_monotone_change(g, g.spins, budget, params.mode, chg_seed);
    apply_change_to_objective(inst, change);
  }
  SdpSolution sol = solve_sdp(inst, pt.sdp_tol, pt.sdp_max_iter);
  Rounding r = round_solution(sol);
  res.est = r.spins;
  res.score = partial_recovery_score(r.spins, g.spins);
  res.objective = sol.objective;
  res.iterations = sol.iterations;
  res.converged = sol.converged;
  return res;
}

std::vector<GraphPoint> graph_points(const ExperimentSpec& spec) {
  std::vector<GraphPoint> pts;
  for (const auto& ns : grid_or(spec, "n", "200"))
    for (const auto& as : grid_or(spec, "a", "10"))
      for (const auto& bs : grid_or(spec, "b", "2"))
        for (const auto& ms : grid_or(spec, "mode", "assort"))
          for (const auto& ad : grid_or(spec, "adversary", "none"))
            for (const auto& bu : grid_or(spec, "change_budget", "none"))
              for (const auto& al : grid_or(spec, "algo", "sdp")) {
                GraphPoint pt;
                pt.n = as_int(ns);
                pt.a = as_double(as);
                pt.b = as_double(bs);
                pt.mode = ms == "dissort" ? Mode::Dissortative : Mode::Assortative;
                pt.adversary = ad;
                pt.budget_str = bu;
                pt.algo = al;
                pt.rule = parse_lambda(grid_or(spec, "lambda", "model")[0]);
                pt.sdp_tol = spec.has("sdp_tol") ? as_double(spec.grid("sdp_tol")[0]) : 1e-6;
                pt.sdp_max_iter =
                    spec.has("sdp_max_iter") ? as_int(spec.grid("sdp_max_iter")[0]) : 5000;
                if (pt.n > 2000) throw std::invalid_argument("graph recovery: SDP sizes <= 2000");
                pts.push_back(pt);
              }
  return pts;
}

}  // namespace

std::vector<std::string> run_graph_recovery(const ExperimentSpec& spec,
                                            const std::string& csv_path) {
  std::vector<std::string> lines;
  lines.push_back("n,a,b,mode,adversary,change_budget,algo,trial,score,objective,iterations,converged");
  std::vector<GraphPoint> pts = graph_points(spec);
  for (size_t p = 0; p < pts.size(); ++p) {
    const GraphPoint& pt = pts[p];
    std::vector<std::string> rows = parallel_map_ordered(spec.trials, [&](long long i) {
      RecoveryResult r = run_one_recovery(pt, spec.seed, (long long)p, i, "graph-recovery");
      std::ostringstream row;
      row << pt.n << "," << csv_double(pt.a) << "," << csv_double(pt.b) << ","
          << (pt.mode == Mode::Assortative ? "assort" : "dissort") << "," << pt.adversary << ","
          << pt.budget_str << "," << pt.algo << "," << i << "," << csv_double(r.score) << ","
          << csv_double(r.objective) << "," << r.iterations << "," << (r.converged ? 1 : 0);
      return row.str();
    });
    lines.insert(lines.end(), rows.begin(), rows.end());
  }
  write_lines(csv_path, lines);
  return lines;
}

std::vector<std::string> run_relative_spin(const ExperimentSpec& spec,
                                           const std::string& csv_path) {
  std::vector<std::string> lines;
  lines.push_back("n,a,b,mode,adversary,algo,trial,rel_spin_accuracy,eta_sq_accuracy");
  std::vector<GraphPoint> pts = graph_points(spec);
  long long pairs = spec.has("pairs") ? std::stoll(spec.grid("pairs")[0]) : 1000;
  for (size_t p = 0; p < pts.size(); ++p) {
    const GraphPoint& pt = pts[p];
    std::vector<std::string> rows = parallel_map_ordered(spec.trials, [&](long long i) {
      RecoveryResult r = run_one_recovery(pt, spec.seed, (long long)p, i, "relative-spin");
      Rng pair_rng =
          Rng(spec.seed).stream("relative-spin-pairs").stream((uint64_t)p).stream((uint64_t)i);
      long long agree = 0;
      for (long long q = 0; q < pairs; ++q) {
        int u = (int)pair_rng.below((uint64_t)pt.n);
        int v = (int)pair_rng.below((uint64_t)pt.n);
        while (v == u) v = (int)pair_rng.below((uint64_t)pt.n);
        agree += (r.est[u] * r.est[v]) == (r.truth[u] * r.truth[v]);
      }
      double acc = (double)agree / pairs;
      double eta = r.score;
      std::ostringstream row;
      row << pt.n << "," << csv_double(pt.a) << "," << csv_double(pt.b) << ","
          << (pt.mode == Mode::Assortative ? "assort" : "dissort") << "," << pt.adversary << ","
          << pt.algo << "," << i << "," << csv_double(acc) << ","
          << csv_double(eta * eta + (1.0 - eta) * (1.0 - eta));
      return row.str();
    });
    lines.insert(lines.end(), rows.begin(), rows.end());
  }
  write_lines(csv_path, lines);
  return lines;
}

PeriodicEstimate periodic_process_estimate(double k, double eps, long long subtree_samples,
                                           uint64_t seed) {
  if (!(k > 0) || subtree_samples < 1)
    throw std::invalid_argument("periodic_process_estimate: bad parameters");
  const double delta = delta_of_eps(eps);
  const double cut_prob = delta * eps * eps;

  // One sample: a Poisson(k) subtree rooted two levels below a base level
  // (i.e. one level above the cutting level), grown four levels so that the
  // children-only goodness rule is decidable for the cut candidates' parents
  // and children. Returns the expected number of next-base-level descendants
  // removed by cuts in this subtree (cut coins integrated out analytically).
  auto one_sample = [&](long long i) -> double {
    Rng rng = Rng(seed).stream("periodic").stream((uint64_t)i);
    long long weighted_descendants = 0;

    int c1 = rng.poisson(k);  // children of the subtree root: cut candidates
    std::vector<int> cand_children(c1);
    std::vector<long long> cand_desc(c1, 0);
    std::vector<uint8_t> cand_child_good(c1, 0);
    int root_nontwo = 0;
    for (int u = 0; u < c1; ++u) {
      int c2 = rng.poisson(k);
      cand_children[u] = c2;
      if (c2 + 1 != 2) ++root_nontwo;
      for (int y = 0; y < c2; ++y) {
        int c3 = rng.poisson(k);
        int y_nontwo = 0;
        long long desc = 0;
        for (int z = 0; z < c3; ++z) {
          int c4 = rng.poisson(k);
          if (c4 + 1 != 2) ++y_nontwo;
          desc += c4;
        }
        cand_desc[u] += desc;
        if (c2 == 1 && y_nontwo >= 3) cand_child_good[u] = 1;
      }
    }
    bool root_good = root_nontwo >= 3;
    if (root_good)
      for (int u = 0; u < c1; ++u)
        // Marked candidate: degree 2 (exactly one child), parent and child
        // both Good under the children-only rule.
        if (cand_children[u] == 1 && cand_child_good[u]) weighted_descendants += cand_desc[u];
    return cut_prob * (double)weighted_descendants;
  };

  std::vector<std::string> vals = parallel_map_ordered(subtree_samples, [&](long long i) {
    return csv_double(one_sample(i));
  });
  double sum = 0, sumsq = 0;
  for (const auto& s : vals) {
    double x = std::stod(s);
    sum += x;
    sumsq += x * x;
  }
  double mean = sum / subtree_samples;
  double var = std::max(0.0, sumsq / subtree_samples - mean * mean);
  double se_mean = std::sqrt(var / subtree_samples);

  PeriodicEstimate est;
  est.mean_cut_leaves = mean;
  est.k_prime6_hat = std::pow(k, 6.0) - k * k * mean;
  est.stderr_ = k * k * se_mean;
  return est;
}

std::vector<std::string> run_appendix_a_check(double k, double eps, long long trials,
                                              uint64_t seed, const std::string& csv_path) {
  PeriodicEstimate est = periodic_process_estimate(k, eps, trials, seed);
  double K = appendix_a_bound(k, eps).K;
  double k6 = std::pow(k, 6.0);
  bool pass = (k6 - est.k_prime6_hat) >= (K - 3.0 * est.stderr_);

  std::vector<std::string> lines;
  lines.push_back("k,eps,trials,k6,k_prime6_hat,stderr,K,pass");
  std::ostringstream row;
  row << csv_double(k) << "," << csv_double(eps) << "," << trials << "," << csv_double(k6) << ","
      << csv_double(est.k_prime6_hat) << "," << csv_double(est.stderr_) << "," << csv_double(K)
      << "," << (pass ? 1 : 0);
  lines.push_back(row.str());
  write_lines(csv_path, lines);
  return lines;
}

void run_experiment(const ExperimentSpec& spec, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::string csv = out_dir + "/results.csv";

  if (spec.kind == "tree-threshold-sweep") {
    run_tree_sweep(spec, csv);
  } else if (spec.kind == "graph-recovery" || spec.kind == "sdp-robustness") {
    run_graph_recovery(spec, csv);
  } else if (spec.kind == "cobweb") {
    int k = as_int(grid_or(spec, "k", "11")[0]);
    double eps = as_double(grid_or(spec, "eps", "0.25")[0]);
    int iters = as_int(grid_or(spec, "iterations", "30")[0]);
    run_cobweb(k, eps, iters, csv);
  } else if (spec.kind == "appendix-a-check") {
    double k = as_double(grid_or(spec, "k", "9")[0]);
    double eps = as_double(grid_or(spec, "eps", "0.332")[0]);
    run_appendix_a_check(k, eps, spec.trials, spec.seed, csv);
  } else if (spec.kind == "relative-spin") {
    run_relative_spin(spec, csv);
  } else {
    throw std::invalid_argument("unknown experiment kind '" + spec.kind + "'");
  }

  std::ostringstream echo;
  echo << "kind=" << spec.kind << "\n";
  echo << "trials=" << spec.trials << "\n";
  echo << "seed=" << spec.seed << "\n";
  for (const auto& [key, vals] : spec.grids) {
    echo << key << "=";
    for (size_t i = 0; i < vals.size(); ++i) echo << (i ? "," : "") << vals[i];
    echo << "\n";
  }
  std::ofstream ef(out_dir + "/spec-echo.txt");
  if (!ef) throw std::runtime_error("cannot write spec echo");
  ef << echo.str();
}

}  // namespace srbm
