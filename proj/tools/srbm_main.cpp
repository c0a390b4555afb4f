// Command-line front end: gen | adversary | tree-sim | tree-recover | sdp |
// thresholds | experiment. Every subcommand is deterministic given its
// --seed; file formats are the plain-text ones documented in the README.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "srbm/adversary.hpp"
#include "srbm/estimators.hpp"
#include "srbm/experiment.hpp"
#include "srbm/graph.hpp"
#include "srbm/rng.hpp"
#include "srbm/sbm.hpp"
#include "srbm/sdp.hpp"
#include "srbm/thresholds.hpp"
#include "srbm/tree.hpp"

namespace {

using namespace srbm;

Mode parse_mode(const std::string& s) {
  if (s == "assort") return Mode::Assortative;
  if (s == "dissort") return Mode::Dissortative;
  throw CLI::ValidationError("--mode", "expected 'assort' or 'dissort'");
}

LambdaRule parse_lambda_flag(const std::string& s) {
  LambdaRule rule;
  if (s == "model") {
    rule.kind = LambdaRule::Model;
  } else if (s == "fixed") {
    rule.kind = LambdaRule::Fixed;
  } else {
    rule.kind = LambdaRule::Explicit;
    rule.value = std::stod(s);
  }
  return rule;
}

ChangeBudget parse_budget_flag(const std::string& s) {
  ChangeBudget b;
  if (s == "none") {
    b.kind = ChangeBudget::None;
  } else if (s == "all-cross") {
    b.kind = ChangeBudget::AllCross;
  } else if (s.rfind("prob:", 0) == 0) {
    b.kind = ChangeBudget::ProbPerPair;
    b.p = std::stod(s.substr(5));
  } else {
    throw CLI::ValidationError("--change-budget", "expected none|all-cross|prob:P");
  }
  return b;
}

Tree sample_tree(const std::string& dist, double k, double eps, int depth, uint64_t seed) {
  if (dist == "plain") return sample_plain(k, eps, depth, Branching::Poisson, seed);
  if (dist == "regular") return sample_plain(k, eps, depth, Branching::Regular, seed);
  if (dist == "d2" || dist == "d3") return sample_dist2(k, eps, depth, seed);
  if (dist == "d4") return sample_dist4(k, eps, depth, seed);
  throw CLI::ValidationError("--dist", "expected plain|regular|d2|d3|d4");
}

Tree apply_tree_adversary(Tree t, const std::string& adversary, double eps, double asym,
                          int asym_sign, uint64_t seed) {
  if (adversary == "none") return t;
  if (adversary == "cutting") return cutting_adversary_majority_breaker(t);
  if (adversary == "opp-path") return strong_adversary_opposite_path(t);
  if (adversary == "asym") return strong_adversary_asymmetric(t, eps, asym, asym_sign, seed);
  throw CLI::ValidationError("--adversary", "expected none|cutting|opp-path|asym");
}

void write_csv(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  for (const auto& l : lines) f << l << "\n";
}

int cmd_gen(int n, double a, double b, uint64_t seed, const std::string& mode,
            const std::string& out) {
  ModelParams params;
  params.n = n;
  params.a = a;
  params.b = b;
  params.mode = parse_mode(mode);
  params.validate();
  Graph g = sample_precursor(params, seed);
  write_graph_files(g, out);
  write_meta_file(params, seed, out);
  std::cout << "n=" << g.n << " edges=" << g.edge_count() << " out=" << out << "\n";
  return 0;
}

int cmd_adversary(const std::string& in, uint64_t seed, const std::string& mode, double a,
                  double b, const std::string& out) {
  uint64_t gen_seed = 0;
  ModelParams params = read_meta_file(in, &gen_seed);
  Graph g = read_graph_files(in);
  if (!mode.empty()) params.mode = parse_mode(mode);
  if (a >= 0) params.a = a;
  if (b >= 0) params.b = b;
  params.n = g.n;
  params.validate();

  bool already_marked = std::any_of(g.markings.begin(), g.markings.end(),
                                    [](Marking m) { return m != Marking::None; });
  Graph marked = already_marked ? g : assign_markings(g);
  AdversaryOutcome outcome = apply_adversary(marked, params, seed);
  write_graph_files(outcome.graph, out);
  write_meta_file(params, seed, out);
  std::cout << "m=" << outcome.m << " w=" << outcome.w << " delta=" << csv_double(outcome.delta)
            << "\n";
  return 0;
}

int cmd_tree_sim(double k, double eps, int depth, const std::string& dist,
                 const std::string& adversary, double asym, int asym_sign, long long trials,
                 uint64_t seed, const std::string& out) {
  std::vector<std::string> lines;
  lines.push_back("trial,nodes,leaves,root_spin,leaf_plus,leaf_minus");
  for (long long i = 0; i < trials; ++i) {
    Rng tr = Rng(seed).stream("tree-sim").stream((uint64_t)i);
    uint64_t tree_seed = tr.next_u64();
    uint64_t adv_seed = tr.next_u64();
    double grow_eps = adversary == "asym" ? eps + asym : eps;
    Tree t = sample_tree(dist, k, grow_eps, depth, tree_seed);
    int8_t root = t.spin[0];
    t = apply_tree_adversary(std::move(t), adversary, eps, asym, asym_sign, adv_seed);
    long long plus = 0;
    for (int v : t.leaves) plus += t.spin[v] > 0;
    std::ostringstream row;
    row << i << "," << t.size() << "," << t.leaves.size() << "," << int(root) << "," << plus
        << "," << (long long)t.leaves.size() - plus;
    lines.push_back(row.str());
  }
  write_csv(out, lines);
  std::cout << "trials=" << trials << " out=" << out << "\n";
  return 0;
}

int cmd_tree_recover(const std::string& algo, double k, double eps, int depth,
                     const std::string& dist, const std::string& adversary, double asym,
                     int asym_sign, long long trials, uint64_t seed, const std::string& out) {
  ExperimentSpec spec;
  spec.kind = "tree-threshold-sweep";
  spec.trials = trials;
  spec.seed = seed;
  spec.grids["k"] = {csv_double(k)};
  spec.grids["eps"] = {csv_double(eps)};
  spec.grids["depth"] = {std::to_string(depth)};
  spec.grids["dist"] = {dist};
  spec.grids["adversary"] = {adversary};
  spec.grids["algo"] = {algo};
  spec.grids["asym"] = {csv_double(asym)};
  spec.grids["asym_sign"] = {std::to_string(asym_sign)};
  std::vector<std::string> lines = run_tree_sweep(spec, out);
  std::cout << lines.back() << "\n";
  return 0;
}

int cmd_sdp(const std::string& in, const std::string& lambda, double tol, int max_iter,
            const std::string& budget_str, uint64_t seed, double lambda_prime,
            const std::string& out) {
  ModelParams params = read_meta_file(in);
  Graph g = read_graph_files(in);
  params.n = g.n;
  params.validate();

  SdpInstance inst = build_objective(g, params, parse_lambda_flag(lambda));
  ChangeBudget budget = parse_budget_flag(budget_str);
  if (budget.kind != ChangeBudget::None) {
    MonotoneChange change = sample_monotone_change(g, g.spins, budget, params.mode, seed);
    apply_change_to_objective(inst, change);
  }
  SdpSolution sol = solve_sdp(inst, tol, max_iter);
  Rounding r = round_solution(sol);
  double score = partial_recovery_score(r.spins, g.spins);
  if (lambda_prime < 0) lambda_prime = std::log((double)g.n) / g.n;
  CertificateReport cert = dual_certificate(g, params, g.spins, lambda_prime);
  bool cert_ok = cert.gamma_nonneg && cert.sigma_in_kernel && cert.psd;

  std::vector<std::string> lines;
  lines.push_back(
      "n,a,b,mode,lambda,objective,iterations,primal_residual,dual_residual,converged,"
      "score,degenerate,gamma_min,lambda_sigma_inf,lambda_min_eig,cert_ok");
  std::ostringstream row;
  row << g.n << "," << csv_double(params.a) << "," << csv_double(params.b) << ","
      << (params.mode == Mode::Assortative ? "assort" : "dissort") << ","
      << csv_double(inst.lambda) << "," << csv_double(sol.objective) << "," << sol.iterations
      << "," << csv_double(sol.primal_residual) << "," << csv_double(sol.dual_residual) << ","
      << (sol.converged ? 1 : 0) << "," << csv_double(score) << "," << (r.degenerate ? 1 : 0)
      << "," << csv_double(cert.gamma_min) << "," << csv_double(cert.lambda_sigma_inf) << ","
      << csv_double(cert.lambda_min_eig) << "," << (cert_ok ? 1 : 0);
  lines.push_back(row.str());
  write_csv(out, lines);
  std::cout << lines.back() << "\n";
  return 0;
}

int cmd_thresholds(double k, double eps, const std::string& model, const std::string& out) {
  MajorityModel mm;
  if (model == "regular")
    mm = MajorityModel::Regular;
  else if (model == "poisson")
    mm = MajorityModel::Poisson;
  else
    throw CLI::ValidationError("--model", "expected regular|poisson");

  auto cell = [](auto fn) -> std::string {
    try {
      return fn();
    } catch (const std::exception&) {
      return "";
    }
  };

  std::vector<std::string> lines;
  lines.push_back(
      "k,eps,model,ks_threshold,ks_possible,eps_star,q_star,p_star,eps_star_asymptotic,"
      "window_lo,window_hi,window_empty,appendix_K,appendix_general,delta,eps_prime");
  EpsStar es{};
  bool have_es = false;
  try {
    es = eps_star(k, mm);
    have_es = true;
  } catch (const std::exception&) {
  }
  std::ostringstream row;
  row << csv_double(k) << "," << csv_double(eps) << "," << model << ","
      << cell([&] { return csv_double(ks_threshold(k)); }) << ","
      << (ks_possible(k, eps) ? 1 : 0) << ","
      << (have_es ? csv_double(es.eps_star) : "") << ","
      << (have_es ? csv_double(es.q_star) : "") << ","
      << (have_es ? csv_double(es.p_star) : "") << ","
      << cell([&] { return csv_double(eps_star_asymptotic(k)); }) << ",";
  try {
    Window w = semirandom_window(k);
    row << csv_double(w.eps_lo) << "," << csv_double(w.eps_hi) << "," << (w.empty ? 1 : 0);
  } catch (const std::exception&) {
    row << ",,";
  }
  row << ",";
  try {
    AppendixABound ab = appendix_a_bound(k, eps);
    row << csv_double(ab.K) << "," << csv_double(ab.general);
  } catch (const std::exception&) {
    row << ",";
  }
  row << "," << csv_double(delta_of_eps(eps)) << "," << csv_double(eps_prime(eps));
  lines.push_back(row.str());
  write_csv(out, lines);
  std::cout << lines.back() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semirandom block-model and broadcast-tree toolkit"};
  app.require_subcommand(1);

  // gen
  int g_n = 100;
  double g_a = 10, g_b = 2;
  uint64_t g_seed = 0;
  std::string g_mode = "assort", g_out;
  auto* gen = app.add_subcommand("gen", "Sample a two-community precursor graph");
  gen->add_option("--n", g_n, "Number of nodes")->required();
  gen->add_option("--a", g_a, "Within-community rate (edge prob a/n)")->required();
  gen->add_option("--b", g_b, "Cross-community rate (edge prob b/n)")->required();
  gen->add_option("--seed", g_seed, "RNG seed")->required();
  gen->add_option("--mode", g_mode, "assort|dissort");
  gen->add_option("--out", g_out, "Output file prefix")->required();

  // adversary
  std::string a_in, a_mode, a_out;
  uint64_t a_seed = 0;
  double a_a = -1, a_b = -1;
  auto* adv = app.add_subcommand("adversary", "Apply the cutting adversary to a graph");
  adv->add_option("--in", a_in, "Input file prefix")->required();
  adv->add_option("--seed", a_seed, "RNG seed")->required();
  adv->add_option("--mode", a_mode, "Override mode: assort|dissort");
  adv->add_option("--a", a_a, "Override rate a");
  adv->add_option("--b", a_b, "Override rate b");
  adv->add_option("--out", a_out, "Output file prefix")->required();

  // tree-sim
  double ts_k = 3, ts_eps = 0.1, ts_asym = 0;
  int ts_depth = 4, ts_sign = 1;
  long long ts_trials = 1;
  uint64_t ts_seed = 0;
  std::string ts_dist = "plain", ts_adv = "none", ts_out;
  auto* tsim = app.add_subcommand("tree-sim", "Sample broadcast trees and report shape stats");
  tsim->add_option("--k", ts_k, "Expected branching factor")->required();
  tsim->add_option("--eps", ts_eps, "Edge flip probability")->required();
  tsim->add_option("--depth", ts_depth, "Tree depth R")->required();
  tsim->add_option("--dist", ts_dist, "plain|regular|d2|d3|d4");
  tsim->add_option("--adversary", ts_adv, "none|cutting|opp-path|asym");
  tsim->add_option("--asym", ts_asym, "Asymmetry delta for --adversary asym");
  tsim->add_option("--asym-sign", ts_sign, "+1 or -1 transition sign for asym");
  tsim->add_option("--trials", ts_trials, "Number of trees");
  tsim->add_option("--seed", ts_seed, "RNG seed")->required();
  tsim->add_option("--out", ts_out, "Output CSV path")->required();

  // tree-recover
  double tr_k = 3, tr_eps = 0.1, tr_asym = 0;
  int tr_depth = 4, tr_sign = 1;
  long long tr_trials = 100;
  uint64_t tr_seed = 0;
  std::string tr_algo, tr_dist = "plain", tr_adv = "none", tr_out;
  auto* trec = app.add_subcommand("tree-recover", "Estimate root-recovery success rates");
  trec->add_option("--algo", tr_algo, "maj|recmaj|map")->required();
  trec->add_option("--k", tr_k, "Expected branching factor")->required();
  trec->add_option("--eps", tr_eps, "Edge flip probability")->required();
  trec->add_option("--depth", tr_depth, "Tree depth R")->required();
  trec->add_option("--dist", tr_dist, "plain|regular|d2|d3|d4");
  trec->add_option("--adversary", tr_adv, "none|cutting|opp-path|asym");
  trec->add_option("--asym", tr_asym, "Asymmetry delta for --adversary asym");
  trec->add_option("--asym-sign", tr_sign, "+1 or -1 transition sign for asym");
  trec->add_option("--trials", tr_trials, "Monte-Carlo trials");
  trec->add_option("--seed", tr_seed, "RNG seed")->required();
  trec->add_option("--out", tr_out, "Output CSV path")->required();

  // sdp
  std::string s_in, s_lambda = "model", s_budget = "none", s_out;
  double s_tol = 1e-6, s_lambda_prime = -1;
  int s_max_iter = 5000;
  uint64_t s_seed = 0;
  auto* sdp = app.add_subcommand("sdp", "Solve the recovery SDP on a graph");
  sdp->add_option("--in", s_in, "Input file prefix")->required();
  sdp->add_option("--lambda", s_lambda, "model|fixed|VALUE");
  sdp->add_option("--tol", s_tol, "Residual tolerance (scaled by n)");
  sdp->add_option("--max-iter", s_max_iter, "Iteration cap");
  sdp->add_option("--change-budget", s_budget, "none|all-cross|prob:P");
  sdp->add_option("--seed", s_seed, "RNG seed for sampled changes");
  sdp->add_option("--lambda-prime", s_lambda_prime,
                  "Certificate regularizer (default log n / n)");
  sdp->add_option("--out", s_out, "Output CSV path")->required();

  // thresholds
  double th_k = 3, th_eps = 0.1;
  std::string th_model = "regular", th_out;
  auto* th = app.add_subcommand("thresholds", "Evaluate analytic threshold quantities");
  th->add_option("--k", th_k, "Branching factor / average degree")->required();
  th->add_option("--eps", th_eps, "Noise parameter");
  th->add_option("--model", th_model, "regular|poisson");
  th->add_option("--out", th_out, "Output CSV path")->required();

  // experiment
  std::string e_spec, e_out;
  auto* exp = app.add_subcommand("experiment", "Run a declarative experiment spec");
  exp->add_option("--spec", e_spec, "Spec file (key=value lines)")->required();
  exp->add_option("--out", e_out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(g_n, g_a, g_b, g_seed, g_mode, g_out);
    if (adv->parsed()) return cmd_adversary(a_in, a_seed, a_mode, a_a, a_b, a_out);
    if (tsim->parsed())
      return cmd_tree_sim(ts_k, ts_eps, ts_depth, ts_dist, ts_adv, ts_asym, ts_sign, ts_trials,
                          ts_seed, ts_out);
    if (trec->parsed())
      return cmd_tree_recover(tr_algo, tr_k, tr_eps, tr_depth, tr_dist, tr_adv, tr_asym, tr_sign,
                              tr_trials, tr_seed, tr_out);
    if (sdp->parsed())
      return cmd_sdp(s_in, s_lambda, s_tol, s_max_iter, s_budget, s_seed, s_lambda_prime, s_out);
    if (th->parsed()) return cmd_thresholds(th_k, th_eps, th_model, th_out);
    if (exp->parsed()) {
      run_experiment(parse_experiment_spec(e_spec), e_out);
      std::cout << "out=" << e_out << "/results.csv\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
