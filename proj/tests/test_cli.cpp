#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "srbm/experiment.hpp"
#include "srbm/graph.hpp"
#include "srbm/sbm.hpp"
#include "srbm/thresholds.hpp"
#include "srbm/tree.hpp"

using namespace srbm;

namespace {

struct CliResult {
  int code;
  std::string out, err;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

CliResult run_cli(const std::string& args) {
  const std::string dir = (std::filesystem::temp_directory_path() / "srbm_cli_io").string();
  std::filesystem::create_directories(dir);
  const std::string out = dir + "/stdout.txt", err = dir + "/stderr.txt";
  std::string cmd = std::string(SRBM_CLI_PATH) + " " + args + " >" + out + " 2>" + err;
  int status = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string work_path(const std::string& name) {
  const std::string dir = (std::filesystem::temp_directory_path() / "srbm_cli_work").string();
  std::filesystem::create_directories(dir);
  return dir + "/" + name;
}

std::vector<std::string> csv_lines(const std::string& path) {
  std::ifstream f(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(f, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_csv_row(const std::string& row) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(row);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

TEST_CASE("cli gen: files read back consistently and deterministically") {
  const std::string p1 = work_path("gen1"), p2 = work_path("gen2");
  CliResult r = run_cli("gen --n 80 --a 9 --b 2 --seed 7 --out " + p1);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("n=80") != std::string::npos);

  Graph g = read_graph_files(p1);
  CHECK(g.n == 80);
  CHECK((int)g.spins.size() == 80);
  for (int8_t s : g.spins) CHECK((s == 1 || s == -1));
  uint64_t seed = 0;
  ModelParams meta = read_meta_file(p1, &seed);
  CHECK(meta.a == 9.0);
  CHECK(meta.b == 2.0);
  CHECK(meta.mode == Mode::Assortative);
  CHECK(seed == 7);

  // The generated graph equals an in-process sample with the same seed.
  ModelParams params;
  params.n = 80;
  params.a = 9;
  params.b = 2;
  Graph direct = sample_precursor(params, 7);
  CHECK(direct.adj == g.adj);
  CHECK(direct.spins == g.spins);

  REQUIRE(run_cli("gen --n 80 --a 9 --b 2 --seed 7 --out " + p2).code == 0);
  CHECK(slurp(p1 + ".graph") == slurp(p2 + ".graph"));
  CHECK(slurp(p1 + ".spins") == slurp(p2 + ".spins"));
  CHECK(slurp(p1 + ".meta") == slurp(p2 + ".meta"));
}

TEST_CASE("cli adversary: cuts only, spins preserved, markings written") {
  const std::string in = work_path("adv_in"), out = work_path("adv_out");
  REQUIRE(run_cli("gen --n 300 --a 6 --b 1 --seed 11 --out " + in).code == 0);
  CliResult r = run_cli("adversary --in " + in + " --seed 3 --out " + out);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("m=") != std::string::npos);
  CHECK(r.out.find("delta=1") != std::string::npos);  // eps = 1/7 <= 1/3

  Graph before = read_graph_files(in);
  Graph after = read_graph_files(out);
  REQUIRE(after.n == before.n);
  CHECK(after.spins == before.spins);
  long long removed = 0;
  for (int u = 0; u < before.n; ++u)
    for (int v : before.adj[u])
      if (u < v && !after.has_edge(u, v)) ++removed;
  CHECK(before.edge_count() - after.edge_count() == removed);  // nothing added
  bool any_marked = false, any_good = false;
  for (Marking m : after.markings) {
    any_marked |= m == Marking::Marked;
    any_good |= m == Marking::Good;
  }
  CHECK(any_marked);
  CHECK(any_good);
}

TEST_CASE("cli thresholds: known row values at k=9, eps=0.332") {
  const std::string out = work_path("thresholds.csv");
  CliResult r = run_cli("thresholds --k 9 --eps 0.332 --model regular --out " + out);
  REQUIRE(r.code == 0);
  std::vector<std::string> lines = csv_lines(out);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] ==
        "k,eps,model,ks_threshold,ks_possible,eps_star,q_star,p_star,eps_star_asymptotic,"
        "window_lo,window_hi,window_empty,appendix_K,appendix_general,delta,eps_prime");
  std::vector<std::string> c = split_csv_row(lines[1]);
  REQUIRE(c.size() == 16);
  CHECK(c[0] == "9");
  CHECK(c[2] == "regular");
  CHECK(std::stod(c[3]) == doctest::Approx(1.0 / 3.0).epsilon(1e-11));
  CHECK(c[4] == "1");
  double es = std::stod(c[5]), qs = std::stod(c[6]), ps = std::stod(c[7]);
  CHECK(es > 0.0);
  CHECK(es < 1.0 / 3.0);
  CHECK(ps == doctest::Approx(qs / (1.0 - es)).epsilon(1e-8));
  CHECK(std::stod(c[12]) == doctest::Approx(appendix_a_bound(9, 0.332).K).epsilon(1e-9));
  CHECK(std::stod(c[14]) == 1.0);  // delta at eps <= 1/3
  CHECK(std::stod(c[15]) == doctest::Approx(eps_prime(0.332)).epsilon(1e-9));

  // k=2 regular: eps_star and window cells are empty rather than an error.
  REQUIRE(run_cli("thresholds --k 2 --eps 0.1 --model regular --out " + out).code == 0);
  std::vector<std::string> c2 = split_csv_row(csv_lines(out)[1]);
  REQUIRE(c2.size() == 16);
  CHECK(c2[5].empty());
  CHECK(c2[9].empty());
}

TEST_CASE("cli tree-recover: matches the in-process sweep runner") {
  const std::string out = work_path("trec.csv");
  CliResult r = run_cli(
      "tree-recover --algo maj --k 3 --eps 0.1 --depth 3 --dist plain "
      "--trials 30 --seed 4 --out " + out);
  REQUIRE(r.code == 0);
  std::vector<std::string> lines = csv_lines(out);
  REQUIRE(lines.size() == 2);

  ExperimentSpec spec;
  spec.kind = "tree-threshold-sweep";
  spec.trials = 30;
  spec.seed = 4;
  spec.grids["k"] = {"3"};
  spec.grids["eps"] = {"0.1"};
  spec.grids["depth"] = {"3"};
  spec.grids["dist"] = {"plain"};
  spec.grids["adversary"] = {"none"};
  spec.grids["algo"] = {"maj"};
  spec.grids["asym"] = {"0"};
  spec.grids["asym_sign"] = {"1"};
  std::vector<std::string> direct = run_tree_sweep(spec, work_path("trec_direct.csv"));
  CHECK(lines == direct);

  std::vector<std::string> c = split_csv_row(lines[1]);
  REQUIRE(c.size() == 10);
  CHECK(c[6] == "30");
  double rate = std::stod(c[8]);
  CHECK(rate >= 0.0);
  CHECK(rate <= 1.0);
}

TEST_CASE("cli tree-sim: shape columns are consistent") {
  const std::string out = work_path("tsim.csv");
  CliResult r = run_cli(
      "tree-sim --k 3 --eps 0.2 --depth 3 --dist d4 --adversary cutting "
      "--trials 20 --seed 2 --out " + out);
  REQUIRE(r.code == 0);
  std::vector<std::string> lines = csv_lines(out);
  REQUIRE(lines.size() == 21);
  CHECK(lines[0] == "trial,nodes,leaves,root_spin,leaf_plus,leaf_minus");
  for (size_t i = 1; i < lines.size(); ++i) {
    std::vector<std::string> c = split_csv_row(lines[i]);
    REQUIRE(c.size() == 6);
    CHECK(std::stoll(c[0]) == (long long)i - 1);
    CHECK(std::stoll(c[1]) >= 1);
    CHECK(std::stoll(c[2]) == std::stoll(c[4]) + std::stoll(c[5]));
    int root = std::stoi(c[3]);
    CHECK((root == 1 || root == -1));
  }
}

TEST_CASE("cli sdp: strong instance solves, rounds, and certifies") {
  const std::string in = work_path("sdp_in"), out = work_path("sdp.csv");
  REQUIRE(run_cli("gen --n 60 --a 18 --b 2 --seed 5 --out " + in).code == 0);
  CliResult r = run_cli("sdp --in " + in + " --tol 1e-4 --max-iter 1500 --out " + out);
  REQUIRE(r.code == 0);
  std::vector<std::string> lines = csv_lines(out);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] ==
        "n,a,b,mode,lambda,objective,iterations,primal_residual,dual_residual,converged,"
        "score,degenerate,gamma_min,lambda_sigma_inf,lambda_min_eig,cert_ok");
  std::vector<std::string> c = split_csv_row(lines[1]);
  REQUIRE(c.size() == 16);
  CHECK(c[0] == "60");
  CHECK(std::stod(c[4]) == doctest::Approx(20.0 / 120.0).epsilon(1e-9));  // (a+b)/2n
  CHECK(c[9] == "1");                                                     // converged
  CHECK(std::stod(c[10]) >= 0.9);                                         // score
  CHECK(c[11] == "0");                                                    // not degenerate
  CHECK(std::stod(c[13]) < 1e-6);                                         // sigma in kernel
  CHECK(c[15] == "1");                                                    // certificate holds
}

TEST_CASE("cli experiment: byte-identical rerun through the front end") {
  const std::string spec = work_path("exp_spec.txt");
  const std::string d1 = work_path("exp1"), d2 = work_path("exp2");
  std::ofstream f(spec);
  f << "kind=cobweb\nk=5\neps=0.2\niterations=6\nseed=3\n";
  f.close();

  CliResult r1 = run_cli("experiment --spec " + spec + " --out " + d1);
  REQUIRE(r1.code == 0);
  CHECK(r1.out.find("results.csv") != std::string::npos);
  REQUIRE(run_cli("experiment --spec " + spec + " --out " + d2).code == 0);
  CHECK(slurp(d1 + "/results.csv") == slurp(d2 + "/results.csv"));
  CHECK(slurp(d1 + "/spec-echo.txt") == slurp(d2 + "/spec-echo.txt"));
  CHECK(!slurp(d1 + "/results.csv").empty());
}

TEST_CASE("cli errors: bad inputs fail with nonzero exit and a message") {
  CliResult missing = run_cli("gen --n 10 --a 3 --b 1 --seed 1");  // no --out
  CHECK(missing.code != 0);
  CHECK(!missing.err.empty());

  CliResult nofile = run_cli("adversary --in /nonexistent/prefix --seed 1 --out " +
                             work_path("x"));
  CHECK(nofile.code == 1);
  CHECK(nofile.err.find("error:") != std::string::npos);

  CliResult badsub = run_cli("frobnicate --n 3");
  CHECK(badsub.code != 0);

  CliResult badmode = run_cli("gen --n 10 --a 3 --b 1 --seed 1 --mode sideways --out " +
                              work_path("y"));
  CHECK(badmode.code != 0);

  // a <= b is invalid in assortative mode.
  CliResult badrates = run_cli("gen --n 10 --a 1 --b 3 --seed 1 --out " + work_path("z"));
  CHECK(badrates.code == 1);
  CHECK(badrates.err.find("error:") != std::string::npos);
}
