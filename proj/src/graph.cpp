#include "srbm/graph.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace srbm {

void ModelParams::validate() const {
  if (n < 1) throw std::invalid_argument("ModelParams: n must be >= 1");
  if (a < 0 || b < 0) throw std::invalid_argument("ModelParams: rates must be nonnegative");
  if (a > n || b > n)
    throw std::invalid_argument("ModelParams: edge probabilities a/n, b/n must lie in [0,1]");
  if (mode == Mode::Assortative && !(a > b))
    throw std::invalid_argument("ModelParams: assortative mode requires a > b");
  if (mode == Mode::Dissortative && !(b > a))
    throw std::invalid_argument("ModelParams: dissortative mode requires b > a");
}

bool Graph::has_edge(int u, int v) const {
  const auto& row = adj[u];
  return std::binary_search(row.begin(), row.end(), v);
}

long long Graph::edge_count() const {
  long long twice = 0;
  for (const auto& row : adj) twice += (long long)row.size();
  return twice / 2;
}

void Graph::add_edge(int u, int v) {
  auto insert = [&](int x, int y) {
    auto& row = adj[x];
    row.insert(std::lower_bound(row.begin(), row.end(), y), y);
  };
  insert(u, v);
  insert(v, u);
}

void Graph::remove_edge(int u, int v) {
  auto erase = [&](int x, int y) {
    auto& row = adj[x];
    auto it = std::lower_bound(row.begin(), row.end(), y);
    if (it == row.end() || *it != y) throw std::logic_error("remove_edge: edge absent");
    row.erase(it);
  };
  erase(u, v);
  erase(v, u);
}

void Graph::check_consistency() const {
  if ((int)adj.size() != n || (int)spins.size() != n || (int)markings.size() != n)
    throw std::invalid_argument("Graph: field lengths disagree with n");
  for (int v = 0; v < n; ++v) {
    if (spins[v] != 1 && spins[v] != -1)
      throw std::invalid_argument("Graph: spins must be +1 or -1");
    if (!std::is_sorted(adj[v].begin(), adj[v].end()))
      throw std::invalid_argument("Graph: neighbor lists must be sorted");
    for (int u : adj[v]) {
      if (u == v) throw std::invalid_argument("Graph: self-loop");
      if (u < 0 || u >= n) throw std::invalid_argument("Graph: neighbor out of range");
      if (!has_edge(u, v)) throw std::invalid_argument("Graph: asymmetric edge");
    }
    if (std::adjacent_find(adj[v].begin(), adj[v].end()) != adj[v].end())
      throw std::invalid_argument("Graph: duplicate edge");
  }
}

Graph make_graph(int n) {
  Graph g;
  g.n = n;
  g.adj.resize(n);
  g.spins.assign(n, 1);
  g.markings.assign(n, Marking::None);
  return g;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  return f;
}

char marking_code(Marking m) {
  switch (m) {
    case Marking::Good: return 'G';
    case Marking::Marked: return 'M';
    default: return 'N';
  }
}

Marking marking_from_code(char c) {
  switch (c) {
    case 'G': return Marking::Good;
    case 'M': return Marking::Marked;
    case 'N': return Marking::None;
    default: throw std::runtime_error(std::string("bad marking code '") + c + "'");
  }
}

}  // namespace

void write_graph_files(const Graph& g, const std::string& prefix) {
  auto gf = open_out(prefix + ".graph");
  gf << g.n << " " << g.edge_count() << "\n";
  for (int u = 0; u < g.n; ++u)
    for (int v : g.adj[u])
      if (u < v) gf << u << " " << v << "\n";

  auto sf = open_out(prefix + ".spins");
  for (int v = 0; v < g.n; ++v) sf << (g.spins[v] > 0 ? "+1" : "-1") << "\n";

  auto mf = open_out(prefix + ".marks");
  for (int v = 0; v < g.n; ++v) mf << marking_code(g.markings[v]) << "\n";
}

Graph read_graph_files(const std::string& prefix) {
  auto gf = open_in(prefix + ".graph");
  int n;
  long long m;
  if (!(gf >> n >> m)) throw std::runtime_error("graph file: bad header");
  if (n < 0 || m < 0) throw std::runtime_error("graph file: negative header");
  Graph g = make_graph(n);
  for (long long i = 0; i < m; ++i) {
    int u, v;
    if (!(gf >> u >> v)) throw std::runtime_error("graph file: truncated edge list");
    if (u < 0 || v < 0 || u >= n || v >= n) throw std::runtime_error("graph file: node out of range");
    if (u == v) throw std::runtime_error("graph file: self-loop");
    if (!(u < v)) throw std::runtime_error("graph file: edges must satisfy u < v");
    g.adj[u].push_back(v);
    g.adj[v].push_back(u);
  }
  for (auto& row : g.adj) std::sort(row.begin(), row.end());

  auto sf = open_in(prefix + ".spins");
  for (int v = 0; v < n; ++v) {
    std::string tok;
    if (!(sf >> tok)) throw std::runtime_error("spins file: truncated");
    if (tok == "+1")
      g.spins[v] = 1;
    else if (tok == "-1")
      g.spins[v] = -1;
    else
      throw std::runtime_error("spins file: bad token '" + tok + "'");
  }

  std::ifstream mf(prefix + ".marks");
  if (mf) {
    for (int v = 0; v < n; ++v) {
      std::string tok;
      if (!(mf >> tok) || tok.size() != 1) throw std::runtime_error("markings file: truncated");
      g.markings[v] = marking_from_code(tok[0]);
    }
  }

  g.check_consistency();
  return g;
}

void write_meta_file(const ModelParams& params, uint64_t seed, const std::string& prefix) {
  auto f = open_out(prefix + ".meta");
  std::ostringstream os;
  os.precision(17);
  os << "n=" << params.n << "\n"
     << "a=" << params.a << "\n"
     << "b=" << params.b << "\n"
     << "mode=" << (params.mode == Mode::Assortative ? "assort" : "dissort") << "\n"
     << "seed=" << seed << "\n";
  f << os.str();
}

ModelParams read_meta_file(const std::string& prefix, uint64_t* seed_out) {
  auto f = open_in(prefix + ".meta");
  ModelParams p;
  std::string line;
  while (std::getline(f, line)) {
    auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(0, eq), val = line.substr(eq + 1);
    if (key == "n")
      p.n = std::stoi(val);
    else if (key == "a")
      p.a = std::stod(val);
    else if (key == "b")
      p.b = std::stod(val);
    else if (key == "mode")
      p.mode = (val == "dissort") ? Mode::Dissortative : Mode::Assortative;
    else if (key == "seed" && seed_out)
      *seed_out = std::stoull(val);
  }
  return p;
}

}  // namespace srbm
