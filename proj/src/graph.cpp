#include "graphfuse/graph.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace graphfuse {

Graph::Graph(int n) {
  if (n < 0) throw std::invalid_argument("negative vertex count");
  adj_.resize(static_cast<std::size_t>(n));
}

Graph::Graph(int n, const std::vector<std::pair<int, int>>& edges) : Graph(n) {
  for (const auto& [a, b] : edges) add_edge(a, b);
}

void Graph::check(int v) const {
  if (v < 0 || v >= size()) throw std::out_of_range("vertex out of range: " + std::to_string(v));
}

bool Graph::has_edge(int a, int b) const {
  check(a);
  check(b);
  return adj_[a].count(b) > 0;
}

void Graph::add_edge(int a, int b) {
  check(a);
  check(b);
  if (a == b) throw std::invalid_argument("self-loop");
  adj_[a].insert(b);
  adj_[b].insert(a);
}

void Graph::remove_edge(int a, int b) {
  check(a);
  check(b);
  adj_[a].erase(b);
  adj_[b].erase(a);
}

void Graph::toggle_edge(int a, int b) {
  if (has_edge(a, b)) {
    remove_edge(a, b);
  } else {
    add_edge(a, b);
  }
}

void Graph::isolate(int v) {
  check(v);
  for (int w : adj_[v]) adj_[w].erase(v);
  adj_[v].clear();
}

int Graph::add_vertices(int k) {
  const int first = size();
  adj_.resize(adj_.size() + static_cast<std::size_t>(k));
  return first;
}

const std::set<int>& Graph::neighbors(int v) const {
  check(v);
  return adj_[v];
}

int Graph::max_degree() const {
  int m = 0;
  for (const auto& s : adj_) m = std::max(m, static_cast<int>(s.size()));
  return m;
}

std::vector<std::pair<int, int>> Graph::edges() const {
  std::vector<std::pair<int, int>> e;
  for (int a = 0; a < size(); ++a) {
    for (int b : adj_[a]) {
      if (a < b) e.emplace_back(a, b);
    }
  }
  return e;
}

std::size_t Graph::edge_count() const {
  std::size_t c = 0;
  for (const auto& s : adj_) c += s.size();
  return c / 2;
}

namespace {

int pair_bit(int a, int b) {
  if (a > b) std::swap(a, b);
  return b * (b - 1) / 2 + a;
}

}  // namespace

std::uint64_t Graph::key() const {
  if (size() > 11) throw std::invalid_argument("graph key requires n <= 11");
  std::uint64_t k = 0;
  for (const auto& [a, b] : edges()) k |= std::uint64_t{1} << pair_bit(a, b);
  return k;
}

Graph Graph::from_key(int n, std::uint64_t key) {
  Graph g(n);
  for (int b = 1; b < n; ++b) {
    for (int a = 0; a < b; ++a) {
      if ((key >> pair_bit(a, b)) & 1U) g.add_edge(a, b);
    }
  }
  return g;
}

Graph path_graph(int n) {
  Graph g(n);
  for (int v = 0; v + 1 < n; ++v) g.add_edge(v, v + 1);
  return g;
}

Graph star_graph(int n, int center) {
  Graph g(n);
  for (int v = 0; v < n; ++v) {
    if (v != center) g.add_edge(center, v);
  }
  return g;
}

Graph complete_graph(int n) {
  Graph g(n);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) g.add_edge(a, b);
  }
  return g;
}

Graph cluster_graph(int rows, int cols) {
  Graph g(rows * cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int v = r * cols + c;
      if (c + 1 < cols) g.add_edge(v, v + 1);
      if (r + 1 < rows) g.add_edge(v, v + cols);
    }
  }
  return g;
}

Graph local_complement(const Graph& g, int v) {
  Graph out = g;
  const std::vector<int> nb(g.neighbors(v).begin(), g.neighbors(v).end());
  for (std::size_t i = 0; i < nb.size(); ++i) {
    for (std::size_t j = i + 1; j < nb.size(); ++j) out.toggle_edge(nb[i], nb[j]);
  }
  return out;
}

namespace {

struct OrbitSearch {
  std::unordered_map<std::uint64_t, std::pair<std::uint64_t, int>> parent;  // key -> (parent key, vertex)
  std::vector<std::uint64_t> order;
  bool complete = true;
};

OrbitSearch explore(const Graph& g, std::size_t cap, std::uint64_t stop_at, bool use_stop) {
  if (g.size() > 10) throw std::invalid_argument("orbit enumeration requires n <= 10");
  OrbitSearch s;
  const int n = g.size();
  const std::uint64_t start = g.key();
  s.parent.emplace(start, std::make_pair(start, -1));
  s.order.push_back(start);
  std::deque<std::uint64_t> queue{start};
  while (!queue.empty()) {
    const std::uint64_t cur = queue.front();
    queue.pop_front();
    if (use_stop && cur == stop_at) break;
    const Graph cg = Graph::from_key(n, cur);
    for (int v = 0; v < n; ++v) {
      const std::uint64_t nk = local_complement(cg, v).key();
      if (s.parent.count(nk)) continue;
      if (s.parent.size() >= cap) {
        s.complete = false;
        return s;
      }
      s.parent.emplace(nk, std::make_pair(cur, v));
      s.order.push_back(nk);
      queue.push_back(nk);
    }
  }
  return s;
}

}  // namespace

OrbitResult lc_orbit(const Graph& g, std::size_t cap) {
  const OrbitSearch s = explore(g, cap, 0, false);
  OrbitResult r;
  r.complete = s.complete;
  for (auto k : s.order) r.graphs.push_back(Graph::from_key(g.size(), k));
  return r;
}

DegreeResult min_max_degree_over_orbit(const Graph& g, std::size_t cap) {
  const OrbitResult orb = lc_orbit(g, cap);
  DegreeResult best{g.max_degree(), g, orb.complete};
  for (const auto& h : orb.graphs) {
    if (h.max_degree() < best.min_max_degree) {
      best.min_max_degree = h.max_degree();
      best.argmin = h;
    }
  }
  return best;
}

LcWitness lc_equivalent(const Graph& g1, const Graph& g2, std::size_t cap) {
  if (g1.size() != g2.size()) throw std::invalid_argument("graphs differ in vertex count");
  const std::uint64_t target = g2.key();
  const OrbitSearch s = explore(g1, cap, target, true);
  LcWitness w;
  w.complete = s.complete;
  auto it = s.parent.find(target);
  if (it == s.parent.end()) return w;
  w.equivalent = true;
  std::uint64_t cur = target;
  while (true) {
    const auto& [par, v] = s.parent.at(cur);
    if (v < 0) break;
    w.sequence.push_back(v);
    cur = par;
  }
  std::reverse(w.sequence.begin(), w.sequence.end());
  return w;
}

nlohmann::json graph_to_json(const Graph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [a, b] : g.edges()) edges.push_back({a, b});
  return {{"n", g.size()}, {"edges", edges}};
}

Graph graph_from_json(const nlohmann::json& j) {
  Graph g(j.at("n").get<int>());
  for (const auto& e : j.at("edges")) g.add_edge(e.at(0).get<int>(), e.at(1).get<int>());
  return g;
}

std::string graph_to_dot(const Graph& g, const std::vector<bool>& present, const std::string& name) {
  std::ostringstream os;
  os << "graph " << name << " {\n";
  for (int v = 0; v < g.size(); ++v) {
    if (!present.empty() && !present[v]) continue;
    os << "  " << v << ";\n";
  }
  for (const auto& [a, b] : g.edges()) os << "  " << a << " -- " << b << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace graphfuse
