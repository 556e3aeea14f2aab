#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace graphfuse {

// Simple undirected graph on vertices 0..n-1.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int n);
  Graph(int n, const std::vector<std::pair<int, int>>& edges);

  int size() const { return static_cast<int>(adj_.size()); }
  bool has_edge(int a, int b) const;
  void add_edge(int a, int b);
  void remove_edge(int a, int b);
  void toggle_edge(int a, int b);
  // Removes all edges incident to v; v stays as an isolated vertex.
  void isolate(int v);
  // Appends k isolated vertices and returns the index of the first.
  int add_vertices(int k);

  const std::set<int>& neighbors(int v) const;
  int degree(int v) const { return static_cast<int>(neighbors(v).size()); }
  int max_degree() const;
  std::vector<std::pair<int, int>> edges() const;
  std::size_t edge_count() const;

  // Edge bitmask key for n <= 11 (n(n-1)/2 <= 55 bits).
  std::uint64_t key() const;
  static Graph from_key(int n, std::uint64_t key);

  bool operator==(const Graph&) const = default;

 private:
  void check(int v) const;
  std::vector<std::set<int>> adj_;
};

Graph path_graph(int n);
Graph star_graph(int n, int center = 0);
Graph complete_graph(int n);
Graph cluster_graph(int rows, int cols);

Graph local_complement(const Graph& g, int v);

struct OrbitResult {
  std::vector<Graph> graphs;
  bool complete = true;
};

// Closure under local complementation on labeled graphs, breadth-first from g.
OrbitResult lc_orbit(const Graph& g, std::size_t cap = 1000000);

struct DegreeResult {
  int min_max_degree = 0;
  Graph argmin;
  bool complete = true;
};

DegreeResult min_max_degree_over_orbit(const Graph& g, std::size_t cap = 1000000);

struct LcWitness {
  bool equivalent = false;
  std::vector<int> sequence;  // LC vertex sequence taking g1 to g2
  bool complete = true;
};

LcWitness lc_equivalent(const Graph& g1, const Graph& g2, std::size_t cap = 1000000);

nlohmann::json graph_to_json(const Graph& g);
Graph graph_from_json(const nlohmann::json& j);
std::string graph_to_dot(const Graph& g, const std::vector<bool>& present = {}, const std::string& name = "G");

}  // namespace graphfuse
