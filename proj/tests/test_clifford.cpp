#include <doctest.h>

#include <set>

#include "graphfuse/clifford.hpp"
#include "graphfuse/graph.hpp"

using namespace graphfuse;

TEST_CASE("group has 24 distinct named elements") {
  std::set<std::string> names;
  for (int i = 0; i < LocalClifford::kOrder; ++i) names.insert(LocalClifford::from_id(i).name());
  CHECK(names.size() == 24);
  CHECK(LocalClifford::identity().name() == "I");
}

TEST_CASE("products, inverses and names are consistent") {
  for (int a = 0; a < 24; ++a) {
    const LocalClifford ca = LocalClifford::from_id(a);
    CHECK(ca * ca.inverse() == LocalClifford::identity());
    CHECK(LocalClifford::from_name(ca.name()) == ca);
    for (int b = 0; b < 24; ++b) {
      const LocalClifford cb = LocalClifford::from_id(b);
      const auto m = LocalClifford::from_matrix(ca.matrix() * cb.matrix());
      REQUIRE(m.has_value());
      CHECK(*m == ca * cb);
    }
  }
}

TEST_CASE("pauli conjugation tables") {
  const LocalClifford h = LocalClifford::hadamard();
  CHECK(h.conjugate(Pauli::X) == std::make_pair(1, Pauli::Z));
  CHECK(h.conjugate(Pauli::Y) == std::make_pair(-1, Pauli::Y));
  const LocalClifford s = LocalClifford::phase();
  CHECK(s.conjugate(Pauli::X) == std::make_pair(1, Pauli::Y));
  CHECK(s.conjugate_by(Pauli::X) == std::make_pair(-1, Pauli::Y));
  for (int a = 0; a < 24; ++a) {
    const LocalClifford c = LocalClifford::from_id(a);
    for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
      const auto [sg, q] = c.conjugate(p);
      const Eigen::Matrix2cd lhs = c.matrix() * pauli_matrix(p) * c.matrix().adjoint();
      CHECK((lhs - static_cast<double>(sg) * pauli_matrix(q)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("square roots of Paulis") {
  const LocalClifford sz = LocalClifford::sqrt_plus_i(Pauli::Z);
  CHECK(sz * sz == LocalClifford::pauli(Pauli::Z));
  CHECK(LocalClifford::sqrt_minus_i(Pauli::X) * LocalClifford::sqrt_plus_i(Pauli::X) == LocalClifford::identity());
  CHECK(sz.is_diagonal());
  CHECK(LocalClifford::pauli(Pauli::X).is_monomial());
  CHECK_FALSE(LocalClifford::hadamard().is_monomial());
}

TEST_CASE("non-Clifford matrices are rejected") {
  Eigen::Matrix2cd t;
  t << 1, 0, 0, std::polar(1.0, 0.25 * M_PI);
  CHECK_FALSE(LocalClifford::from_matrix(t).has_value());
  CHECK_THROWS(LocalClifford::from_name("HQ"));
}

TEST_CASE("graph basics") {
  Graph g(3);
  g.add_edge(0, 1);
  CHECK(g.has_edge(1, 0));
  CHECK_THROWS(g.add_edge(1, 1));
  CHECK_THROWS(g.add_edge(0, 3));
  g.toggle_edge(0, 1);
  CHECK(g.edge_count() == 0);
  const Graph c = cluster_graph(3, 3);
  CHECK(c.max_degree() == 4);
  CHECK(c.edge_count() == 12);
  CHECK(Graph::from_key(9, c.key()) == c);
  CHECK(graph_from_json(graph_to_json(c)) == c);
  CHECK(graph_to_dot(path_graph(2)).find("0 -- 1") != std::string::npos);
}
