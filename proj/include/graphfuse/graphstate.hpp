#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphfuse/clifford.hpp"
#include "graphfuse/graph.hpp"
#include "graphfuse/qstate.hpp"

namespace graphfuse {

// State (prod_v C_v) |G>, modulo global phase. Measured vertices are absent.
struct GraphStateRep {
  Graph graph;
  std::vector<LocalClifford> corrections;
  std::vector<bool> present;

  GraphStateRep() = default;
  explicit GraphStateRep(Graph g);

  int size() const { return graph.size(); }
  int add_qubits(int k);  // fresh |+> qubits, returns first index
  std::vector<int> present_vertices() const;
  bool operator==(const GraphStateRep&) const = default;
};

class CorrectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PauliAxis { X, Y, Z };

Pauli to_pauli(PauliAxis a);
PauliAxis parse_axis(const std::string& s);
std::string to_string(PauliAxis a);

// Physical controlled-Z between a and b; corrections must be monomial on both.
GraphStateRep phase_gate(const GraphStateRep& rep, int a, int b);

// Probability of the outcome (0, 1/2 or 1).
double measurement_probability(const GraphStateRep& rep, int v, PauliAxis axis, int outcome);

// Projects v onto the outcome (+1/-1) of the physical Pauli axis and removes v.
GraphStateRep measure_pauli(const GraphStateRep& rep, int v, PauliAxis axis, int outcome);

// Graph-frame operation: same physical state, graph locally complemented at v.
GraphStateRep local_complement(const GraphStateRep& rep, int v);

// Applies a physical local Clifford u on v (state -> u_v state).
GraphStateRep apply_local_clifford(const GraphStateRep& rep, int v, LocalClifford u);

// Dense state over present vertices in ascending order; spectator labels are vertex ids.
StateVector graph_to_statevector(const GraphStateRep& rep);
StateVector graph_to_statevector(const Graph& g);

struct LuWitness {
  bool equivalent = false;
  std::vector<LocalClifford> ops;  // sv2 ~ (x) ops sv1
};

// Search over the local Clifford group for U with |<sv2|U|sv1>| = 1 within tol.
LuWitness lu_equivalent_states(const StateVector& sv1, const StateVector& sv2, double tol = 1e-9);

nlohmann::json rep_to_json(const GraphStateRep& rep);
GraphStateRep rep_from_json(const nlohmann::json& j);

}  // namespace graphfuse
