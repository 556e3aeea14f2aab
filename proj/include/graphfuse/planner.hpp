#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "graphfuse/graph.hpp"
#include "graphfuse/growth.hpp"

namespace graphfuse {

class PlanError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ResourceCount {
  long long n_shifter = 0;
  long long n_basic = 0;
  long long n_epr = 0;
  long long n_qubits = 0;
  bool operator==(const ResourceCount&) const = default;
};

// Cross block: four EPR pairs, two shifter fusions, one basic fusion.
ResourceCount cross_block();

// Formula evaluation for an n x n cluster. Throws for n < 2.
ResourceCount cluster_resources(int n);

struct ClusterAssembly {
  ResourceCount counted;          // fusion invocations actually performed
  GraphStateRep rep;              // after the non-center qubits are measured out
  std::vector<int> centers;       // center qubit of lattice site (r, c) at index r * n + c
  Graph lattice;                  // present subgraph in center order
  Graph expected;                 // joins applied as edge toggles on the site graph
  int local_unitaries = 0;
};

// Row-by-row assembly from crosses. Each row is a ring of n crosses closed by n horizontal joins,
// then n (n - 1) vertical joins connect adjacent rows. Every fusion is applied symbolically.
ClusterAssembly assemble_cluster(int n);

// Edge set of the assembled topology with edges toggled once per join.
Graph cylinder_cluster(int n);

struct MeasurementOrder {
  std::vector<int> vertices;
  std::vector<std::string> bases;  // "X", "Y", "Z" or any label for tilted bases
};

MeasurementOrder default_order(int n, const std::string& basis = "Z");

struct PlanStep {
  enum class Kind { Create, Fuse, Measure };
  Kind kind = Kind::Create;
  int a = -1;  // create/measure: vertex; fuse: edge endpoint
  int b = -1;  // fuse: other endpoint
  int index = -1;  // measure: position in the order
  std::string basis;
  std::vector<int> depends_on;  // measure: earlier order positions whose outcomes set this basis
};

struct GrowthPlan {
  int vertices = 0;
  std::vector<PlanStep> steps;
  std::vector<std::vector<std::pair<int, int>>> ek_sets;  // E_k for each measurement index k
};

// Edges incident to the first k + 1 measured vertices.
std::vector<std::vector<std::pair<int, int>>> ek_sets(const Graph& target, const MeasurementOrder& order);

// Each edge is fused just before the first measurement that needs it; vertices are created on first use.
GrowthPlan jit_schedule(const Graph& target, const MeasurementOrder& order);

// Every vertex and edge exists before the first measurement.
GrowthPlan pregrown_schedule(const Graph& target, const MeasurementOrder& order);

struct ScheduleCheck {
  bool ok = true;
  std::optional<std::pair<int, int>> edge;  // first violating edge, if any
  int step = -1;
  std::string reason;
};

ScheduleCheck verify_schedule(const GrowthPlan& plan, const Graph& target, const MeasurementOrder& order);

// Peak of created minus measured qubits over the plan.
int qubit_recycling_estimate(const GrowthPlan& plan);

nlohmann::json plan_to_json(const GrowthPlan& plan);
GrowthPlan plan_from_json(const nlohmann::json& j);
MeasurementOrder order_from_json(const nlohmann::json& j);

struct ReferenceConstant {
  std::string name;
  std::string expression;
  std::string note;
};

// Recorded resource constants without constructions; metadata only.
std::vector<ReferenceConstant> reference_constants();

// Present graph of a script run with the first nonzero success record at every fusion.
Graph predict_script_graph(const GrowthScript& script, const SessionConfig& cfg = {});

}  // namespace graphfuse
