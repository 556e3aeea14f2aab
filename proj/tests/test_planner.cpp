#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "graphfuse/planner.hpp"

using namespace graphfuse;

namespace {

using Edge = std::pair<int, int>;

Graph random_graph(int n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  Graph g(n);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (coin(rng)) g.add_edge(a, b);
    }
  }
  return g;
}

MeasurementOrder random_order(int n, std::mt19937_64& rng) {
  MeasurementOrder o = default_order(n);
  std::shuffle(o.vertices.begin(), o.vertices.end(), rng);
  return o;
}

// Recomputes E_k from its definition at every measurement and checks the fused set contains it.
bool brute_force_valid(const GrowthPlan& plan, const Graph& g, const MeasurementOrder& order) {
  std::set<Edge> fused;
  std::set<int> measured_prefix;
  std::size_t k = 0;
  for (const PlanStep& s : plan.steps) {
    if (s.kind == PlanStep::Kind::Fuse) {
      if (measured_prefix.count(s.a) || measured_prefix.count(s.b)) return false;
      fused.insert({std::min(s.a, s.b), std::max(s.a, s.b)});
    } else if (s.kind == PlanStep::Kind::Measure) {
      if (k >= order.vertices.size() || s.a != order.vertices[k]) return false;
      measured_prefix.insert(s.a);
      for (const auto& [a, b] : g.edges()) {
        const bool in_ek = measured_prefix.count(a) > 0 || measured_prefix.count(b) > 0;
        if (in_ek && fused.count({a, b}) == 0) return false;
      }
      ++k;
    }
  }
  return k == order.vertices.size();
}

std::vector<Edge> fused_before_measure(const GrowthPlan& plan, int k) {
  std::vector<Edge> out;
  for (const PlanStep& s : plan.steps) {
    if (s.kind == PlanStep::Kind::Measure && s.index == k) break;
    if (s.kind == PlanStep::Kind::Fuse) out.push_back({s.a, s.b});
  }
  return out;
}

GrowthScript star8_script() {
  GrowthScript s;
  s.qubits = 8;
  for (int p = 0; p < 4; ++p) {
    ScriptOp e;
    e.kind = ScriptOp::Kind::Epr;
    e.a = 2 * p;
    e.b = 2 * p + 1;
    s.ops.push_back(e);
  }
  ScriptOp f;
  f.kind = ScriptOp::Kind::Fuse;
  f.first = {0, 1};
  f.second = {2, 3};
  s.ops.push_back(f);
  f.first = {4, 5};
  f.second = {6, 7};
  s.ops.push_back(f);
  f.first = {0, 1};
  f.second = {4, 5};
  s.ops.push_back(f);
  return s;
}

}  // namespace

TEST_CASE("resource formulas") {
  CHECK(cluster_resources(2) == ResourceCount{8, 10, 16, 32});
  const ResourceCount r5 = cluster_resources(5);
  CHECK(r5.n_shifter == 50);
  CHECK(r5.n_basic == 70);
  CHECK(cross_block().n_epr == 4);
  CHECK(cross_block().n_shifter == 2);
  CHECK(cross_block().n_basic == 1);
  CHECK_THROWS_AS(cluster_resources(1), PlanError);
  for (int n = 2; n <= 30; ++n) {
    const ResourceCount r = cluster_resources(n);
    CHECK(r.n_shifter == 2LL * n * n);
    CHECK(r.n_basic == 3LL * n * n - n);
    CHECK(r.n_shifter >= 0);
  }
}

TEST_CASE("constructive assembly counts and lattice") {
  for (int n = 2; n <= 4; ++n) {
    CAPTURE(n);
    const ClusterAssembly a = assemble_cluster(n);
    const ResourceCount f = cluster_resources(n);
    CHECK(a.counted.n_shifter == f.n_shifter);
    CHECK(a.counted.n_basic == f.n_basic);
    CHECK(a.counted.n_epr == f.n_epr);
    CHECK(a.local_unitaries == 0);
    CHECK(a.lattice == a.expected);
    CHECK(static_cast<int>(a.rep.present_vertices().size()) == n * n);
  }
  // For n >= 3 the rows close into rings without cancelling edges.
  const ClusterAssembly a3 = assemble_cluster(3);
  CHECK(a3.lattice.edge_count() == 2 * 9 - 3);
  for (int v = 0; v < 9; ++v) CHECK(a3.lattice.degree(v) == (v / 3 == 1 ? 4 : 3));
}

TEST_CASE("jit schedule on a path") {
  const Graph g = path_graph(4);
  const MeasurementOrder o = default_order(4);
  const GrowthPlan plan = jit_schedule(g, o);
  CHECK(fused_before_measure(plan, 0) == std::vector<Edge>{{0, 1}});
  CHECK(fused_before_measure(plan, 1) == std::vector<Edge>{{0, 1}, {1, 2}});
  CHECK(fused_before_measure(plan, 2) == std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}});
  CHECK(verify_schedule(plan, g, o).ok);
  CHECK(qubit_recycling_estimate(plan) == 2);
  CHECK(plan.ek_sets[0] == std::vector<Edge>{{0, 1}});
  CHECK(plan.ek_sets[3].size() == 3);
}

TEST_CASE("jit schedule on a star measured leaf first") {
  const Graph g = star_graph(4, 0);
  MeasurementOrder o = default_order(4);
  o.vertices = {1, 2, 3, 0};
  const GrowthPlan plan = jit_schedule(g, o);
  CHECK(fused_before_measure(plan, 0) == std::vector<Edge>{{0, 1}});
  CHECK(fused_before_measure(plan, 1) == std::vector<Edge>{{0, 1}, {0, 2}});
  CHECK(fused_before_measure(plan, 2) == std::vector<Edge>{{0, 1}, {0, 2}, {0, 3}});
  CHECK(verify_schedule(plan, g, o).ok);
}

TEST_CASE("empty plans") {
  const Graph g(0);
  const MeasurementOrder o;
  const GrowthPlan plan = jit_schedule(g, o);
  CHECK(plan.steps.empty());
  CHECK(qubit_recycling_estimate(plan) == 0);
  CHECK(verify_schedule(plan, g, o).ok);
}

TEST_CASE("deferred edge is reported") {
  const Graph g = path_graph(4);
  const MeasurementOrder o = default_order(4);
  GrowthPlan plan = jit_schedule(g, o);
  // Move the fusion of (1, 2) after the measurement of vertex 1.
  auto it = std::find_if(plan.steps.begin(), plan.steps.end(),
                         [](const PlanStep& s) { return s.kind == PlanStep::Kind::Fuse && s.a == 1 && s.b == 2; });
  REQUIRE(it != plan.steps.end());
  const PlanStep moved = *it;
  plan.steps.erase(it);
  auto m = std::find_if(plan.steps.begin(), plan.steps.end(),
                        [](const PlanStep& s) { return s.kind == PlanStep::Kind::Measure && s.index == 1; });
  plan.steps.insert(m + 1, moved);
  const ScheduleCheck c = verify_schedule(plan, g, o);
  CHECK_FALSE(c.ok);
  REQUIRE(c.edge.has_value());
  CHECK(*c.edge == Edge{1, 2});
}

TEST_CASE("invalid orders") {
  const Graph g = path_graph(3);
  MeasurementOrder o = default_order(3);
  o.vertices = {0, 0, 2};
  CHECK_THROWS_AS(jit_schedule(g, o), PlanError);
  o.vertices = {0, 1};
  o.bases = {"Z", "Z"};
  CHECK_THROWS_AS(jit_schedule(g, o), PlanError);
  CHECK_FALSE(verify_schedule(pregrown_schedule(g, default_order(3)), g, o).ok);
}

TEST_CASE("adaptive ordering is checked") {
  const Graph g = path_graph(3);
  const MeasurementOrder o = default_order(3, "X");
  GrowthPlan plan = jit_schedule(g, o);
  for (PlanStep& s : plan.steps) {
    if (s.kind == PlanStep::Kind::Measure && s.index == 1) s.depends_on = {2};
  }
  CHECK_FALSE(verify_schedule(plan, g, o).ok);
}

TEST_CASE("random plans agree with brute-force E_k") {
  std::mt19937_64 rng(2024);
  int valid = 0;
  int invalid = 0;
  for (int trial = 0; trial < 600; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8);
    const Graph g = random_graph(n, 0.4, rng);
    const MeasurementOrder o = random_order(n, rng);

    const GrowthPlan jit = jit_schedule(g, o);
    CHECK(verify_schedule(jit, g, o).ok);
    CHECK(brute_force_valid(jit, g, o));
    const GrowthPlan pre = pregrown_schedule(g, o);
    CHECK(verify_schedule(pre, g, o).ok);
    CHECK(qubit_recycling_estimate(pre) == n);
    CHECK(qubit_recycling_estimate(jit) <= n);

    // Creates first, then fusions scattered among the measurements.
    GrowthPlan shuffled;
    shuffled.vertices = n;
    std::vector<PlanStep> fuses;
    std::vector<PlanStep> measures;
    for (const PlanStep& s : pre.steps) {
      if (s.kind == PlanStep::Kind::Create) shuffled.steps.push_back(s);
      if (s.kind == PlanStep::Kind::Fuse) fuses.push_back(s);
      if (s.kind == PlanStep::Kind::Measure) measures.push_back(s);
    }
    std::vector<std::pair<std::size_t, PlanStep>> slots;
    for (const PlanStep& f : fuses) slots.push_back({rng() % (measures.size() + 1), f});
    std::stable_sort(slots.begin(), slots.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    std::size_t si = 0;
    for (std::size_t k = 0; k <= measures.size(); ++k) {
      while (si < slots.size() && slots[si].first == k) shuffled.steps.push_back(slots[si++].second);
      if (k < measures.size()) shuffled.steps.push_back(measures[k]);
    }
    const ScheduleCheck c = verify_schedule(shuffled, g, o);
    CHECK(c.ok == brute_force_valid(shuffled, g, o));
    if (c.ok) {
      ++valid;
    } else {
      ++invalid;
      if (c.edge) CHECK(g.has_edge(c.edge->first, c.edge->second));
    }
  }
  CHECK(valid > 0);
  CHECK(invalid > 0);
}

TEST_CASE("jit peak on paths stays below the vertex count") {
  for (int n = 3; n <= 12; ++n) {
    const GrowthPlan plan = jit_schedule(path_graph(n), default_order(n));
    CHECK(qubit_recycling_estimate(plan) == 2);
  }
}

TEST_CASE("plan json round trip") {
  std::mt19937_64 rng(5);
  const Graph g = random_graph(6, 0.5, rng);
  const MeasurementOrder o = random_order(6, rng);
  const GrowthPlan plan = jit_schedule(g, o);
  const GrowthPlan back = plan_from_json(plan_to_json(plan));
  CHECK(plan_to_json(back) == plan_to_json(plan));
  CHECK(verify_schedule(back, g, o).ok);
  const MeasurementOrder o2 = order_from_json({{"order", o.vertices}});
  CHECK(o2.vertices == o.vertices);
  CHECK(o2.bases == o.bases);
}

TEST_CASE("reference constants are listed") {
  const auto rc = reference_constants();
  CHECK(rc.size() == 6);
  CHECK(std::any_of(rc.begin(), rc.end(), [](const ReferenceConstant& c) { return c.name == "G_Toffoli"; }));
}

TEST_CASE("script prediction matches sessions") {
  const GrowthScript s = star8_script();
  const Graph predicted = predict_script_graph(s);
  CHECK(predicted == star_graph(8, 1));
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    SessionConfig cfg;
    cfg.seed = seed;
    GrowthSession session(8, cfg);
    session.run(s);
    CHECK(present_subgraph(session.state()) == predicted);
  }
}
