#include "graphfuse/planner.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "graphfuse/fusion.hpp"

namespace graphfuse {

namespace {

using Edge = std::pair<int, int>;

Edge ordered(int a, int b) { return a < b ? Edge{a, b} : Edge{b, a}; }

// First different-detector record with nonzero probability.
FusionOutcome ideal_fuse(const GraphStateRep& rep, const LeafPair& a, const LeafPair& b, const ModeUnitary& beta) {
  for (int k1 = 1; k1 <= 4; ++k1) {
    for (int k2 = 1; k2 <= 4; ++k2) {
      if (k1 == k2 || fusion_record_probability(rep, a, b, beta, k1, k2) < 1e-12) continue;
      return fuse(rep, a, b, beta, k1, k2);
    }
  }
  throw PlanError("no successful record for this fusion");
}

struct Builder {
  GraphStateRep rep;
  ResourceCount count;
  int local_unitaries = 0;
  ModeUnitary basic = compose_network(basic_network());
  ModeUnitary shifter = compose_network(shifter_network(1));

  int fresh_pair() {
    const int q = rep.add_qubits(2);
    rep = install_singlet(rep, q, q + 1);
    ++count.n_epr;
    count.n_qubits += 2;
    return q;
  }

  LeafPair ready(LeafPair p) {
    if (is_fusion_ready(rep, p)) return p;
    const PreparedPair pp = prepare_leaf_pair(rep, p.leaf, p.hub);
    rep = pp.rep;
    if (pp.applied) ++local_unitaries;
    return p;
  }

  void fuse_with(const LeafPair& a, const LeafPair& b, bool use_shifter) {
    const LeafPair ra = ready(a);
    const LeafPair rb = ready(b);
    rep = ideal_fuse(rep, ra, rb, use_shifter ? shifter : basic).rep;
    ++(use_shifter ? count.n_shifter : count.n_basic);
  }

  // Any pendant of the hub that is ready without rotation, else any pendant.
  LeafPair port_of(int hub) {
    std::optional<LeafPair> fallback;
    for (int v : rep.graph.neighbors(hub)) {
      if (rep.graph.degree(v) != 1) continue;
      const LeafPair p{v, hub};
      if (is_fusion_ready(rep, p)) return p;
      if (!fallback) fallback = p;
    }
    if (!fallback) throw PlanError("hub has no pendant port");
    return *fallback;
  }
};

struct Cross {
  int center = -1;
  std::vector<int> arms;  // hubs joined to the center, each carrying one port
};

Cross build_cross(Builder& b) {
  std::array<int, 4> q{};
  for (int& x : q) x = b.fresh_pair();
  // Pairs are (leaf, hub) = (q, q + 1).
  b.fuse_with({q[0], q[0] + 1}, {q[1], q[1] + 1}, true);
  b.fuse_with({q[2], q[2] + 1}, {q[3], q[3] + 1}, true);
  b.fuse_with({q[0], q[0] + 1}, {q[2], q[2] + 1}, false);
  return Cross{q[0] + 1, {q[1] + 1, q[3] + 1}};
}

// Merges a port of `from` with the arm of `to`; the arm's center becomes adjacent to `from`.
void join(Builder& b, Cross& from, Cross& to) {
  if (to.arms.empty()) throw PlanError("cross has no free arm");
  const int arm = to.arms.back();
  to.arms.pop_back();
  b.fuse_with(b.port_of(from.center), b.port_of(arm), false);
}

}  // namespace

ResourceCount cross_block() { return ResourceCount{2, 1, 4, 8}; }

ResourceCount cluster_resources(int n) {
  if (n < 2) throw PlanError("cluster side must be at least 2");
  const long long m = n;
  const ResourceCount cross = cross_block();
  return ResourceCount{2 * m * m, 3 * m * m - m, cross.n_epr * m * m, cross.n_qubits * m * m};
}

Graph cylinder_cluster(int n) {
  Graph g(n * n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const int v = r * n + c;
      g.toggle_edge(v, r * n + (c + 1) % n);
      if (r + 1 < n) g.toggle_edge(v, v + n);
    }
  }
  return g;
}

ClusterAssembly assemble_cluster(int n) {
  if (n < 2) throw PlanError("cluster side must be at least 2");
  Builder b;
  std::vector<Cross> sites;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) sites.push_back(build_cross(b));
    for (int c = 0; c < n; ++c) join(b, sites[r * n + c], sites[r * n + (c + 1) % n]);
  }
  for (int r = 0; r + 1 < n; ++r) {
    for (int c = 0; c < n; ++c) join(b, sites[r * n + c], sites[(r + 1) * n + c]);
  }

  ClusterAssembly out;
  for (const Cross& s : sites) out.centers.push_back(s.center);
  const std::set<int> keep(out.centers.begin(), out.centers.end());
  CounterRng rng(0, 0);
  for (int v = 0; v < b.rep.size(); ++v) {
    if (keep.count(v) == 0 && b.rep.present[v]) b.rep = measure_out_fusion_leaf(b.rep, v, rng).rep;
  }
  out.counted = b.count;
  out.rep = b.rep;
  out.local_unitaries = b.local_unitaries;
  out.lattice = Graph(n * n);
  std::map<int, int> site;
  for (std::size_t i = 0; i < out.centers.size(); ++i) site[out.centers[i]] = static_cast<int>(i);
  for (const auto& [x, y] : b.rep.graph.edges()) {
    if (site.count(x) == 0 || site.count(y) == 0) throw PlanError("edge left on a measured-out qubit");
    out.lattice.add_edge(site[x], site[y]);
  }
  out.expected = cylinder_cluster(n);
  return out;
}

MeasurementOrder default_order(int n, const std::string& basis) {
  MeasurementOrder o;
  for (int v = 0; v < n; ++v) {
    o.vertices.push_back(v);
    o.bases.push_back(basis);
  }
  return o;
}

namespace {

std::vector<int> order_positions(const Graph& target, const MeasurementOrder& order) {
  const int n = target.size();
  if (order.bases.size() != order.vertices.size()) throw PlanError("order needs one basis per vertex");
  std::vector<int> pos(static_cast<std::size_t>(n), -1);
  for (std::size_t k = 0; k < order.vertices.size(); ++k) {
    const int v = order.vertices[k];
    if (v < 0 || v >= n) throw PlanError("order vertex out of range: " + std::to_string(v));
    if (pos[v] >= 0) throw PlanError("vertex measured twice: " + std::to_string(v));
    pos[v] = static_cast<int>(k);
  }
  for (const auto& [a, b] : target.edges()) {
    if (pos[a] < 0 || pos[b] < 0) {
      throw PlanError("edge (" + std::to_string(a) + "," + std::to_string(b) + ") has an unmeasured endpoint");
    }
  }
  for (int v = 0; v < n; ++v) {
    if (pos[v] < 0) throw PlanError("order misses vertex " + std::to_string(v));
  }
  return pos;
}

PlanStep create_step(int v) {
  PlanStep s;
  s.kind = PlanStep::Kind::Create;
  s.a = v;
  return s;
}

PlanStep fuse_step(int a, int b) {
  PlanStep s;
  s.kind = PlanStep::Kind::Fuse;
  s.a = a;
  s.b = b;
  return s;
}

PlanStep measure_step(const MeasurementOrder& order, int k) {
  PlanStep s;
  s.kind = PlanStep::Kind::Measure;
  s.a = order.vertices[k];
  s.index = k;
  s.basis = order.bases[k];
  for (int j = 0; j < k; ++j) s.depends_on.push_back(j);
  return s;
}

}  // namespace

std::vector<std::vector<Edge>> ek_sets(const Graph& target, const MeasurementOrder& order) {
  const std::vector<int> pos = order_positions(target, order);
  std::vector<std::vector<Edge>> out(order.vertices.size());
  for (const auto& [a, b] : target.edges()) {
    for (std::size_t k = static_cast<std::size_t>(std::min(pos[a], pos[b])); k < out.size(); ++k) {
      out[k].push_back({a, b});
    }
  }
  return out;
}

GrowthPlan jit_schedule(const Graph& target, const MeasurementOrder& order) {
  const std::vector<int> pos = order_positions(target, order);
  GrowthPlan plan;
  plan.vertices = target.size();
  plan.ek_sets = ek_sets(target, order);
  std::vector<std::vector<Edge>> due(order.vertices.size());
  for (const auto& [a, b] : target.edges()) due[std::min(pos[a], pos[b])].push_back({a, b});
  std::vector<bool> created(static_cast<std::size_t>(target.size()), false);
  const auto create = [&](int v) {
    if (created[v]) return;
    created[v] = true;
    plan.steps.push_back(create_step(v));
  };
  for (std::size_t k = 0; k < order.vertices.size(); ++k) {
    for (const auto& [a, b] : due[k]) {
      create(a);
      create(b);
      plan.steps.push_back(fuse_step(a, b));
    }
    create(order.vertices[k]);
    plan.steps.push_back(measure_step(order, static_cast<int>(k)));
  }
  return plan;
}

GrowthPlan pregrown_schedule(const Graph& target, const MeasurementOrder& order) {
  order_positions(target, order);
  GrowthPlan plan;
  plan.vertices = target.size();
  plan.ek_sets = ek_sets(target, order);
  for (int v = 0; v < target.size(); ++v) plan.steps.push_back(create_step(v));
  for (const auto& [a, b] : target.edges()) plan.steps.push_back(fuse_step(a, b));
  for (std::size_t k = 0; k < order.vertices.size(); ++k) plan.steps.push_back(measure_step(order, static_cast<int>(k)));
  return plan;
}

ScheduleCheck verify_schedule(const GrowthPlan& plan, const Graph& target, const MeasurementOrder& order) {
  ScheduleCheck res;
  const auto fail = [&](int step, std::string why, std::optional<Edge> e = std::nullopt) {
    res.ok = false;
    res.step = step;
    res.reason = std::move(why);
    res.edge = e;
    return res;
  };
  std::vector<int> pos;
  try {
    pos = order_positions(target, order);
  } catch (const PlanError& e) {
    return fail(-1, e.what());
  }
  const int n = target.size();
  std::vector<bool> created(static_cast<std::size_t>(n), false);
  std::vector<bool> measured(static_cast<std::size_t>(n), false);
  std::set<Edge> live;
  int next_k = 0;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const PlanStep& s = plan.steps[i];
    const int si = static_cast<int>(i);
    const auto in_range = [&](int v) { return v >= 0 && v < n; };
    switch (s.kind) {
      case PlanStep::Kind::Create:
        if (!in_range(s.a)) return fail(si, "created vertex out of range");
        if (created[s.a]) return fail(si, "vertex created twice");
        created[s.a] = true;
        break;
      case PlanStep::Kind::Fuse: {
        if (!in_range(s.a) || !in_range(s.b) || s.a == s.b) return fail(si, "fusion endpoint out of range");
        const Edge e = ordered(s.a, s.b);
        if (!target.has_edge(s.a, s.b)) return fail(si, "fusion creates an edge outside the target", e);
        if (!created[s.a] || !created[s.b]) return fail(si, "fusion on an uncreated vertex", e);
        if (measured[s.a] || measured[s.b]) return fail(si, "fusion on a measured vertex", e);
        if (!live.insert(e).second) return fail(si, "edge fused twice", e);
        break;
      }
      case PlanStep::Kind::Measure: {
        if (s.index != next_k || next_k >= static_cast<int>(order.vertices.size()) ||
            s.a != order.vertices[next_k]) {
          return fail(si, "measurement out of order");
        }
        if (s.basis != order.bases[next_k]) return fail(si, "measurement basis differs from the order");
        for (int j : s.depends_on) {
          if (j >= next_k) return fail(si, "basis depends on a later outcome");
        }
        if (!created[s.a]) return fail(si, "measured vertex was never created");
        for (int w : target.neighbors(s.a)) {
          if (!measured[w] && live.count(ordered(s.a, w)) == 0) {
            return fail(si, "edge of E_k missing at its measurement", ordered(s.a, w));
          }
        }
        measured[s.a] = true;
        ++next_k;
        break;
      }
    }
  }
  if (next_k != static_cast<int>(order.vertices.size())) return fail(static_cast<int>(plan.steps.size()), "plan ends before every measurement");
  return res;
}

int qubit_recycling_estimate(const GrowthPlan& plan) {
  int live = 0;
  int peak = 0;
  for (const PlanStep& s : plan.steps) {
    if (s.kind == PlanStep::Kind::Create) peak = std::max(peak, ++live);
    if (s.kind == PlanStep::Kind::Measure) --live;
  }
  return peak;
}

namespace {

std::string kind_name(PlanStep::Kind k) {
  switch (k) {
    case PlanStep::Kind::Create: return "create";
    case PlanStep::Kind::Fuse: return "fuse";
    case PlanStep::Kind::Measure: return "measure";
  }
  return "?";
}

}  // namespace

nlohmann::json plan_to_json(const GrowthPlan& plan) {
  nlohmann::json j{{"vertices", plan.vertices}, {"steps", nlohmann::json::array()}, {"ek_sets", plan.ek_sets}};
  for (const PlanStep& s : plan.steps) {
    nlohmann::json e{{"kind", kind_name(s.kind)}};
    switch (s.kind) {
      case PlanStep::Kind::Create: e["vertex"] = s.a; break;
      case PlanStep::Kind::Fuse:
        e["edge"] = {s.a, s.b};
        e["primitive"] = "shifter";
        break;
      case PlanStep::Kind::Measure:
        e["vertex"] = s.a;
        e["index"] = s.index;
        e["basis"] = s.basis;
        e["depends_on"] = s.depends_on;
        break;
    }
    j["steps"].push_back(e);
  }
  return j;
}

GrowthPlan plan_from_json(const nlohmann::json& j) {
  GrowthPlan plan;
  plan.vertices = j.at("vertices").get<int>();
  if (j.contains("ek_sets")) plan.ek_sets = j.at("ek_sets").get<std::vector<std::vector<Edge>>>();
  for (const auto& e : j.at("steps")) {
    PlanStep s;
    const std::string kind = e.at("kind").get<std::string>();
    if (kind == "create") {
      s.kind = PlanStep::Kind::Create;
      s.a = e.at("vertex").get<int>();
    } else if (kind == "fuse") {
      s.kind = PlanStep::Kind::Fuse;
      s.a = e.at("edge").at(0).get<int>();
      s.b = e.at("edge").at(1).get<int>();
    } else if (kind == "measure") {
      s.kind = PlanStep::Kind::Measure;
      s.a = e.at("vertex").get<int>();
      s.index = e.at("index").get<int>();
      s.basis = e.at("basis").get<std::string>();
      s.depends_on = e.value("depends_on", std::vector<int>{});
    } else {
      throw PlanError("unknown plan step: " + kind);
    }
    plan.steps.push_back(s);
  }
  return plan;
}

MeasurementOrder order_from_json(const nlohmann::json& j) {
  MeasurementOrder o;
  o.vertices = j.at("order").get<std::vector<int>>();
  if (j.contains("bases")) {
    o.bases = j.at("bases").get<std::vector<std::string>>();
  } else {
    o.bases.assign(o.vertices.size(), j.value("basis", std::string("Z")));
  }
  return o;
}

std::vector<ReferenceConstant> reference_constants() {
  return {
      {"C_Fourier", "8n^2 + O(n)", "qubits, quantum Fourier transform"},
      {"G_Fourier", "(3/2)n^2 + O(n)", "graph-growth qubits, quantum Fourier transform"},
      {"C_Adder", "312n + O(1)", "qubits, adder"},
      {"G_Adder", "16n + O(1)", "graph-growth qubits, adder"},
      {"C_Toffoli", "65", "qubits, Toffoli gate"},
      {"G_Toffoli", "13", "graph-growth qubits, Toffoli gate"},
  };
}

Graph predict_script_graph(const GrowthScript& script, const SessionConfig& cfg) {
  GraphStateRep rep(Graph(script.qubits));
  std::fill(rep.present.begin(), rep.present.end(), false);
  CounterRng rng(cfg.seed, cfg.stream);
  for (const ScriptOp& op : script.ops) {
    switch (op.kind) {
      case ScriptOp::Kind::Epr: rep = install_singlet(rep, op.a, op.b); break;
      case ScriptOp::Kind::Fuse: {
        const ModeUnitary beta = compose_network(op.variant == NetworkVariant::Basic ? cfg.basic : cfg.shifter);
        for (const LeafPair* p : {&op.first, &op.second}) {
          if (!is_fusion_ready(rep, *p)) rep = prepare_leaf_pair(rep, p->leaf, p->hub).rep;
        }
        rep = ideal_fuse(rep, op.first, op.second, beta).rep;
        break;
      }
      case ScriptOp::Kind::Measure: rep = measure_out_fusion_leaf(rep, op.a, rng, op.axis).rep; break;
      case ScriptOp::Kind::Prepare: rep = prepare_leaf_pair(rep, op.first.leaf, op.first.hub).rep; break;
    }
  }
  return present_subgraph(rep);
}

}  // namespace graphfuse
