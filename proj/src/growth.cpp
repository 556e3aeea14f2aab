#include "graphfuse/growth.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace graphfuse {

namespace {

using nlohmann::json;

LeafPair pair_from_json(const json& j) { return LeafPair{j.at(0).get<int>(), j.at(1).get<int>()}; }

json pair_to_json(const LeafPair& p) { return json::array({p.leaf, p.hub}); }

std::string kind_name(ScriptOp::Kind k) {
  switch (k) {
    case ScriptOp::Kind::Epr: return "epr";
    case ScriptOp::Kind::Fuse: return "fuse";
    case ScriptOp::Kind::Measure: return "measure";
    case ScriptOp::Kind::Prepare: return "prepare";
  }
  return "?";
}

json op_to_json(const ScriptOp& op) {
  json j{{"op", kind_name(op.kind)}};
  switch (op.kind) {
    case ScriptOp::Kind::Epr:
      j["pair"] = json::array({op.a, op.b});
      j["mode"] = to_string(op.mode);
      break;
    case ScriptOp::Kind::Fuse:
      j["pairs"] = json::array({pair_to_json(op.first), pair_to_json(op.second)});
      j["variant"] = to_string(op.variant);
      break;
    case ScriptOp::Kind::Measure:
      j["qubit"] = op.a;
      if (op.axis) j["axis"] = to_string(*op.axis);
      break;
    case ScriptOp::Kind::Prepare:
      j["pair"] = pair_to_json(op.first);
      break;
  }
  return j;
}

// Detector order of an accepted two-photon report.
std::pair<int, int> record_detectors(const AttemptRecord& r) {
  int fired = 0;
  int last = 0;
  for (int k = 0; k < 4; ++k) {
    if (r.reported[k] == 2) return {k + 1, k + 1};
    if (r.reported[k] > 0) {
      ++fired;
      last = k + 1;
    }
  }
  // Without number resolution a single firing detector stands for a same-detector pair.
  if (fired == 1) return {last, last};
  std::vector<int> order;
  for (const ObservedClick& c : r.observed) {
    if (r.reported[c.detector - 1] > 0 && std::find(order.begin(), order.end(), c.detector) == order.end()) {
      order.push_back(c.detector);
    }
  }
  if (order.size() != 2) throw std::logic_error("accepted record without two reporting detectors");
  return {order[0], order[1]};
}

}  // namespace

GrowthScript parse_script(const json& j) {
  GrowthScript s;
  s.qubits = j.at("qubits").get<int>();
  if (s.qubits < 2) throw std::invalid_argument("script needs at least two qubits");
  const auto in_range = [&](int q) {
    if (q < 0 || q >= s.qubits) throw std::invalid_argument("script qubit out of range: " + std::to_string(q));
  };
  for (const json& e : j.at("ops")) {
    ScriptOp op;
    const std::string name = e.at("op").get<std::string>();
    if (name == "epr") {
      op.kind = ScriptOp::Kind::Epr;
      op.a = e.at("pair").at(0).get<int>();
      op.b = e.at("pair").at(1).get<int>();
      in_range(op.a);
      in_range(op.b);
      op.mode = parse_factory_mode(e.value("mode", std::string("two-of-four")));
    } else if (name == "fuse") {
      op.kind = ScriptOp::Kind::Fuse;
      op.first = pair_from_json(e.at("pairs").at(0));
      op.second = pair_from_json(e.at("pairs").at(1));
      for (int q : {op.first.leaf, op.first.hub, op.second.leaf, op.second.hub}) in_range(q);
      op.variant = parse_variant(e.value("variant", std::string("basic")));
    } else if (name == "measure") {
      op.kind = ScriptOp::Kind::Measure;
      op.a = e.at("qubit").get<int>();
      in_range(op.a);
      if (e.contains("axis")) op.axis = parse_axis(e.at("axis").get<std::string>());
    } else if (name == "prepare") {
      op.kind = ScriptOp::Kind::Prepare;
      op.first = pair_from_json(e.at("pair"));
      in_range(op.first.leaf);
      in_range(op.first.hub);
    } else {
      throw std::invalid_argument("unknown script op: " + name);
    }
    s.ops.push_back(op);
  }
  if (j.contains("expect")) s.expect = graph_from_json(j.at("expect"));
  return s;
}

json script_to_json(const GrowthScript& s) {
  json j{{"qubits", s.qubits}, {"ops", json::array()}};
  for (const ScriptOp& op : s.ops) j["ops"].push_back(op_to_json(op));
  if (s.expect) j["expect"] = graph_to_json(*s.expect);
  return j;
}

GrowthSession::GrowthSession(int qubits, SessionConfig cfg)
    : cfg_(std::move(cfg)), rng_(cfg_.seed, cfg_.stream), rep_(Graph(qubits)) {
  cfg_.detector.validate();
  for (int q = 0; q < qubits; ++q) {
    rep_.present[q] = false;
    owner_.push_back(next_fragment_);
    fragments_[next_fragment_++] = Fragment{{q}, {}};
  }
}

double GrowthSession::gamma_min() const {
  double g = std::numeric_limits<double>::infinity();
  for (const auto& p : cfg_.params) g = std::min(g, p.gamma);
  return g;
}

void GrowthSession::emit(json entry) {
  entry["seq"] = log_.size();
  entry["depth"] = replay_depth_;
  log_.push_back(std::move(entry));
}

std::string GrowthSession::log_jsonl() const {
  std::ostringstream os;
  for (const json& e : log_) os << e.dump() << '\n';
  return os.str();
}

int GrowthSession::merge(int f, int g) {
  if (f == g) return f;
  Fragment& into = fragments_.at(f);
  Fragment& from = fragments_.at(g);
  for (int q : from.qubits) owner_[q] = f;
  into.qubits.insert(from.qubits.begin(), from.qubits.end());
  into.ops.insert(into.ops.end(), from.ops.begin(), from.ops.end());
  fragments_.erase(g);
  return f;
}

void GrowthSession::record_op(int fragment, const ScriptOp& op) { fragments_.at(fragment).ops.push_back(op); }

void GrowthSession::reset_fragment(int f) {
  if (stats_.loss_resets + stats_.dark_rejects + stats_.inconsistent_rejects > cfg_.max_resets) {
    throw FusionError("growth session exceeded the reset cap");
  }
  const Fragment frag = fragments_.at(f);
  fragments_.erase(f);
  for (int q : frag.qubits) {
    rep_.graph.isolate(q);
    rep_.corrections[q] = LocalClifford::identity();
    rep_.present[q] = false;
    owner_[q] = next_fragment_;
    fragments_[next_fragment_++] = Fragment{{q}, {}};
  }
  emit({{"event", "reset"}, {"qubits", json(std::vector<int>(frag.qubits.begin(), frag.qubits.end()))},
        {"replay_ops", frag.ops.size()}});
  ++replay_depth_;
  for (const ScriptOp& op : frag.ops) execute(op);
  --replay_depth_;
}

void GrowthSession::run(const GrowthScript& script) {
  if (script.qubits != rep_.size()) throw std::invalid_argument("script qubit count does not match the session");
  for (const ScriptOp& op : script.ops) execute(op);
}

void GrowthSession::execute(const ScriptOp& op) {
  switch (op.kind) {
    case ScriptOp::Kind::Epr: execute_epr(op); break;
    case ScriptOp::Kind::Fuse: execute_fuse(op); break;
    case ScriptOp::Kind::Measure: execute_measure(op); break;
    case ScriptOp::Kind::Prepare: execute_prepare(op); break;
  }
}

void GrowthSession::execute_epr(const ScriptOp& op) {
  for (int q : {op.a, op.b}) {
    const Fragment& f = fragments_.at(fragment_of(q));
    if (f.qubits.size() != 1 || !f.ops.empty() || rep_.present[q]) {
      throw FusionError("EPR target qubit " + std::to_string(q) + " is already in use");
    }
  }
  const ModeUnitary beta = factory_unitary(op.mode, cfg_.basic);
  int attempts = 0;
  int detector = 0;
  bool corrupted = false;
  if (!cfg_.factory_detectors) {
    const FactoryResult fr = epr_factory(rep_, op.a, op.b, op.mode, cfg_.basic, cfg_.params, rng_, cfg_.rus_cap);
    attempts = fr.attempts;
    detector = fr.detector;
    rep_ = fr.rep;
  } else {
    const std::map<unsigned, double> w{{0U, 0.25}, {1U, 0.25}, {2U, 0.25}, {3U, 0.25}};
    const ExcitationModel model = ExcitationModel::from_weights(w);
    for (attempts = 1;; ++attempts) {
      if (attempts > cfg_.rus_cap) throw FusionError("EPR factory exceeded the attempt cap");
      const Trajectory tr = sample_trajectory(model, beta, cfg_.params, rng_);
      const AttemptRecord r = detect(tr.clicks, cfg_.detector, gamma_min(), rng_);
      int total = 0;
      for (int k = 0; k < 4; ++k) total += r.reported[k];
      if (total != 1) continue;
      for (int k = 0; k < 4; ++k) {
        if (r.reported[k] == 1) detector = k + 1;
      }
      // A lost partner photon or a dark herald leaves the pair impure without any visible sign.
      corrupted = r.lost > 0 || r.dark > 0;
      rep_ = install_heralded_pair(rep_, op.a, op.b, beta, detector, 1, 2);
      break;
    }
  }
  stats_.factory_attempts += attempts;
  const int f = merge(fragment_of(op.a), fragment_of(op.b));
  record_op(f, op);
  json e{{"event", "epr"}, {"pair", {op.a, op.b}}, {"mode", to_string(op.mode)}, {"attempts", attempts},
         {"detector", detector}};
  if (cfg_.factory_detectors) e["hidden_corruption"] = corrupted;
  emit(std::move(e));
}

void GrowthSession::execute_fuse(const ScriptOp& op) {
  const ModeUnitary beta = compose_network(op.variant == NetworkVariant::Basic ? cfg_.basic : cfg_.shifter);
  int rus = 0;
  while (true) {
    for (const LeafPair* p : {&op.first, &op.second}) {
      if (!rep_.present[p->leaf] || !rep_.present[p->hub]) throw FusionError("fusion pair is not present");
      if (!is_fusion_ready(rep_, *p)) {
        const PreparedPair pp = prepare_leaf_pair(rep_, p->leaf, p->hub);
        rep_ = pp.rep;
        ++stats_.local_unitaries;
        emit({{"event", "local_unitary"}, {"qubit", p->leaf}, {"gate", pp.applied->name()}});
      }
    }
    if (++rus > cfg_.rus_cap) throw FusionError("fusion exceeded the repeat-until-success cap");
    const Trajectory tr =
        sample_trajectory(fusion_excitation_model(rep_, op.first, op.second), beta, cfg_.params, rng_);
    const AttemptRecord r = detect(tr.clicks, cfg_.detector, gamma_min(), rng_);
    ++stats_.fusion_attempts;
    json e{{"event", "fusion_attempt"}, {"pairs", {pair_to_json(op.first), pair_to_json(op.second)}},
           {"variant", to_string(op.variant)}, {"reported", r.reported}, {"class", to_string(r.cls)},
           {"lost", r.lost}, {"dark", r.dark}};
    bool restart = !r.accepted;
    if (r.accepted) {
      ++stats_.accepted;
      if (r.corrupted) ++stats_.corrupted;
      e["hidden_corruption"] = r.corrupted;
      const auto [k1, k2] = record_detectors(r);
      e["record"] = {k1, k2};
      if (fusion_record_probability(rep_, op.first, op.second, beta, k1, k2) < 1e-12) {
        ++stats_.inconsistent_rejects;
        e["decision"] = "reset_inconsistent";
        restart = true;
      } else {
        const FusionOutcome out = fuse(rep_, op.first, op.second, beta, k1, k2);
        rep_ = out.rep;
        e["decision"] = to_string(out.cls);
        if (out.cls == FusionClass::Success) {
          e["edge_toggled"] = out.edge_toggled;
          emit(std::move(e));
          int f = fragment_of(op.first.hub);
          for (int q : {op.first.leaf, op.second.leaf, op.second.hub}) f = merge(f, fragment_of(q));
          record_op(f, op);
          return;
        }
      }
    } else if (r.cls == OutcomeClass::LossSuspected) {
      ++stats_.loss_resets;
      e["decision"] = "reset_loss";
    } else {
      ++stats_.dark_rejects;
      e["decision"] = "reset_dark";
    }
    emit(std::move(e));
    if (restart) {
      const int fa = fragment_of(op.first.hub);
      const int fb = fragment_of(op.second.hub);
      reset_fragment(fa);
      if (fb != fa) reset_fragment(fb);
      rus = 0;
    }
  }
}

void GrowthSession::execute_measure(const ScriptOp& op) {
  if (!rep_.present[op.a]) throw FusionError("measured qubit is not present");
  const MeasureOutResult m = measure_out_fusion_leaf(rep_, op.a, rng_, op.axis);
  rep_ = m.rep;
  record_op(fragment_of(op.a), op);
  emit({{"event", "measure"}, {"qubit", op.a}, {"axis", to_string(m.axis)}, {"outcome", m.outcome}});
}

void GrowthSession::execute_prepare(const ScriptOp& op) {
  const PreparedPair pp = prepare_leaf_pair(rep_, op.first.leaf, op.first.hub);
  rep_ = pp.rep;
  record_op(fragment_of(op.first.leaf), op);
  if (pp.applied) {
    ++stats_.local_unitaries;
    emit({{"event", "local_unitary"}, {"qubit", op.first.leaf}, {"gate", pp.applied->name()}});
  } else {
    emit({{"event", "prepare"}, {"pair", pair_to_json(op.first)}, {"already_ready", true}});
  }
}

Graph present_subgraph(const GraphStateRep& rep) {
  const std::vector<int> vs = rep.present_vertices();
  std::vector<int> index(static_cast<std::size_t>(rep.size()), -1);
  for (std::size_t i = 0; i < vs.size(); ++i) index[vs[i]] = static_cast<int>(i);
  Graph g(static_cast<int>(vs.size()));
  for (const auto& [a, b] : rep.graph.edges()) {
    if (index[a] >= 0 && index[b] >= 0) g.add_edge(index[a], index[b]);
  }
  return g;
}

SessionVerdict verify_session(const GraphStateRep& rep, const std::optional<Graph>& expect) {
  SessionVerdict v;
  const Graph g = present_subgraph(rep);
  for (const auto& [a, b] : rep.graph.edges()) {
    if (!rep.present[a] || !rep.present[b]) v.state_is_lc_graph = false;
  }
  if (!expect) return v;
  if (expect->size() != g.size()) {
    v.lc_matches_expectation = false;
    return v;
  }
  v.lc_matches_expectation = lc_equivalent(g, *expect).equivalent;
  if (g.size() <= 4) {
    const std::vector<int> vs = rep.present_vertices();
    GraphStateRep target(Graph(rep.size()));
    target.present = rep.present;
    for (const auto& [a, b] : expect->edges()) target.graph.add_edge(vs[a], vs[b]);
    v.dense_checked = true;
    v.state_is_lc_graph =
        v.state_is_lc_graph && lu_equivalent_states(graph_to_statevector(rep), graph_to_statevector(target)).equivalent;
  }
  return v;
}

}  // namespace graphfuse
