#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphfuse/detector.hpp"
#include "graphfuse/fusion.hpp"

namespace graphfuse {

struct ScriptOp {
  enum class Kind { Epr, Fuse, Measure, Prepare };
  Kind kind = Kind::Epr;
  int a = 0;  // epr: first qubit; measure: qubit
  int b = 1;  // epr: second qubit
  LeafPair first;
  LeafPair second;
  NetworkVariant variant = NetworkVariant::Basic;
  FactoryMode mode = FactoryMode::TwoOfFour;
  std::optional<PauliAxis> axis;
};

struct GrowthScript {
  int qubits = 0;
  std::vector<ScriptOp> ops;
  std::optional<Graph> expect;  // predicted final graph on all qubits, compared up to LC
};

// {"qubits": n, "ops": [{"op": "epr", "pair": [a, b], "mode": "two-of-four"},
//   {"op": "fuse", "pairs": [[leaf, hub], [leaf, hub]], "variant": "basic"},
//   {"op": "measure", "qubit": v, "axis": "Z"}, {"op": "prepare", "pair": [leaf, hub]}], "expect": {...}}
GrowthScript parse_script(const nlohmann::json& j);
nlohmann::json script_to_json(const GrowthScript& s);

struct SessionConfig {
  ModeNetwork basic = basic_network();
  ModeNetwork shifter = shifter_network(1);
  ParamSet params = baseline_params();
  DetectorModel detector;
  bool factory_detectors = false;  // apply the detector model to factory heralds too
  int rus_cap = 64;
  int max_resets = 10000;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

struct SessionStats {
  int fusion_attempts = 0;
  int accepted = 0;   // reported counts formed a valid two-photon pattern
  int corrupted = 0;  // accepted while a photon was lost
  int loss_resets = 0;
  int dark_rejects = 0;
  int inconsistent_rejects = 0;
  int factory_attempts = 0;
  int local_unitaries = 0;
};

class GrowthSession {
 public:
  GrowthSession(int qubits, SessionConfig cfg);

  void run(const GrowthScript& script);
  void execute(const ScriptOp& op);

  const GraphStateRep& state() const { return rep_; }
  const std::vector<nlohmann::json>& log() const { return log_; }
  std::string log_jsonl() const;
  const SessionStats& stats() const { return stats_; }
  const SessionConfig& config() const { return cfg_; }

 private:
  struct Fragment {
    std::set<int> qubits;
    std::vector<ScriptOp> ops;
  };

  void execute_epr(const ScriptOp& op);
  void execute_fuse(const ScriptOp& op);
  void execute_measure(const ScriptOp& op);
  void execute_prepare(const ScriptOp& op);
  int fragment_of(int q) const { return owner_.at(static_cast<std::size_t>(q)); }
  int merge(int f, int g);
  void record_op(int fragment, const ScriptOp& op);
  void reset_fragment(int f);
  void emit(nlohmann::json entry);
  double gamma_min() const;

  SessionConfig cfg_;
  CounterRng rng_;
  GraphStateRep rep_;
  std::vector<int> owner_;
  std::map<int, Fragment> fragments_;
  int next_fragment_ = 0;
  int replay_depth_ = 0;
  std::vector<nlohmann::json> log_;
  SessionStats stats_;
};

struct SessionVerdict {
  bool lc_matches_expectation = true;
  bool state_is_lc_graph = true;  // dense check of C|G> against |G> when small enough
  bool dense_checked = false;
};

SessionVerdict verify_session(const GraphStateRep& rep, const std::optional<Graph>& expect);

// Present-vertex subgraph relabeled to 0..m-1 in ascending order.
Graph present_subgraph(const GraphStateRep& rep);

}  // namespace graphfuse
