#pragma once

#include <array>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "graphfuse/qstate.hpp"

namespace graphfuse {

// Modes and detectors are 1-based throughout this module.
struct BeamSplitter {
  int mode_a = 1;
  int mode_b = 2;
};

struct PhaseShifter {
  int mode = 1;
  double phase = 0.0;
};

// Relabels two output ports; carries no physical element.
struct ModeSwap {
  int mode_a = 1;
  int mode_b = 2;
};

using NetworkElement = std::variant<BeamSplitter, PhaseShifter, ModeSwap>;

enum class NetworkVariant { Basic, Shifter };

std::string to_string(NetworkVariant v);
NetworkVariant parse_variant(const std::string& s);

struct ModeNetwork {
  std::vector<NetworkElement> elements;
  NetworkVariant variant = NetworkVariant::Basic;
};

class ModeUnitary {
 public:
  ModeUnitary() : beta_(Eigen::Matrix4cd::Identity()) {}
  explicit ModeUnitary(const Eigen::Matrix4cd& beta);

  // beta(k, j): detector k, cavity j, both 1-based.
  cplx operator()(int k, int j) const { return beta_(k - 1, j - 1); }
  const Eigen::Matrix4cd& matrix() const { return beta_; }

 private:
  Eigen::Matrix4cd beta_;
};

Eigen::Matrix2cd beam_splitter_block();

ModeUnitary compose_network(const ModeNetwork& net);

// The validated basic layout and its shifter variant; shifter_mode is the internal arm carrying pi/2.
ModeNetwork basic_network();
ModeNetwork shifter_network(int shifter_mode = 1, double phase = 1.5707963267948966);
// Number of elements in the first layer; the shifter is inserted after it.
constexpr std::size_t kFirstLayerSize = 2;

ModeNetwork network_from_json(const nlohmann::json& j);
nlohmann::json network_to_json(const ModeNetwork& net);
ModeNetwork load_network(const std::string& path);

struct JumpTerm {
  int cavity = 1;
  cplx coefficient;
};

struct JumpOperator {
  int detector = 1;
  std::vector<JumpTerm> terms;
};

// d_k = sum_j beta_kj gamma_j c_j with gamma_j = sqrt(Gamma_j).
JumpOperator jump_operator(int k, const ModeUnitary& beta, const std::array<double, 4>& gamma_rates);

// Applies d_k; cavity j acts on the active subsystem labelled cavity_labels[j-1].
StateVector apply_jump(const StateVector& state, const JumpOperator& d, const std::array<int, 4>& cavity_labels);

struct SubnetworkConfig {
  ModeUnitary beta;
  std::array<bool, 4> active_inputs{};
};

SubnetworkConfig two_of_four_subnetwork(const ModeNetwork& net, std::pair<int, int> actives);

}  // namespace graphfuse
