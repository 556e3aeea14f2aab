#include "graphfuse/optics.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace graphfuse {

namespace {

void check_mode(int m) {
  if (m < 1 || m > 4) throw std::invalid_argument("mode index out of range: " + std::to_string(m));
}

Eigen::Matrix4cd embed(const Eigen::Matrix2cd& b, int i, int j) {
  Eigen::Matrix4cd e = Eigen::Matrix4cd::Identity();
  e(i - 1, i - 1) = b(0, 0);
  e(i - 1, j - 1) = b(0, 1);
  e(j - 1, i - 1) = b(1, 0);
  e(j - 1, j - 1) = b(1, 1);
  return e;
}

// Structural reachability: which detectors each input can reach through the element list.
bool fully_connected(const ModeNetwork& net) {
  std::array<std::array<bool, 4>, 4> reach{};
  for (int m = 0; m < 4; ++m) reach[m][m] = true;  // reach[mode][input]
  for (const auto& el : net.elements) {
    if (const auto* bs = std::get_if<BeamSplitter>(&el)) {
      auto& a = reach[bs->mode_a - 1];
      auto& b = reach[bs->mode_b - 1];
      for (int in = 0; in < 4; ++in) a[in] = b[in] = a[in] || b[in];
    } else if (const auto* sw = std::get_if<ModeSwap>(&el)) {
      std::swap(reach[sw->mode_a - 1], reach[sw->mode_b - 1]);
    }
  }
  for (const auto& row : reach) {
    for (bool r : row) {
      if (!r) return false;
    }
  }
  return true;
}

}  // namespace

std::string to_string(NetworkVariant v) { return v == NetworkVariant::Basic ? "basic" : "shifter"; }

NetworkVariant parse_variant(const std::string& s) {
  if (s == "basic") return NetworkVariant::Basic;
  if (s == "shifter") return NetworkVariant::Shifter;
  throw std::invalid_argument("unknown network variant: " + s);
}

ModeUnitary::ModeUnitary(const Eigen::Matrix4cd& beta) : beta_(beta) {
  const double err = (beta.adjoint() * beta - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff();
  if (err > 1e-12) throw std::invalid_argument("mode matrix is not unitary");
}

Eigen::Matrix2cd beam_splitter_block() {
  const double r = 1.0 / std::sqrt(2.0);
  Eigen::Matrix2cd b;
  b << r, cplx(0, r), cplx(0, r), r;
  return b;
}

ModeUnitary compose_network(const ModeNetwork& net) {
  Eigen::Matrix4cd beta = Eigen::Matrix4cd::Identity();
  for (const auto& el : net.elements) {
    if (const auto* bs = std::get_if<BeamSplitter>(&el)) {
      check_mode(bs->mode_a);
      check_mode(bs->mode_b);
      if (bs->mode_a == bs->mode_b) throw std::invalid_argument("beam splitter on a single mode");
      beta = embed(beam_splitter_block(), bs->mode_a, bs->mode_b) * beta;
    } else if (const auto* ps = std::get_if<PhaseShifter>(&el)) {
      check_mode(ps->mode);
      Eigen::Matrix4cd d = Eigen::Matrix4cd::Identity();
      d(ps->mode - 1, ps->mode - 1) = std::polar(1.0, ps->phase);
      beta = d * beta;
    } else {
      const auto& sw = std::get<ModeSwap>(el);
      check_mode(sw.mode_a);
      check_mode(sw.mode_b);
      beta.row(sw.mode_a - 1).swap(beta.row(sw.mode_b - 1));
    }
  }
  return ModeUnitary(beta);
}

ModeNetwork basic_network() {
  ModeNetwork net;
  net.variant = NetworkVariant::Basic;
  net.elements = {BeamSplitter{1, 2}, BeamSplitter{3, 4}, BeamSplitter{1, 4}, BeamSplitter{2, 3}, ModeSwap{2, 4}};
  return net;
}

ModeNetwork shifter_network(int shifter_mode, double phase) {
  check_mode(shifter_mode);
  ModeNetwork net = basic_network();
  net.variant = NetworkVariant::Shifter;
  net.elements.insert(net.elements.begin() + kFirstLayerSize, PhaseShifter{shifter_mode, phase});
  return net;
}

ModeNetwork network_from_json(const nlohmann::json& j) {
  ModeNetwork net;
  net.variant = parse_variant(j.value("variant", std::string("basic")));
  for (const auto& e : j.at("elements")) {
    if (e.contains("bs")) {
      net.elements.emplace_back(BeamSplitter{e["bs"][0].get<int>(), e["bs"][1].get<int>()});
    } else if (e.contains("phase")) {
      net.elements.emplace_back(PhaseShifter{e["phase"]["mode"].get<int>(), e["phase"]["value"].get<double>()});
    } else if (e.contains("swap")) {
      net.elements.emplace_back(ModeSwap{e["swap"][0].get<int>(), e["swap"][1].get<int>()});
    } else {
      throw std::invalid_argument("unknown network element: " + e.dump());
    }
  }
  if (!fully_connected(net)) {
    throw std::invalid_argument("network is disconnected: some input cannot reach some detector");
  }
  compose_network(net);
  return net;
}

nlohmann::json network_to_json(const ModeNetwork& net) {
  nlohmann::json els = nlohmann::json::array();
  for (const auto& el : net.elements) {
    if (const auto* bs = std::get_if<BeamSplitter>(&el)) {
      els.push_back({{"bs", {bs->mode_a, bs->mode_b}}});
    } else if (const auto* ps = std::get_if<PhaseShifter>(&el)) {
      els.push_back({{"phase", {{"mode", ps->mode}, {"value", ps->phase}}}});
    } else {
      const auto& sw = std::get<ModeSwap>(el);
      els.push_back({{"swap", {sw.mode_a, sw.mode_b}}});
    }
  }
  return {{"variant", to_string(net.variant)}, {"elements", els}};
}

ModeNetwork load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open network file " + path);
  return network_from_json(nlohmann::json::parse(in));
}

JumpOperator jump_operator(int k, const ModeUnitary& beta, const std::array<double, 4>& gamma_rates) {
  check_mode(k);
  JumpOperator d;
  d.detector = k;
  for (int j = 1; j <= 4; ++j) {
    if (!(gamma_rates[j - 1] > 0.0)) throw std::invalid_argument("non-positive cavity decay rate");
    d.terms.push_back({j, beta(k, j) * std::sqrt(gamma_rates[j - 1])});
  }
  return d;
}

StateVector apply_jump(const StateVector& state, const JumpOperator& d, const std::array<int, 4>& cavity_labels) {
  StateVector out(state.specs());
  const Eigen::MatrixXcd c = cavity_annihilation();
  for (const auto& term : d.terms) {
    const int label = cavity_labels[term.cavity - 1];
    if (!state.has_label(label) || term.coefficient == cplx(0.0)) continue;
    StateVector part = apply_local(state, {label, c});
    part *= term.coefficient;
    out += part;
  }
  return out;
}

SubnetworkConfig two_of_four_subnetwork(const ModeNetwork& net, std::pair<int, int> actives) {
  check_mode(actives.first);
  check_mode(actives.second);
  if (actives.first == actives.second) throw std::invalid_argument("active cavities must be distinct");
  SubnetworkConfig cfg{compose_network(net), {}};
  cfg.active_inputs[actives.first - 1] = true;
  cfg.active_inputs[actives.second - 1] = true;
  return cfg;
}

}  // namespace graphfuse
