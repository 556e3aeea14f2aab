#include "graphfuse/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <set>

namespace graphfuse {

namespace {

constexpr double kSnapTol = 1e-9;

bool flips(const LocalClifford& c) { return !c.is_diagonal(); }

LocalClifford leaf_frame(const GraphStateRep& rep, int leaf) {
  return rep.corrections[leaf] * LocalClifford::hadamard();
}

// Nearest fourth root of unity; anything else has no Clifford representative.
cplx snap_phase(cplx r) {
  const std::array<cplx, 4> roots{cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
  for (const cplx& s : roots) {
    if (std::abs(r - s) < kSnapTol) return s;
  }
  throw FusionError("detection phase is not a Clifford phase");
}

LocalClifford diag_phase(cplx d) {
  Eigen::Matrix2cd m;
  m << 1.0, 0.0, 0.0, d;
  return *LocalClifford::from_matrix(m);
}

void check_pair_vertices(const GraphStateRep& rep, const LeafPair& p) {
  const int n = rep.size();
  if (p.leaf < 0 || p.leaf >= n || p.hub < 0 || p.hub >= n) throw FusionError("pair vertex out of range");
}

}  // namespace

std::optional<std::string> readiness_problem(const GraphStateRep& rep, const LeafPair& p) {
  check_pair_vertices(rep, p);
  if (p.leaf == p.hub) return "leaf and hub coincide";
  if (!rep.present[p.leaf] || !rep.present[p.hub]) return "vertex already measured";
  const auto& nb = rep.graph.neighbors(p.leaf);
  if (nb.size() != 1 || *nb.begin() != p.hub) return "leaf is not attached only to the hub";
  const LocalClifford la = leaf_frame(rep, p.leaf);
  const LocalClifford& cb = rep.corrections[p.hub];
  if (!la.is_monomial()) return "leaf correction is not monomial after H";
  if (!cb.is_monomial()) return "hub correction is not monomial";
  if (flips(la) == flips(cb)) return "pair is not in span{|0,1>,|1,0>}";
  return std::nullopt;
}

bool is_fusion_ready(const GraphStateRep& rep, const LeafPair& p) { return !readiness_problem(rep, p).has_value(); }

std::vector<LeafPair> eligible_pairs(const GraphStateRep& rep) {
  std::vector<LeafPair> out;
  for (int v = 0; v < rep.size(); ++v) {
    if (!rep.present[v] || rep.graph.degree(v) != 1) continue;
    const LeafPair p{v, *rep.graph.neighbors(v).begin()};
    if (is_fusion_ready(rep, p)) out.push_back(p);
  }
  return out;
}

PreparedPair prepare_leaf_pair(const GraphStateRep& rep, int leaf, int hub) {
  const LeafPair p{leaf, hub};
  check_pair_vertices(rep, p);
  if (leaf == hub || rep.graph.degree(leaf) != 1 || !rep.graph.has_edge(leaf, hub)) {
    throw FusionError("leaf is not attached only to the hub");
  }
  if (is_fusion_ready(rep, p)) return {rep, p, std::nullopt};
  const LocalClifford& cb = rep.corrections[hub];
  if (!cb.is_monomial()) throw CorrectionError("hub correction is not monomial; pair cannot be prepared");
  const LocalClifford h = LocalClifford::hadamard();
  const LocalClifford target = flips(cb) ? h : LocalClifford::pauli(Pauli::X) * h;
  const LocalClifford u = target * rep.corrections[leaf].inverse();
  return {apply_local_clifford(rep, leaf, u), p, u};
}

int emitter_cavity(const GraphStateRep& rep, const LeafPair& p, int hub_value, bool second) {
  const int leaf_value = hub_value ^ (flips(leaf_frame(rep, p.leaf)) ? 1 : 0);
  const int base = second ? 3 : 1;
  return leaf_value == 1 ? base : base + 1;
}

Coefficients detection_coefficients(const GraphStateRep& rep, const LeafPair& a, const LeafPair& b,
                                    const ModeUnitary& beta, int k1, int k2) {
  if (k1 < 1 || k1 > 4 || k2 < 1 || k2 > 4) throw FusionError("detector index out of range");
  Coefficients c{};
  for (int b1 = 0; b1 < 2; ++b1) {
    for (int b2 = 0; b2 < 2; ++b2) {
      const int j = emitter_cavity(rep, a, b1, false);
      const int l = emitter_cavity(rep, b, b2, true);
      c[b1][b2] = beta(k1, j) * beta(k2, l) + beta(k1, l) * beta(k2, j);
    }
  }
  return c;
}

double fusion_record_probability(const GraphStateRep& rep, const LeafPair& a, const LeafPair& b,
                                 const ModeUnitary& beta, int k1, int k2) {
  const Coefficients c = detection_coefficients(rep, a, b, beta, k1, k2);
  // Each hub pattern has weight 1/4; time ordering of the two emissions contributes 1/2.
  double p = 0.0;
  for (const auto& row : c) {
    for (const cplx& x : row) p += 0.125 * std::norm(x);
  }
  return p;
}

ExcitationModel fusion_excitation_model(const GraphStateRep& rep, const LeafPair& a, const LeafPair& b) {
  std::map<unsigned, double> w;
  for (int b1 = 0; b1 < 2; ++b1) {
    for (int b2 = 0; b2 < 2; ++b2) {
      const unsigned mask =
          (1U << (emitter_cavity(rep, a, b1, false) - 1)) | (1U << (emitter_cavity(rep, b, b2, true) - 1));
      w[mask] += 0.25;
    }
  }
  return ExcitationModel::from_weights(w);
}

std::string to_string(FusionClass c) { return c == FusionClass::Success ? "success" : "retry"; }

FusionOutcome fuse(const GraphStateRep& rep, const LeafPair& a, const LeafPair& b, const ModeUnitary& beta, int k1,
                   int k2) {
  for (const LeafPair* p : {&a, &b}) {
    if (auto why = readiness_problem(rep, *p)) throw FusionError("pair not ready: " + *why);
  }
  const std::array<int, 4> ids{a.leaf, a.hub, b.leaf, b.hub};
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      if (ids[i] == ids[j]) throw FusionError("fusion pairs overlap");
    }
  }
  const Coefficients c = detection_coefficients(rep, a, b, beta, k1, k2);
  double cmax = 0.0;
  for (const auto& row : c) {
    for (const cplx& x : row) cmax = std::max(cmax, std::abs(x));
  }
  if (cmax < 1e-12) throw FusionError("record has zero probability");
  std::array<std::array<bool, 2>, 2> zero{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      zero[i][j] = std::abs(c[i][j]) < 1e-9 * cmax;
      if (!zero[i][j] && std::abs(std::abs(c[i][j]) - cmax) > 1e-9 * cmax) {
        throw FusionError("unequal detection amplitudes; outcome is not a stabilizer map");
      }
    }
  }

  FusionOutcome out;
  out.k1 = k1;
  out.k2 = k2;
  out.cls = k1 == k2 ? FusionClass::Retry : FusionClass::Success;
  out.hub = a.hub;
  GraphStateRep r = rep;
  const int b1 = a.hub;
  const int b2 = b.hub;
  const bool no_zero = !zero[0][0] && !zero[0][1] && !zero[1][0] && !zero[1][1];
  if (no_zero) {
    const cplx ratio = snap_phase(c[1][1] * c[0][0] / (c[1][0] * c[0][1]));
    if (ratio == cplx(-1, 0)) {
      r.graph.toggle_edge(b1, b2);
      out.edge_toggled = true;
    } else if (ratio != cplx(1, 0)) {
      throw FusionError("detection map is not a controlled-Z up to phases");
    }
    r.corrections[b1] = r.corrections[b1] * diag_phase(snap_phase(c[1][0] / c[0][0]));
    r.corrections[b2] = r.corrections[b2] * diag_phase(snap_phase(c[0][1] / c[0][0]));
    out.rep = r;
    return out;
  }
  int p = -1;
  if (zero[0][1] && zero[1][0] && !zero[0][0] && !zero[1][1]) p = 0;
  if (zero[0][0] && zero[1][1] && !zero[0][1] && !zero[1][0]) p = 1;
  if (p < 0) throw FusionError("record inconsistent with the two-photon subspace");

  const int e = rep.graph.has_edge(b1, b2) ? 1 : 0;
  std::set<int> n1 = rep.graph.neighbors(b1);
  std::set<int> n2 = rep.graph.neighbors(b2);
  n1.erase(b2);
  n2.erase(b1);
  std::array<cplx, 2> cp{};
  for (int v = 0; v < 2; ++v) {
    const int w = v ^ p;
    cp[v] = c[v][w] * ((e * v * w) % 2 == 1 ? -1.0 : 1.0);
  }
  r.graph.isolate(b1);
  r.graph.isolate(b2);
  std::set<int> sym;
  std::set_symmetric_difference(n1.begin(), n1.end(), n2.begin(), n2.end(), std::inserter(sym, sym.begin()));
  for (int w : sym) r.graph.add_edge(b1, w);
  r.graph.add_edge(b1, b2);
  r.corrections[b1] = r.corrections[b1] * diag_phase(snap_phase(cp[1] / cp[0]));
  const LocalClifford xp = p == 1 ? LocalClifford::pauli(Pauli::X) : LocalClifford::identity();
  r.corrections[b2] = r.corrections[b2] * xp * LocalClifford::hadamard();
  if (p == 1) {
    for (int w : n2) r.corrections[w] = r.corrections[w] * LocalClifford::pauli(Pauli::Z);
  }
  out.rep = r;
  out.parity_projection = true;
  out.leaves = {a.leaf, b.leaf, b2};
  return out;
}

RusResult repeat_until_success(const GraphStateRep& rep, const LeafPair& a, const LeafPair& b, const ModeUnitary& beta,
                               const ParamSet& params, CounterRng& rng, int cap) {
  RusResult res;
  GraphStateRep cur = rep;
  for (int attempt = 1; attempt <= cap; ++attempt) {
    const Trajectory tr = sample_trajectory(fusion_excitation_model(cur, a, b), beta, params, rng);
    const DetectionRecord rec = two_click_record(tr);
    res.records.push_back(rec);
    res.attempts = attempt;
    res.outcome = fuse(cur, a, b, beta, rec.first.detector, rec.second.detector);
    if (res.outcome.cls == FusionClass::Success) return res;
    cur = res.outcome.rep;
  }
  throw FusionError("repeat-until-success exceeded the attempt cap");
}

std::string to_string(FactoryMode m) { return m == FactoryMode::TwoOfFour ? "two-of-four" : "single-bs"; }

FactoryMode parse_factory_mode(const std::string& s) {
  if (s == "two-of-four" || s == "two_of_four") return FactoryMode::TwoOfFour;
  if (s == "single-bs" || s == "single_bs") return FactoryMode::SingleBS;
  throw std::invalid_argument("unknown factory mode: " + s);
}

GraphStateRep install_heralded_pair(const GraphStateRep& rep, int a, int b, const ModeUnitary& beta, int k, int j1,
                                    int j2) {
  if (a == b || a < 0 || b < 0 || a >= rep.size() || b >= rep.size()) throw FusionError("invalid factory vertices");
  if (rep.graph.degree(a) != 0 || rep.graph.degree(b) != 0) throw FusionError("factory vertices must be fresh");
  const cplx x1 = beta(k, j1);
  const cplx x2 = beta(k, j2);
  if (std::abs(std::abs(x1) - std::abs(x2)) > 1e-9 || std::abs(x1) < 1e-12) {
    throw FusionError("heralded pair is not maximally entangled");
  }
  Eigen::Matrix2cd m;
  m << 0.0, x2, x1, 0.0;
  m /= std::abs(x1);
  const auto ca = LocalClifford::from_matrix(m * LocalClifford::hadamard().matrix());
  if (!ca) throw FusionError("heralded phase is not a Clifford phase");
  GraphStateRep r = rep;
  r.present[a] = true;
  r.present[b] = true;
  r.graph.add_edge(a, b);
  r.corrections[a] = *ca;
  r.corrections[b] = LocalClifford::identity();
  return r;
}

GraphStateRep install_singlet(const GraphStateRep& rep, int a, int b) {
  if (a == b || a < 0 || b < 0 || a >= rep.size() || b >= rep.size()) throw FusionError("invalid pair vertices");
  if (rep.graph.degree(a) != 0 || rep.graph.degree(b) != 0) throw FusionError("pair vertices must be fresh");
  Eigen::Matrix2cd iy;
  iy << 0.0, 1.0, -1.0, 0.0;
  GraphStateRep r = rep;
  r.present[a] = true;
  r.present[b] = true;
  r.graph.add_edge(a, b);
  r.corrections[a] = *LocalClifford::from_matrix(iy * LocalClifford::hadamard().matrix());
  r.corrections[b] = LocalClifford::identity();
  return r;
}

ModeUnitary factory_unitary(FactoryMode mode, const ModeNetwork& net) {
  if (mode == FactoryMode::TwoOfFour) return compose_network(net);
  ModeNetwork bs;
  bs.elements = {BeamSplitter{1, 2}};
  return compose_network(bs);
}

FactoryResult epr_factory(const GraphStateRep& rep, int a, int b, FactoryMode mode, const ModeNetwork& net,
                          const ParamSet& params, CounterRng& rng, int cap) {
  const ModeUnitary beta = factory_unitary(mode, net);
  const std::map<unsigned, double> w{{0U, 0.25}, {1U, 0.25}, {2U, 0.25}, {3U, 0.25}};
  const ExcitationModel model = ExcitationModel::from_weights(w);
  FactoryResult res;
  for (int attempt = 1; attempt <= cap; ++attempt) {
    const Trajectory tr = sample_trajectory(model, beta, params, rng);
    res.attempts = attempt;
    res.click_counts.push_back(static_cast<int>(tr.clicks.size()));
    if (tr.clicks.size() == 1) {
      res.detector = tr.clicks[0].detector;
      res.rep = install_heralded_pair(rep, a, b, beta, res.detector, 1, 2);
      return res;
    }
  }
  throw FusionError("EPR factory exceeded the attempt cap");
}

MeasureOutResult measure_out_fusion_leaf(const GraphStateRep& rep, int leaf, CounterRng& rng,
                                         std::optional<PauliAxis> axis) {
  if (leaf < 0 || leaf >= rep.size() || !rep.present[leaf]) throw FusionError("leaf not present");
  MeasureOutResult res;
  if (axis) {
    res.axis = *axis;
  } else {
    const Pauli p = rep.corrections[leaf].conjugate(Pauli::Z).second;
    res.axis = p == Pauli::X ? PauliAxis::X : (p == Pauli::Y ? PauliAxis::Y : PauliAxis::Z);
  }
  const double p_plus = measurement_probability(rep, leaf, res.axis, 1);
  res.outcome = rng.uniform() < p_plus ? 1 : -1;
  res.rep = measure_pauli(rep, leaf, res.axis, res.outcome);
  return res;
}

ShifterCalibration calibrate_shifter_placement() {
  ShifterCalibration cal;
  const ExcitationModel model = epr_pair_model();
  for (int m = 1; m <= 4; ++m) {
    const OutcomeStates states = ideal_outcome_states(model, compose_network(shifter_network(m)));
    bool ok = true;
    bool any = false;
    for (int k1 = 0; k1 < 4; ++k1) {
      for (int k2 = 0; k2 < 4; ++k2) {
        if (k1 == k2 || !states[k1][k2]) continue;
        any = true;
        ok = ok && describe_lc_class(*states[k1][k2]) == "path4";
      }
    }
    cal.path_like[m - 1] = ok && any;
    if (cal.path_like[m - 1] && cal.selected_mode == 0) cal.selected_mode = m;
  }
  return cal;
}

}  // namespace graphfuse
