#include "graphfuse/graphstate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace graphfuse {

GraphStateRep::GraphStateRep(Graph g)
    : graph(std::move(g)),
      corrections(static_cast<std::size_t>(graph.size()), LocalClifford::identity()),
      present(static_cast<std::size_t>(graph.size()), true) {}

int GraphStateRep::add_qubits(int k) {
  const int first = graph.add_vertices(k);
  corrections.resize(static_cast<std::size_t>(graph.size()), LocalClifford::identity());
  present.resize(static_cast<std::size_t>(graph.size()), true);
  return first;
}

std::vector<int> GraphStateRep::present_vertices() const {
  std::vector<int> v;
  for (int i = 0; i < size(); ++i) {
    if (present[i]) v.push_back(i);
  }
  return v;
}

Pauli to_pauli(PauliAxis a) {
  switch (a) {
    case PauliAxis::X: return Pauli::X;
    case PauliAxis::Y: return Pauli::Y;
    case PauliAxis::Z: return Pauli::Z;
  }
  return Pauli::Z;
}

PauliAxis parse_axis(const std::string& s) {
  if (s == "X" || s == "x") return PauliAxis::X;
  if (s == "Y" || s == "y") return PauliAxis::Y;
  if (s == "Z" || s == "z") return PauliAxis::Z;
  throw std::invalid_argument("unknown measurement axis: " + s);
}

std::string to_string(PauliAxis a) {
  switch (a) {
    case PauliAxis::X: return "X";
    case PauliAxis::Y: return "Y";
    case PauliAxis::Z: return "Z";
  }
  return "?";
}

namespace {

void require_present(const GraphStateRep& rep, int v) {
  if (v < 0 || v >= rep.size() || !rep.present[v]) {
    throw std::invalid_argument("vertex not present: " + std::to_string(v));
  }
}

}  // namespace

GraphStateRep phase_gate(const GraphStateRep& rep, int a, int b) {
  require_present(rep, a);
  require_present(rep, b);
  if (a == b) throw std::invalid_argument("phase gate on a single vertex");
  const LocalClifford ca = rep.corrections[a];
  const LocalClifford cb = rep.corrections[b];
  if (!ca.is_monomial() || !cb.is_monomial()) {
    throw CorrectionError("corrections on the gate qubits cannot be pushed through the phase gate");
  }
  // C = D X^x; CZ (C_a C_b) = (C_a Z^{x_b})(C_b Z^{x_a}) CZ up to phase.
  const LocalClifford z = LocalClifford::pauli(Pauli::Z);
  GraphStateRep out = rep;
  if (!ca.is_diagonal()) out.corrections[b] = cb * z;
  if (!cb.is_diagonal()) out.corrections[a] = ca * z;
  out.graph.toggle_edge(a, b);
  return out;
}

double measurement_probability(const GraphStateRep& rep, int v, PauliAxis axis, int outcome) {
  require_present(rep, v);
  if (outcome != 1 && outcome != -1) throw std::invalid_argument("outcome must be +1 or -1");
  const auto [sign, frame] = rep.corrections[v].conjugate_by(to_pauli(axis));
  const int o = outcome * sign;
  if (rep.graph.degree(v) > 0 || frame != Pauli::X) return 0.5;
  return o == 1 ? 1.0 : 0.0;
}

GraphStateRep measure_pauli(const GraphStateRep& rep, int v, PauliAxis axis, int outcome) {
  if (measurement_probability(rep, v, axis, outcome) == 0.0) {
    throw std::domain_error("measurement outcome has zero probability");
  }
  const auto [sign, frame] = rep.corrections[v].conjugate_by(to_pauli(axis));
  const int o = outcome * sign;
  const Graph& g = rep.graph;
  GraphStateRep out = rep;
  std::vector<std::pair<int, LocalClifford>> ops;
  const LocalClifford z = LocalClifford::pauli(Pauli::Z);
  const std::vector<int> nv(g.neighbors(v).begin(), g.neighbors(v).end());

  if (frame == Pauli::Z) {
    out.graph.isolate(v);
    if (o == -1) {
      for (int w : nv) ops.emplace_back(w, z);
    }
  } else if (frame == Pauli::Y) {
    out.graph = local_complement(g, v);
    out.graph.isolate(v);
    const LocalClifford u = o == 1 ? LocalClifford::sqrt_minus_i(Pauli::Z) : LocalClifford::sqrt_plus_i(Pauli::Z);
    for (int w : nv) ops.emplace_back(w, u);
  } else if (nv.empty()) {
    out.graph.isolate(v);
  } else {
    const int b0 = nv.front();
    Graph h = local_complement(g, b0);
    h = local_complement(h, v);
    h.isolate(v);
    out.graph = local_complement(h, b0);
    const auto& na = g.neighbors(v);
    const auto& nb = g.neighbors(b0);
    if (o == 1) {
      ops.emplace_back(b0, LocalClifford::sqrt_plus_i(Pauli::Y));
      for (int w : na) {
        if (w != b0 && !nb.count(w)) ops.emplace_back(w, z);
      }
    } else {
      ops.emplace_back(b0, LocalClifford::sqrt_minus_i(Pauli::Y));
      for (int w : nb) {
        if (w != v && !na.count(w)) ops.emplace_back(w, z);
      }
    }
  }
  for (const auto& [w, u] : ops) out.corrections[w] = out.corrections[w] * u;
  out.present[v] = false;
  out.corrections[v] = LocalClifford::identity();
  return out;
}

GraphStateRep local_complement(const GraphStateRep& rep, int v) {
  require_present(rep, v);
  // |tau_v G> = sqrt(-iX)_v prod_{N_v} sqrt(iZ) |G>
  GraphStateRep out = rep;
  out.graph = local_complement(rep.graph, v);
  out.corrections[v] = out.corrections[v] * LocalClifford::sqrt_minus_i(Pauli::X).inverse();
  const LocalClifford uz = LocalClifford::sqrt_plus_i(Pauli::Z).inverse();
  for (int w : rep.graph.neighbors(v)) out.corrections[w] = out.corrections[w] * uz;
  return out;
}

GraphStateRep apply_local_clifford(const GraphStateRep& rep, int v, LocalClifford u) {
  require_present(rep, v);
  GraphStateRep out = rep;
  out.corrections[v] = u * out.corrections[v];
  return out;
}

namespace {

void apply_qubit_matrix(std::vector<cplx>& amps, int n, int pos, const Eigen::Matrix2cd& m) {
  const std::size_t bit = std::size_t{1} << (n - 1 - pos);
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (i & bit) continue;
    const cplx a0 = amps[i];
    const cplx a1 = amps[i | bit];
    amps[i] = m(0, 0) * a0 + m(0, 1) * a1;
    amps[i | bit] = m(1, 0) * a0 + m(1, 1) * a1;
  }
}

}  // namespace

StateVector graph_to_statevector(const GraphStateRep& rep) {
  const std::vector<int> verts = rep.present_vertices();
  const int n = static_cast<int>(verts.size());
  if (n > 12) throw std::invalid_argument("graph_to_statevector limited to 12 qubits");
  std::vector<int> pos(static_cast<std::size_t>(rep.size()), -1);
  std::vector<SubsystemSpec> specs;
  for (int i = 0; i < n; ++i) {
    pos[verts[i]] = i;
    specs.push_back(spectator(verts[i]));
  }
  std::vector<std::pair<int, int>> edges;
  for (const auto& [a, b] : rep.graph.edges()) {
    if (pos[a] < 0 || pos[b] < 0) throw std::logic_error("edge touches an absent vertex");
    edges.emplace_back(pos[a], pos[b]);
  }
  StateVector s(specs);
  const double amp = std::pow(2.0, -0.5 * n);
  for (std::size_t x = 0; x < s.dimension(); ++x) {
    int parity = 0;
    for (const auto& [a, b] : edges) {
      parity ^= static_cast<int>((x >> (n - 1 - a)) & (x >> (n - 1 - b)) & 1U);
    }
    s[x] = parity ? -amp : amp;
  }
  for (int i = 0; i < n; ++i) {
    const LocalClifford c = rep.corrections[verts[i]];
    if (c != LocalClifford::identity()) apply_qubit_matrix(s.amplitudes(), n, i, c.matrix());
  }
  s.set_normalized(true);
  return s;
}

StateVector graph_to_statevector(const Graph& g) { return graph_to_statevector(GraphStateRep(g)); }

namespace {

struct PauliString {
  std::uint32_t x = 0;
  std::uint32_t z = 0;
};

// <s|P|s> with P = prod_q i^{x_q z_q} X^{x_q} Z^{z_q}; bit q of the masks is qubit position n-1-q.
cplx pauli_expectation(const std::vector<cplx>& s, PauliString p) {
  const int ny = __builtin_popcount(p.x & p.z);
  static const std::array<cplx, 4> ipow{cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
  cplx acc = 0.0;
  for (std::size_t b = 0; b < s.size(); ++b) {
    if (s[b] == cplx(0.0)) continue;
    const double sg = (__builtin_popcount(static_cast<unsigned>(b) & p.z) & 1) ? -1.0 : 1.0;
    acc += std::conj(s[b ^ p.x]) * sg * s[b];
  }
  return ipow[ny % 4] * acc;
}

std::vector<cplx> apply_pauli(const std::vector<cplx>& s, PauliString p) {
  const int ny = __builtin_popcount(p.x & p.z);
  static const std::array<cplx, 4> ipow{cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
  std::vector<cplx> out(s.size());
  for (std::size_t b = 0; b < s.size(); ++b) {
    const double sg = (__builtin_popcount(static_cast<unsigned>(b) & p.z) & 1) ? -1.0 : 1.0;
    out[b ^ p.x] = ipow[ny % 4] * sg * s[b];
  }
  return out;
}

std::uint64_t string_key(PauliString p) { return (static_cast<std::uint64_t>(p.x) << 32) | p.z; }

Pauli pauli_at(PauliString p, int bit) {
  const bool x = (p.x >> bit) & 1U;
  const bool z = (p.z >> bit) & 1U;
  return x ? (z ? Pauli::Y : Pauli::X) : (z ? Pauli::Z : Pauli::I);
}

void set_pauli(PauliString& p, int bit, Pauli q) {
  const bool x = q == Pauli::X || q == Pauli::Y;
  const bool z = q == Pauli::Z || q == Pauli::Y;
  if (x) p.x |= 1U << bit;
  if (z) p.z |= 1U << bit;
}

// Stabilizer group members (unsigned strings) if the state is a stabilizer state.
std::optional<std::vector<PauliString>> stabilizer_group(const std::vector<cplx>& s, int n) {
  std::vector<PauliString> members;
  const std::uint32_t lim = 1U << n;
  for (std::uint32_t x = 0; x < lim; ++x) {
    for (std::uint32_t z = 0; z < lim; ++z) {
      const cplx e = pauli_expectation(s, {x, z});
      if (std::abs(e) > 1.0 - 1e-8) members.push_back({x, z});
    }
  }
  if (members.size() != lim) return std::nullopt;
  return members;
}

std::vector<PauliString> independent_generators(const std::vector<PauliString>& group, int n) {
  std::vector<PauliString> gens;
  std::vector<std::uint64_t> span{0};
  for (const auto& g : group) {
    const std::uint64_t k = string_key(g);
    if (std::find(span.begin(), span.end(), k) != span.end()) continue;
    gens.push_back(g);
    const std::size_t m = span.size();
    for (std::size_t i = 0; i < m; ++i) span.push_back(span[i] ^ k);
    if (static_cast<int>(gens.size()) == n) break;
  }
  return gens;
}

// One representative per symplectic action (24 / 4 Paulis = 6 classes).
const std::vector<LocalClifford>& symplectic_classes() {
  static const std::vector<LocalClifford> reps = [] {
    std::vector<LocalClifford> r;
    std::vector<std::pair<Pauli, Pauli>> seen;
    for (int id = 0; id < LocalClifford::kOrder; ++id) {
      const LocalClifford c = LocalClifford::from_id(id);
      const std::pair<Pauli, Pauli> act{c.conjugate(Pauli::X).second, c.conjugate(Pauli::Z).second};
      if (std::find(seen.begin(), seen.end(), act) != seen.end()) continue;
      seen.push_back(act);
      r.push_back(c);
    }
    return r;
  }();
  return reps;
}

std::vector<cplx> apply_product(std::vector<cplx> s, int n, const std::vector<LocalClifford>& ops) {
  for (int q = 0; q < n; ++q) {
    if (ops[q] != LocalClifford::identity()) apply_qubit_matrix(s, n, q, ops[q].matrix());
  }
  return s;
}

double overlap_abs(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::conj(a[i]) * b[i];
  return std::abs(acc);
}

LuWitness brute_force_lc(const std::vector<cplx>& s1, const std::vector<cplx>& s2, int n, double tol) {
  std::vector<int> digits(static_cast<std::size_t>(n), 0);
  std::size_t total = 1;
  for (int q = 0; q < n; ++q) total *= LocalClifford::kOrder;
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t r = idx;
    std::vector<LocalClifford> ops;
    for (int q = 0; q < n; ++q) {
      ops.push_back(LocalClifford::from_id(static_cast<int>(r % LocalClifford::kOrder)));
      r /= LocalClifford::kOrder;
    }
    if (overlap_abs(s2, apply_product(s1, n, ops)) > 1.0 - tol) return {true, ops};
  }
  return {};
}

}  // namespace

LuWitness lu_equivalent_states(const StateVector& sv1, const StateVector& sv2, double tol) {
  if (sv1.dimension() != sv2.dimension()) throw std::invalid_argument("states differ in dimension");
  for (const auto* sv : {&sv1, &sv2}) {
    for (const auto& s : sv->specs()) {
      if (s.kind != SubsystemKind::Spectator) throw std::invalid_argument("lu_equivalent_states expects qubits");
    }
  }
  const int n = static_cast<int>(sv1.specs().size());
  if (n > 6) throw std::invalid_argument("lu_equivalent_states limited to 6 qubits");
  StateVector a = sv1;
  StateVector b = sv2;
  a.normalize();
  b.normalize();
  const auto& s1 = a.amplitudes();
  const auto& s2 = b.amplitudes();

  const auto g1 = stabilizer_group(s1, n);
  const auto g2 = stabilizer_group(s2, n);
  if (!g1 || !g2) {
    if (g1.has_value() != g2.has_value()) return {};
    if (n > 3) throw std::invalid_argument("non-stabilizer inputs limited to 3 qubits");
    return brute_force_lc(s1, s2, n, tol);
  }
  std::unordered_map<std::uint64_t, bool> set2;
  for (const auto& p : *g2) set2[string_key(p)] = true;
  const auto gens = independent_generators(*g1, n);
  const auto& classes = symplectic_classes();
  const std::size_t nc = classes.size();
  std::size_t total = 1;
  for (int q = 0; q < n; ++q) total *= nc;

  for (std::size_t idx = 0; idx < total; ++idx) {
    std::vector<LocalClifford> ops(static_cast<std::size_t>(n));
    std::size_t r = idx;
    for (int q = 0; q < n; ++q) {
      ops[q] = classes[r % nc];
      r /= nc;
    }
    bool ok = true;
    for (const auto& g : gens) {
      PauliString img;
      for (int q = 0; q < n; ++q) {
        const int bit = n - 1 - q;
        const Pauli p = pauli_at(g, bit);
        if (p != Pauli::I) set_pauli(img, bit, ops[q].conjugate(p).second);
      }
      if (!set2.count(string_key(img))) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    const std::vector<cplx> us1 = apply_product(s1, n, ops);
    const std::uint32_t lim = 1U << n;
    for (std::uint32_t x = 0; x < lim; ++x) {
      for (std::uint32_t z = 0; z < lim; ++z) {
        if (overlap_abs(s2, apply_pauli(us1, {x, z})) > 1.0 - tol) {
          LuWitness w{true, ops};
          for (int q = 0; q < n; ++q) {
            const Pauli p = pauli_at({x, z}, n - 1 - q);
            w.ops[q] = LocalClifford::pauli(p) * w.ops[q];
          }
          return w;
        }
      }
    }
  }
  return {};
}

nlohmann::json rep_to_json(const GraphStateRep& rep) {
  nlohmann::json j = graph_to_json(rep.graph);
  nlohmann::json corr = nlohmann::json::array();
  nlohmann::json pres = nlohmann::json::array();
  for (int v = 0; v < rep.size(); ++v) {
    corr.push_back(rep.corrections[v].name());
    pres.push_back(static_cast<bool>(rep.present[v]));
  }
  j["corrections"] = corr;
  j["present"] = pres;
  return j;
}

GraphStateRep rep_from_json(const nlohmann::json& j) {
  GraphStateRep rep(graph_from_json(j));
  if (j.contains("corrections")) {
    for (int v = 0; v < rep.size(); ++v) {
      rep.corrections[v] = LocalClifford::from_name(j["corrections"][v].get<std::string>());
    }
  }
  if (j.contains("present")) {
    for (int v = 0; v < rep.size(); ++v) rep.present[v] = j["present"][v].get<bool>();
  }
  return rep;
}

}  // namespace graphfuse
