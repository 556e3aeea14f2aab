#include "graphfuse/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace graphfuse {

SubsystemSpec active(int label) { return {SubsystemKind::Active, label}; }
SubsystemSpec spectator(int label) { return {SubsystemKind::Spectator, label}; }

StateVector::StateVector(std::vector<SubsystemSpec> specs) : specs_(std::move(specs)) {
  std::set<int> seen;
  for (const auto& s : specs_) {
    if (!seen.insert(s.label).second) {
      throw std::invalid_argument("duplicate subsystem label " + std::to_string(s.label));
    }
  }
  strides_.assign(specs_.size(), 1);
  std::size_t total = 1;
  for (std::size_t p = specs_.size(); p-- > 0;) {
    strides_[p] = total;
    total *= specs_[p].dim();
  }
  amps_.assign(total, cplx(0.0));
}

StateVector StateVector::basis(std::vector<SubsystemSpec> specs, std::span<const int> digits) {
  StateVector s(std::move(specs));
  s[s.index(digits)] = 1.0;
  s.normalized_ = true;
  return s;
}

std::size_t StateVector::position(int label) const {
  for (std::size_t p = 0; p < specs_.size(); ++p) {
    if (specs_[p].label == label) return p;
  }
  throw std::invalid_argument("unknown subsystem label " + std::to_string(label));
}

bool StateVector::has_label(int label) const {
  return std::any_of(specs_.begin(), specs_.end(),
                     [label](const SubsystemSpec& s) { return s.label == label; });
}

std::vector<int> StateVector::digits(std::size_t index) const {
  std::vector<int> d(specs_.size());
  for (std::size_t p = 0; p < specs_.size(); ++p) {
    d[p] = static_cast<int>(index / strides_[p]);
    index %= strides_[p];
  }
  return d;
}

std::size_t StateVector::index(std::span<const int> digits) const {
  if (digits.size() != specs_.size()) throw std::invalid_argument("digit count mismatch");
  std::size_t idx = 0;
  for (std::size_t p = 0; p < specs_.size(); ++p) {
    if (digits[p] < 0 || static_cast<std::size_t>(digits[p]) >= specs_[p].dim()) {
      throw std::out_of_range("basis digit out of range");
    }
    idx += strides_[p] * static_cast<std::size_t>(digits[p]);
  }
  return idx;
}

double StateVector::norm_squared() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return s;
}

void StateVector::normalize() {
  const double n = norm_squared();
  if (n <= 0.0) throw std::domain_error("cannot normalize a zero vector");
  const double f = 1.0 / std::sqrt(n);
  for (auto& a : amps_) a *= f;
  normalized_ = true;
}

StateVector& StateVector::operator+=(const StateVector& other) {
  if (other.specs_ != specs_) throw std::invalid_argument("subsystem spec mismatch");
  for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] += other.amps_[i];
  normalized_ = false;
  return *this;
}

StateVector& StateVector::operator*=(cplx factor) {
  for (auto& a : amps_) a *= factor;
  if (std::abs(std::abs(factor) - 1.0) > 1e-15) normalized_ = false;
  return *this;
}

StateVector tensor(const StateVector& a, const StateVector& b) {
  std::vector<SubsystemSpec> specs = a.specs();
  specs.insert(specs.end(), b.specs().begin(), b.specs().end());
  StateVector out(std::move(specs));
  const std::size_t db = b.dimension();
  for (std::size_t i = 0; i < a.dimension(); ++i) {
    if (a[i] == cplx(0.0)) continue;
    for (std::size_t j = 0; j < db; ++j) out[i * db + j] = a[i] * b[j];
  }
  out.set_normalized(a.normalized() && b.normalized());
  return out;
}

StateVector build_initial_state(const std::vector<SubsystemSpec>& specs,
                                const std::vector<std::pair<int, int>>& pairing) {
  StateVector probe(specs);
  std::set<int> used;
  for (const auto& [x, y] : pairing) {
    for (int l : {x, y}) {
      if (specs[probe.position(l)].kind != SubsystemKind::Active) {
        throw std::invalid_argument("pairing names a non-active subsystem");
      }
      if (!used.insert(l).second) throw std::invalid_argument("overlapping pairings");
    }
  }
  const double r = 1.0 / std::sqrt(2.0);
  std::vector<int> base(specs.size(), 0);
  const std::size_t terms = std::size_t{1} << pairing.size();
  for (std::size_t mask = 0; mask < terms; ++mask) {
    std::vector<int> d = base;
    cplx amp = 1.0;
    for (std::size_t q = 0; q < pairing.size(); ++q) {
      const bool flip = (mask >> q) & 1U;
      const auto [x, y] = pairing[q];
      // term 0: |0,1>, term 1: -|1,0>
      d[probe.position(x)] = active_index(flip ? 1 : 0, 0);
      d[probe.position(y)] = active_index(flip ? 0 : 1, 0);
      amp *= flip ? -r : r;
    }
    probe[probe.index(d)] = amp;
  }
  probe.set_normalized(true);
  return probe;
}

StateVector excite(const StateVector& state, std::span<const int> targets) {
  StateVector out = state;
  for (int label : targets) {
    const std::size_t p = out.position(label);
    if (out.specs()[p].kind != SubsystemKind::Active) {
      throw std::invalid_argument("excite target is not an active subsystem");
    }
    const std::size_t st = out.stride(p);
    const std::size_t block = st * 6;
    auto& a = out.amplitudes();
    for (std::size_t hi = 0; hi < a.size(); hi += block) {
      for (std::size_t lo = 0; lo < st; ++lo) {
        const std::size_t base = hi + lo;
        for (int atom = 0; atom < 3; ++atom) {
          if (a[base + st * active_index(atom, 1)] != cplx(0.0)) {
            throw std::domain_error("excite on subsystem with a photon present");
          }
        }
        std::swap(a[base + st * active_index(level::g1, 0)], a[base + st * active_index(level::e, 0)]);
      }
    }
  }
  return out;
}

StateVector apply_local(const StateVector& state, const LocalOperator& op) {
  const std::size_t p = state.position(op.target);
  const std::size_t d = state.specs()[p].dim();
  if (static_cast<std::size_t>(op.matrix.rows()) != d || static_cast<std::size_t>(op.matrix.cols()) != d) {
    throw std::invalid_argument("operator dimension does not match target subsystem");
  }
  StateVector out(state.specs());
  const std::size_t st = state.stride(p);
  const std::size_t block = st * d;
  const auto& in = state.amplitudes();
  auto& o = out.amplitudes();
  for (std::size_t hi = 0; hi < in.size(); hi += block) {
    for (std::size_t lo = 0; lo < st; ++lo) {
      const std::size_t base = hi + lo;
      for (std::size_t c = 0; c < d; ++c) {
        const cplx v = in[base + st * c];
        if (v == cplx(0.0)) continue;
        for (std::size_t r = 0; r < d; ++r) {
          const cplx m = op.matrix(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
          if (m != cplx(0.0)) o[base + st * r] += m * v;
        }
      }
    }
  }
  return out;
}

cplx overlap(const StateVector& a, const StateVector& b) {
  if (a.specs() != b.specs()) throw std::invalid_argument("overlap of states with different specs");
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.dimension(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

Eigen::MatrixXcd cavity_annihilation() {
  Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(6, 6);
  for (int atom = 0; atom < 3; ++atom) c(active_index(atom, 0), active_index(atom, 1)) = 1.0;
  return c;
}

Eigen::MatrixXcd atom_operator(const Eigen::Matrix2cd& m) {
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(6, 6);
  for (int ph = 0; ph < 2; ++ph) {
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) u(active_index(r, ph), active_index(c, ph)) = m(r, c);
    }
  }
  return u;
}

Eigen::Matrix2cd pauli_x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

Eigen::Matrix2cd pauli_y() {
  Eigen::Matrix2cd m;
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}

Eigen::Matrix2cd pauli_z() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

StateVector matter_projection(const StateVector& state) {
  std::vector<SubsystemSpec> specs;
  for (const auto& s : state.specs()) specs.push_back(spectator(s.label));
  StateVector out(specs);
  const std::size_t n = specs.size();
  std::vector<int> d(n);
  for (std::size_t q = 0; q < out.dimension(); ++q) {
    for (std::size_t p = 0; p < n; ++p) {
      const int bit = static_cast<int>((q >> (n - 1 - p)) & 1U);
      d[p] = state.specs()[p].kind == SubsystemKind::Active ? active_index(bit, 0) : bit;
    }
    out[q] = state[state.index(d)];
  }
  return out;
}

StateVector embed_matter(const StateVector& qubits, const std::vector<int>& active_labels) {
  std::vector<SubsystemSpec> specs;
  for (const auto& s : qubits.specs()) {
    if (s.kind != SubsystemKind::Spectator) throw std::invalid_argument("embed_matter expects qubits");
    const bool act = std::find(active_labels.begin(), active_labels.end(), s.label) != active_labels.end();
    specs.push_back(act ? active(s.label) : spectator(s.label));
  }
  StateVector out(specs);
  const std::size_t n = specs.size();
  std::vector<int> d(n);
  for (std::size_t q = 0; q < qubits.dimension(); ++q) {
    for (std::size_t p = 0; p < n; ++p) {
      const int bit = static_cast<int>((q >> (n - 1 - p)) & 1U);
      d[p] = specs[p].kind == SubsystemKind::Active ? active_index(bit, 0) : bit;
    }
    out[out.index(d)] = qubits[q];
  }
  out.set_normalized(qubits.normalized());
  return out;
}

nlohmann::json to_json(const StateVector& state, double threshold) {
  nlohmann::json specs = nlohmann::json::array();
  for (const auto& s : state.specs()) {
    specs.push_back({{"label", s.label}, {"kind", s.kind == SubsystemKind::Active ? "active" : "spectator"}});
  }
  nlohmann::json amps = nlohmann::json::array();
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    if (std::abs(state[i]) <= threshold) continue;
    amps.push_back({{"basis", state.digits(i)}, {"re", state[i].real()}, {"im", state[i].imag()}});
  }
  return {{"specs", specs}, {"amplitudes", amps}};
}

Eigen::MatrixXcd reduced_density(const StateVector& state, const std::vector<int>& labels) {
  std::vector<std::size_t> pos;
  std::size_t dk = 1;
  for (int l : labels) {
    pos.push_back(state.position(l));
    dk *= state.specs()[pos.back()].dim();
  }
  const std::size_t drest = state.dimension() / dk;
  Eigen::MatrixXcd psi = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(drest));
  std::vector<bool> kept(state.specs().size(), false);
  for (auto p : pos) kept[p] = true;
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    const auto d = state.digits(i);
    std::size_t row = 0;
    for (auto p : pos) row = row * state.specs()[p].dim() + static_cast<std::size_t>(d[p]);
    std::size_t col = 0;
    for (std::size_t p = 0; p < d.size(); ++p) {
      if (!kept[p]) col = col * state.specs()[p].dim() + static_cast<std::size_t>(d[p]);
    }
    psi(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) = state[i];
  }
  return psi * psi.adjoint();
}

}  // namespace graphfuse
