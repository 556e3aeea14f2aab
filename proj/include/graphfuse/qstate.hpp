#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace graphfuse {

using cplx = std::complex<double>;

enum class SubsystemKind { Active, Spectator };

// Active subsystems are atom {0,1,e} x cavity {vac,1ph}; local index = atom*2 + photons.
namespace level {
constexpr int g0 = 0;
constexpr int g1 = 1;
constexpr int e = 2;
}  // namespace level

constexpr int active_index(int atom, int photons) { return atom * 2 + photons; }

struct SubsystemSpec {
  SubsystemKind kind = SubsystemKind::Spectator;
  int label = 0;

  std::size_t dim() const { return kind == SubsystemKind::Active ? 6 : 2; }
  bool operator==(const SubsystemSpec&) const = default;
};

SubsystemSpec active(int label);
SubsystemSpec spectator(int label);

struct LocalOperator {
  int target = 0;
  Eigen::MatrixXcd matrix;
};

class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(std::vector<SubsystemSpec> specs);

  static StateVector basis(std::vector<SubsystemSpec> specs, std::span<const int> digits);

  const std::vector<SubsystemSpec>& specs() const { return specs_; }
  std::size_t dimension() const { return amps_.size(); }
  std::size_t position(int label) const;
  bool has_label(int label) const;

  std::vector<int> digits(std::size_t index) const;
  std::size_t index(std::span<const int> digits) const;
  std::size_t stride(std::size_t position) const { return strides_[position]; }

  cplx& operator[](std::size_t i) { return amps_[i]; }
  const cplx& operator[](std::size_t i) const { return amps_[i]; }
  std::vector<cplx>& amplitudes() { return amps_; }
  const std::vector<cplx>& amplitudes() const { return amps_; }

  double norm_squared() const;
  // Rescales to unit norm and sets the normalized flag; throws on a zero vector.
  void normalize();
  bool normalized() const { return normalized_; }
  void set_normalized(bool flag) { normalized_ = flag; }

  StateVector& operator+=(const StateVector& other);
  StateVector& operator*=(cplx factor);

 private:
  std::vector<SubsystemSpec> specs_;
  std::vector<std::size_t> strides_;
  std::vector<cplx> amps_;
  bool normalized_ = false;
};

StateVector tensor(const StateVector& a, const StateVector& b);

// Singlet (|0,1> - |1,0>)/sqrt2 on each pair; unpaired subsystems in |0>, cavities in vacuum.
StateVector build_initial_state(const std::vector<SubsystemSpec>& specs,
                                const std::vector<std::pair<int, int>>& pairing);

StateVector excite(const StateVector& state, std::span<const int> targets);
StateVector apply_local(const StateVector& state, const LocalOperator& op);
cplx overlap(const StateVector& a, const StateVector& b);

// Common single-subsystem matrices.
Eigen::MatrixXcd cavity_annihilation();   // 6x6 on an active subsystem
Eigen::MatrixXcd atom_operator(const Eigen::Matrix2cd& m);  // qubit op on {0,1}, identity on e and cavity
Eigen::Matrix2cd pauli_x();
Eigen::Matrix2cd pauli_y();
Eigen::Matrix2cd pauli_z();

// Restricts to cavity vacuum and atoms in {0,1}; returns a state of spectator qubits with the same labels.
StateVector matter_projection(const StateVector& state);
// Inverse embedding of a qubit state into active subsystems (atoms in {0,1}, vacuum).
StateVector embed_matter(const StateVector& qubits, const std::vector<int>& active_labels);

nlohmann::json to_json(const StateVector& state, double threshold = 1e-12);

// Reduced density matrix of the listed labels (in the given order).
Eigen::MatrixXcd reduced_density(const StateVector& state, const std::vector<int>& labels);

}  // namespace graphfuse
