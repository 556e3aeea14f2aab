#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include <Eigen/Dense>

namespace graphfuse {

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char pauli_char(Pauli p);
Eigen::Matrix2cd pauli_matrix(Pauli p);

// Element of the single-qubit Clifford group modulo global phase (24 elements).
class LocalClifford {
 public:
  static constexpr int kOrder = 24;

  LocalClifford() = default;
  static LocalClifford from_id(int id);
  static std::optional<LocalClifford> from_matrix(const Eigen::Matrix2cd& m, double tol = 1e-9);
  static LocalClifford from_name(const std::string& name);

  static LocalClifford identity();
  static LocalClifford hadamard();
  static LocalClifford phase();  // diag(1, i)
  static LocalClifford pauli(Pauli p);
  // exp(-i pi/4 sigma) up to phase, i.e. sqrt(-i sigma).
  static LocalClifford sqrt_minus_i(Pauli p);
  static LocalClifford sqrt_plus_i(Pauli p);

  int id() const { return id_; }
  const Eigen::Matrix2cd& matrix() const;
  // Shortest word in H and S (matrix product, left to right), "I" for identity.
  const std::string& name() const;

  LocalClifford operator*(LocalClifford other) const;
  LocalClifford inverse() const;
  bool operator==(const LocalClifford&) const = default;

  // C^dagger P C = sign * P'.
  std::pair<int, Pauli> conjugate_by(Pauli p) const;
  // C P C^dagger = sign * P'.
  std::pair<int, Pauli> conjugate(Pauli p) const;

  bool is_diagonal() const;
  bool is_monomial() const;

 private:
  explicit LocalClifford(int id) : id_(id) {}
  int id_ = 0;
};

// Multiplies a 2x2 matrix by a phase so that its first nonzero entry (column-major) is real positive.
Eigen::Matrix2cd canonical_phase(const Eigen::Matrix2cd& m);

}  // namespace graphfuse
