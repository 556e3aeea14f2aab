#include "graphfuse/clifford.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <deque>
#include <stdexcept>
#include <vector>

namespace graphfuse {

using cplx = std::complex<double>;

char pauli_char(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

Eigen::Matrix2cd pauli_matrix(Pauli p) {
  Eigen::Matrix2cd m;
  switch (p) {
    case Pauli::I: m << 1, 0, 0, 1; break;
    case Pauli::X: m << 0, 1, 1, 0; break;
    case Pauli::Y: m << 0, cplx(0, -1), cplx(0, 1), 0; break;
    case Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

Eigen::Matrix2cd canonical_phase(const Eigen::Matrix2cd& m) {
  for (int c = 0; c < 2; ++c) {
    for (int r = 0; r < 2; ++r) {
      if (std::abs(m(r, c)) > 1e-9) return m * (std::abs(m(r, c)) / m(r, c));
    }
  }
  return m;
}

namespace {

struct Tables {
  std::vector<Eigen::Matrix2cd> mats;
  std::vector<std::string> names;
  std::array<std::array<int, 24>, 24> product{};
  std::array<int, 24> inverse{};
  // conj_by[c][p] = (sign, p') with C^dag P C = sign P'
  std::array<std::array<std::pair<int, Pauli>, 4>, 24> conj_by{};
  std::array<std::array<std::pair<int, Pauli>, 4>, 24> conj{};

  int find(const Eigen::Matrix2cd& m, double tol) const {
    const Eigen::Matrix2cd c = canonical_phase(m);
    for (std::size_t i = 0; i < mats.size(); ++i) {
      if ((mats[i] - c).cwiseAbs().maxCoeff() < tol) return static_cast<int>(i);
    }
    return -1;
  }

  static std::pair<int, Pauli> match_pauli(const Eigen::Matrix2cd& m) {
    for (int q = 0; q < 4; ++q) {
      const Eigen::Matrix2cd pm = pauli_matrix(static_cast<Pauli>(q));
      if ((m - pm).cwiseAbs().maxCoeff() < 1e-9) return {1, static_cast<Pauli>(q)};
      if ((m + pm).cwiseAbs().maxCoeff() < 1e-9) return {-1, static_cast<Pauli>(q)};
    }
    throw std::logic_error("conjugated Pauli is not a signed Pauli");
  }

  Tables() {
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::Matrix2cd h;
    h << r, r, r, -r;
    Eigen::Matrix2cd s;
    s << 1, 0, 0, cplx(0, 1);
    const std::array<std::pair<Eigen::Matrix2cd, char>, 2> gens{{{h, 'H'}, {s, 'S'}}};
    mats.push_back(Eigen::Matrix2cd::Identity());
    names.emplace_back("I");
    std::deque<int> queue{0};
    while (!queue.empty()) {
      const int cur = queue.front();
      queue.pop_front();
      for (const auto& [g, ch] : gens) {
        const Eigen::Matrix2cd next = mats[cur] * g;
        if (find(next, 1e-9) >= 0) continue;
        mats.push_back(canonical_phase(next));
        names.push_back(names[cur] == "I" ? std::string(1, ch) : names[cur] + ch);
        queue.push_back(static_cast<int>(mats.size()) - 1);
      }
    }
    if (mats.size() != 24) throw std::logic_error("local Clifford group generation failed");
    for (int a = 0; a < 24; ++a) {
      for (int b = 0; b < 24; ++b) product[a][b] = find(mats[a] * mats[b], 1e-9);
      inverse[a] = find(mats[a].adjoint(), 1e-9);
      for (int q = 0; q < 4; ++q) {
        const Eigen::Matrix2cd p = pauli_matrix(static_cast<Pauli>(q));
        conj_by[a][q] = match_pauli(mats[a].adjoint() * p * mats[a]);
        conj[a][q] = match_pauli(mats[a] * p * mats[a].adjoint());
      }
    }
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

}  // namespace

LocalClifford LocalClifford::from_id(int id) {
  if (id < 0 || id >= kOrder) throw std::out_of_range("local Clifford id out of range");
  return LocalClifford(id);
}

std::optional<LocalClifford> LocalClifford::from_matrix(const Eigen::Matrix2cd& m, double tol) {
  const double det = std::abs(m.determinant());
  if (det < 1e-12) return std::nullopt;
  const Eigen::Matrix2cd u = m / std::sqrt(det);
  const int id = tables().find(u, tol);
  if (id < 0) return std::nullopt;
  return LocalClifford(id);
}

LocalClifford LocalClifford::from_name(const std::string& name) {
  const auto& t = tables();
  for (int i = 0; i < kOrder; ++i) {
    if (t.names[i] == name) return LocalClifford(i);
  }
  throw std::invalid_argument("unknown local Clifford name: " + name);
}

LocalClifford LocalClifford::identity() { return LocalClifford(0); }
LocalClifford LocalClifford::hadamard() { return from_name("H"); }
LocalClifford LocalClifford::phase() { return from_name("S"); }

LocalClifford LocalClifford::pauli(Pauli p) { return *from_matrix(pauli_matrix(p)); }

LocalClifford LocalClifford::sqrt_minus_i(Pauli p) {
  const double r = 1.0 / std::sqrt(2.0);
  const Eigen::Matrix2cd m = r * (Eigen::Matrix2cd::Identity() - cplx(0, 1) * pauli_matrix(p));
  return *from_matrix(m);
}

LocalClifford LocalClifford::sqrt_plus_i(Pauli p) {
  const double r = 1.0 / std::sqrt(2.0);
  const Eigen::Matrix2cd m = r * (Eigen::Matrix2cd::Identity() + cplx(0, 1) * pauli_matrix(p));
  return *from_matrix(m);
}

const Eigen::Matrix2cd& LocalClifford::matrix() const { return tables().mats[id_]; }
const std::string& LocalClifford::name() const { return tables().names[id_]; }

LocalClifford LocalClifford::operator*(LocalClifford other) const {
  return LocalClifford(tables().product[id_][other.id_]);
}

LocalClifford LocalClifford::inverse() const { return LocalClifford(tables().inverse[id_]); }

std::pair<int, Pauli> LocalClifford::conjugate_by(Pauli p) const {
  return tables().conj_by[id_][static_cast<int>(p)];
}

std::pair<int, Pauli> LocalClifford::conjugate(Pauli p) const { return tables().conj[id_][static_cast<int>(p)]; }

bool LocalClifford::is_diagonal() const {
  const auto& m = matrix();
  return std::abs(m(0, 1)) < 1e-12 && std::abs(m(1, 0)) < 1e-12;
}

bool LocalClifford::is_monomial() const {
  const auto& m = matrix();
  return is_diagonal() || (std::abs(m(0, 0)) < 1e-12 && std::abs(m(1, 1)) < 1e-12);
}

}  // namespace graphfuse
