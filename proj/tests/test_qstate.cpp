#include <doctest.h>

#include <random>

#include "graphfuse/qstate.hpp"
#include "oracle.hpp"

using namespace graphfuse;

namespace {

const double r2 = 1.0 / std::sqrt(2.0);

std::vector<SubsystemSpec> two_active() { return {active(1), active(2)}; }

}  // namespace

TEST_CASE("singlet pairing amplitudes") {
  const StateVector s = build_initial_state(two_active(), {{1, 2}});
  const std::vector<int> d01{active_index(0, 0), active_index(1, 0)};
  const std::vector<int> d10{active_index(1, 0), active_index(0, 0)};
  CHECK(std::abs(s[s.index(d01)] - r2) < 1e-15);
  CHECK(std::abs(s[s.index(d10)] + r2) < 1e-15);
  CHECK(s.norm_squared() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s.normalized());
}

TEST_CASE("unpaired subsystem starts in ground vacuum") {
  const StateVector s = build_initial_state({active(7)}, {});
  CHECK(s[active_index(0, 0)] == cplx(1.0));
  CHECK(s.norm_squared() == doctest::Approx(1.0));
}

TEST_CASE("two singlets give four equal-magnitude terms") {
  const StateVector s = build_initial_state({active(1), active(2), active(3), active(4)}, {{1, 2}, {3, 4}});
  int nonzero = 0;
  for (std::size_t i = 0; i < s.dimension(); ++i) {
    if (std::abs(s[i]) > 1e-14) {
      ++nonzero;
      CHECK(std::abs(s[i]) == doctest::Approx(0.5));
    }
  }
  CHECK(nonzero == 4);
  CHECK(s.norm_squared() == doctest::Approx(1.0));
}

TEST_CASE("pairing errors") {
  CHECK_THROWS(build_initial_state(two_active(), {{1, 2}, {2, 1}}));
  CHECK_THROWS(build_initial_state(two_active(), {{1, 9}}));
  CHECK_THROWS(build_initial_state({active(1), spectator(2)}, {{1, 2}}));
}

TEST_CASE("excite swaps 1 and e") {
  const std::vector<int> d{active_index(1, 0)};
  const StateVector s = StateVector::basis({active(1)}, d);
  const std::vector<int> t{1};
  const StateVector e = excite(s, t);
  CHECK(e[active_index(level::e, 0)] == cplx(1.0));
  const StateVector g = excite(StateVector::basis({active(1)}, std::vector<int>{0}), t);
  CHECK(g[0] == cplx(1.0));
}

TEST_CASE("excite on singlet and involution") {
  const StateVector s = build_initial_state(two_active(), {{1, 2}});
  const std::vector<int> t{1, 2};
  const StateVector e = excite(s, t);
  const std::vector<int> d0e{active_index(0, 0), active_index(level::e, 0)};
  const std::vector<int> de0{active_index(level::e, 0), active_index(0, 0)};
  CHECK(std::abs(e[e.index(d0e)] - r2) < 1e-15);
  CHECK(std::abs(e[e.index(de0)] + r2) < 1e-15);
  const StateVector back = excite(e, t);
  CHECK(oracle::fidelity(back, s) == doctest::Approx(1.0));
  CHECK(std::abs(overlap(back, s) - 1.0) < 1e-14);
}

TEST_CASE("excite rejects populated cavity") {
  const std::vector<int> d{active_index(level::e, 1)};
  const StateVector s = StateVector::basis({active(1)}, d);
  const std::vector<int> t{1};
  CHECK_THROWS(excite(s, t));
}

TEST_CASE("apply_local basics") {
  StateVector plus({spectator(0)});
  plus[0] = r2;
  plus[1] = r2;
  const StateVector minus = apply_local(plus, {0, pauli_z()});
  CHECK(std::abs(minus[0] - r2) < 1e-15);
  CHECK(std::abs(minus[1] + r2) < 1e-15);

  const std::vector<int> one{active_index(0, 1)};
  const StateVector ph = StateVector::basis({active(3)}, one);
  const StateVector vac = apply_local(ph, {3, cavity_annihilation()});
  CHECK(vac[active_index(0, 0)] == cplx(1.0));
  const StateVector zero = apply_local(vac, {3, cavity_annihilation()});
  CHECK(zero.norm_squared() == 0.0);

  CHECK_THROWS(apply_local(plus, {0, cavity_annihilation()}));
}

TEST_CASE("rotation applied twice equals -i sigma_y") {
  const Eigen::Matrix2cd rot = r2 * (Eigen::Matrix2cd::Identity() - cplx(0, 1) * pauli_y());
  std::mt19937_64 rng(3);
  const StateVector s = oracle::random_state({spectator(0), spectator(1)}, rng);
  const StateVector twice = apply_local(apply_local(s, {1, rot}), {1, rot});
  const StateVector direct = apply_local(s, {1, cplx(0, -1) * pauli_y()});
  for (std::size_t i = 0; i < s.dimension(); ++i) CHECK(std::abs(twice[i] - direct[i]) < 1e-14);
}

TEST_CASE("overlap examples") {
  const std::vector<int> d01{0, 1};
  const std::vector<int> d10{1, 0};
  const auto a = StateVector::basis({spectator(0), spectator(1)}, d01);
  const auto b = StateVector::basis({spectator(0), spectator(1)}, d10);
  CHECK(overlap(a, b) == cplx(0.0));
  CHECK(overlap(a, a) == cplx(1.0));
  StateVector epr({spectator(0), spectator(1)});
  epr[1] = r2;
  epr[2] = -r2;
  StateVector sym({spectator(0), spectator(1)});
  sym[1] = r2;
  sym[2] = r2;
  CHECK(std::abs(overlap(epr, sym)) < 1e-15);
  CHECK_THROWS(overlap(a, StateVector({spectator(0), spectator(2)})));
}

TEST_CASE("mixed radix round trip") {
  const StateVector s({active(1), spectator(5), active(2), spectator(6)});
  CHECK(s.dimension() == 6 * 2 * 6 * 2);
  for (std::size_t i = 0; i < s.dimension(); ++i) {
    const auto d = s.digits(i);
    CHECK(s.index(d) == i);
  }
}

TEST_CASE("unitary preserves norm and distinct targets commute") {
  std::mt19937_64 rng(11);
  const std::vector<SubsystemSpec> specs{active(1), spectator(2), active(3)};
  for (int trial = 0; trial < 5; ++trial) {
    const StateVector s = oracle::random_state(specs, rng);
    const Eigen::MatrixXcd q = oracle::random_matrix(6, rng).householderQr().householderQ();
    const StateVector u = apply_local(s, {1, q});
    CHECK(u.norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
    const Eigen::MatrixXcd m1 = oracle::random_matrix(6, rng);
    const Eigen::MatrixXcd m2 = oracle::random_matrix(2, rng);
    const StateVector ab = apply_local(apply_local(s, {3, m1}), {2, m2});
    const StateVector ba = apply_local(apply_local(s, {2, m2}), {3, m1});
    for (std::size_t i = 0; i < s.dimension(); ++i) CHECK(std::abs(ab[i] - ba[i]) < 1e-12);
  }
}

TEST_CASE("matter projection and embedding round trip") {
  std::mt19937_64 rng(5);
  const StateVector q = oracle::random_state({spectator(1), spectator(2), spectator(3)}, rng);
  const StateVector e = embed_matter(q, {1, 3});
  CHECK(e.specs()[0].kind == SubsystemKind::Active);
  CHECK(e.specs()[1].kind == SubsystemKind::Spectator);
  const StateVector back = matter_projection(e);
  for (std::size_t i = 0; i < q.dimension(); ++i) CHECK(std::abs(back[i] - q[i]) < 1e-15);
}

TEST_CASE("json dump lists nonzero amplitudes") {
  const StateVector s = build_initial_state(two_active(), {{1, 2}});
  const auto j = to_json(s);
  CHECK(j["amplitudes"].size() == 2);
  CHECK(j["specs"][0]["kind"] == "active");
}

TEST_CASE("reduced density of a singlet is maximally mixed") {
  StateVector epr({spectator(0), spectator(1)});
  epr[1] = r2;
  epr[2] = -r2;
  const Eigen::MatrixXcd rho = reduced_density(epr, {0});
  CHECK(std::abs(rho(0, 0) - 0.5) < 1e-15);
  CHECK(std::abs(rho(0, 1)) < 1e-15);
  CHECK(std::abs((rho * rho).trace() - 0.5) < 1e-15);
}
