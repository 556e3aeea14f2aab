#include <doctest.h>

#include <random>

#include "graphfuse/optics.hpp"
#include "oracle.hpp"

using namespace graphfuse;

TEST_CASE("beam splitter block is unitary") {
  const Eigen::Matrix2cd b = beam_splitter_block();
  CHECK((b * b.adjoint() - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("single beam splitter embeds the block") {
  ModeNetwork net;
  net.elements = {BeamSplitter{1, 2}};
  const ModeUnitary u = compose_network(net);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(u(1, 1) - r) < 1e-15);
  CHECK(std::abs(u(1, 2) - cplx(0, r)) < 1e-15);
  CHECK(std::abs(u(2, 1) - cplx(0, r)) < 1e-15);
  CHECK(std::abs(u(3, 3) - 1.0) < 1e-15);
  CHECK(std::abs(u(3, 1)) < 1e-15);
}

TEST_CASE("empty network is the identity") {
  const ModeUnitary u = compose_network(ModeNetwork{});
  CHECK((u.matrix() - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("basic network is balanced and unitary") {
  const ModeUnitary u = compose_network(basic_network());
  for (int k = 1; k <= 4; ++k) {
    for (int j = 1; j <= 4; ++j) CHECK(std::abs(u(k, j)) == doctest::Approx(0.5).epsilon(1e-14));
  }
  CHECK((u.matrix().adjoint() * u.matrix() - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("shifter networks are unitary for every arm") {
  for (int m = 1; m <= 4; ++m) {
    const ModeUnitary u = compose_network(shifter_network(m));
    CHECK((u.matrix().adjoint() * u.matrix() - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("invalid elements are rejected") {
  ModeNetwork bad;
  bad.elements = {BeamSplitter{1, 5}};
  CHECK_THROWS(compose_network(bad));
  ModeNetwork same;
  same.elements = {BeamSplitter{2, 2}};
  CHECK_THROWS(compose_network(same));
}

TEST_CASE("json loader round trip and connectivity check") {
  const ModeNetwork net = shifter_network(1);
  const ModeNetwork back = network_from_json(network_to_json(net));
  CHECK((compose_network(back).matrix() - compose_network(net).matrix()).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(back.variant == NetworkVariant::Shifter);
  const auto disconnected = nlohmann::json::parse(R"({"elements":[{"bs":[1,2]},{"bs":[3,4]}]})");
  CHECK_THROWS(network_from_json(disconnected));
  const auto unknown = nlohmann::json::parse(R"({"elements":[{"mirror":[1,2]}]})");
  CHECK_THROWS(network_from_json(unknown));
}

TEST_CASE("configuration files load") {
  const ModeNetwork basic = load_network(std::string(GRAPHFUSE_CONFIG_DIR) + "/network_basic.json");
  CHECK((compose_network(basic).matrix() - compose_network(basic_network()).matrix()).cwiseAbs().maxCoeff() < 1e-12);
  const ModeNetwork sh = load_network(std::string(GRAPHFUSE_CONFIG_DIR) + "/network_shifter.json");
  CHECK(sh.variant == NetworkVariant::Shifter);
}

TEST_CASE("jump operators") {
  const ModeUnitary id;
  const JumpOperator d2 = jump_operator(2, id, {1, 1, 1, 1});
  for (const auto& t : d2.terms) CHECK(std::abs(t.coefficient - (t.cavity == 2 ? 1.0 : 0.0)) < 1e-15);

  const ModeUnitary u = compose_network(basic_network());
  for (int k = 1; k <= 4; ++k) {
    const JumpOperator d = jump_operator(k, u, {4, 4, 4, 4});
    for (const auto& t : d.terms) CHECK(std::abs(t.coefficient) == doctest::Approx(1.0));
  }
  CHECK_THROWS(jump_operator(1, u, {4, 0, 4, 4}));
  CHECK_THROWS(jump_operator(5, u, {4, 4, 4, 4}));

  const StateVector s = build_initial_state({active(1), active(2), active(3), active(4)}, {{1, 2}, {3, 4}});
  const StateVector z = apply_jump(s, jump_operator(1, u, {4, 4, 4, 4}), {1, 2, 3, 4});
  CHECK(z.norm_squared() == 0.0);
}

TEST_CASE("detection channels are complete") {
  std::mt19937_64 rng(21);
  const ModeUnitary u = compose_network(shifter_network(2));
  const std::array<double, 4> gam{4.0, 3.5, 4.2, 5.0};
  const std::vector<SubsystemSpec> specs{active(1), active(2), active(3), active(4)};
  const std::array<int, 4> labels{1, 2, 3, 4};
  for (int trial = 0; trial < 3; ++trial) {
    const StateVector s = oracle::random_state(specs, rng);
    double lhs = 0.0;
    for (int k = 1; k <= 4; ++k) lhs += apply_jump(s, jump_operator(k, u, gam), labels).norm_squared();
    double rhs = 0.0;
    for (int j = 1; j <= 4; ++j) {
      rhs += gam[j - 1] * apply_local(s, {j, cavity_annihilation()}).norm_squared();
    }
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("two of four subnetwork") {
  const auto cfg = two_of_four_subnetwork(basic_network(), {1, 2});
  CHECK(cfg.active_inputs[0]);
  CHECK(cfg.active_inputs[1]);
  CHECK_FALSE(cfg.active_inputs[2]);
  CHECK_THROWS(two_of_four_subnetwork(basic_network(), {1, 1}));
  // Relabeling symmetry: |beta| pattern of inputs (3,4) matches (1,2).
  const auto other = two_of_four_subnetwork(basic_network(), {3, 4});
  for (int k = 1; k <= 4; ++k) {
    CHECK(std::abs(cfg.beta(k, 1)) == doctest::Approx(std::abs(other.beta(k, 3))));
    CHECK(std::abs(cfg.beta(k, 2)) == doctest::Approx(std::abs(other.beta(k, 4))));
  }
}
