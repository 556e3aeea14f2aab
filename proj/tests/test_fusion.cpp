#include <doctest.h>

#include <cmath>
#include <random>

#include "graphfuse/fusion.hpp"
#include "oracle.hpp"

using namespace graphfuse;

namespace {

const ModeUnitary& basic() {
  static const ModeUnitary u = compose_network(basic_network());
  return u;
}

const ModeUnitary& shifter() {
  static const ModeUnitary u = compose_network(shifter_network(1));
  return u;
}

GraphStateRep two_singlets() {
  GraphStateRep rep(Graph(4));
  rep = install_singlet(rep, 0, 1);
  return install_singlet(rep, 2, 3);
}

// Fuses symbolically and physically; returns the symbolic outcome after checking both agree.
FusionOutcome checked_fuse(const GraphStateRep& rep, LeafPair a, LeafPair b, const ModeUnitary& beta, int k1, int k2) {
  const StateVector before = graph_to_statevector(rep);
  const StateVector phys = oracle::physical_two_click(before, {a.leaf, a.hub, b.leaf, b.hub}, beta.matrix(), k1, k2);
  const double p = fusion_record_probability(rep, a, b, beta, k1, k2);
  // The oracle sums both emission orders; a time-ordered record carries half.
  CHECK(0.5 * phys.norm_squared() == doctest::Approx(p).epsilon(1e-12));
  const FusionOutcome out = fuse(rep, a, b, beta, k1, k2);
  CHECK(oracle::fidelity(phys, graph_to_statevector(out.rep)) == doctest::Approx(1.0).epsilon(1e-12));
  return out;
}

}  // namespace

TEST_CASE("singlet pairs are ready without rotation") {
  const GraphStateRep rep = two_singlets();
  CHECK(is_fusion_ready(rep, {0, 1}));
  CHECK(is_fusion_ready(rep, {2, 3}));
  const StateVector s = graph_to_statevector(rep);
  const double r2 = 1.0 / std::sqrt(2.0);
  StateVector expect({spectator(0), spectator(1)});
  expect[0b01] = r2;
  expect[0b10] = -r2;
  const auto pair = reduced_density(s, {0, 1});
  CHECK(std::abs(pair(0, 0)) < 1e-15);
  CHECK(std::abs(pair(3, 3)) < 1e-15);
  const PreparedPair pp = prepare_leaf_pair(rep, 0, 1);
  CHECK_FALSE(pp.applied.has_value());
}

TEST_CASE("leaf preparation lands in the single-excitation span") {
  GraphStateRep edge(path_graph(2));
  CHECK_FALSE(is_fusion_ready(edge, {0, 1}));
  const PreparedPair pp = prepare_leaf_pair(edge, 0, 1);
  REQUIRE(pp.applied.has_value());
  CHECK(is_fusion_ready(pp.rep, {0, 1}));
  const StateVector s = graph_to_statevector(pp.rep);
  CHECK(std::abs(s[0b00]) < 1e-15);
  CHECK(std::abs(s[0b11]) < 1e-15);
  // The rotation is (1 - i sigma_y)/sqrt2 on the leaf.
  Eigen::Matrix2cd r;
  r << 1.0, -1.0, 1.0, 1.0;
  r /= std::sqrt(2.0);
  CHECK(oracle::fidelity(s, oracle::apply_qubit(graph_to_statevector(edge), 0, r)) == doctest::Approx(1.0));

  GraphStateRep path(path_graph(3));
  const PreparedPair p3 = prepare_leaf_pair(path, 0, 1);
  const StateVector s3 = graph_to_statevector(p3.rep);
  for (std::size_t i = 0; i < 8; ++i) {
    const int a = static_cast<int>(i >> 2) & 1;
    const int b = static_cast<int>(i >> 1) & 1;
    if (a == b) CHECK(std::abs(s3[i]) < 1e-15);
  }
  // With b = 1 the far vertex carries sigma_z relative to b = 0.
  const StateVector far0 = oracle::project_qubit(oracle::project_qubit(s3, 1, Pauli::Z, 1), 0, Pauli::Z, -1);
  const StateVector far1 = oracle::project_qubit(oracle::project_qubit(s3, 1, Pauli::Z, -1), 0, Pauli::Z, 1);
  CHECK(std::abs(far0[0] - far0[1]) < 1e-12);
  CHECK(std::abs(far1[0] + far1[1]) < 1e-12);

  CHECK_THROWS_AS(prepare_leaf_pair(path, 1, 0), FusionError);
  GraphStateRep bad(path_graph(2));
  bad.corrections[1] = LocalClifford::hadamard();
  CHECK_THROWS_AS(prepare_leaf_pair(bad, 0, 1), CorrectionError);
}

TEST_CASE("two singlets through the basic network") {
  const GraphStateRep rep = two_singlets();
  double total = 0.0;
  double success = 0.0;
  for (int k1 = 1; k1 <= 4; ++k1) {
    for (int k2 = 1; k2 <= 4; ++k2) {
      const double p = fusion_record_probability(rep, {0, 1}, {2, 3}, basic(), k1, k2);
      total += p;
      if (p < 1e-15) {
        CHECK_THROWS_AS(fuse(rep, {0, 1}, {2, 3}, basic(), k1, k2), FusionError);
        continue;
      }
      const FusionOutcome out = checked_fuse(rep, {0, 1}, {2, 3}, basic(), k1, k2);
      if (k1 == k2) {
        CHECK(out.cls == FusionClass::Retry);
        CHECK(out.rep.graph == rep.graph);
        CHECK(p == doctest::Approx(0.125));
      } else {
        success += p;
        CHECK(out.cls == FusionClass::Success);
        CHECK(out.rep.graph == star_graph(4, 1));
        CHECK(p == doctest::Approx(0.0625));
        CHECK(eligible_pairs(out.rep).size() >= 2);
      }
    }
  }
  CHECK(total == doctest::Approx(1.0));
  CHECK(success == doctest::Approx(0.5));

  // Outcome (1,3) is (|0101> - |1010>)/sqrt2.
  const FusionOutcome c = fuse(rep, {0, 1}, {2, 3}, basic(), 1, 3);
  StateVector expect({spectator(0), spectator(1), spectator(2), spectator(3)});
  expect[0b0101] = 1.0;
  expect[0b1010] = -1.0;
  CHECK(oracle::fidelity(expect, graph_to_statevector(c.rep)) == doctest::Approx(1.0));
}

TEST_CASE("shifter network yields a linear graph") {
  const GraphStateRep rep = two_singlets();
  int successes = 0;
  for (int k1 = 1; k1 <= 4; ++k1) {
    for (int k2 = 1; k2 <= 4; ++k2) {
      if (k1 == k2 || fusion_record_probability(rep, {0, 1}, {2, 3}, shifter(), k1, k2) < 1e-15) continue;
      const FusionOutcome out = checked_fuse(rep, {0, 1}, {2, 3}, shifter(), k1, k2);
      CHECK(describe_lc_class(graph_to_statevector(out.rep)) == "path4");
      ++successes;
    }
  }
  CHECK(successes > 0);
  const ShifterCalibration cal = calibrate_shifter_placement();
  CHECK(cal.selected_mode == 1);
  CHECK(cal.path_like[0]);
}

TEST_CASE("fusion of fragments on four and five vertices") {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> cid(0, 23);
  std::vector<LocalClifford> monomials;
  for (int i = 0; i < 24; ++i) {
    if (LocalClifford::from_id(i).is_monomial()) monomials.push_back(LocalClifford::from_id(i));
  }
  CHECK(monomials.size() == 8);
  int fused = 0;
  for (int n = 4; n <= 5; ++n) {
    const int pairs = n * (n - 1) / 2;
    for (std::uint64_t key = 0; key < (std::uint64_t{1} << pairs); ++key) {
      const Graph g = Graph::from_key(n, key);
      if (!g.has_edge(0, 1) || !g.has_edge(2, 3) || g.degree(0) != 1 || g.degree(2) != 1) continue;
      GraphStateRep rep(g);
      for (int v = 4; v < n; ++v) rep.corrections[v] = LocalClifford::from_id(cid(rng));
      rep.corrections[1] = monomials[static_cast<std::size_t>(cid(rng)) % monomials.size()];
      rep.corrections[3] = monomials[static_cast<std::size_t>(cid(rng)) % monomials.size()];
      rep = prepare_leaf_pair(rep, 0, 1).rep;
      rep = prepare_leaf_pair(rep, 2, 3).rep;
      for (const ModeUnitary* beta : {&basic(), &shifter()}) {
        for (int k1 = 1; k1 <= 4; ++k1) {
          for (int k2 = 1; k2 <= 4; ++k2) {
            if (fusion_record_probability(rep, {0, 1}, {2, 3}, *beta, k1, k2) < 1e-15) continue;
            const FusionOutcome out = checked_fuse(rep, {0, 1}, {2, 3}, *beta, k1, k2);
            if (out.cls == FusionClass::Retry) CHECK(out.rep.graph == rep.graph);
            ++fused;
          }
        }
      }
    }
  }
  CHECK(fused > 100);
}

TEST_CASE("fusion rejects unready pairs") {
  GraphStateRep rep(Graph(4, {{0, 1}, {2, 3}}));
  CHECK_THROWS_AS(fuse(rep, {0, 1}, {2, 3}, basic(), 1, 3), FusionError);
  const GraphStateRep s = two_singlets();
  CHECK_THROWS_AS(fuse(s, {0, 1}, {0, 1}, basic(), 1, 3), FusionError);
  CHECK_THROWS_AS(fuse(s, {0, 1}, {2, 3}, basic(), 0, 3), FusionError);
}

TEST_CASE("repeat until success keeps the oracle state") {
  CounterRng rng(23, 0);
  int long_runs = 0;
  for (int run = 0; run < 300; ++run) {
    GraphStateRep rep(Graph(5));
    rep = install_singlet(rep, 0, 1);
    rep.graph.add_edge(1, 4);
    rep = install_singlet(rep, 2, 3);
    rep = prepare_leaf_pair(rep, 0, 1).rep;
    CHECK(is_fusion_ready(rep, {0, 1}));
    const RusResult res = repeat_until_success(rep, {0, 1}, {2, 3}, basic(), baseline_params(), rng);
    CHECK(res.outcome.cls == FusionClass::Success);
    CHECK(res.records.size() == static_cast<std::size_t>(res.attempts));
    StateVector phys = graph_to_statevector(rep);
    for (const auto& r : res.records) {
      phys = oracle::physical_two_click(phys, {0, 1, 2, 3}, basic().matrix(), r.first.detector, r.second.detector);
      phys.normalize();
    }
    CHECK(oracle::fidelity(phys, graph_to_statevector(res.outcome.rep)) == doctest::Approx(1.0).epsilon(1e-9));
    long_runs += res.attempts >= 4 ? 1 : 0;
  }
  CHECK(long_runs > 0);
}

TEST_CASE("EPR factory heralds a maximally entangled pair") {
  CounterRng rng(31, 0);
  int attempts = 0;
  int runs = 400;
  bool saw_reset = false;
  for (FactoryMode mode : {FactoryMode::TwoOfFour, FactoryMode::SingleBS}) {
    for (int i = 0; i < runs; ++i) {
      GraphStateRep rep(Graph(2));
      const FactoryResult f = epr_factory(rep, 0, 1, mode, basic_network(), baseline_params(), rng);
      attempts += f.attempts;
      for (int c : f.click_counts) saw_reset = saw_reset || c == 0 || c == 2;
      CHECK(f.click_counts.back() == 1);
      const StateVector s = graph_to_statevector(f.rep);
      const auto rho = reduced_density(s, {0});
      CHECK((rho * rho).trace().real() == doctest::Approx(0.5).epsilon(1e-12));
      CHECK(is_fusion_ready(f.rep, {0, 1}));
      // Direct construction of beta_k1 |1,0> + beta_k2 |0,1>.
      const ModeUnitary u = factory_unitary(mode, basic_network());
      StateVector expect({spectator(0), spectator(1)});
      expect[0b10] = u(f.detector, 1);
      expect[0b01] = u(f.detector, 2);
      CHECK(oracle::fidelity(expect, s) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
  CHECK(saw_reset);
  const double mean = attempts / (2.0 * runs);
  CHECK(std::abs(mean - 2.0) < 3 * std::sqrt(2.0 / (2.0 * runs)));
}

TEST_CASE("measuring out fusion leaves") {
  const FusionOutcome star = fuse(two_singlets(), {0, 1}, {2, 3}, basic(), 1, 3);
  CounterRng rng(3, 0);
  const MeasureOutResult z = measure_out_fusion_leaf(star.rep, 3, rng);
  CHECK(z.rep.graph.edge_count() == 2);
  CHECK(z.rep.graph.degree(1) == 2);
  const StateVector before = graph_to_statevector(star.rep);
  CHECK(oracle::fidelity(oracle::project_qubit(before, 3, to_pauli(z.axis), z.outcome), graph_to_statevector(z.rep)) ==
        doctest::Approx(1.0).epsilon(1e-12));

  const MeasureOutResult x = measure_out_fusion_leaf(star.rep, 2, rng, PauliAxis::X);
  CHECK(oracle::fidelity(oracle::project_qubit(before, 2, Pauli::X, x.outcome), graph_to_statevector(x.rep)) ==
        doctest::Approx(1.0).epsilon(1e-12));

  const MeasureOutResult two = measure_out_fusion_leaf(z.rep, 2, rng);
  CHECK(is_fusion_ready(two.rep, {0, 1}));
  const StateVector s = graph_to_statevector(two.rep);
  const auto rho = reduced_density(s, {0, 1});
  CHECK(std::abs(rho(0, 0)) < 1e-12);
  CHECK(std::abs(rho(3, 3)) < 1e-12);
  CHECK(std::abs(rho(1, 1) - rho(2, 2)) < 1e-12);
}

TEST_CASE("three successive fusions without local rotations") {
  CounterRng rng(41, 0);
  GraphStateRep rep(Graph(8));
  for (int p = 0; p < 4; ++p) rep = epr_factory(rep, 2 * p, 2 * p + 1, FactoryMode::TwoOfFour, basic_network(), baseline_params(), rng).rep;
  StateVector phys = graph_to_statevector(rep);
  auto step = [&](LeafPair a, LeafPair b) {
    REQUIRE(is_fusion_ready(rep, a));
    REQUIRE(is_fusion_ready(rep, b));
    const RusResult r = repeat_until_success(rep, a, b, basic(), baseline_params(), rng);
    for (const auto& rec : r.records) {
      phys = oracle::physical_two_click(phys, {a.leaf, a.hub, b.leaf, b.hub}, basic().matrix(), rec.first.detector,
                                        rec.second.detector);
      phys.normalize();
    }
    rep = r.outcome.rep;
    CHECK(oracle::fidelity(phys, graph_to_statevector(rep)) == doctest::Approx(1.0).epsilon(1e-9));
  };
  step({0, 1}, {2, 3});
  CHECK(eligible_pairs(rep).size() >= 2);
  step({4, 5}, {6, 7});
  const auto pairs = eligible_pairs(rep);
  LeafPair left{-1, -1};
  LeafPair right{-1, -1};
  for (const auto& p : pairs) {
    if (p.hub == 1 && left.hub < 0) left = p;
    if (p.hub == 5 && right.hub < 0) right = p;
  }
  REQUIRE(left.hub == 1);
  REQUIRE(right.hub == 5);
  step(left, right);
  CHECK(rep.graph.degree(1) == 7);
  CHECK(lc_equivalent(rep.graph, star_graph(8, 1)).equivalent);
}
