#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "graphfuse/graphstate.hpp"
#include "graphfuse/jumpsim.hpp"
#include "graphfuse/optics.hpp"
#include "graphfuse/rng.hpp"

namespace graphfuse {

class FusionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// leaf is attached only to hub.
struct LeafPair {
  int leaf = 0;
  int hub = 1;
  bool operator==(const LeafPair&) const = default;
};

// Ready: leaf is a leaf of hub, C_leaf H and C_hub are monomial, and the two physical
// values are complementary for either hub value, so the pair lives in span{|0,1>,|1,0>}.
bool is_fusion_ready(const GraphStateRep& rep, const LeafPair& p);
std::optional<std::string> readiness_problem(const GraphStateRep& rep, const LeafPair& p);

// Every ready (leaf, hub) pair among present vertices.
std::vector<LeafPair> eligible_pairs(const GraphStateRep& rep);

struct PreparedPair {
  GraphStateRep rep;
  LeafPair pair;
  std::optional<LocalClifford> applied;  // physical unitary on the leaf; empty if already ready
};

// Rotates the leaf so the pair becomes ready. Requires a monomial hub correction.
PreparedPair prepare_leaf_pair(const GraphStateRep& rep, int leaf, int hub);

// Cavity emitting for hub value beta: pair A uses cavities (1 leaf, 2 hub), pair B uses (3, 4).
int emitter_cavity(const GraphStateRep& rep, const LeafPair& p, int hub_value, bool second);

// c[b1][b2] = beta_{k1 j} beta_{k2 l} + beta_{k1 l} beta_{k2 j} with j, l the emitting cavities.
using Coefficients = std::array<std::array<cplx, 2>, 2>;
Coefficients detection_coefficients(const GraphStateRep& rep, const LeafPair& a, const LeafPair& b,
                                    const ModeUnitary& beta, int k1, int k2);

// Probability of the ordered detector pair under matched emitters.
double fusion_record_probability(const GraphStateRep& rep, const LeafPair& a, const LeafPair& b,
                                 const ModeUnitary& beta, int k1, int k2);

// Sector weights for the four hub-value combinations.
ExcitationModel fusion_excitation_model(const GraphStateRep& rep, const LeafPair& a, const LeafPair& b);

enum class FusionClass { Success, Retry };
std::string to_string(FusionClass c);

struct FusionOutcome {
  FusionClass cls = FusionClass::Retry;
  int k1 = 1;
  int k2 = 1;
  GraphStateRep rep;
  int hub = -1;             // hub of the fused fragment (the first pair's hub)
  std::vector<int> leaves;  // participants attached to the hub after a parity projection
  bool parity_projection = false;
  bool edge_toggled = false;
};

// Applies the detection-conditioned map for clicks (k1, k2). Both pairs must be ready and disjoint.
FusionOutcome fuse(const GraphStateRep& rep, const LeafPair& a, const LeafPair& b, const ModeUnitary& beta, int k1,
                   int k2);

struct RusResult {
  int attempts = 0;
  FusionOutcome outcome;
  std::vector<DetectionRecord> records;
};

// Samples records until different detectors click; retries update corrections only.
RusResult repeat_until_success(const GraphStateRep& rep, const LeafPair& a, const LeafPair& b, const ModeUnitary& beta,
                               const ParamSet& params, CounterRng& rng, int cap = 64);

enum class FactoryMode { TwoOfFour, SingleBS };
std::string to_string(FactoryMode m);
FactoryMode parse_factory_mode(const std::string& s);

// Writes the heralded pair for a single click on detector k into fresh isolated vertices a, b.
// Cavity inputs (j1, j2) carry a and b; the state is (beta_{k j1}|1,0> + beta_{k j2}|0,1>) / norm.
GraphStateRep install_heralded_pair(const GraphStateRep& rep, int a, int b, const ModeUnitary& beta, int k, int j1,
                                    int j2);

// The singlet (|0,1> - |1,0>)/sqrt2 on fresh vertices a, b.
GraphStateRep install_singlet(const GraphStateRep& rep, int a, int b);

struct FactoryResult {
  int attempts = 0;
  int detector = 0;
  GraphStateRep rep;
  std::vector<int> click_counts;  // clicks seen in each attempt
};

// Excites |+>|+> and heralds on exactly one click; other patterns reset the pair.
FactoryResult epr_factory(const GraphStateRep& rep, int a, int b, FactoryMode mode, const ModeNetwork& net,
                          const ParamSet& params, CounterRng& rng, int cap = 64);

ModeUnitary factory_unitary(FactoryMode mode, const ModeNetwork& net);

struct MeasureOutResult {
  GraphStateRep rep;
  PauliAxis axis = PauliAxis::Z;  // physical axis measured
  int outcome = 1;
};

// Default axis C_leaf Z C_leaf^dagger: a Z deletion in the graph frame.
MeasureOutResult measure_out_fusion_leaf(const GraphStateRep& rep, int leaf, CounterRng& rng,
                                         std::optional<PauliAxis> axis = std::nullopt);

struct ShifterCalibration {
  int selected_mode = 0;  // 0 if no placement works
  std::array<bool, 4> path_like{};
};

// Scans the four internal arms; a placement passes if every different-detector outcome of
// two singlets is LC-equivalent to the 4-vertex path.
ShifterCalibration calibrate_shifter_placement();

}  // namespace graphfuse
