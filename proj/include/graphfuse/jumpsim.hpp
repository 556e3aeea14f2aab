#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "graphfuse/optics.hpp"
#include "graphfuse/qstate.hpp"
#include "graphfuse/quadrature.hpp"
#include "graphfuse/rng.hpp"

namespace graphfuse {

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SubsystemParams {
  double delta = 0.0;
  double gamma = 4.0;
  double omega = 1.0;
};

// Parameters of cavities 1..4 stored at indices 0..3.
using ParamSet = std::array<SubsystemParams, 4>;

ParamSet baseline_params();

// (delta shift, fractional gamma error, omega shift) for one subsystem.
struct ErrorVector {
  double d_delta = 0.0;
  double d_gamma = 0.0;
  double d_omega = 0.0;

  double operator[](int i) const { return i == 0 ? d_delta : (i == 1 ? d_gamma : d_omega); }
  double& operator[](int i) { return i == 0 ? d_delta : (i == 1 ? d_gamma : d_omega); }
};

using ErrorSet = std::array<ErrorVector, 4>;

// Delta_j = Delta + d_delta, Gamma_j = Gamma (1 + d_gamma), Omega_j = Omega + d_omega.
ParamSet apply_errors(const ParamSet& base, const ErrorSet& eps);

// Closed-form non-Hermitian evolution of one atom-cavity subsystem (rotating frame at the atomic line).
class EmitterPropagator {
 public:
  explicit EmitterPropagator(const SubsystemParams& p);

  // exp(-i M t) on span{|e,vac>, |1,1ph>} with M = [[0, Omega], [Omega, Delta - i Gamma/2]].
  Eigen::Matrix2cd block(double t) const;
  cplx excited_amplitude(double t) const;
  cplx photon_amplitude(double t) const;
  // sqrt(Gamma) * photon amplitude: the emission amplitude entering every jump.
  cplx emission(double t) const;
  double survival(double t) const;
  // Full 6x6 evolution on the active subsystem.
  Eigen::MatrixXcd local_matrix(double t) const;
  const SubsystemParams& params() const { return p_; }
  double slowest_decay_rate() const;

 private:
  SubsystemParams p_;
  cplx l1_;
  cplx l2_;
  cplx m_;
};

EmitterPropagator effective_propagator(const SubsystemParams& p);

struct Click {
  double time = 0.0;
  int detector = 1;
};

struct DetectionRecord {
  Click first;
  Click second;
};

// Cavity j (1-based) is the active subsystem with label cavity_labels[j-1]; -1 marks an absent cavity.
using CavityLabels = std::array<int, 4>;

// Dense route: 1 - || U(t) state ||^2 with U(t) the product of subsystem propagators.
double waiting_time_cdf(const StateVector& state, const ParamSet& params, const CavityLabels& cavities, double t);

// Dense route: d_k2 U(dt) d_k1 U(t1) |initial>, unnormalized.
StateVector conditional_amplitude(const StateVector& initial, const DetectionRecord& record, const ModeUnitary& beta,
                                  const ParamSet& params, const CavityLabels& cavities);

// Post-pulse state split by the set of excited cavities (bit j-1 for cavity j).
class ExcitationModel {
 public:
  // state must be post-pulse with every cavity in vacuum; the matter ket of each sector has e mapped to 1.
  static ExcitationModel from_state(const StateVector& post_pulse, const CavityLabels& cavities);
  // Sector weights only (no matter kets); used when only detection statistics are needed.
  static ExcitationModel from_weights(const std::map<unsigned, double>& weights);

  const std::map<unsigned, double>& weights() const { return weights_; }
  bool has_kets() const { return !kets_.empty(); }
  const StateVector& ket(unsigned mask) const { return kets_.at(mask); }
  const std::map<unsigned, StateVector>& kets() const { return kets_; }
  // True if every sector carries exactly two excitations.
  bool two_excitation() const;

 private:
  std::map<unsigned, double> weights_;
  std::map<unsigned, StateVector> kets_;
};

ExcitationModel epr_pair_model();  // |EPR_12>|EPR_34> after the pulse

// Two-click amplitude for sector {j,l}: beta_k1j beta_k2l g_j(t1) g_l(t2) + (j <-> l).
class TwoClickKernel {
 public:
  TwoClickKernel(const ModeUnitary& beta, const ParamSet& params);
  const EmitterPropagator& propagator(int cavity) const { return props_[cavity - 1]; }
  void emissions(double t, std::array<cplx, 4>& g) const;
  cplx amplitude(int k1, int k2, int j, int l, const std::array<cplx, 4>& g1, const std::array<cplx, 4>& g2) const;
  const ModeUnitary& beta() const { return beta_; }
  double time_scale() const;

 private:
  ModeUnitary beta_;
  std::array<EmitterPropagator, 4> props_;
};

// Normalized matched-parameter outcome states; nullopt where the outcome is impossible.
using OutcomeStates = std::array<std::array<std::optional<StateVector>, 4>, 4>;
OutcomeStates ideal_outcome_states(const ExcitationModel& model, const ModeUnitary& beta);

struct OutcomeTable {
  std::array<std::array<double, 4>, 4> probability{};  // [k1-1][k2-1], ordered t1 <= t2
  std::array<std::array<double, 4>, 4> fidelity_weight{};  // integral of |<ref|Psi~>|^2
  double quadrature_error = 0.0;
  int evaluations = 0;
};

struct IntegrationOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-11;
};

// Double integral over 0 <= t1 <= t2 < inf of p (and of the fidelity integrand when refs are given).
OutcomeTable outcome_table(const ExcitationModel& model, const ModeUnitary& beta, const ParamSet& params,
                           const OutcomeStates* refs = nullptr, const IntegrationOptions& opt = {});

double outcome_probability(int k1, int k2, const ExcitationModel& model, const ModeUnitary& beta,
                           const ParamSet& params);

// Pointwise f = |<ref|Psi>|^2 with Psi the normalized conditional state.
std::optional<double> fidelity_f(const DetectionRecord& record, const ExcitationModel& model, const ModeUnitary& beta,
                                 const ParamSet& params, const StateVector& reference);

// F = 2 sum_{k1 != k2} integral of |<Psi(k1,k2)|Psi~>|^2 with references from matched parameters.
double averaged_fidelity(const ExcitationModel& model, const ModeUnitary& beta, const ParamSet& params,
                         const IntegrationOptions& opt = {});

struct ScanPoint {
  ErrorSet eps{};
  double fidelity = 1.0;
};

struct FitResult {
  Eigen::Matrix3d ms = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d mx = Eigen::Matrix3d::Zero();
  double residual_rms = 0.0;
  double residual_max = 0.0;
  std::size_t points = 0;
  bool quadratic_regime = true;  // false if the max residual exceeds 1e-6
};

// Grid for the fit: pairs of components of subsystem 1, and of subsystems 1 and `partner`.
std::vector<ScanPoint> fit_grid(double span = 0.02, int points = 5, int partner = 2);
void evaluate_scan(std::vector<ScanPoint>& grid, const ExcitationModel& model, const ModeUnitary& beta,
                   const ParamSet& base, const IntegrationOptions& opt = {});
// Least squares for 1 - F = sum_j e_j^T Ms e_j + sum_{j1 != j2} e_j1^T Mx e_j2, no linear term.
FitResult fit_error_quadratic(const std::vector<ScanPoint>& grid);

struct Trajectory {
  std::vector<Click> clicks;
  // Final matter state after all emissions (empty if the model has no kets).
  std::optional<StateVector> final_state;
  // Final excited-set sector weights for the branch picture.
  std::map<unsigned, double> final_sector_weights;
};

// Quantum-jump trajectory until no excitation remains; detector choice by jump weights.
Trajectory sample_trajectory(const ExcitationModel& model, const ModeUnitary& beta, const ParamSet& params,
                             CounterRng& rng);

DetectionRecord two_click_record(const Trajectory& tr);

// Total density over all detector pairs on a grid of (t1, dt).
struct DensityGrid {
  std::vector<double> t;
  std::vector<double> dt;
  std::vector<double> p;  // row-major [i_t][i_dt]
};
DensityGrid two_photon_delay_density(const ExcitationModel& model, const ModeUnitary& beta, const ParamSet& params,
                                     double t_max, double dt_max, int nt, int ndt);
double mean_photon_delay(const ExcitationModel& model, const ModeUnitary& beta, const ParamSet& params);
// Sum over all ordered detector pairs of the double integral (1 with no loss).
double total_two_click_probability(const ExcitationModel& model, const ModeUnitary& beta, const ParamSet& params);
// Probability conservation: ||psi~(t)||^2 + sum_k int_0^t ||d_k psi~(s)||^2 ds for the first click.
double first_click_balance(const ExcitationModel& model, const ModeUnitary& beta, const ParamSet& params, double t);

struct ProductOutcome {
  std::array<int, 4> counts{};
  double probability = 0.0;
  StateVector state;  // normalized matter state of the four qubits
  std::string lc_class;
};

// |+>^4 excited and detected with photon-number-resolving detectors, matched emitters.
std::vector<ProductOutcome> enumerate_product_outcomes(const ModeUnitary& beta);

std::string describe_lc_class(const StateVector& qubits);

}  // namespace graphfuse
