#pragma once

#include <array>
#include <string>
#include <vector>

#include "graphfuse/jumpsim.hpp"
#include "graphfuse/rng.hpp"

namespace graphfuse {

enum class Resolving { None, ThreeWay, Pockels };

std::string to_string(Resolving r);
Resolving parse_resolving(const std::string& s);

enum class OutcomeClass { SameDetector, DifferentDetector, LossSuspected, DarkCountCorrupted };

std::string to_string(OutcomeClass c);

// Detector inefficiency is folded into p_loss. Times are in the same units as 1/Gamma.
struct DetectorModel {
  double p_loss = 0.0;
  double dark_rate = 0.0;   // per detector
  double window = -1.0;     // observation window; negative means 50 / min Gamma
  Resolving resolving = Resolving::ThreeWay;
  double tau_switch = -1.0;  // Pockels dead time; negative means 0.05 / min Gamma

  void validate() const;
  double resolved_window(double gamma_min) const { return window >= 0.0 ? window : 50.0 / gamma_min; }
  double resolved_tau(double gamma_min) const { return tau_switch >= 0.0 ? tau_switch : 0.05 / gamma_min; }
};

struct ObservedClick {
  double time = 0.0;
  int detector = 1;
  bool dark = false;
};

struct AttemptRecord {
  std::vector<Click> emitted;
  std::vector<ObservedClick> observed;  // surviving photons plus dark counts, time ordered
  std::array<int, 4> reported{};        // per-detector counts after the resolving model
  int lost = 0;
  int dark = 0;
  OutcomeClass cls = OutcomeClass::LossSuspected;
  bool accepted = false;   // classified as a valid fusion or retry
  bool corrupted = false;  // accepted although a photon was lost
};

// Classification from per-detector reported counts.
OutcomeClass classify(const std::array<int, 4>& reported);

// Reported counts from observed clicks under the resolving model.
std::array<int, 4> reported_counts(const std::vector<ObservedClick>& observed, Resolving resolving, double tau);

// Applies loss and dark counts to the emitted clicks of one attempt, then classifies.
AttemptRecord detect(const std::vector<Click>& emitted, const DetectorModel& model, double gamma_min,
                     CounterRng& rng);

// Probability per attempt that a lost photon is masked by dark counts and the attempt is accepted.
// Exact for the three-way model with two emitted photons and a Poisson dark count on each detector.
double analytic_corrupted_rate(const DetectorModel& model, double gamma_min);

}  // namespace graphfuse
