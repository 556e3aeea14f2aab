#include "graphfuse/detector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace graphfuse {

std::string to_string(Resolving r) {
  switch (r) {
    case Resolving::None:
      return "none";
    case Resolving::ThreeWay:
      return "three_way";
    case Resolving::Pockels:
      return "pockels";
  }
  return "?";
}

Resolving parse_resolving(const std::string& s) {
  if (s == "none") return Resolving::None;
  if (s == "three_way" || s == "three-way") return Resolving::ThreeWay;
  if (s == "pockels") return Resolving::Pockels;
  throw std::invalid_argument("unknown resolving mode: " + s);
}

std::string to_string(OutcomeClass c) {
  switch (c) {
    case OutcomeClass::SameDetector:
      return "same_detector";
    case OutcomeClass::DifferentDetector:
      return "different_detector";
    case OutcomeClass::LossSuspected:
      return "loss_suspected";
    case OutcomeClass::DarkCountCorrupted:
      return "dark_count_corrupted";
  }
  return "?";
}

void DetectorModel::validate() const {
  if (!(p_loss >= 0.0 && p_loss < 1.0)) throw std::invalid_argument("p_loss must lie in [0, 1)");
  if (!(dark_rate >= 0.0)) throw std::invalid_argument("dark_rate must be non-negative");
}

OutcomeClass classify(const std::array<int, 4>& reported) {
  int total = 0;
  int fired = 0;
  for (int c : reported) {
    total += c;
    fired += c > 0 ? 1 : 0;
  }
  if (total < 2) return OutcomeClass::LossSuspected;
  if (total > 2) return OutcomeClass::DarkCountCorrupted;
  return fired == 2 ? OutcomeClass::DifferentDetector : OutcomeClass::SameDetector;
}

std::array<int, 4> reported_counts(const std::vector<ObservedClick>& observed, Resolving resolving, double tau) {
  std::array<std::vector<double>, 4> times;
  for (const auto& c : observed) times[c.detector - 1].push_back(c.time);
  std::array<int, 4> out{};
  for (int k = 0; k < 4; ++k) {
    auto& t = times[k];
    std::sort(t.begin(), t.end());
    const int n = static_cast<int>(t.size());
    switch (resolving) {
      case Resolving::ThreeWay:
        out[k] = std::min(n, 2);
        break;
      case Resolving::None:
        out[k] = std::min(n, 1);
        break;
      case Resolving::Pockels: {
        if (n == 0) break;
        out[k] = 1;
        for (int i = 1; i < n; ++i) {
          if (t[i] - t[0] >= tau) {
            out[k] = 2;
            break;
          }
        }
        break;
      }
    }
  }
  return out;
}

AttemptRecord detect(const std::vector<Click>& emitted, const DetectorModel& model, double gamma_min,
                     CounterRng& rng) {
  model.validate();
  AttemptRecord r;
  r.emitted = emitted;
  for (const auto& c : emitted) {
    if (model.p_loss > 0.0 && rng.uniform() < model.p_loss) {
      ++r.lost;
    } else {
      r.observed.push_back({c.time, c.detector, false});
    }
  }
  const double window = model.resolved_window(gamma_min);
  if (model.dark_rate > 0.0) {
    for (int k = 1; k <= 4; ++k) {
      const int n = sample_poisson(rng, model.dark_rate * window);
      for (int i = 0; i < n; ++i) r.observed.push_back({rng.uniform() * window, k, true});
      r.dark += n;
    }
  }
  std::sort(r.observed.begin(), r.observed.end(),
            [](const ObservedClick& a, const ObservedClick& b) { return a.time < b.time; });
  r.reported = reported_counts(r.observed, model.resolving, model.resolved_tau(gamma_min));
  r.cls = classify(r.reported);
  if (model.resolving == Resolving::None) {
    // Without number resolution a lone click cannot be told from a same-detector pair.
    int total = 0;
    for (int c : r.reported) total += c;
    if (total == 1) r.cls = OutcomeClass::SameDetector;
  }
  r.accepted = r.cls == OutcomeClass::SameDetector || r.cls == OutcomeClass::DifferentDetector;
  r.corrupted = r.accepted && r.lost > 0;
  return r;
}

double analytic_corrupted_rate(const DetectorModel& model, double gamma_min) {
  model.validate();
  if (model.resolving != Resolving::ThreeWay) {
    throw std::invalid_argument("analytic corrupted rate is derived for three-way detectors");
  }
  const double a = model.dark_rate * model.resolved_window(gamma_min);
  const double q0 = std::exp(-a);
  const double q1 = a * q0;
  const double q_ge1 = 1.0 - q0;
  const double q_ge2 = 1.0 - q0 - q1;
  // One photon survives on some detector: reported total is 2 iff the darks add exactly one reported count.
  const double one_lost = q_ge1 * q0 * q0 * q0 + q0 * 3.0 * q1 * q0 * q0;
  // Both lost: darks alone report exactly two counts.
  const double both_lost = 4.0 * q_ge2 * q0 * q0 * q0 + 6.0 * q1 * q1 * q0 * q0;
  const double p = model.p_loss;
  return 2.0 * p * (1.0 - p) * one_lost + p * p * both_lost;
}

}  // namespace graphfuse
