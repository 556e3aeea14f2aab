#include "graphfuse/jumpsim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "graphfuse/graphstate.hpp"
#include "graphfuse/parallel.hpp"

namespace graphfuse {

namespace {

constexpr cplx kI(0.0, 1.0);

// (e^z - 1) / z, series near zero.
cplx phi(cplx z) {
  if (std::abs(z) < 0.1) {
    cplx acc = 1.0 / 479001600.0;  // 1/12!
    double fact = 479001600.0;
    for (int n = 11; n >= 1; --n) {
      fact /= (n + 1);
      acc = acc * z + 1.0 / fact;
    }
    return acc;
  }
  return (std::exp(z) - 1.0) / z;
}

int popcount4(unsigned m) { return __builtin_popcount(m & 0xFU); }

std::vector<int> cavities_of(unsigned mask) {
  std::vector<int> c;
  for (int j = 1; j <= 4; ++j) {
    if ((mask >> (j - 1)) & 1U) c.push_back(j);
  }
  return c;
}

}  // namespace

ParamSet baseline_params() { return {SubsystemParams{}, SubsystemParams{}, SubsystemParams{}, SubsystemParams{}}; }

ParamSet apply_errors(const ParamSet& base, const ErrorSet& eps) {
  ParamSet p = base;
  for (int j = 0; j < 4; ++j) {
    p[j].delta = base[j].delta + eps[j].d_delta;
    p[j].gamma = base[j].gamma * (1.0 + eps[j].d_gamma);
    p[j].omega = base[j].omega + eps[j].d_omega;
  }
  return p;
}

EmitterPropagator::EmitterPropagator(const SubsystemParams& p) : p_(p) {
  if (!(p.gamma > 0.0)) throw std::invalid_argument("cavity decay rate must be positive");
  if (!(p.omega > 0.0)) throw std::invalid_argument("coupling must be positive");
  m_ = cplx(p.delta, -0.5 * p.gamma);
  const cplx r = std::sqrt(m_ * m_ + 4.0 * p.omega * p.omega);
  l1_ = 0.5 * (m_ + r);
  l2_ = 0.5 * (m_ - r);
  // l2 decays slowest so that e^z below never grows.
  if (l1_.imag() > l2_.imag()) std::swap(l1_, l2_);
}

Eigen::Matrix2cd EmitterPropagator::block(double t) const {
  if (t < 0.0) throw std::invalid_argument("negative evolution time");
  const cplx z = -kI * (l1_ - l2_) * t;
  // Degenerate limit (critical damping): phi -> 1, leaving the t e^{lambda t} secular term.
  const cplx k = std::abs(l1_ - l2_) < 1e-8 ? -kI * t * (1.0 + 0.5 * z) : -kI * t * phi(z);
  const cplx pref = std::exp(-kI * l2_ * t);
  Eigen::Matrix2cd a;
  a << -l2_, p_.omega, p_.omega, m_ - l2_;
  return pref * (Eigen::Matrix2cd::Identity() + k * a);
}

cplx EmitterPropagator::excited_amplitude(double t) const { return block(t)(0, 0); }
cplx EmitterPropagator::photon_amplitude(double t) const { return block(t)(1, 0); }
cplx EmitterPropagator::emission(double t) const { return std::sqrt(p_.gamma) * photon_amplitude(t); }

double EmitterPropagator::survival(double t) const {
  const Eigen::Matrix2cd b = block(t);
  return std::norm(b(0, 0)) + std::norm(b(1, 0));
}

Eigen::MatrixXcd EmitterPropagator::local_matrix(double t) const {
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(6, 6);
  const cplx cav = std::exp(-kI * m_ * t);
  u(active_index(level::g0, 0), active_index(level::g0, 0)) = 1.0;
  u(active_index(level::g1, 0), active_index(level::g1, 0)) = 1.0;
  u(active_index(level::g0, 1), active_index(level::g0, 1)) = cav;
  u(active_index(level::e, 1), active_index(level::e, 1)) = cav;
  const Eigen::Matrix2cd b = block(t);
  const int e0 = active_index(level::e, 0);
  const int c1 = active_index(level::g1, 1);
  u(e0, e0) = b(0, 0);
  u(e0, c1) = b(0, 1);
  u(c1, e0) = b(1, 0);
  u(c1, c1) = b(1, 1);
  return u;
}

double EmitterPropagator::slowest_decay_rate() const { return -2.0 * std::max(l1_.imag(), l2_.imag()); }

EmitterPropagator effective_propagator(const SubsystemParams& p) { return EmitterPropagator(p); }

namespace {

StateVector evolve_dense(const StateVector& s, const ParamSet& params, const CavityLabels& cavities, double t) {
  StateVector out = s;
  for (int j = 0; j < 4; ++j) {
    if (cavities[j] < 0 || !out.has_label(cavities[j])) continue;
    out = apply_local(out, {cavities[j], EmitterPropagator(params[j]).local_matrix(t)});
  }
  return out;
}

std::array<double, 4> gamma_rates(const ParamSet& params) {
  return {params[0].gamma, params[1].gamma, params[2].gamma, params[3].gamma};
}

}  // namespace

double waiting_time_cdf(const StateVector& state, const ParamSet& params, const CavityLabels& cavities, double t) {
  const double n0 = state.norm_squared();
  return 1.0 - evolve_dense(state, params, cavities, t).norm_squared() / n0;
}

StateVector conditional_amplitude(const StateVector& initial, const DetectionRecord& record, const ModeUnitary& beta,
                                  const ParamSet& params, const CavityLabels& cavities) {
  if (record.first.time < 0.0 || record.second.time < record.first.time) {
    throw std::invalid_argument("detection record must satisfy 0 <= t1 <= t2");
  }
  const auto rates = gamma_rates(params);
  StateVector s = evolve_dense(initial, params, cavities, record.first.time);
  s = apply_jump(s, jump_operator(record.first.detector, beta, rates), cavities);
  s = evolve_dense(s, params, cavities, record.second.time - record.first.time);
  return apply_jump(s, jump_operator(record.second.detector, beta, rates), cavities);
}

ExcitationModel ExcitationModel::from_state(const StateVector& post_pulse, const CavityLabels& cavities) {
  const auto& specs = post_pulse.specs();
  const std::size_t n = specs.size();
  std::vector<int> cav_of(n, 0);
  for (int j = 0; j < 4; ++j) {
    if (cavities[j] >= 0) cav_of[post_pulse.position(cavities[j])] = j + 1;
  }
  std::vector<SubsystemSpec> qspecs;
  for (const auto& s : specs) qspecs.push_back(spectator(s.label));
  ExcitationModel m;
  for (std::size_t i = 0; i < post_pulse.dimension(); ++i) {
    const cplx a = post_pulse[i];
    if (a == cplx(0.0)) continue;
    const auto d = post_pulse.digits(i);
    unsigned mask = 0;
    std::size_t q = 0;
    for (std::size_t p = 0; p < n; ++p) {
      int bit = d[p];
      if (specs[p].kind == SubsystemKind::Active) {
        const int atom = d[p] / 2;
        if (d[p] % 2 != 0) throw std::invalid_argument("post-pulse state has a cavity photon");
        if (atom == level::e) {
          if (cav_of[p] == 0) throw std::invalid_argument("excited subsystem is not a cavity");
          mask |= 1U << (cav_of[p] - 1);
          bit = 1;
        } else {
          bit = atom;
        }
      }
      q |= static_cast<std::size_t>(bit) << (n - 1 - p);
    }
    auto it = m.kets_.find(mask);
    if (it == m.kets_.end()) it = m.kets_.emplace(mask, StateVector(qspecs)).first;
    it->second[q] += a;
  }
  for (const auto& [mask, ket] : m.kets_) m.weights_[mask] = ket.norm_squared();
  return m;
}

ExcitationModel ExcitationModel::from_weights(const std::map<unsigned, double>& weights) {
  ExcitationModel m;
  for (const auto& [mask, w] : weights) {
    if (mask > 0xFU) throw std::invalid_argument("sector mask out of range");
    if (w < 0.0) throw std::invalid_argument("negative sector weight");
    if (w > 0.0) m.weights_[mask] = w;
  }
  return m;
}

bool ExcitationModel::two_excitation() const {
  return std::all_of(weights_.begin(), weights_.end(), [](const auto& kv) { return popcount4(kv.first) == 2; });
}

ExcitationModel epr_pair_model() {
  const std::vector<SubsystemSpec> specs{active(1), active(2), active(3), active(4)};
  const StateVector s = build_initial_state(specs, {{1, 2}, {3, 4}});
  const std::vector<int> targets{1, 2, 3, 4};
  return ExcitationModel::from_state(excite(s, targets), {1, 2, 3, 4});
}

TwoClickKernel::TwoClickKernel(const ModeUnitary& beta, const ParamSet& params)
    : beta_(beta),
      props_{EmitterPropagator(params[0]), EmitterPropagator(params[1]), EmitterPropagator(params[2]),
             EmitterPropagator(params[3])} {}

void TwoClickKernel::emissions(double t, std::array<cplx, 4>& g) const {
  for (int j = 0; j < 4; ++j) g[j] = props_[j].emission(t);
}

cplx TwoClickKernel::amplitude(int k1, int k2, int j, int l, const std::array<cplx, 4>& g1,
                               const std::array<cplx, 4>& g2) const {
  return beta_(k1, j) * beta_(k2, l) * g1[j - 1] * g2[l - 1] + beta_(k1, l) * beta_(k2, j) * g1[l - 1] * g2[j - 1];
}

double TwoClickKernel::time_scale() const {
  double rate = std::numeric_limits<double>::infinity();
  for (const auto& p : props_) rate = std::min(rate, p.slowest_decay_rate());
  return 2.0 / rate;
}

OutcomeStates ideal_outcome_states(const ExcitationModel& model, const ModeUnitary& beta) {
  if (!model.has_kets()) throw std::invalid_argument("outcome states need matter kets");
  if (!model.two_excitation()) throw std::invalid_argument("outcome states need a two-excitation input");
  OutcomeStates out;
  for (int k1 = 1; k1 <= 4; ++k1) {
    for (int k2 = 1; k2 <= 4; ++k2) {
      std::optional<StateVector> acc;
      for (const auto& [mask, ket] : model.kets()) {
        const auto c = cavities_of(mask);
        const cplx a = beta(k1, c[0]) * beta(k2, c[1]) + beta(k1, c[1]) * beta(k2, c[0]);
        StateVector term = ket;
        term *= a;
        if (!acc) {
          acc = term;
        } else {
          *acc += term;
        }
      }
      if (acc && acc->norm_squared() > 1e-20) {
        acc->normalize();
        out[k1 - 1][k2 - 1] = acc;
      }
    }
  }
  return out;
}

namespace {

struct SectorData {
  int j = 0;
  int l = 0;
  double weight = 0.0;
  std::array<std::array<cplx, 4>, 4> ref_overlap{};  // <ref(k1,k2)|ket_T>
};

std::vector<SectorData> sector_data(const ExcitationModel& model, const OutcomeStates* refs) {
  if (!model.two_excitation()) throw std::invalid_argument("two-click integrals need a two-excitation input");
  std::vector<SectorData> out;
  for (const auto& [mask, w] : model.weights()) {
    const auto c = cavities_of(mask);
    SectorData s{c[0], c[1], w, {}};
    if (refs) {
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          if ((*refs)[a][b]) s.ref_overlap[a][b] = overlap(*(*refs)[a][b], model.ket(mask));
        }
      }
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace

OutcomeTable outcome_table(const ExcitationModel& model, const ModeUnitary& beta, const ParamSet& params,
                           const OutcomeStates* refs, const IntegrationOptions& opt) {
  const TwoClickKernel kernel(beta, params);
  const std::vector<SectorData> sectors = sector_data(model, refs);
  const std::size_t dim = refs ? 32 : 16;
  const double scale = kernel.time_scale();
  QuadOptions inner_opt{opt.abs_tol * 1e-2, opt.rel_tol * 1e-2, 4000};
  QuadOptions outer_opt{opt.abs_tol, opt.rel_tol, 4000};
  OutcomeTable table;
  int evaluations = 0;
  double inner_err = 0.0;

  const VectorIntegrand outer = [&](double t1, std::vector<double>& out) {
    std::array<cplx, 4> g1;
    kernel.emissions(t1, g1);
    const VectorIntegrand inner = [&](double d, std::vector<double>& v) {
      std::array<cplx, 4> g2;
      kernel.emissions(t1 + d, g2);
      std::fill(v.begin(), v.end(), 0.0);
      for (int k1 = 1; k1 <= 4; ++k1) {
        for (int k2 = 1; k2 <= 4; ++k2) {
          const std::size_t cell = static_cast<std::size_t>((k1 - 1) * 4 + (k2 - 1));
          cplx ov = 0.0;
          for (const auto& s : sectors) {
            const cplx a = kernel.amplitude(k1, k2, s.j, s.l, g1, g2);
            v[cell] += s.weight * std::norm(a);
            if (refs) ov += a * s.ref_overlap[k1 - 1][k2 - 1];
          }
          if (refs) v[16 + cell] = std::norm(ov);
        }
      }
    };
    const QuadResult r = integrate_to_infinity(inner, 0.0, scale, dim, inner_opt);
    if (!r.converged) throw QuadratureError("inner two-click integral did not converge");
    evaluations += r.evaluations;
    inner_err = std::max(inner_err, r.error);
    out = r.value;
  };
  const QuadResult r = integrate_to_infinity(outer, 0.0, scale, dim, outer_opt);
  if (!r.converged) throw QuadratureError("outer two-click integral did not converge");
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      table.probability[a][b] = r.value[static_cast<std::size_t>(a * 4 + b)];
      if (refs) table.fidelity_weight[a][b] = r.value[static_cast<std::size_t>(16 + a * 4 + b)];
    }
  }
  table.quadrature_error = r.error + inner_err;
  table.evaluations = evaluations;
  return table;
}

double outcome_probability(int k1, int k2, const ExcitationModel& model, const ModeUnitary& beta,
                           const ParamSet& params) {
  if (k1 < 1 || k1 > 4 || k2 < 1 || k2 > 4) throw std::invalid_argument("detector index out of range");
  return outcome_table(model, beta, params).probability[k1 - 1][k2 - 1];
}

std::optional<double> fidelity_f(const DetectionRecord& record, const ExcitationModel& model, const ModeUnitary& beta,
                                 const ParamSet& params, const StateVector& reference) {
  if (!model.has_kets()) throw std::invalid_argument("fidelity needs matter kets");
  const TwoClickKernel kernel(beta, params);
  std::array<cplx, 4> g1;
  std::array<cplx, 4> g2;
  kernel.emissions(record.first.time, g1);
  kernel.emissions(record.second.time, g2);
  double norm = 0.0;
  cplx ov = 0.0;
  for (const auto& [mask, ket] : model.kets()) {
    const auto c = cavities_of(mask);
    if (c.size() != 2) throw std::invalid_argument("fidelity needs a two-excitation input");
    const cplx a = kernel.amplitude(record.first.detector, record.second.detector, c[0], c[1], g1, g2);
    norm += std::norm(a) * ket.norm_squared();
    ov += a * overlap(reference, ket);
  }
  if (norm <= 1e-300) return std::nullopt;
  return std::norm(ov) / (norm * reference.norm_squared());
}

double averaged_fidelity(const ExcitationModel& model, const ModeUnitary& beta, const ParamSet& params,
                         const IntegrationOptions& opt) {
  const OutcomeStates refs = ideal_outcome_states(model, beta);
  const OutcomeTable t = outcome_table(model, beta, params, &refs, opt);
  double f = 0.0;
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      if (a != b) f += t.fidelity_weight[a][b];
    }
  }
  return 2.0 * f;
}

std::vector<ScanPoint> fit_grid(double span, int points, int partner) {
  if (points < 3) throw std::invalid_argument("fit grid needs at least 3 points per axis");
  if (partner < 2 || partner > 4) throw std::invalid_argument("partner subsystem must be 2..4");
  std::vector<double> vals;
  for (int i = 0; i < points; ++i) vals.push_back(-span + 2.0 * span * i / (points - 1));
  std::set<std::array<double, 12>> seen;
  std::vector<ScanPoint> grid;
  auto add = [&](const ErrorSet& e) {
    std::array<double, 12> key{};
    for (int j = 0; j < 4; ++j) {
      for (int c = 0; c < 3; ++c) key[static_cast<std::size_t>(j * 3 + c)] = e[j][c];
    }
    if (seen.insert(key).second) grid.push_back({e, 1.0});
  };
  for (int p = 0; p < 3; ++p) {
    for (int q = p; q < 3; ++q) {
      for (double v : vals) {
        for (double w : vals) {
          ErrorSet e{};
          e[0][p] = v;
          if (q != p) e[0][q] = w;
          add(e);
        }
      }
    }
  }
  for (int p = 0; p < 3; ++p) {
    for (int q = 0; q < 3; ++q) {
      for (double v : vals) {
        for (double w : vals) {
          ErrorSet e{};
          e[0][p] = v;
          e[partner - 1][q] = w;
          add(e);
        }
      }
    }
  }
  return grid;
}

void evaluate_scan(std::vector<ScanPoint>& grid, const ExcitationModel& model, const ModeUnitary& beta,
                   const ParamSet& base, const IntegrationOptions& opt) {
  parallel_for(grid.size(), [&](std::size_t i) {
    grid[i].fidelity = averaged_fidelity(model, beta, apply_errors(base, grid[i].eps), opt);
  });
}

FitResult fit_error_quadratic(const std::vector<ScanPoint>& grid) {
  const std::array<std::pair<int, int>, 6> idx{{{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}}};
  Eigen::MatrixXd a(static_cast<Eigen::Index>(grid.size()), 12);
  Eigen::VectorXd y(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t r = 0; r < grid.size(); ++r) {
    const auto& e = grid[r].eps;
    for (int c = 0; c < 6; ++c) {
      const auto [p, q] = idx[c];
      const double mult = p == q ? 1.0 : 2.0;
      double s = 0.0;
      double x = 0.0;
      for (int j = 0; j < 4; ++j) {
        s += mult * e[j][p] * e[j][q];
        for (int k = 0; k < 4; ++k) {
          if (k != j) x += p == q ? e[j][p] * e[k][p] : e[j][p] * e[k][q] + e[j][q] * e[k][p];
        }
      }
      a(static_cast<Eigen::Index>(r), c) = s;
      a(static_cast<Eigen::Index>(r), 6 + c) = x;
    }
    y(static_cast<Eigen::Index>(r)) = 1.0 - grid[r].fidelity;
  }
  const Eigen::VectorXd sol = a.colPivHouseholderQr().solve(y);
  FitResult f;
  for (int c = 0; c < 6; ++c) {
    const auto [p, q] = idx[c];
    f.ms(p, q) = f.ms(q, p) = sol(c);
    f.mx(p, q) = f.mx(q, p) = sol(6 + c);
  }
  const Eigen::VectorXd res = a * sol - y;
  f.points = grid.size();
  f.residual_rms = grid.empty() ? 0.0 : std::sqrt(res.squaredNorm() / static_cast<double>(grid.size()));
  f.residual_max = grid.empty() ? 0.0 : res.cwiseAbs().maxCoeff();
  f.quadratic_regime = f.residual_max <= 1e-6;
  return f;
}

Trajectory sample_trajectory(const ExcitationModel& model, const ModeUnitary& beta, const ParamSet& params,
                             CounterRng& rng) {
  std::array<EmitterPropagator, 4> props{EmitterPropagator(params[0]), EmitterPropagator(params[1]),
                                         EmitterPropagator(params[2]), EmitterPropagator(params[3])};
  double min_rate = std::numeric_limits<double>::infinity();
  double min_gamma = std::numeric_limits<double>::infinity();
  for (int j = 0; j < 4; ++j) {
    min_rate = std::min(min_rate, props[j].slowest_decay_rate());
    min_gamma = std::min(min_gamma, params[j].gamma);
  }
  // (excited set T, jumped set J) -> amplitude
  std::map<std::pair<unsigned, unsigned>, cplx> branches;
  for (const auto& [mask, w] : model.weights()) branches[{mask, 0U}] = std::sqrt(w);

  auto survival_product = [&](unsigned remaining, double t) {
    double s = 1.0;
    for (int j = 0; j < 4; ++j) {
      if ((remaining >> j) & 1U) s *= props[j].survival(t);
    }
    return s;
  };
  auto norm_at = [&](double t) {
    double s = 0.0;
    for (const auto& [key, amp] : branches) s += std::norm(amp) * survival_product(key.first & ~key.second, t);
    return s;
  };
  auto settled = [&] {
    double s = 0.0;
    for (const auto& [key, amp] : branches) {
      if (key.first == key.second) s += std::norm(amp);
    }
    return s;
  };

  Trajectory tr;
  double t_last = 0.0;
  const double cap = 200.0 / min_gamma;
  while (true) {
    const double n0 = norm_at(t_last);
    const double target = rng.uniform() * n0;
    const double floor = settled();
    if (target <= floor || n0 - floor <= 1e-300) break;
    double lo = t_last;
    double hi = t_last + 1.0 / min_rate;
    while (norm_at(hi) > target) {
      lo = hi;
      hi = t_last + 2.0 * (hi - t_last);
      if (hi - t_last > cap) {
        if (norm_at(t_last + cap) - floor > 1e-10 * n0) {
          throw SimulationError("trajectory exceeded the time cap with residual excitation");
        }
        hi = -1.0;
        break;
      }
    }
    if (hi < 0.0) break;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * (1.0 + hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (norm_at(mid) > target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    const double t = 0.5 * (lo + hi);
    std::array<cplx, 4> g;
    for (int j = 0; j < 4; ++j) g[j] = props[j].emission(t);
    std::array<std::map<std::pair<unsigned, unsigned>, cplx>, 4> next;
    std::array<double, 4> weight{};
    for (int k = 1; k <= 4; ++k) {
      for (const auto& [key, amp] : branches) {
        const unsigned remaining = key.first & ~key.second;
        for (int j = 0; j < 4; ++j) {
          if (!((remaining >> j) & 1U)) continue;
          next[k - 1][{key.first, key.second | (1U << j)}] += amp * beta(k, j + 1) * g[j];
        }
      }
      for (const auto& [key, amp] : next[k - 1]) {
        weight[k - 1] += std::norm(amp) * survival_product(key.first & ~key.second, t);
      }
    }
    const double total = weight[0] + weight[1] + weight[2] + weight[3];
    if (!(total > 0.0)) throw SimulationError("jump with vanishing total rate");
    double u = rng.uniform() * total;
    int k = 4;
    for (int c = 0; c < 4; ++c) {
      if (u < weight[c]) {
        k = c + 1;
        break;
      }
      u -= weight[c];
    }
    branches.clear();
    const double renorm = 1.0 / std::sqrt(weight[k - 1]);
    for (const auto& [key, amp] : next[k - 1]) {
      if (amp != cplx(0.0)) branches[key] = amp * renorm;
    }
    tr.clicks.push_back({t, k});
    t_last = t;
  }

  std::optional<StateVector> fin;
  for (const auto& [key, amp] : branches) {
    if (key.first != key.second) continue;
    tr.final_sector_weights[key.first] += std::norm(amp);
    if (model.has_kets()) {
      StateVector term = model.ket(key.first);
      term *= amp / std::sqrt(model.weights().at(key.first));
      if (!fin) {
        fin = term;
      } else {
        *fin += term;
      }
    }
  }
  if (fin && fin->norm_squared() > 0.0) {
    fin->normalize();
    tr.final_state = fin;
  }
  return tr;
}

DetectionRecord two_click_record(const Trajectory& tr) {
  if (tr.clicks.size() != 2) throw std::invalid_argument("trajectory does not have exactly two clicks");
  return {tr.clicks[0], tr.clicks[1]};
}

DensityGrid two_photon_delay_density(const ExcitationModel& model, const ModeUnitary& beta, const ParamSet& params,
                                     double t_max, double dt_max, int nt, int ndt) {
  const TwoClickKernel kernel(beta, params);
  const auto sectors = sector_data(model, nullptr);
  DensityGrid g;
  for (int i = 0; i < nt; ++i) g.t.push_back(nt > 1 ? t_max * i / (nt - 1) : 0.0);
  for (int i = 0; i < ndt; ++i) g.dt.push_back(ndt > 1 ? dt_max * i / (ndt - 1) : 0.0);
  for (double t : g.t) {
    std::array<cplx, 4> g1;
    kernel.emissions(t, g1);
    for (double d : g.dt) {
      std::array<cplx, 4> g2;
      kernel.emissions(t + d, g2);
      double p = 0.0;
      for (int k1 = 1; k1 <= 4; ++k1) {
        for (int k2 = 1; k2 <= 4; ++k2) {
          for (const auto& s : sectors) p += s.weight * std::norm(kernel.amplitude(k1, k2, s.j, s.l, g1, g2));
        }
      }
      g.p.push_back(p);
    }
  }
  return g;
}

namespace {

// Integral of (p, dt * p) summed over detector pairs.
std::array<double, 2> delay_moments(const ExcitationModel& model, const ModeUnitary& beta, const ParamSet& params) {
  const TwoClickKernel kernel(beta, params);
  const auto sectors = sector_data(model, nullptr);
  const double scale = kernel.time_scale();
  const QuadOptions opt{1e-14, 1e-12, 4000};
  const VectorIntegrand outer = [&](double t1, std::vector<double>& out) {
    std::array<cplx, 4> g1;
    kernel.emissions(t1, g1);
    const VectorIntegrand inner = [&](double d, std::vector<double>& v) {
      std::array<cplx, 4> g2;
      kernel.emissions(t1 + d, g2);
      double p = 0.0;
      for (int k1 = 1; k1 <= 4; ++k1) {
        for (int k2 = 1; k2 <= 4; ++k2) {
          for (const auto& s : sectors) p += s.weight * std::norm(kernel.amplitude(k1, k2, s.j, s.l, g1, g2));
        }
      }
      v[0] = p;
      v[1] = d * p;
    };
    const QuadResult r = integrate_to_infinity(inner, 0.0, scale, 2, opt);
    if (!r.converged) throw QuadratureError("delay moment inner integral did not converge");
    out = r.value;
  };
  const QuadResult r = integrate_to_infinity(outer, 0.0, scale, 2, opt);
  if (!r.converged) throw QuadratureError("delay moment outer integral did not converge");
  return {r.value[0], r.value[1]};
}

}  // namespace

double mean_photon_delay(const ExcitationModel& model, const ModeUnitary& beta, const ParamSet& params) {
  const auto m = delay_moments(model, beta, params);
  return m[1] / m[0];
}

double total_two_click_probability(const ExcitationModel& model, const ModeUnitary& beta, const ParamSet& params) {
  const OutcomeTable t = outcome_table(model, beta, params);
  double s = 0.0;
  for (const auto& row : t.probability) {
    for (double p : row) s += p;
  }
  return s;
}

double first_click_balance(const ExcitationModel& model, const ModeUnitary& beta, const ParamSet& params, double t) {
  std::array<EmitterPropagator, 4> props{EmitterPropagator(params[0]), EmitterPropagator(params[1]),
                                         EmitterPropagator(params[2]), EmitterPropagator(params[3])};
  auto surv = [&](unsigned mask, double s) {
    double v = 1.0;
    for (int j = 0; j < 4; ++j) {
      if ((mask >> j) & 1U) v *= props[j].survival(s);
    }
    return v;
  };
  double remaining = 0.0;
  for (const auto& [mask, w] : model.weights()) remaining += w * surv(mask, t);
  const auto rate = [&](double s) {
    double r = 0.0;
    for (const auto& [mask, w] : model.weights()) {
      for (int j = 0; j < 4; ++j) {
        if (!((mask >> j) & 1U)) continue;
        double colsum = 0.0;
        for (int k = 1; k <= 4; ++k) colsum += std::norm(beta(k, j + 1));
        r += w * colsum * std::norm(props[j].emission(s)) * surv(mask & ~(1U << j), s);
      }
    }
    return r;
  };
  return remaining + integrate_scalar(rate, 0.0, t, {1e-14, 1e-12, 4000});
}

namespace {

cplx permanent(const std::vector<std::vector<cplx>>& m) {
  const std::size_t n = m.size();
  if (n == 0) return 1.0;
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  cplx total = 0.0;
  do {
    cplx p = 1.0;
    for (std::size_t i = 0; i < n; ++i) p *= m[i][static_cast<std::size_t>(perm[i])];
    total += p;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

void compositions(int total, int parts, std::vector<int>& cur, std::vector<std::array<int, 4>>& out) {
  if (parts == 1) {
    cur.push_back(total);
    std::array<int, 4> a{};
    for (int i = 0; i < 4; ++i) a[i] = cur[i];
    out.push_back(a);
    cur.pop_back();
    return;
  }
  for (int v = total; v >= 0; --v) {
    cur.push_back(v);
    compositions(total - v, parts - 1, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::string describe_lc_class(const StateVector& qubits) {
  const int n = static_cast<int>(qubits.specs().size());
  const int pairs = n * (n - 1) / 2;
  std::vector<std::uint64_t> keys;
  for (std::uint64_t k = 0; k < (std::uint64_t{1} << pairs); ++k) keys.push_back(k);
  std::stable_sort(keys.begin(), keys.end(),
                   [](std::uint64_t a, std::uint64_t b) { return __builtin_popcountll(a) < __builtin_popcountll(b); });
  for (std::uint64_t k : keys) {
    const Graph g = Graph::from_key(n, k);
    bool eq = false;
    try {
      eq = lu_equivalent_states(qubits, graph_to_statevector(g)).equivalent;
    } catch (const std::invalid_argument&) {
      return "non-stabilizer";
    }
    if (!eq) continue;
    // Describe connected components.
    std::vector<int> comp(static_cast<std::size_t>(n), -1);
    std::vector<std::string> parts;
    for (int v = 0; v < n; ++v) {
      if (comp[v] >= 0) continue;
      std::vector<int> members{v};
      comp[v] = v;
      for (std::size_t i = 0; i < members.size(); ++i) {
        for (int w : g.neighbors(members[i])) {
          if (comp[w] < 0) {
            comp[w] = v;
            members.push_back(w);
          }
        }
      }
      const int sz = static_cast<int>(members.size());
      if (sz == 1) {
        parts.emplace_back("single");
      } else if (sz == 2) {
        parts.emplace_back("edge");
      } else if (sz == 3) {
        parts.emplace_back("3-node");
      } else {
        std::sort(members.begin(), members.end());
        Graph sub(sz);
        for (int a = 0; a < sz; ++a) {
          for (int b = a + 1; b < sz; ++b) {
            if (g.has_edge(members[a], members[b])) sub.add_edge(a, b);
          }
        }
        if (lc_equivalent(sub, star_graph(sz)).equivalent) {
          parts.push_back("star" + std::to_string(sz));
        } else if (sz == 4) {
          parts.emplace_back("path4");
        } else {
          parts.push_back("connected" + std::to_string(sz));
        }
      }
    }
    std::sort(parts.begin(), parts.end());
    std::string out;
    for (const auto& p : parts) out += (out.empty() ? "" : "+") + p;
    return out;
  }
  return "non-stabilizer";
}

std::vector<ProductOutcome> enumerate_product_outcomes(const ModeUnitary& beta) {
  std::vector<SubsystemSpec> specs;
  for (int j = 1; j <= 4; ++j) specs.push_back(spectator(j));
  std::vector<ProductOutcome> out;
  for (int m = 0; m <= 4; ++m) {
    std::vector<std::array<int, 4>> patterns;
    std::vector<int> cur;
    compositions(m, 4, cur, patterns);
    for (const auto& n : patterns) {
      StateVector st(specs);
      double fact = 1.0;
      std::vector<int> rows;
      for (int k = 0; k < 4; ++k) {
        for (int c = 0; c < n[k]; ++c) {
          rows.push_back(k + 1);
          fact *= (c + 1);
        }
      }
      for (unsigned mask = 0; mask < 16; ++mask) {
        if (popcount4(mask) != m) continue;
        const auto cols = cavities_of(mask);
        std::vector<std::vector<cplx>> sub(static_cast<std::size_t>(m), std::vector<cplx>(static_cast<std::size_t>(m)));
        for (int r = 0; r < m; ++r) {
          for (int c = 0; c < m; ++c) sub[r][c] = beta(rows[r], cols[c]);
        }
        const cplx amp = permanent(sub) / std::sqrt(fact) * 0.25;
        std::size_t idx = 0;
        for (int j : cols) idx |= std::size_t{1} << (4 - j);
        st[idx] += amp;
      }
      const double p = st.norm_squared();
      if (p < 1e-15) continue;
      st.normalize();
      ProductOutcome po{n, p, st, describe_lc_class(st)};
      out.push_back(std::move(po));
    }
  }
  return out;
}

}  // namespace graphfuse
