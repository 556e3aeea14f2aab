#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "graphfuse/detector.hpp"
#include "graphfuse/fusion.hpp"
#include "graphfuse/growth.hpp"
#include "graphfuse/jumpsim.hpp"
#include "graphfuse/parallel.hpp"
#include "graphfuse/planner.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace graphfuse;

namespace {

constexpr int kExitTolerance = 2;
constexpr int kExitConfig = 3;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string variant = "basic";
  std::string network;
  std::uint64_t seed = 1;
  long mc = 0;
  std::string grid = "0.05:11";
  double tol = 1e-9;
  std::string out = "gsf_out";
  std::string config;
  double omega = 1.0;
  double gamma = 4.0;
  double delta = 0.0;

  std::string axes = "omega1,omega2";
  bool fit = false;
  double fit_span = 0.02;
  int fit_points = 5;
  double fit_tol = 0.01;

  std::string script;
  double p_loss = 0.0;
  double dark_rate = 0.0;
  std::string resolving = "three_way";
  bool factory_detectors = false;

  std::string target = "path4";
  std::string order;
  bool degree_report = false;
  bool pregrown = false;

  std::vector<int> cluster{2, 3, 4, 5};
  bool constructive = false;

  double t_max = 3.0;
  double dt_max = 3.0;
  int nt = 31;
  int ndt = 31;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Options, variant, network, seed, mc, grid, tol, out, config, omega, gamma, delta,
                                   axes, fit, fit_span, fit_points, fit_tol, script, p_loss, dark_rate, resolving,
                                   factory_detectors, target, order, degree_report, pregrown, cluster, constructive,
                                   t_max, dt_max, nt, ndt)

void apply_config_file(Options& o) {
  if (o.config.empty()) return;
  std::ifstream in(o.config);
  if (!in) throw ConfigError("cannot read config file " + o.config);
  const json overrides = json::parse(in);
  if (!overrides.is_object()) throw ConfigError("config file must hold a JSON object");
  json merged = o;
  for (const auto& [key, value] : overrides.items()) {
    if (!merged.contains(key)) throw ConfigError("unknown config key: " + key);
    merged[key] = value;
  }
  const std::string path = o.config;
  o = merged.get<Options>();
  o.config = path;
}

ParamSet resolved_params(const Options& o) {
  ParamSet p;
  for (auto& s : p) s = SubsystemParams{o.delta, o.gamma, o.omega};
  return p;
}

ModeNetwork resolved_network(const Options& o) {
  if (!o.network.empty()) return load_network(o.network);
  return parse_variant(o.variant) == NetworkVariant::Basic ? basic_network() : shifter_network(1);
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

class Run {
 public:
  Run(std::string command, const Options& o) : command_(std::move(command)), opt_(o) {
    fs::create_directories(o.out);
  }

  void write(const std::string& name, const std::string& content) {
    std::ofstream(fs::path(opt_.out) / name) << content;
    outputs_.push_back(name);
  }

  void finish(const json& summary, int status) {
    json m{{"command", command_}, {"options", opt_}, {"seed", opt_.seed}, {"threads", worker_count()},
           {"outputs", outputs_}, {"summary", summary}, {"exit_code", status}};
    std::ofstream(fs::path(opt_.out) / "manifest.json") << m.dump(2) << '\n';
    std::cout << summary.dump(2) << '\n';
  }

 private:
  std::string command_;
  Options opt_;
  std::vector<std::string> outputs_;
};

std::string describe_state(const std::optional<StateVector>& s) {
  if (!s) return "";
  std::ostringstream os;
  bool first = true;
  for (int i = 0; i < 16; ++i) {
    const cplx a = (*s)[i];
    if (std::abs(a) < 1e-9) continue;
    if (!first) os << ' ';
    first = false;
    os << '(' << fmt(std::round(a.real() * 1e9) / 1e9) << (a.imag() < 0 ? "-" : "+") << fmt(std::abs(std::round(a.imag() * 1e9) / 1e9))
       << "i)|" << ((i >> 3) & 1) << ((i >> 2) & 1) << ((i >> 1) & 1) << (i & 1) << '>';
  }
  return os.str();
}

// Matched two-pair pattern for the basic network: same detector 1/8, detectors in the same pair 0, else 1/16.
double reference_probability(int k1, int k2) {
  if (k1 == k2) return 0.125;
  return (k1 - 1) / 2 == (k2 - 1) / 2 ? 0.0 : 0.0625;
}

int cmd_outcomes(const Options& o) {
  Run run("outcomes", o);
  const ModeUnitary beta = compose_network(resolved_network(o));
  const ParamSet params = resolved_params(o);
  const ExcitationModel model = epr_pair_model();
  const OutcomeStates refs = ideal_outcome_states(model, beta);
  const OutcomeTable t = outcome_table(model, beta, params);
  const bool basic = parse_variant(o.variant) == NetworkVariant::Basic && o.network.empty();

  std::array<long, 16> counts{};
  if (o.mc > 0) {
    std::vector<int> cell(static_cast<std::size_t>(o.mc), -1);
    parallel_for(cell.size(), [&](std::size_t i) {
      CounterRng rng(o.seed, i);
      const DetectionRecord r = two_click_record(sample_trajectory(model, beta, params, rng));
      cell[i] = (r.first.detector - 1) * 4 + (r.second.detector - 1);
    });
    for (int c : cell) ++counts[c];
  }

  std::ostringstream csv;
  csv << "k1,k2,probability,reference,abs_diff";
  if (o.mc > 0) csv << ",mc_probability,mc_sigma,mc_z";
  csv << ",lc_class,state\n";
  double max_diff = 0.0;
  double max_z = 0.0;
  double same_total = 0.0;
  double total = 0.0;
  bool mc_ok = true;
  for (int k1 = 1; k1 <= 4; ++k1) {
    for (int k2 = 1; k2 <= 4; ++k2) {
      const double p = t.probability[k1 - 1][k2 - 1];
      total += p;
      if (k1 == k2) same_total += p;
      const double ref = reference_probability(k1, k2);
      const double diff = std::abs(p - ref);
      if (basic) max_diff = std::max(max_diff, diff);
      csv << k1 << ',' << k2 << ',' << fmt(p) << ',' << (basic ? fmt(ref) : "") << ',' << (basic ? fmt(diff) : "");
      if (o.mc > 0) {
        const double n = static_cast<double>(o.mc);
        const double phat = counts[(k1 - 1) * 4 + (k2 - 1)] / n;
        const double sigma = std::sqrt(p * (1.0 - p) / n);
        double z = 0.0;
        if (sigma > 0.0) {
          z = (phat - p) / sigma;
        } else if (phat > 0.0) {
          mc_ok = false;
        }
        max_z = std::max(max_z, std::abs(z));
        csv << ',' << fmt(phat) << ',' << fmt(sigma) << ',' << fmt(z);
      }
      const auto& st = refs[k1 - 1][k2 - 1];
      csv << ',' << (st ? describe_lc_class(*st) : "") << ',' << describe_state(st) << '\n';
    }
  }
  run.write("outcomes.csv", csv.str());
  mc_ok = mc_ok && max_z <= 3.0;
  const bool ok = (!basic || max_diff <= o.tol) && mc_ok;
  json summary{{"variant", o.variant}, {"total_probability", total}, {"same_detector_total", same_total},
               {"quadrature_error", t.quadrature_error}, {"ok", ok}};
  if (basic) summary["max_abs_diff"] = max_diff;
  if (o.mc > 0) summary["mc_max_abs_z"] = max_z;
  const int status = ok ? 0 : kExitTolerance;
  run.finish(summary, status);
  return status;
}

std::pair<int, int> parse_axis_name(const std::string& s) {
  static const std::array<std::string, 3> names{"delta", "gamma", "omega"};
  for (int c = 0; c < 3; ++c) {
    if (s.rfind(names[c], 0) == 0 && s.size() == names[c].size() + 1) {
      const int cavity = s.back() - '0';
      if (cavity >= 1 && cavity <= 4) return {c, cavity};
    }
  }
  throw ConfigError("bad scan axis: " + s + " (expected e.g. omega1, gamma2)");
}

std::pair<double, int> parse_grid(const std::string& g) {
  const auto colon = g.find(':');
  if (colon == std::string::npos) throw ConfigError("grid must be span:points");
  const double span = std::stod(g.substr(0, colon));
  const int points = std::stoi(g.substr(colon + 1));
  if (!(span > 0.0) || points < 2) throw ConfigError("grid needs a positive span and at least two points");
  return {span, points};
}

json matrix_json(const Eigen::Matrix3d& m) {
  json j = json::array();
  for (int r = 0; r < 3; ++r) j.push_back({m(r, 0), m(r, 1), m(r, 2)});
  return j;
}

int cmd_fidelity_scan(const Options& o) {
  Run run("fidelity-scan", o);
  const ModeUnitary beta = compose_network(resolved_network(o));
  const ParamSet base = resolved_params(o);
  const ExcitationModel model = epr_pair_model();

  const auto comma = o.axes.find(',');
  if (comma == std::string::npos) throw ConfigError("axes must be two comma-separated names");
  const auto ax = parse_axis_name(o.axes.substr(0, comma));
  const auto ay = parse_axis_name(o.axes.substr(comma + 1));
  const auto [span, points] = parse_grid(o.grid);

  std::vector<ScanPoint> grid;
  std::vector<std::pair<double, double>> xy;
  for (int i = 0; i < points; ++i) {
    for (int j = 0; j < points; ++j) {
      const double x = -span + 2.0 * span * i / (points - 1);
      const double y = -span + 2.0 * span * j / (points - 1);
      ScanPoint p;
      p.eps[ax.second - 1][ax.first] += x;
      p.eps[ay.second - 1][ay.first] += y;
      grid.push_back(p);
      xy.push_back({x, y});
    }
  }
  evaluate_scan(grid, model, beta, base);
  std::ostringstream csv;
  csv << o.axes.substr(0, comma) << ',' << o.axes.substr(comma + 1) << ",fidelity,infidelity\n";
  double f_min = 1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    csv << fmt(xy[i].first) << ',' << fmt(xy[i].second) << ',' << fmt(grid[i].fidelity) << ','
        << fmt(1.0 - grid[i].fidelity) << '\n';
    f_min = std::min(f_min, grid[i].fidelity);
  }
  run.write("scan.csv", csv.str());
  json levels = json::array();
  for (double level = 1.0 - 1e-4; level > f_min; level -= 1e-3) levels.push_back(level);
  run.write("contours.json", json{{"levels", levels}, {"axes", o.axes}}.dump(2) + "\n");

  json summary{{"points", grid.size()}, {"min_fidelity", f_min}};
  int status = 0;
  if (o.fit) {
    std::vector<ScanPoint> fg = fit_grid(o.fit_span, o.fit_points, 2);
    evaluate_scan(fg, model, beta, base);
    const FitResult fr = fit_error_quadratic(fg);
    Eigen::Matrix3d ms_ref;
    ms_ref << 5.0 / 128, 0, 0, 0, 3.0 / 32, -3.0 / 16, 0, -3.0 / 16, 9.0 / 16;
    Eigen::Matrix3d mx_ref;
    mx_ref << -3.0 / 128, 0, 0, 0, -1.0 / 32, 1.0 / 16, 0, 1.0 / 16, -3.0 / 16;
    bool ok = true;
    const auto check = [&](const Eigen::Matrix3d& got, const Eigen::Matrix3d& ref) {
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
          const double err = std::abs(got(r, c) - ref(r, c));
          ok = ok && (ref(r, c) == 0.0 ? err <= 1e-4 : err <= o.fit_tol * std::abs(ref(r, c)));
        }
      }
    };
    check(fr.ms, ms_ref);
    check(fr.mx, mx_ref);
    const json fit{{"ms", matrix_json(fr.ms)},           {"mx", matrix_json(fr.mx)},
                   {"ms_reference", matrix_json(ms_ref)}, {"mx_reference", matrix_json(mx_ref)},
                   {"residual_rms", fr.residual_rms},     {"residual_max", fr.residual_max},
                   {"points", fr.points},                 {"quadratic_regime", fr.quadratic_regime},
                   {"within_tolerance", ok}};
    run.write("fit.json", fit.dump(2) + "\n");
    summary["fit"] = fit;
    if (!ok) status = kExitTolerance;
  }
  run.finish(summary, status);
  return status;
}

int cmd_grow(const Options& o) {
  if (o.script.empty()) throw ConfigError("grow needs --script");
  std::ifstream in(o.script);
  if (!in) throw ConfigError("cannot read script " + o.script);
  const GrowthScript script = parse_script(json::parse(in));
  Run run("grow", o);
  SessionConfig cfg;
  cfg.params = resolved_params(o);
  if (!o.network.empty()) cfg.basic = load_network(o.network);
  cfg.detector.p_loss = o.p_loss;
  cfg.detector.dark_rate = o.dark_rate;
  cfg.detector.resolving = parse_resolving(o.resolving);
  cfg.factory_detectors = o.factory_detectors;
  cfg.seed = o.seed;
  cfg.detector.validate();

  GrowthSession session(script.qubits, cfg);
  session.run(script);
  const Graph predicted = predict_script_graph(script, cfg);
  const std::optional<Graph> expect = script.expect ? script.expect : std::optional<Graph>(predicted);
  const SessionVerdict v = verify_session(session.state(), expect);
  const Graph final_graph = present_subgraph(session.state());
  const bool matches_prediction = lc_equivalent(final_graph, predicted).equivalent;

  run.write("session.jsonl", session.log_jsonl());
  run.write("final_state.json", rep_to_json(session.state()).dump(2) + "\n");
  run.write("final_graph.dot", graph_to_dot(session.state().graph, session.state().present, "grown"));
  const SessionStats& st = session.stats();
  const json stats{{"fusion_attempts", st.fusion_attempts}, {"accepted", st.accepted},
                   {"corrupted", st.corrupted},             {"loss_resets", st.loss_resets},
                   {"dark_rejects", st.dark_rejects},       {"inconsistent_rejects", st.inconsistent_rejects},
                   {"factory_attempts", st.factory_attempts}, {"local_unitaries", st.local_unitaries}};
  const bool ok = v.lc_matches_expectation && v.state_is_lc_graph && matches_prediction;
  const json verdict{{"lc_matches_expectation", v.lc_matches_expectation},
                     {"state_is_lc_graph", v.state_is_lc_graph},
                     {"dense_checked", v.dense_checked},
                     {"matches_prediction", matches_prediction},
                     {"predicted_graph", graph_to_json(predicted)},
                     {"final_graph", graph_to_json(final_graph)},
                     {"stats", stats},
                     {"ok", ok}};
  run.write("verdict.json", verdict.dump(2) + "\n");
  const int status = ok ? 0 : kExitTolerance;
  run.finish(verdict, status);
  return status;
}

Graph named_target(const std::string& name) {
  const auto number = [&](const std::string& prefix) { return std::stoi(name.substr(prefix.size())); };
  if (name.rfind("path", 0) == 0) return path_graph(number("path"));
  if (name.rfind("star", 0) == 0) return star_graph(number("star"));
  if (name.rfind("complete", 0) == 0) return complete_graph(number("complete"));
  if (name.rfind("cluster", 0) == 0) {
    const std::string rest = name.substr(7);
    const auto x = rest.find('x');
    if (x == std::string::npos) return cluster_graph(std::stoi(rest), std::stoi(rest));
    return cluster_graph(std::stoi(rest.substr(0, x)), std::stoi(rest.substr(x + 1)));
  }
  std::ifstream in(name);
  if (!in) throw ConfigError("unknown target: " + name);
  return graph_from_json(json::parse(in));
}

int cmd_plan(const Options& o) {
  const Graph target = named_target(o.target);
  MeasurementOrder order = default_order(target.size());
  if (!o.order.empty()) {
    std::ifstream in(o.order);
    if (!in) throw ConfigError("cannot read order " + o.order);
    order = order_from_json(json::parse(in));
  }
  Run run("plan", o);
  const GrowthPlan plan = o.pregrown ? pregrown_schedule(target, order) : jit_schedule(target, order);
  const ScheduleCheck check = verify_schedule(plan, target, order);
  run.write("plan.json", plan_to_json(plan).dump(2) + "\n");
  run.write("target.dot", graph_to_dot(target, {}, "target"));
  json summary{{"vertices", target.size()},
               {"edges", target.edge_count()},
               {"steps", plan.steps.size()},
               {"peak_qubits", qubit_recycling_estimate(plan)},
               {"valid", check.ok}};
  if (!check.ok) {
    summary["violation"] = check.reason;
    if (check.edge) summary["violating_edge"] = {check.edge->first, check.edge->second};
  }
  if (o.degree_report) {
    const DegreeResult d = min_max_degree_over_orbit(target);
    summary["degree_report"] = {{"max_degree", target.max_degree()},
                                {"min_max_degree_over_orbit", d.min_max_degree},
                                {"witness", graph_to_json(d.argmin)},
                                {"complete", d.complete}};
  }
  const int status = check.ok ? 0 : kExitTolerance;
  run.finish(summary, status);
  return status;
}

int cmd_resources(const Options& o) {
  Run run("resources", o);
  std::ostringstream csv;
  csv << "n,nShifter,nBasic,nEPR,peakQubits";
  if (o.constructive) csv << ",counted_shifter,counted_basic,lattice_matches,local_unitaries";
  csv << '\n';
  json rows = json::array();
  bool ok = true;
  for (int n : o.cluster) {
    const ResourceCount r = cluster_resources(n);
    const int peak = qubit_recycling_estimate(jit_schedule(cluster_graph(n, n), default_order(n * n)));
    csv << n << ',' << r.n_shifter << ',' << r.n_basic << ',' << r.n_epr << ',' << peak;
    json row{{"n", n}, {"nShifter", r.n_shifter}, {"nBasic", r.n_basic}, {"nEPR", r.n_epr}, {"peakQubits", peak}};
    if (o.constructive) {
      const ClusterAssembly a = assemble_cluster(n);
      const bool match = a.lattice == a.expected;
      csv << ',' << a.counted.n_shifter << ',' << a.counted.n_basic << ',' << (match ? 1 : 0) << ','
          << a.local_unitaries;
      row["counted_shifter"] = a.counted.n_shifter;
      row["counted_basic"] = a.counted.n_basic;
      ok = ok && match && a.counted.n_shifter == r.n_shifter && a.counted.n_basic == r.n_basic;
    }
    csv << '\n';
    rows.push_back(row);
  }
  run.write("resources.csv", csv.str());
  std::ostringstream ref;
  ref << "name,expression,note\n";
  for (const auto& c : reference_constants()) ref << c.name << ',' << c.expression << ',' << c.note << '\n';
  run.write("reference_constants.csv", ref.str());
  const ResourceCount cb = cross_block();
  const json summary{{"rows", rows},
                     {"cross_block", {{"nEPR", cb.n_epr}, {"nShifter", cb.n_shifter}, {"nBasic", cb.n_basic}}},
                     {"ok", ok}};
  const int status = ok ? 0 : kExitTolerance;
  run.finish(summary, status);
  return status;
}

int cmd_density(const Options& o) {
  Run run("density", o);
  const ModeUnitary beta = compose_network(resolved_network(o));
  const ParamSet params = resolved_params(o);
  const ExcitationModel model = epr_pair_model();
  const DensityGrid d = two_photon_delay_density(model, beta, params, o.t_max, o.dt_max, o.nt, o.ndt);
  std::ostringstream csv;
  csv << "t1,dt,density\n";
  for (std::size_t i = 0; i < d.t.size(); ++i) {
    for (std::size_t j = 0; j < d.dt.size(); ++j) {
      csv << fmt(d.t[i]) << ',' << fmt(d.dt[j]) << ',' << fmt(d.p[i * d.dt.size() + j]) << '\n';
    }
  }
  run.write("density.csv", csv.str());
  const json summary{{"mean_delay", mean_photon_delay(model, beta, params)},
                     {"total_two_click_probability", total_two_click_probability(model, beta, params)}};
  run.finish(summary, 0);
  return 0;
}

int cmd_products(const Options& o) {
  Run run("products", o);
  const ModeUnitary beta = compose_network(resolved_network(o));
  std::ostringstream csv;
  csv << "n1,n2,n3,n4,probability,lc_class\n";
  double total = 0.0;
  for (const ProductOutcome& p : enumerate_product_outcomes(beta)) {
    csv << p.counts[0] << ',' << p.counts[1] << ',' << p.counts[2] << ',' << p.counts[3] << ',' << fmt(p.probability)
        << ',' << p.lc_class << '\n';
    total += p.probability;
  }
  run.write("products.csv", csv.str());
  run.finish(json{{"total_probability", total}}, 0);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph-state fusion simulator"};
  app.require_subcommand(1);
  Options o;
  const auto common = [&](CLI::App* sub) {
    sub->add_option("--variant", o.variant, "network variant: basic or shifter")
        ->check(CLI::IsMember({"basic", "shifter"}));
    sub->add_option("--network", o.network, "network JSON file (overrides --variant)");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--tol", o.tol, "absolute tolerance for reference comparisons");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--config", o.config, "JSON file whose keys override flags");
    sub->add_option("--omega", o.omega, "baseline drive strength");
    sub->add_option("--gamma", o.gamma, "baseline decay rate");
    sub->add_option("--delta", o.delta, "baseline detuning");
  };

  auto* outcomes = app.add_subcommand("outcomes", "two-pair outcome probabilities and states");
  common(outcomes);
  outcomes->add_option("--mc", o.mc, "Monte Carlo trajectories");

  auto* scan = app.add_subcommand("fidelity-scan", "fidelity grid over two error components");
  common(scan);
  scan->add_option("--axes", o.axes, "two components such as omega1,omega2 or omega1,gamma2");
  scan->add_option("--grid", o.grid, "span:points");
  scan->add_flag("--fit", o.fit, "fit the error matrices");
  scan->add_option("--fit-span", o.fit_span, "fit perturbation span");
  scan->add_option("--fit-points", o.fit_points, "fit points per axis");
  scan->add_option("--fit-tol", o.fit_tol, "relative tolerance on fitted entries");

  auto* grow = app.add_subcommand("grow", "run a growth script");
  common(grow);
  grow->add_option("--script", o.script, "script JSON file");
  grow->add_option("--p-loss", o.p_loss, "photon loss probability");
  grow->add_option("--dark-rate", o.dark_rate, "dark count rate per detector");
  grow->add_option("--resolving", o.resolving, "none, three_way or pockels");
  grow->add_flag("--factory-detectors", o.factory_detectors, "apply the detector model to factory heralds");

  auto* plan = app.add_subcommand("plan", "growth schedule for a target graph");
  common(plan);
  plan->add_option("--target", o.target, "pathN, starN, completeN, clusterN, clusterRxC or a graph JSON file");
  plan->add_option("--order", o.order, "measurement order JSON file");
  plan->add_flag("--degree-report", o.degree_report, "minimum maximal degree over the LC orbit");
  plan->add_flag("--pregrown", o.pregrown, "create everything before measuring");

  auto* res = app.add_subcommand("resources", "cluster resource counts");
  common(res);
  res->add_option("--cluster", o.cluster, "lattice sides");
  res->add_flag("--constructive", o.constructive, "also count fusions in an assembled cluster");

  auto* dens = app.add_subcommand("density", "two-photon delay density grid");
  common(dens);
  dens->add_option("--t-max", o.t_max, "first-click time range");
  dens->add_option("--dt-max", o.dt_max, "delay range");
  dens->add_option("--nt", o.nt, "first-click grid points");
  dens->add_option("--ndt", o.ndt, "delay grid points");

  auto* prod = app.add_subcommand("products", "product-state input outcomes");
  common(prod);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    apply_config_file(o);
    if (*outcomes) return cmd_outcomes(o);
    if (*scan) return cmd_fidelity_scan(o);
    if (*grow) return cmd_grow(o);
    if (*plan) return cmd_plan(o);
    if (*res) return cmd_resources(o);
    if (*dens) return cmd_density(o);
    if (*prod) return cmd_products(o);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const json::exception& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const PlanError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
