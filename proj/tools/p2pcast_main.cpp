#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "p2pcast/analysis.hpp"
#include "p2pcast/oracle.hpp"
#include "p2pcast/ratecast.hpp"
#include "p2pcast/scenario.hpp"
#include "p2pcast/settings.hpp"

using nlohmann::json;
using namespace p2pcast;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out = "out";
  bool out_set = false;
  std::string format = "csv";
};

Scenario scenario_for(const std::string& path, const GlobalOpts& g) {
  Scenario s = load_scenario(path);
  if (g.seed_set) s.seed = g.seed;
  return s;
}

OverlayGraph graph_for(const std::string& graph_file, bool fourconfig) {
  if (fourconfig) return fourconfig_instance().graph;
  if (graph_file.empty())
    throw std::runtime_error("need --graph <file> or --fourconfig");
  return load_graph(graph_file);
}

Configuration config_for(const OverlayGraph& g, const std::string& pairs_arg,
                         bool full) {
  if (full) return Configuration::make(g, g.potential_pairs());
  std::vector<NodePair> pairs;
  std::istringstream ss(pairs_arg);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos)
      throw std::runtime_error("bad pair '" + item + "', expected a-b");
    pairs.push_back(normalized_pair(std::stoi(item.substr(0, dash)),
                                    std::stoi(item.substr(dash + 1))));
  }
  return Configuration::make(g, std::move(pairs));
}

int cmd_rate(const std::string& graph_file, bool fourconfig,
             const std::string& pairs_arg, bool full, bool with_oracle,
             const std::string& trace_path, int trace_every,
             const GlobalOpts& opts) {
  OverlayGraph g = graph_for(graph_file, fourconfig);
  Configuration f = fourconfig && full && pairs_arg.empty()
                        ? fourconfig_instance().full()
                        : config_for(g, pairs_arg, full);
  SolverConfig sc;
  sc.trace_every = trace_every;
  const RateResult r = solve_rate(g, f, sc);

  json out;
  out["rate"] = r.rate;
  out["converged"] = r.converged;
  out["disconnected"] = r.disconnected;
  out["iterations"] = r.iters;
  out["config"] = f.key();
  if (with_oracle) {
    const double exact = solve_mp(g, f);
    out["oracle_rate"] = exact;
    out["relative_error"] =
        exact > 0.0 ? std::abs(r.rate - exact) / exact : std::abs(r.rate);
  }
  if (!trace_path.empty()) {
    std::ofstream ts(trace_path, std::ios::binary);
    if (!ts) throw std::runtime_error("cannot write " + trace_path);
    write_trace_csv(r, ts);
    out["trace"] = trace_path;
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_run(const std::string& scenario_path, bool baseline,
            const GlobalOpts& opts) {
  const Scenario s = scenario_for(scenario_path, opts);
  const RunReport rep = baseline ? run_baseline(s) : run_scenario(s);
  const std::string out_dir =
      !opts.out_set && !s.out_dir.empty() ? s.out_dir : opts.out;
  const auto files = emit_report(rep, out_dir, opts.format);
  json out;
  out["mean_rate"] = rep.mean_rate;
  out["fullmesh_rate"] = rep.fullmesh;
  if (rep.baseline_mean_rate) out["baseline_mean_rate"] = *rep.baseline_mean_rate;
  if (rep.tv_to_optimal) out["tv_to_optimal"] = *rep.tv_to_optimal;
  out["files"] = files;
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_enumerate(const std::string& graph_file, bool fourconfig,
                  bool with_rates, const GlobalOpts& opts) {
  std::vector<Configuration> space;
  std::optional<OverlayGraph> g;
  if (fourconfig) {
    const FourConfigInstance fc = fourconfig_instance();
    g = fc.graph;
    space = fc.space();
  } else {
    g = graph_for(graph_file, false);
    space = enumerate_configurations(*g);
  }

  std::filesystem::create_directories(opts.out);
  const std::string path = opts.out + "/configurations.csv";
  std::ofstream out(path, std::ios::binary);
  out << (with_rates ? "id,pairs,rate\n" : "id,pairs\n");
  for (std::size_t i = 0; i < space.size(); ++i) {
    out << i << ",\"" << space[i].key() << "\"";
    if (with_rates) out << "," << solve_mp(*g, space[i]);
    out << "\n";
  }
  json summary;
  summary["configurations"] = space.size();
  summary["file"] = path;
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_analyze(const std::string& scenario_path,
                const std::string& empirical_path, const GlobalOpts& opts) {
  const Scenario s = scenario_for(scenario_path, opts);
  const Instance inst = build_instance(s);
  const auto space = enumerate_configurations(inst.graph, inst.frozen_pairs,
                                              inst.mutable_pairs);
  Eigen::VectorXd x(space.size());
  for (std::size_t i = 0; i < space.size(); ++i)
    x[static_cast<int>(i)] = solve_mp(inst.graph, space[i]);

  const DistributionVector p_star = optimal_distribution(x, s.beta);
  NoiseModel noise =
      s.measure == MeasureMode::noisy
          ? uniform_noise(static_cast<int>(space.size()), s.noise_delta,
                          s.noise_n)
          : zero_noise(static_cast<int>(space.size()));
  const ExtendedStationary st = stationary_extended(x, noise, s.beta);
  const NoiseImpact ni = noise_impact_bounds(x, noise, s.beta);

  // occupancy from a previous run's summary.json, keyed by configuration
  std::map<std::string, double> empirical;
  if (!empirical_path.empty()) {
    std::ifstream in(empirical_path);
    if (!in) throw std::runtime_error("cannot open " + empirical_path);
    const json summary = json::parse(in);
    for (const auto& row : summary.at("occupancy"))
      empirical[row.at("config").get<std::string>()] =
          row.at("fraction").get<double>();
  }

  std::filesystem::create_directories(opts.out);
  const std::string path = opts.out + "/distributions.csv";
  std::ofstream out(path, std::ios::binary);
  out << "config_id,config,rate,p_star,p_bar,empirical\n";
  char buf[192];
  for (std::size_t i = 0; i < space.size(); ++i) {
    const auto it = empirical.find(space[i].key());
    std::snprintf(buf, sizeof(buf), "%zu,\"%s\",%.10g,%.10g,%.10g,%.10g\n", i,
                  space[i].key().c_str(), x[static_cast<int>(i)],
                  p_star.probs[static_cast<int>(i)],
                  st.p_bar[static_cast<int>(i)],
                  it == empirical.end() ? 0.0 : it->second);
    out << buf;
  }

  json summary;
  summary["configurations"] = space.size();
  summary["beta"] = s.beta;
  summary["log_sum_exp_rate"] = log_sum_exp_rate(x, s.beta);
  summary["max_rate"] = x.maxCoeff();
  summary["expected_rate_p_star"] = p_star.probs.dot(x);
  summary["expected_rate_p_bar"] = st.p_bar.dot(x);
  summary["tv_bound"] = ni.tv_bound;
  summary["tv_actual"] = ni.tv_actual;
  summary["rate_gap_bound"] = ni.rate_gap_bound;
  summary["rate_gap_actual"] = ni.rate_gap_actual;
  summary["file"] = path;
  std::cout << summary.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Degree-bounded peer-to-peer broadcast simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts opts;
  app.add_option("--seed", opts.seed, "override the scenario seed")
      ->each([&](const std::string&) { opts.seed_set = true; });
  app.add_option("--out", opts.out, "output directory")
      ->each([&](const std::string&) { opts.out_set = true; });
  app.add_option("--format", opts.format, "report format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  std::string graph_file, pairs_arg, scenario_path, trace_path;
  bool fourconfig = false, full = false, with_oracle = false,
       with_rates = false;
  int trace_every = 100;

  auto* rate = app.add_subcommand("rate", "solve one configuration's rate");
  rate->add_option("--graph", graph_file, "overlay graph file");
  rate->add_flag("--fourconfig", fourconfig, "use the built-in 5-node demo");
  rate->add_option("--pairs", pairs_arg, "in-use pairs, e.g. 0-1,1-2");
  rate->add_flag("--full", full, "use every potential pair");
  rate->add_flag("--oracle", with_oracle, "also report the LP rate");
  rate->add_option("--trace", trace_path, "write the z trace CSV here");
  rate->add_option("--trace-every", trace_every, "trace row thinning");

  auto* hop = app.add_subcommand("hop", "full two-timescale run");
  hop->add_option("scenario", scenario_path, "scenario file")->required();

  auto* base = app.add_subcommand("baseline", "heuristic baseline run");
  base->add_option("scenario", scenario_path, "scenario file")->required();

  std::string empirical_path;
  auto* analyze = app.add_subcommand(
      "analyze", "closed-form distributions and noise bounds");
  analyze->add_option("scenario", scenario_path, "scenario file")->required();
  analyze->add_option("--empirical", empirical_path,
                      "merge occupancy from a run's summary.json");

  auto* enumerate =
      app.add_subcommand("enumerate", "list feasible configurations");
  enumerate->add_option("--graph", graph_file, "overlay graph file");
  enumerate->add_flag("--fourconfig", fourconfig,
                      "use the built-in 5-node demo");
  enumerate->add_flag("--rates", with_rates, "include LP rates");

  CLI11_PARSE(app, argc, argv);

  try {
    if (rate->parsed())
      return cmd_rate(graph_file, fourconfig, pairs_arg, full, with_oracle,
                      trace_path, trace_every, opts);
    if (hop->parsed()) return cmd_run(scenario_path, false, opts);
    if (base->parsed()) return cmd_run(scenario_path, true, opts);
    if (analyze->parsed())
      return cmd_analyze(scenario_path, empirical_path, opts);
    if (enumerate->parsed())
      return cmd_enumerate(graph_file, fourconfig, with_rates, opts);
  } catch (const std::exception& e) {
    std::cerr << json{{"error", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}
