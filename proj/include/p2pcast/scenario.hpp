#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "p2pcast/hopper.hpp"
#include "p2pcast/overlay.hpp"
#include "p2pcast/ratecast.hpp"

namespace p2pcast {

enum class MeasureMode { oracle, solver, noisy };
const char* to_string(MeasureMode m);

// Declarative run description; parsed from the line-oriented scenario file
// format documented in the README.
struct Scenario {
  std::string name = "run";

  // Exactly one graph source: a file, or a generator.
  std::string graph_file;
  std::string generator;  // "complete" | "fourconfig"
  int generator_nodes = 0;

  std::string capacity_rule = "unit";  // unit | uplink | list
  std::vector<double> capacity_list;
  double source_cap = 768.0;
  std::string bound_rule = "uniform";  // uniform | proportional
  int uniform_bound = 3;

  double beta = 10.0;
  double tau = 0.0;
  MeasureMode measure = MeasureMode::oracle;
  double noise_delta = 0.0;
  int noise_n = 1;

  long hops = 1000;
  long burnin = 0;
  std::uint64_t seed = 1;

  std::string initial = "random";  // random | full | pairs
  std::vector<NodePair> initial_pairs;
  std::vector<NodePair> mutable_pairs;  // empty = all potential pairs
  bool compare_baseline = false;
  int report_every = 1;
  std::string out_dir;  // default output directory; CLI --out overrides
  SolverConfig solver;

  void validate() const;
};

Scenario parse_scenario(std::istream& in);
Scenario load_scenario(const std::string& path);

// Scenario materialized into a concrete overlay: generated/loaded graph,
// pinned pairs and the initial configuration (seeded).
struct Instance {
  OverlayGraph graph;
  std::vector<NodePair> frozen_pairs;
  std::vector<NodePair> mutable_pairs;
  Configuration initial;
};

Instance build_instance(const Scenario& s);

// Degree bound for the proportional rule: two connections per 64 kbps.
int proportional_bound(double capacity_kbps);

struct RunReport {
  std::string name;
  std::string algorithm;  // "hopping" | "baseline"
  std::uint64_t seed = 0;
  double beta = 0.0;
  double tau = 0.0;
  std::string measure;
  long hops = 0;
  long burnin = 0;
  double horizon_time = 0.0;
  double mean_rate = 0.0;  // time-average achieved rate after burn-in
  double fullmesh = 0.0;
  int flagged_episodes = 0;  // non-converged solver probes
  std::optional<double> baseline_mean_rate;
  std::optional<double> tv_to_optimal;

  struct Sample {
    double t;
    double rate;          // source broadcast rate of the occupied config
    double mean_receive;  // mean receiver rate (equals rate in oracle mode)
    std::string config;
  };
  std::vector<Sample> series;

  std::vector<double> node_rates;  // receiving-rate snapshot per node

  struct Occupancy {
    std::string config;
    double fraction;
    std::optional<double> p_star;
  };
  std::vector<Occupancy> occupancy;  // sorted by config key

  std::vector<TransitionRecord> transitions;
};

// Two-timescale run: the rate algorithm (or oracle) supplies per-probe
// measurements, the hopper walks the configuration space.
RunReport run_scenario(const Scenario& s);

// Even-split heuristic with uniformly random neighbor swaps; degree bounds
// are deliberately not enforced for its hops.
RunReport run_baseline(const Scenario& s);

// Writes summary.json, cdf.csv, transitions.jsonl and the time series
// (timeseries.csv, or timeseries.json when format == "json") into out_dir.
// Returns the paths written. Byte-stable for identical reports.
std::vector<std::string> emit_report(const RunReport& r,
                                     const std::string& out_dir,
                                     const std::string& format = "csv");

std::string summary_json(const RunReport& r);
std::string transitions_jsonl(const RunReport& r);

}  // namespace p2pcast
