#include "p2pcast/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "p2pcast/analysis.hpp"
#include "p2pcast/oracle.hpp"
#include "p2pcast/settings.hpp"

namespace p2pcast {

using nlohmann::json;

const char* to_string(MeasureMode m) {
  switch (m) {
    case MeasureMode::oracle:
      return "oracle";
    case MeasureMode::solver:
      return "solver";
    default:
      return "noisy";
  }
}

void Scenario::validate() const {
  const bool has_file = !graph_file.empty();
  const bool has_gen = !generator.empty();
  if (has_file == has_gen)
    throw std::invalid_argument("scenario needs exactly one graph source");
  if (has_gen && generator != "complete" && generator != "fourconfig")
    throw std::invalid_argument("unknown generator '" + generator + "'");
  if (generator == "complete" && generator_nodes < 2)
    throw std::invalid_argument("complete generator needs >= 2 nodes");
  if (beta <= 0.0) throw std::invalid_argument("beta must be positive");
  if (hops < 0) throw std::invalid_argument("negative hop count");
  if (burnin < 0 || burnin > hops)
    throw std::invalid_argument("burnin must lie within the hop horizon");
  if (hops == 0 && solver.max_iters <= 0)
    throw std::invalid_argument("degenerate scenario needs solver iterations");
  if (measure == MeasureMode::noisy && (noise_delta < 0.0 || noise_n < 1))
    throw std::invalid_argument("bad noise parameters");
  if (report_every < 1) throw std::invalid_argument("report_every must be >= 1");
}

namespace {

std::vector<NodePair> parse_pair_list(const std::string& text) {
  std::vector<NodePair> pairs;
  std::istringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto dash = item.find('-');
    if (dash == std::string::npos)
      throw std::invalid_argument("bad pair '" + item + "', expected a-b");
    pairs.push_back(normalized_pair(std::stoi(item.substr(0, dash)),
                                    std::stoi(item.substr(dash + 1))));
  }
  return pairs;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

Scenario parse_scenario(std::istream& in) {
  Scenario s;
  std::string line;
  int lineno = 0;
  bool have_graph = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key) || key[0] == '#') continue;
    const auto fail = [&](const std::string& why) {
      throw std::runtime_error("scenario line " + std::to_string(lineno) +
                               ": " + why);
    };
    if (key == "name") {
      ls >> s.name;
    } else if (key == "graph") {
      if (have_graph) fail("graph specified twice");
      have_graph = true;
      std::string kind;
      ls >> kind;
      if (kind == "file") {
        ls >> s.graph_file;
        if (s.graph_file.empty()) fail("graph file path missing");
      } else if (kind == "complete") {
        s.generator = "complete";
        if (!(ls >> s.generator_nodes)) fail("complete needs a node count");
      } else if (kind == "fourconfig") {
        s.generator = "fourconfig";
      } else {
        fail("unknown graph source '" + kind + "'");
      }
    } else if (key == "capacities") {
      ls >> s.capacity_rule;
      if (s.capacity_rule == "list") {
        std::string rest;
        ls >> rest;
        s.capacity_list.clear();
        std::istringstream vs(rest);
        std::string v;
        while (std::getline(vs, v, ',')) s.capacity_list.push_back(std::stod(v));
      } else if (s.capacity_rule != "unit" && s.capacity_rule != "uplink") {
        fail("capacities must be unit | uplink | list");
      }
    } else if (key == "source_cap") {
      ls >> s.source_cap;
    } else if (key == "bound") {
      ls >> s.bound_rule;
      if (s.bound_rule == "uniform") {
        if (!(ls >> s.uniform_bound)) fail("uniform bound needs a value");
      } else if (s.bound_rule != "proportional") {
        fail("bound must be uniform <k> | proportional");
      }
    } else if (key == "beta") {
      ls >> s.beta;
    } else if (key == "tau") {
      ls >> s.tau;
    } else if (key == "measure") {
      std::string mode;
      ls >> mode;
      if (mode == "oracle") {
        s.measure = MeasureMode::oracle;
      } else if (mode == "solver") {
        s.measure = MeasureMode::solver;
      } else if (mode == "noisy") {
        s.measure = MeasureMode::noisy;
        if (!(ls >> s.noise_delta >> s.noise_n))
          fail("noisy needs <delta> <n>");
      } else {
        fail("measure must be oracle | solver | noisy");
      }
    } else if (key == "hops") {
      ls >> s.hops;
    } else if (key == "burnin") {
      ls >> s.burnin;
    } else if (key == "seed") {
      ls >> s.seed;
    } else if (key == "initial") {
      ls >> s.initial;
      if (s.initial == "pairs") {
        std::string rest;
        ls >> rest;
        s.initial_pairs = parse_pair_list(rest);
      } else if (s.initial != "random" && s.initial != "full") {
        fail("initial must be random | full | pairs <list>");
      }
    } else if (key == "mutable") {
      std::string rest;
      ls >> rest;
      s.mutable_pairs = parse_pair_list(rest);
    } else if (key == "compare_baseline") {
      int flag = 0;
      ls >> flag;
      s.compare_baseline = flag != 0;
    } else if (key == "report_every") {
      ls >> s.report_every;
    } else if (key == "out") {
      ls >> s.out_dir;
    } else if (key == "solver_max_iters") {
      ls >> s.solver.max_iters;
    } else if (key == "solver_window") {
      ls >> s.solver.window;
    } else if (key == "solver_tol") {
      ls >> s.solver.conv_tol;
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  return parse_scenario(in);
}

int proportional_bound(double capacity_kbps) {
  return std::max(1, static_cast<int>(std::lround(2.0 * capacity_kbps / 64.0)));
}

namespace {

Configuration random_initial(const OverlayGraph& g,
                             const std::vector<NodePair>& frozen,
                             const std::vector<NodePair>& mutable_pairs,
                             Rng& rng) {
  std::vector<NodePair> order = mutable_pairs;
  for (std::size_t i = order.size(); i > 1; --i)
    std::swap(order[i - 1], order[rng.next_below(i)]);

  std::vector<int> degree(g.node_count(), 0);
  auto pairs = frozen;
  for (const auto& [u, v] : frozen) {
    ++degree[u];
    ++degree[v];
  }
  for (const auto& [u, v] : order) {
    if (degree[u] >= g.degree_bound(u) || degree[v] >= g.degree_bound(v))
      continue;
    pairs.emplace_back(u, v);
    ++degree[u];
    ++degree[v];
  }
  return Configuration::make(g, std::move(pairs));
}

}  // namespace

Instance build_instance(const Scenario& s) {
  s.validate();
  Rng rng(s.seed);
  Rng cap_rng = rng.fork();
  Rng init_rng = rng.fork();

  if (s.generator == "fourconfig") {
    FourConfigInstance fc = fourconfig_instance();
    auto mut = s.mutable_pairs.empty() ? fc.mutable_pairs : s.mutable_pairs;
    Configuration initial =
        s.initial == "full"
            ? fc.full()
            : (s.initial == "pairs"
                   ? Configuration::make(fc.graph, s.initial_pairs)
                   : random_initial(fc.graph, fc.frozen_pairs, mut, init_rng));
    return Instance{std::move(fc.graph), std::move(fc.frozen_pairs),
                    std::move(mut), std::move(initial)};
  }

  std::optional<OverlayGraph> graph;
  if (!s.graph_file.empty()) {
    graph = load_graph(s.graph_file);
  } else {
    const int n = s.generator_nodes;
    std::vector<double> caps(n, 1.0);
    if (s.capacity_rule == "uplink") {
      const auto drawn =
          sample_capacities(measured_uplink_profile(), n - 1, cap_rng.next_u64());
      caps[0] = s.source_cap;
      for (int i = 1; i < n; ++i) caps[i] = drawn[i - 1];
    } else if (s.capacity_rule == "list") {
      if (static_cast<int>(s.capacity_list.size()) != n)
        throw std::invalid_argument("capacity list size != node count");
      caps = s.capacity_list;
    }
    std::vector<int> bounds(n);
    for (int i = 0; i < n; ++i)
      bounds[i] = s.bound_rule == "proportional" ? proportional_bound(caps[i])
                                                 : s.uniform_bound;
    graph = complete_graph(std::move(caps), std::move(bounds));
  }

  std::vector<NodePair> mut = s.mutable_pairs;
  if (mut.empty()) mut = graph->potential_pairs();

  // pairs outside the mutable set are pinned to their initial state; the
  // in-use ones act as a frozen backbone for enumeration and reporting
  std::vector<NodePair> frozen;
  Configuration initial;
  if (s.initial == "full") {
    initial = Configuration::make(*graph, graph->potential_pairs());
  } else if (s.initial == "pairs") {
    initial = Configuration::make(*graph, s.initial_pairs);
  } else {
    initial = random_initial(*graph, {}, mut, init_rng);
  }
  for (const auto& p : initial.pairs())
    if (std::find(mut.begin(), mut.end(), p) == mut.end()) frozen.push_back(p);
  return Instance{std::move(*graph), std::move(frozen), std::move(mut),
                  std::move(initial)};
}

namespace {

// Cache of per-configuration rates keyed by the canonical pair list.
class RateCache {
 public:
  explicit RateCache(std::function<double(const Configuration&)> compute)
      : compute_(std::move(compute)) {}

  double operator()(const Configuration& f) {
    const std::string key = f.key();
    auto it = values_.find(key);
    if (it != values_.end()) return it->second;
    const double v = compute_(f);
    values_.emplace(key, v);
    return v;
  }

 private:
  std::function<double(const Configuration&)> compute_;
  std::map<std::string, double> values_;
};

struct Accumulator {
  double t_prev = 0.0;
  double integral = 0.0;
  double total_time = 0.0;
  std::map<std::string, double> occupancy;

  void advance(double t_now, const std::string& key, double rate,
               bool counted) {
    const double dt = t_now - t_prev;
    t_prev = t_now;
    if (!counted || dt <= 0.0) return;
    occupancy[key] += dt;
    integral += rate * dt;
    total_time += dt;
  }
};

void fill_occupancy(RunReport& rep, const Accumulator& acc) {
  for (const auto& [key, t] : acc.occupancy)
    rep.occupancy.push_back(
        {key, acc.total_time > 0.0 ? t / acc.total_time : 0.0, std::nullopt});
}

// Attaches the closed-form target distribution and its total-variation
// distance to the empirical occupancy, when the space is small enough to
// enumerate.
void attach_optimal(RunReport& rep, const Instance& inst, double beta,
                    RateCache& rate_of) {
  if (inst.mutable_pairs.size() > 12) return;
  std::vector<Configuration> space;
  try {
    space = enumerate_configurations(inst.graph, inst.frozen_pairs,
                                     inst.mutable_pairs);
  } catch (const std::length_error&) {
    return;
  }
  if (space.size() > 256) return;

  Eigen::VectorXd x(space.size());
  for (std::size_t i = 0; i < space.size(); ++i)
    x[static_cast<int>(i)] = rate_of(space[i]);
  const DistributionVector p_star =
      optimal_distribution(x, beta);

  std::map<std::string, double> star_by_key;
  std::map<std::string, double> empirical;
  for (std::size_t i = 0; i < space.size(); ++i) {
    star_by_key[space[i].key()] = p_star.probs[static_cast<int>(i)];
    empirical[space[i].key()] = 0.0;
  }
  for (auto& occ : rep.occupancy) {
    auto it = star_by_key.find(occ.config);
    if (it == star_by_key.end()) return;  // visited something outside: skip
    occ.p_star = it->second;
    empirical[occ.config] = occ.fraction;
  }
  double tv = 0.0;
  for (const auto& [key, p] : star_by_key) tv += std::abs(p - empirical[key]);
  rep.tv_to_optimal = 0.5 * tv;
}

}  // namespace

RunReport run_scenario(const Scenario& s) {
  const Instance inst = build_instance(s);
  Rng run_rng(s.seed ^ 0x5ca1ab1e5ca1ab1eull);
  Rng noise_rng = run_rng.fork();
  const std::uint64_t hopper_seed = run_rng.next_u64();

  RunReport rep;
  rep.name = s.name;
  rep.algorithm = "hopping";
  rep.seed = s.seed;
  rep.beta = s.beta;
  rep.tau = s.tau;
  rep.measure = to_string(s.measure);
  rep.hops = s.hops;
  rep.burnin = s.burnin;
  rep.fullmesh = fullmesh_rate(inst.graph);

  // True per-configuration rate: LP oracle, or the converged solver.
  int flagged = 0;
  std::map<std::string, std::vector<double>> solver_node_rates;
  RateCache rate_of(
      s.measure == MeasureMode::solver
          ? std::function<double(const Configuration&)>(
                [&](const Configuration& f) {
                  const RateResult r = solve_rate(inst.graph, f, s.solver);
                  if (!r.converged) ++flagged;
                  solver_node_rates[f.key()] = r.node_rates;
                  return r.rate;
                })
          : std::function<double(const Configuration&)>(
                [&](const Configuration& f) {
                  return solve_mp(inst.graph, f);
                }));

  const auto mean_receive = [&](const Configuration& f, double rate) {
    if (s.measure != MeasureMode::solver) return rate;
    const auto& nr = solver_node_rates.at(f.key());
    double sum = 0.0;
    for (NodeId v = 0; v < inst.graph.node_count(); ++v)
      if (v != inst.graph.source()) sum += nr[v];
    return sum / (inst.graph.node_count() - 1);
  };

  MeasureFn measure;
  if (s.measure == MeasureMode::noisy) {
    measure = [&](const Configuration& f) {
      const double base = rate_of(f);
      const long j = static_cast<long>(noise_rng.next_below(2 * s.noise_n + 1)) -
                     s.noise_n;
      return base + s.noise_delta * static_cast<double>(j) / s.noise_n;
    };
  } else {
    measure = [&](const Configuration& f) { return rate_of(f); };
  }

  Accumulator acc;
  Configuration final_config = inst.initial;

  if (s.hops == 0) {
    const double rate = rate_of(inst.initial);
    rep.mean_rate = rate;
    rep.horizon_time = 0.0;
    rep.series.push_back(
        {0.0, rate, mean_receive(inst.initial, rate), inst.initial.key()});
    rep.occupancy.push_back({inst.initial.key(), 1.0, std::nullopt});
  } else {
    HopperConfig hc{s.beta, s.tau, inst.mutable_pairs};
    HopperState hopper =
        init_hopper(inst.graph, hc, inst.initial, hopper_seed, measure);
    {
      const double r0 = rate_of(hopper.current);
      rep.series.push_back(
          {0.0, r0, mean_receive(hopper.current, r0), hopper.current.key()});
    }
    for (long i = 0; i < s.hops; ++i) {
      const std::string prev_key = hopper.current.key();
      const double prev_rate = rate_of(hopper.current);
      const TransitionRecord rec = hop_step(hopper, hc, inst.graph, measure);
      acc.advance(rec.t, prev_key, prev_rate, i >= s.burnin);
      rep.transitions.push_back(rec);
      if ((i + 1) % s.report_every == 0) {
        const double now = rate_of(hopper.current);
        rep.series.push_back({rec.t, now, mean_receive(hopper.current, now),
                              hopper.current.key()});
      }
    }
    final_config = hopper.current;
    rep.horizon_time = hopper.clock;
    rep.mean_rate = acc.total_time > 0.0 ? acc.integral / acc.total_time
                                         : rate_of(final_config);
    fill_occupancy(rep, acc);
  }

  if (s.measure == MeasureMode::solver) {
    rep.node_rates = solver_node_rates[final_config.key()];
  } else {
    rep.node_rates.assign(inst.graph.node_count(), rate_of(final_config));
  }
  rep.flagged_episodes = flagged;
  attach_optimal(rep, inst, s.beta, rate_of);

  if (s.compare_baseline) {
    Scenario b = s;
    b.compare_baseline = false;
    rep.baseline_mean_rate = run_baseline(b).mean_rate;
  }
  return rep;
}

RunReport run_baseline(const Scenario& s) {
  const Instance inst = build_instance(s);
  Rng run_rng(s.seed ^ 0xba5e11ba5e11ull);

  RunReport rep;
  rep.name = s.name;
  rep.algorithm = "baseline";
  rep.seed = s.seed;
  rep.beta = s.beta;
  rep.tau = s.tau;
  rep.measure = "baseline";
  rep.hops = s.hops;
  rep.burnin = s.burnin;
  rep.fullmesh = fullmesh_rate(inst.graph);

  RateCache rate_of([&](const Configuration& f) {
    return baseline_rate(inst.graph, f);
  });

  // Swap-neighbor lists restricted the same way as the hopper's, so the two
  // algorithms walk the same action space.
  std::vector<std::vector<NodeId>> swap_neighbors(inst.graph.node_count());
  if (inst.mutable_pairs.empty() ||
      inst.mutable_pairs.size() == inst.graph.potential_pairs().size()) {
    for (NodeId v = 0; v < inst.graph.node_count(); ++v)
      swap_neighbors[v] = inst.graph.potential_neighbors(v);
  } else {
    for (const auto& [u, v] : inst.mutable_pairs) {
      swap_neighbors[u].push_back(v);
      swap_neighbors[v].push_back(u);
    }
    for (auto& nv : swap_neighbors) std::sort(nv.begin(), nv.end());
  }

  Configuration current =
      Configuration::make_unbounded(inst.graph, inst.initial.pairs());
  std::vector<double> timers(inst.graph.node_count(),
                             std::numeric_limits<double>::infinity());
  bool any = false;
  for (NodeId v = 0; v < inst.graph.node_count(); ++v) {
    if (swap_neighbors[v].empty()) continue;
    timers[v] = run_rng.exponential(2.0 * std::exp(s.tau) /
                                    swap_neighbors[v].size());
    any = true;
  }
  if (!any && s.hops > 0)
    throw std::invalid_argument("baseline has no pair to swap");

  Accumulator acc;
  rep.series.push_back(
      {0.0, rate_of(current), rate_of(current), current.key()});
  double clock = 0.0;
  for (long i = 0; i < s.hops; ++i) {
    NodeId actor = -1;
    for (NodeId v = 0; v < static_cast<int>(timers.size()); ++v)
      if (actor < 0 || timers[v] < timers[actor]) actor = v;
    clock = timers[actor];

    const std::string prev_key = current.key();
    const double prev_rate = rate_of(current);

    std::vector<NodePair> pairs = current.pairs();
    std::vector<NodeId> active;
    for (NodeId u : swap_neighbors[actor])
      if (current.contains(actor, u)) active.push_back(u);
    if (!active.empty()) {
      const NodeId drop = active[run_rng.next_below(active.size())];
      pairs.erase(std::find(pairs.begin(), pairs.end(),
                            normalized_pair(actor, drop)));
    }
    Configuration intermediate =
        Configuration::make_unbounded(inst.graph, pairs);
    std::vector<NodeId> idle;
    for (NodeId u : swap_neighbors[actor])
      if (!intermediate.contains(actor, u)) idle.push_back(u);
    if (!idle.empty()) {
      const NodeId add = idle[run_rng.next_below(idle.size())];
      pairs.push_back(normalized_pair(actor, add));
    }
    current = Configuration::make_unbounded(inst.graph, pairs);

    acc.advance(clock, prev_key, prev_rate, i >= s.burnin);
    timers[actor] = clock + run_rng.exponential(2.0 * std::exp(s.tau) /
                                                swap_neighbors[actor].size());
    if ((i + 1) % s.report_every == 0)
      rep.series.push_back(
          {clock, rate_of(current), rate_of(current), current.key()});
  }

  rep.horizon_time = clock;
  rep.mean_rate =
      acc.total_time > 0.0 ? acc.integral / acc.total_time : rate_of(current);
  fill_occupancy(rep, acc);
  rep.node_rates.assign(inst.graph.node_count(), rate_of(current));
  return rep;
}

namespace {

json record_json(const TransitionRecord& rec) {
  return json{{"t", rec.t},
              {"actor", rec.actor},
              {"action", to_string(rec.action)},
              {"pair", {rec.pair.first, rec.pair.second}},
              {"x_old", rec.x_old},
              {"x_new", rec.x_new},
              {"accepted", rec.accepted}};
}

}  // namespace

std::string summary_json(const RunReport& r) {
  json j;
  j["name"] = r.name;
  j["algorithm"] = r.algorithm;
  j["seed"] = r.seed;
  j["beta"] = r.beta;
  j["tau"] = r.tau;
  j["measure"] = r.measure;
  j["hops"] = r.hops;
  j["burnin"] = r.burnin;
  j["horizon_time"] = r.horizon_time;
  j["mean_rate"] = r.mean_rate;
  j["fullmesh_rate"] = r.fullmesh;
  j["flagged_episodes"] = r.flagged_episodes;
  if (r.baseline_mean_rate) j["baseline_mean_rate"] = *r.baseline_mean_rate;
  if (r.tv_to_optimal) j["tv_to_optimal"] = *r.tv_to_optimal;
  j["node_rates"] = r.node_rates;
  json occ = json::array();
  for (const auto& o : r.occupancy) {
    json row{{"config", o.config}, {"fraction", o.fraction}};
    if (o.p_star) row["p_star"] = *o.p_star;
    occ.push_back(row);
  }
  j["occupancy"] = occ;
  return j.dump(2) + "\n";
}

std::string transitions_jsonl(const RunReport& r) {
  std::string out;
  for (const auto& rec : r.transitions) out += record_json(rec).dump() + "\n";
  return out;
}

std::vector<std::string> emit_report(const RunReport& r,
                                     const std::string& out_dir,
                                     const std::string& format) {
  if (format != "csv" && format != "json")
    throw std::invalid_argument("format must be csv or json");
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<std::string> written;

  const auto write_file = [&](const std::string& name,
                              const std::string& body) {
    const std::string path = (fs::path(out_dir) / name).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << body;
    written.push_back(path);
  };

  write_file("summary.json", summary_json(r));

  if (format == "csv") {
    std::string ts = "t,rate,mean_receive,config\n";
    for (const auto& row : r.series)
      ts += format_double(row.t) + "," + format_double(row.rate) + "," +
            format_double(row.mean_receive) + ",\"" + row.config + "\"\n";
    write_file("timeseries.csv", ts);
  } else {
    json series = json::array();
    for (const auto& row : r.series)
      series.push_back({{"t", row.t},
                        {"rate", row.rate},
                        {"mean_receive", row.mean_receive},
                        {"config", row.config}});
    write_file("timeseries.json", json{{"series", series}}.dump(2) + "\n");
  }

  std::string cdf = "rate,cum_fraction\n";
  std::vector<double> rates = r.node_rates;
  std::sort(rates.begin(), rates.end());
  for (std::size_t i = 0; i < rates.size(); ++i)
    cdf += format_double(rates[i]) + "," +
           format_double(static_cast<double>(i + 1) / rates.size()) + "\n";
  write_file("cdf.csv", cdf);

  write_file("transitions.jsonl", transitions_jsonl(r));
  return written;
}

}  // namespace p2pcast
