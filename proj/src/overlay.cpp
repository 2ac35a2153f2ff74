#include "p2pcast/overlay.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "p2pcast/rng.hpp"

namespace p2pcast {

NodePair normalized_pair(NodeId a, NodeId b) {
  if (a == b) throw std::invalid_argument("pair endpoints must differ");
  return a < b ? NodePair{a, b} : NodePair{b, a};
}

OverlayGraph::OverlayGraph(NodeId source, std::vector<double> capacities,
                           std::vector<int> degree_bounds,
                           std::vector<NodePair> pairs)
    : source_(source),
      capacities_(std::move(capacities)),
      degree_bounds_(std::move(degree_bounds)),
      pairs_(std::move(pairs)) {
  const int n = node_count();
  if (n < 1) throw std::invalid_argument("graph needs at least one node");
  if (static_cast<int>(degree_bounds_.size()) != n)
    throw std::invalid_argument("capacity/bound size mismatch");
  if (source_ < 0 || source_ >= n)
    throw std::invalid_argument("source id out of range");
  for (double c : capacities_)
    if (!(c >= 0.0)) throw std::invalid_argument("capacities must be >= 0");
  for (int b : degree_bounds_)
    if (b < 1) throw std::invalid_argument("degree bounds must be >= 1");

  neighbors_.assign(n, {});
  std::set<NodePair> seen;
  for (auto& p : pairs_) {
    p = normalized_pair(p.first, p.second);
    if (p.first < 0 || p.second >= n)
      throw std::invalid_argument("pair endpoint out of range");
    if (!seen.insert(p).second)
      throw std::invalid_argument("duplicate potential pair");
  }
  std::sort(pairs_.begin(), pairs_.end());
  for (const auto& [u, v] : pairs_) {
    neighbors_[u].push_back(v);
    neighbors_[v].push_back(u);
  }
  for (auto& nv : neighbors_) std::sort(nv.begin(), nv.end());
}

void OverlayGraph::check_node(NodeId v) const {
  if (v < 0 || v >= node_count())
    throw std::invalid_argument("unknown node id " + std::to_string(v));
}

double OverlayGraph::capacity(NodeId v) const {
  check_node(v);
  return capacities_[v];
}

int OverlayGraph::degree_bound(NodeId v) const {
  check_node(v);
  return degree_bounds_[v];
}

const std::vector<NodeId>& OverlayGraph::potential_neighbors(NodeId v) const {
  check_node(v);
  return neighbors_[v];
}

int OverlayGraph::potential_degree(NodeId v) const {
  return static_cast<int>(potential_neighbors(v).size());
}

std::optional<int> OverlayGraph::pair_index(NodeId a, NodeId b) const {
  const NodePair p = normalized_pair(a, b);
  auto it = std::lower_bound(pairs_.begin(), pairs_.end(), p);
  if (it == pairs_.end() || *it != p) return std::nullopt;
  return static_cast<int>(it - pairs_.begin());
}

Configuration Configuration::build(const OverlayGraph& g,
                                   std::vector<NodePair> pairs,
                                   bool enforce_bounds) {
  Configuration f;
  for (auto& p : pairs) p = normalized_pair(p.first, p.second);
  std::sort(pairs.begin(), pairs.end());
  if (std::adjacent_find(pairs.begin(), pairs.end()) != pairs.end())
    throw std::invalid_argument("duplicate pair in configuration");
  f.in_use_.assign(g.node_count(), {});
  for (const auto& [u, v] : pairs) {
    if (!g.pair_index(u, v))
      throw std::invalid_argument("pair not in potential-neighbor set");
    f.in_use_[u].push_back(v);
    f.in_use_[v].push_back(u);
  }
  if (enforce_bounds) {
    for (NodeId v = 0; v < g.node_count(); ++v) {
      if (static_cast<int>(f.in_use_[v].size()) > g.degree_bound(v))
        throw std::invalid_argument("degree bound violated at node " +
                                    std::to_string(v));
    }
  }
  f.pairs_ = std::move(pairs);
  return f;
}

Configuration Configuration::make(const OverlayGraph& g,
                                  std::vector<NodePair> pairs) {
  return build(g, std::move(pairs), true);
}

Configuration Configuration::make_unbounded(const OverlayGraph& g,
                                            std::vector<NodePair> pairs) {
  return build(g, std::move(pairs), false);
}

const std::vector<NodeId>& Configuration::in_use(NodeId v) const {
  if (v < 0 || v >= static_cast<int>(in_use_.size()))
    throw std::invalid_argument("unknown node id " + std::to_string(v));
  return in_use_[v];
}

int Configuration::in_use_degree(NodeId v) const {
  return static_cast<int>(in_use(v).size());
}

bool Configuration::contains(NodeId a, NodeId b) const {
  const NodePair p = normalized_pair(a, b);
  return std::binary_search(pairs_.begin(), pairs_.end(), p);
}

Configuration Configuration::with_pair(const OverlayGraph& g, NodeId a,
                                       NodeId b) const {
  auto pairs = pairs_;
  pairs.push_back(normalized_pair(a, b));
  return make(g, std::move(pairs));
}

Configuration Configuration::without_pair(const OverlayGraph& g, NodeId a,
                                          NodeId b) const {
  const NodePair p = normalized_pair(a, b);
  auto pairs = pairs_;
  auto it = std::find(pairs.begin(), pairs.end(), p);
  if (it == pairs.end())
    throw std::invalid_argument("pair not in configuration");
  pairs.erase(it);
  return make(g, std::move(pairs));
}

std::string Configuration::key() const {
  std::string out;
  for (const auto& [u, v] : pairs_) {
    if (!out.empty()) out += ',';
    out += std::to_string(u) + '-' + std::to_string(v);
  }
  return out;
}

const std::vector<NodeId>& neighbors_in_use(const Configuration& f, NodeId v) {
  return f.in_use(v);
}

void CapacityProfile::validate() const {
  if (buckets.empty()) throw std::invalid_argument("empty capacity profile");
  double sum = 0.0;
  double prev = 0.0;
  for (const auto& [cap, frac] : buckets) {
    if (!(cap > prev))
      throw std::invalid_argument("capacities must be positive and increasing");
    if (frac < 0.0) throw std::invalid_argument("negative fraction");
    prev = cap;
    sum += frac;
  }
  if (std::abs(sum - 100.0) > 0.1)
    throw std::invalid_argument("profile fractions must sum to 100");
}

CapacityProfile measured_uplink_profile() {
  return CapacityProfile{
      {{64, 2.8}, {128, 14.3}, {256, 4.3}, {384, 23.3}, {768, 55.3}}};
}

namespace {

void enumerate_rec(const OverlayGraph& g, const std::vector<NodePair>& edges,
                   std::vector<NodePair>& current, std::vector<int>& degree,
                   std::size_t next, const std::vector<NodePair>& frozen,
                   std::vector<Configuration>& out) {
  auto pairs = frozen;
  pairs.insert(pairs.end(), current.begin(), current.end());
  out.push_back(Configuration::make(g, std::move(pairs)));
  for (std::size_t i = next; i < edges.size(); ++i) {
    const auto& [u, v] = edges[i];
    if (degree[u] + 1 > g.degree_bound(u) || degree[v] + 1 > g.degree_bound(v))
      continue;
    ++degree[u];
    ++degree[v];
    current.push_back(edges[i]);
    enumerate_rec(g, edges, current, degree, i + 1, frozen, out);
    current.pop_back();
    --degree[u];
    --degree[v];
  }
}

}  // namespace

std::vector<Configuration> enumerate_configurations(
    const OverlayGraph& g, const std::vector<NodePair>& frozen_pairs,
    const std::vector<NodePair>& mutable_pairs) {
  if (mutable_pairs.size() > 24)
    throw std::length_error("configuration space too large to enumerate");
  std::vector<NodePair> edges = mutable_pairs;
  for (auto& p : edges) p = normalized_pair(p.first, p.second);
  std::sort(edges.begin(), edges.end());

  std::vector<int> degree(g.node_count(), 0);
  for (const auto& [u, v] : frozen_pairs) {
    ++degree[u];
    ++degree[v];
  }
  std::vector<NodePair> current;
  std::vector<Configuration> out;
  enumerate_rec(g, edges, current, degree, 0, frozen_pairs, out);
  return out;
}

std::vector<Configuration> enumerate_configurations(const OverlayGraph& g) {
  return enumerate_configurations(g, {}, g.potential_pairs());
}

std::vector<double> sample_capacities(const CapacityProfile& profile, int n,
                                      std::uint64_t seed) {
  profile.validate();
  if (n < 1) throw std::invalid_argument("need n >= 1 samples");
  double total = 0.0;
  for (const auto& [cap, frac] : profile.buckets) total += frac;

  Rng rng(seed);
  std::vector<double> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double u = rng.next_double() * total;
    double cum = 0.0;
    double value = profile.buckets.back().first;
    for (const auto& [cap, frac] : profile.buckets) {
      cum += frac;
      if (u < cum) {
        value = cap;
        break;
      }
    }
    out.push_back(value);
  }
  return out;
}

bool is_connected_from_source(const OverlayGraph& g, const Configuration& f) {
  const int n = g.node_count();
  if (n == 1) return true;
  std::vector<char> seen(n, 0);
  std::vector<NodeId> stack{g.source()};
  seen[g.source()] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const NodeId v = stack.back();
    stack.pop_back();
    for (NodeId u : f.in_use(v)) {
      if (!seen[u]) {
        seen[u] = 1;
        ++reached;
        stack.push_back(u);
      }
    }
  }
  return reached == n;
}

OverlayGraph parse_graph(std::istream& in) {
  std::string line;
  int n = -1;
  NodeId source = -1;
  std::vector<double> caps;
  std::vector<int> bounds;
  std::vector<char> node_seen;
  std::vector<NodePair> pairs;
  std::set<NodePair> pair_seen;

  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    const auto fail = [&](const std::string& why) {
      throw std::runtime_error("graph parse error at line " +
                               std::to_string(lineno) + ": " + why);
    };
    if (tag == "nodes") {
      std::string kw;
      if (!(ls >> n >> kw >> source) || kw != "source" || n < 1)
        fail("expected 'nodes <N> source <id>'");
      caps.assign(n, -1.0);
      bounds.assign(n, 0);
      node_seen.assign(n, 0);
    } else if (tag == "node") {
      if (n < 0) fail("'node' before 'nodes' header");
      int id, bound;
      double cap;
      std::string kw1, kw2;
      if (!(ls >> id >> kw1 >> cap >> kw2 >> bound) || kw1 != "cap" ||
          kw2 != "bound")
        fail("expected 'node <id> cap <kbps> bound <B>'");
      if (id < 0 || id >= n) fail("node id out of range");
      if (node_seen[id]) fail("duplicate node line");
      node_seen[id] = 1;
      caps[id] = cap;
      bounds[id] = bound;
    } else if (tag == "edge") {
      if (n < 0) fail("'edge' before 'nodes' header");
      int u, v;
      if (!(ls >> u >> v)) fail("expected 'edge <u> <v>'");
      if (u == v) fail("self-loop edge");
      if (u < 0 || u >= n || v < 0 || v >= n) fail("edge endpoint out of range");
      const NodePair p = normalized_pair(u, v);
      if (!pair_seen.insert(p).second) fail("duplicate edge");
      pairs.push_back(p);
    } else {
      fail("unknown directive '" + tag + "'");
    }
  }
  if (n < 0) throw std::runtime_error("graph parse error: missing header");
  for (int id = 0; id < n; ++id)
    if (!node_seen[id])
      throw std::runtime_error("graph parse error: missing node line for " +
                               std::to_string(id));
  return OverlayGraph(source, std::move(caps), std::move(bounds),
                      std::move(pairs));
}

OverlayGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  return parse_graph(in);
}

void save_graph(const OverlayGraph& g, std::ostream& out) {
  out << "nodes " << g.node_count() << " source " << g.source() << "\n";
  out.precision(17);
  for (NodeId v = 0; v < g.node_count(); ++v)
    out << "node " << v << " cap " << g.capacity(v) << " bound "
        << g.degree_bound(v) << "\n";
  for (const auto& [u, v] : g.potential_pairs())
    out << "edge " << u << " " << v << "\n";
}

OverlayGraph complete_graph(std::vector<double> capacities,
                            std::vector<int> degree_bounds) {
  const int n = static_cast<int>(capacities.size());
  std::vector<NodePair> pairs;
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = u + 1; v < n; ++v) pairs.emplace_back(u, v);
  return OverlayGraph(0, std::move(capacities), std::move(degree_bounds),
                      std::move(pairs));
}

}  // namespace p2pcast
