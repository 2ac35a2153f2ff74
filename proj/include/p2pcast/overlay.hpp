#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace p2pcast {

using NodeId = int;
// Unordered node pair, stored normalized with first < second.
using NodePair = std::pair<NodeId, NodeId>;

NodePair normalized_pair(NodeId a, NodeId b);

// Potential-neighbor graph: nodes with upload capacities and degree bounds
// plus the symmetric set of pairs that are allowed to peer. Immutable after
// construction.
class OverlayGraph {
 public:
  OverlayGraph(NodeId source, std::vector<double> capacities,
               std::vector<int> degree_bounds, std::vector<NodePair> pairs);

  int node_count() const { return static_cast<int>(capacities_.size()); }
  NodeId source() const { return source_; }
  double capacity(NodeId v) const;
  int degree_bound(NodeId v) const;
  const std::vector<double>& capacities() const { return capacities_; }

  // N_v, sorted ascending.
  const std::vector<NodeId>& potential_neighbors(NodeId v) const;
  int potential_degree(NodeId v) const;

  // All potential pairs, sorted; index order is the canonical edge order used
  // by enumeration and by configuration masks.
  const std::vector<NodePair>& potential_pairs() const { return pairs_; }
  std::optional<int> pair_index(NodeId a, NodeId b) const;

  void check_node(NodeId v) const;

 private:
  NodeId source_;
  std::vector<double> capacities_;
  std::vector<int> degree_bounds_;
  std::vector<NodePair> pairs_;
  std::vector<std::vector<NodeId>> neighbors_;
};

// An in-use peering subgraph: a degree-feasible subset of the potential
// pairs. Value type; all mutation produces a new Configuration.
class Configuration {
 public:
  Configuration() = default;

  // Validates pairs against the graph, including degree bounds.
  static Configuration make(const OverlayGraph& g, std::vector<NodePair> pairs);
  // Same validation minus the degree bounds (the heuristic baseline is
  // allowed to exceed them).
  static Configuration make_unbounded(const OverlayGraph& g,
                                      std::vector<NodePair> pairs);

  const std::vector<NodePair>& pairs() const { return pairs_; }
  int pair_count() const { return static_cast<int>(pairs_.size()); }

  // N_{v,f}, sorted ascending.
  const std::vector<NodeId>& in_use(NodeId v) const;
  int in_use_degree(NodeId v) const;
  bool contains(NodeId a, NodeId b) const;

  Configuration with_pair(const OverlayGraph& g, NodeId a, NodeId b) const;
  Configuration without_pair(const OverlayGraph& g, NodeId a, NodeId b) const;

  // Canonical text key, e.g. "0-1,2-3"; empty configuration is "".
  std::string key() const;

  bool operator==(const Configuration& other) const {
    return pairs_ == other.pairs_;
  }

 private:
  static Configuration build(const OverlayGraph& g, std::vector<NodePair> pairs,
                             bool enforce_bounds);

  std::vector<NodePair> pairs_;
  std::vector<std::vector<NodeId>> in_use_;
};

// N_{v,f} with an explicit unknown-node check.
const std::vector<NodeId>& neighbors_in_use(const Configuration& f, NodeId v);

// Upload capacity distribution: (capacity kbps, fraction %) buckets.
struct CapacityProfile {
  std::vector<std::pair<double, double>> buckets;
  void validate() const;
};

// Measured Internet-host uplink distribution used by the experiments.
CapacityProfile measured_uplink_profile();

// All degree-bound-feasible subsets of the potential pairs, in lexicographic
// order of their sorted pair lists. Connectivity is not filtered; unreachable
// receivers are handled by the rate oracle instead. Guarded to |E| <= 24.
std::vector<Configuration> enumerate_configurations(const OverlayGraph& g);

// Restricted enumeration: frozen pairs are always in use, only subsets of
// mutable_pairs vary. Used for spaces where part of the overlay is pinned.
std::vector<Configuration> enumerate_configurations(
    const OverlayGraph& g, const std::vector<NodePair>& frozen_pairs,
    const std::vector<NodePair>& mutable_pairs);

std::vector<double> sample_capacities(const CapacityProfile& profile, int n,
                                      std::uint64_t seed);

bool is_connected_from_source(const OverlayGraph& g, const Configuration& f);

// Line-oriented text format:
//   nodes <N> source <id>
//   node <id> cap <kbps> bound <B>     (one line per node)
//   edge <u> <v>                       (one line per potential pair)
OverlayGraph parse_graph(std::istream& in);
OverlayGraph load_graph(const std::string& path);
void save_graph(const OverlayGraph& g, std::ostream& out);

// Complete potential graph on n nodes, source 0.
OverlayGraph complete_graph(std::vector<double> capacities,
                            std::vector<int> degree_bounds);

}  // namespace p2pcast
