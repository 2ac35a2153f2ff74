#include "p2pcast/hopper.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace p2pcast {

const char* to_string(TransitionRecord::Action a) {
  switch (a) {
    case TransitionRecord::Action::remove:
      return "remove";
    case TransitionRecord::Action::add:
      return "add";
    default:
      return "noop";
  }
}

namespace {

std::vector<std::vector<NodeId>> build_hop_neighbors(const OverlayGraph& g,
                                                     const HopperConfig& c) {
  std::vector<std::vector<NodeId>> nbrs(g.node_count());
  if (c.mutable_pairs.empty()) {
    for (NodeId v = 0; v < g.node_count(); ++v)
      nbrs[v] = g.potential_neighbors(v);
    return nbrs;
  }
  for (const auto& p : c.mutable_pairs) {
    const auto [u, v] = normalized_pair(p.first, p.second);
    if (!g.pair_index(u, v))
      throw std::invalid_argument("mutable pair outside the potential graph");
    nbrs[u].push_back(v);
    nbrs[v].push_back(u);
  }
  for (auto& nv : nbrs) std::sort(nv.begin(), nv.end());
  return nbrs;
}

int hop_neighbor_count(const OverlayGraph& g, const HopperConfig& c,
                       NodeId v) {
  if (c.mutable_pairs.empty()) return g.potential_degree(v);
  int count = 0;
  for (const auto& p : c.mutable_pairs)
    if (p.first == v || p.second == v) ++count;
  return count;
}

double timer_mean(double tau, int neighbor_count) {
  return 2.0 * std::exp(tau) / neighbor_count;
}

}  // namespace

double sample_timer(NodeId v, const HopperConfig& c, const OverlayGraph& g,
                    Rng& rng) {
  g.check_node(v);
  const int nv = hop_neighbor_count(g, c, v);
  if (nv < 1)
    throw std::invalid_argument("node " + std::to_string(v) +
                                " has no neighbors to hop between");
  return rng.exponential(timer_mean(c.tau, nv));
}

Proposal propose(const HopperState& s, const HopperConfig&,
                 const OverlayGraph& g, NodeId v, Rng& rng) {
  const auto& candidates = s.hop_neighbors[v];
  if (candidates.empty())
    throw std::invalid_argument("propose called for an inactive node");

  std::vector<NodeId> in_use;
  std::vector<NodeId> idle;
  for (NodeId u : candidates)
    (s.current.contains(v, u) ? in_use : idle).push_back(u);

  const double p_remove =
      static_cast<double>(in_use.size()) / candidates.size();
  if (rng.next_double() < p_remove) {
    const NodeId u = in_use[rng.next_below(in_use.size())];
    return {Proposal::Kind::remove, u};
  }
  const NodeId u = idle[rng.next_below(idle.size())];
  if (s.current.in_use_degree(v) >= g.degree_bound(v) ||
      s.current.in_use_degree(u) >= g.degree_bound(u))
    return {Proposal::Kind::blocked, u};
  return {Proposal::Kind::add, u};
}

double accept_stay_probability(double x_old, double x_new, double beta) {
  const double m = beta * std::max(x_old, x_new);
  const double stay = std::exp(beta * x_new - m);
  const double back = std::exp(beta * x_old - m);
  return stay / (stay + back);
}

HopperState init_hopper(const OverlayGraph& g, const HopperConfig& c,
                        Configuration initial, std::uint64_t seed,
                        const MeasureFn& measure) {
  if (c.beta <= 0.0) throw std::invalid_argument("beta must be positive");
  HopperState s;
  s.current = std::move(initial);
  s.rng = Rng(seed);
  s.hop_neighbors = build_hop_neighbors(g, c);
  s.timers.assign(g.node_count(),
                  std::numeric_limits<double>::infinity());
  bool any_active = false;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (s.hop_neighbors[v].empty()) continue;
    s.timers[v] =
        s.rng.exponential(timer_mean(c.tau, s.hop_neighbors[v].size()));
    any_active = true;
  }
  if (!any_active)
    throw std::invalid_argument("no node has a neighbor to hop between");
  s.last_rate = measure(s.current);
  return s;
}

TransitionRecord hop_step(HopperState& s, const HopperConfig& c,
                          const OverlayGraph& g, const MeasureFn& measure) {
  NodeId actor = -1;
  for (NodeId v = 0; v < static_cast<int>(s.timers.size()); ++v)
    if (actor < 0 || s.timers[v] < s.timers[actor]) actor = v;
  if (actor < 0 || !std::isfinite(s.timers[actor]))
    throw std::logic_error("hop_step without an active timer");
  s.clock = s.timers[actor];

  TransitionRecord rec;
  rec.t = s.clock;
  rec.actor = actor;

  const Proposal prop = propose(s, c, g, actor, s.rng);
  if (prop.kind == Proposal::Kind::blocked) {
    rec.action = TransitionRecord::Action::noop;
    rec.pair = normalized_pair(actor, prop.target);
    rec.x_old = rec.x_new = s.last_rate;
  } else {
    const bool removing = prop.kind == Proposal::Kind::remove;
    const Configuration next =
        removing ? s.current.without_pair(g, actor, prop.target)
                 : s.current.with_pair(g, actor, prop.target);
    rec.action = removing ? TransitionRecord::Action::remove
                          : TransitionRecord::Action::add;
    rec.pair = normalized_pair(actor, prop.target);
    rec.x_old = s.last_rate;
    rec.x_new = measure(next);
    rec.accepted = s.rng.next_double() <
                   accept_stay_probability(rec.x_old, rec.x_new, c.beta);
    if (rec.accepted) {
      s.current = next;
      s.last_rate = rec.x_new;
    }
  }

  s.timers[actor] =
      s.clock +
      s.rng.exponential(timer_mean(c.tau, s.hop_neighbors[actor].size()));
  return rec;
}

}  // namespace p2pcast
