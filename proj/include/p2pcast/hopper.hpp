#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "p2pcast/overlay.hpp"
#include "p2pcast/rng.hpp"

namespace p2pcast {

// Rate measurement used when probing a configuration. Must behave as a pure
// function of the configuration for a given scenario seed.
using MeasureFn = std::function<double(const Configuration&)>;

struct HopperConfig {
  double beta = 10.0;   // inverse temperature
  double tau = 0.0;     // timer constant; mean timer is 2 exp(tau) / |N_v|
  // Pairs the protocol may toggle. Empty means every potential pair. Frozen
  // pairs stay in whatever state the initial configuration puts them.
  std::vector<NodePair> mutable_pairs;
};

struct HopperState {
  Configuration current;
  double clock = 0.0;
  std::vector<double> timers;  // absolute expiry per node; +inf if inactive
  double last_rate = 0.0;      // observed rate carried for the current config
  Rng rng{0};
  // Per-node neighbor lists restricted to the mutable pairs.
  std::vector<std::vector<NodeId>> hop_neighbors;
};

struct Proposal {
  enum class Kind { remove, add, blocked } kind;
  NodeId target = -1;
};

struct TransitionRecord {
  double t = 0.0;
  NodeId actor = -1;
  enum class Action { remove, add, noop } action = Action::noop;
  NodePair pair{-1, -1};
  double x_old = 0.0;
  double x_new = 0.0;
  bool accepted = false;
};

const char* to_string(TransitionRecord::Action a);

// Exponential countdown with mean 2 exp(tau) / |N_v| over the node's
// (mutable) neighbor count. Throws for isolated nodes.
double sample_timer(NodeId v, const HopperConfig& c, const OverlayGraph& g,
                    Rng& rng);

// Step-2 branch: with probability |N_{v,f}|/|N_v| pick an in-use neighbor to
// drop, otherwise a not-in-use neighbor to add; an add that would break a
// degree bound on either endpoint comes back blocked.
Proposal propose(const HopperState& s, const HopperConfig& c,
                 const OverlayGraph& g, NodeId v, Rng& rng);

// Probability of staying in the probed configuration,
// exp(beta x_new) / (exp(beta x_old) + exp(beta x_new)).
double accept_stay_probability(double x_old, double x_new, double beta);

HopperState init_hopper(const OverlayGraph& g, const HopperConfig& c,
                        Configuration initial, std::uint64_t seed,
                        const MeasureFn& measure);

// Advances the clock to the next timer expiry and executes one protocol
// round: propose, mutate, probe, keep-or-revert, refresh the actor's timer.
TransitionRecord hop_step(HopperState& s, const HopperConfig& c,
                          const OverlayGraph& g, const MeasureFn& measure);

}  // namespace p2pcast
