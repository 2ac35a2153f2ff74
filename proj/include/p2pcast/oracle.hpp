#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <string>
#include <vector>

#include "p2pcast/overlay.hpp"
#include "p2pcast/simplex.hpp"

namespace p2pcast {

struct LpError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Directed arc list with per-arc capacity, for the max-flow routines.
struct CapacitatedDigraph {
  int nodes = 0;
  struct Arc {
    NodeId from;
    NodeId to;
    double cap;
  };
  std::vector<Arc> arcs;
};

// Exact s->d max flow (Dinic). Throws on s == d or negative capacity.
double max_flow(const CapacitatedDigraph& g, NodeId s, NodeId d);

// Broadcast-rate LP under a fixed configuration: maximize the rate subject
// to per-destination flow conservation, flow <= physical link rate, and
// per-node upload capacity. Returns 0 when some receiver is unreachable.
// LP failures (as opposed to a legitimate zero rate) raise LpError.
double solve_mp(const OverlayGraph& g, const Configuration& f);

// The same LP with access to the raw solution, for diagnostics and tests.
struct MpSolution {
  double rate = 0;
  bool lp_solved = false;  // false when short-circuited by reachability
  LpSolution<double> lp;
};
MpSolution solve_mp_full(const OverlayGraph& g, const Configuration& f);

// Human-readable constraint listing of the LP instance.
std::string describe_mp_lp(const OverlayGraph& g, const Configuration& f);

// Broadcast rate with unbounded node degrees: min(C_s, sum(C)/|R|).
double fullmesh_rate(const OverlayGraph& g);

// Rate of the even-split heuristic: every node spreads its upload capacity
// uniformly over its in-use neighbors, and the achieved rate is the min over
// receivers of the resulting max flow.
double baseline_rate(const OverlayGraph& g, const Configuration& f);

}  // namespace p2pcast
