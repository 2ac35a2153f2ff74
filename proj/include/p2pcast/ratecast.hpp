#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <optional>
#include <vector>

#include "p2pcast/links.hpp"
#include "p2pcast/overlay.hpp"

namespace p2pcast {

// Primal-dual iterate. lambda(v, r) is the multiplier (queue length) at node
// v for the receiver with index r; flows(l, r) the virtual per-destination
// flow on directed link l; phys(l) the physical link rate.
struct SolverState {
  double z = 0.0;
  Eigen::MatrixXd lambda;
  Eigen::MatrixXd flows;
  Eigen::VectorXd phys;
};

struct SolverConfig {
  double alpha = 0.1;   // rate step size
  double k = 5e-5;      // multiplier step size, uniform over (v,d)
  enum class Utility { log_shifted, sqrt_shifted } utility =
      Utility::log_shifted;
  // U(z) = ln(z + shift). The shift bounds U' near zero; at the solver's
  // normalized rate scale 0.5 keeps the z step no larger than the rates
  // themselves, which a vanishing shift does not.
  double utility_shift = 0.5;
  int window = 20000;       // convergence window, iterations
  double conv_tol = 1e-3;   // relative span of z over the window
  int max_iters = 2000000;
  int trace_every = 100;    // thinning of the kept (iter, z, sum lambda) rows
  // Capacities are divided by this before iterating and the rate scaled
  // back afterwards, keeping the step sizes effective regardless of whether
  // capacities are unit-scale or kbps-scale. 0 selects the max capacity.
  double rate_scale = 0.0;
};

double utility_prime(const SolverConfig& sc, double z);

SolverState make_initial_state(const OverlayGraph& g, const DirectedLinks& links,
                               double z0 = 0.0);

// w_vu = sum_d [lambda_vd - lambda_ud]^+. u must be an out-neighbor of v.
double back_pressure(const SolverState& s, const OverlayGraph& g,
                     const DirectedLinks& links, NodeId v, NodeId u);

// argmax_u w_vu with lowest-node-id tie break; nullopt when out(v) is empty.
std::optional<NodeId> select_neighbor(const SolverState& s,
                                      const DirectedLinks& links, NodeId v);

// Optimal scheduling-subproblem assignment: each node puts its whole upload
// capacity on its max-back-pressure neighbor (if the pressure is positive)
// and virtual flows follow the positive multiplier gaps.
void assign_flows(SolverState& s, const DirectedLinks& links,
                  const Eigen::VectorXd& capacities);

// One discrete saddle-point step: rate update, flow assignment, then the
// multiplier update, all with positivity projections.
void primal_dual_step(SolverState& s, const OverlayGraph& g,
                      const DirectedLinks& links, const ReceiverIndex& recv,
                      const SolverConfig& sc);

struct RateResult {
  double rate = 0.0;       // window-averaged z
  bool converged = false;
  bool disconnected = false;
  int iters = 0;
  std::vector<double> z_trace;
  struct TraceRow {
    int iter;
    double z;
    double sum_lambda_source;
  };
  std::vector<TraceRow> trace;
  std::vector<double> node_rates;  // delivered rate per node at the last state
};

// Iterates primal_dual_step until the z oscillation over the sliding window
// drops below the tolerance (or max_iters). Configurations that leave some
// receiver unreachable return rate 0 directly, matching the LP oracle's
// convention; the dynamics have no positive rate to find there.
RateResult solve_rate(const OverlayGraph& g, const Configuration& f,
                      const SolverConfig& sc = {});

// "iter,z,sum_lambda_source" rows.
void write_trace_csv(const RateResult& r, std::ostream& out);

}  // namespace p2pcast
