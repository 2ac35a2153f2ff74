#include "p2pcast/ratecast.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace p2pcast {

double utility_prime(const SolverConfig& sc, double z) {
  switch (sc.utility) {
    case SolverConfig::Utility::sqrt_shifted:
      return 0.5 / std::sqrt(z + sc.utility_shift);
    case SolverConfig::Utility::log_shifted:
    default:
      return 1.0 / (z + sc.utility_shift);
  }
}

SolverState make_initial_state(const OverlayGraph& g,
                               const DirectedLinks& links, double z0) {
  SolverState s;
  s.z = z0;
  s.lambda = Eigen::MatrixXd::Zero(g.node_count(), g.node_count() - 1);
  s.flows = Eigen::MatrixXd::Zero(links.count(), g.node_count() - 1);
  s.phys = Eigen::VectorXd::Zero(links.count());
  return s;
}

namespace {

double link_pressure(const SolverState& s, const DirectedLinks& links, int l) {
  return (s.lambda.row(links.from[l]) - s.lambda.row(links.to[l]))
      .cwiseMax(0.0)
      .sum();
}

// Max-back-pressure out-link of v, ties to the lowest neighbor id; -1 when
// out(v) is empty.
int best_out_link(const SolverState& s, const DirectedLinks& links, NodeId v,
                  double* pressure_out) {
  int best = -1;
  double best_w = 0.0;
  for (int l : links.out[v]) {
    const double w = link_pressure(s, links, l);
    if (best < 0 || w > best_w ||
        (w == best_w && links.to[l] < links.to[best])) {
      best = l;
      best_w = w;
    }
  }
  if (pressure_out) *pressure_out = best_w;
  return best;
}

}  // namespace

double back_pressure(const SolverState& s, const OverlayGraph& g,
                     const DirectedLinks& links, NodeId v, NodeId u) {
  g.check_node(v);
  g.check_node(u);
  for (int l : links.out[v])
    if (links.to[l] == u) return link_pressure(s, links, l);
  throw std::invalid_argument("back_pressure: node " + std::to_string(u) +
                              " is not an out-neighbor of " +
                              std::to_string(v));
}

std::optional<NodeId> select_neighbor(const SolverState& s,
                                      const DirectedLinks& links, NodeId v) {
  const int l = best_out_link(s, links, v, nullptr);
  if (l < 0) return std::nullopt;
  return links.to[l];
}

void assign_flows(SolverState& s, const DirectedLinks& links,
                  const Eigen::VectorXd& capacities) {
  s.flows.setZero();
  s.phys.setZero();
  const int R = static_cast<int>(s.lambda.cols());
  for (NodeId v = 0; v < static_cast<int>(links.out.size()); ++v) {
    if (links.out[v].empty()) continue;
    double w = 0.0;
    const int l = best_out_link(s, links, v, &w);
    if (w <= 0.0) continue;  // no positive pressure: v idles
    const NodeId u = links.to[l];
    s.phys[l] = capacities[v];
    for (int r = 0; r < R; ++r)
      if (s.lambda(v, r) - s.lambda(u, r) > 0.0) s.flows(l, r) = capacities[v];
  }
}

namespace {

void step(SolverState& s, NodeId source, const Eigen::VectorXd& capacities,
          const DirectedLinks& links, const ReceiverIndex& recv,
          const SolverConfig& sc, Eigen::MatrixXd& drift) {
  // Rate first (the source reacts to the current multipliers), then the flow
  // assignment, then the multiplier update driven by those flows.
  const double source_pressure = s.lambda.row(source).sum();
  s.z = std::max(0.0, s.z + sc.alpha * (utility_prime(sc, s.z) -
                                        source_pressure));
  assign_flows(s, links, capacities);

  drift.setZero();
  for (int l = 0; l < links.count(); ++l) {
    if (s.phys[l] <= 0.0) continue;
    drift.row(links.from[l]) -= s.flows.row(l);
    drift.row(links.to[l]) += s.flows.row(l);
  }
  drift.row(source).array() += s.z;

  s.lambda = (s.lambda + sc.k * drift).cwiseMax(0.0);
  for (int r = 0; r < recv.count(); ++r) s.lambda(recv.receivers[r], r) = 0.0;
}

}  // namespace

void primal_dual_step(SolverState& s, const OverlayGraph& g,
                      const DirectedLinks& links, const ReceiverIndex& recv,
                      const SolverConfig& sc) {
  Eigen::VectorXd caps =
      Eigen::Map<const Eigen::VectorXd>(g.capacities().data(), g.node_count());
  Eigen::MatrixXd drift(g.node_count(), recv.count());
  step(s, g.source(), caps, links, recv, sc, drift);
}

RateResult solve_rate(const OverlayGraph& g, const Configuration& f,
                      const SolverConfig& sc) {
  if (g.node_count() < 2)
    throw std::invalid_argument("solve_rate needs at least one receiver");
  RateResult res;
  if (!is_connected_from_source(g, f)) {
    // Unreachable receivers pin the optimum at zero; report it directly
    // instead of grinding the dynamics toward it.
    res.disconnected = true;
    res.converged = true;
    res.node_rates.assign(g.node_count(), 0.0);
    return res;
  }

  const DirectedLinks links = DirectedLinks::build(g, f);
  const ReceiverIndex recv = ReceiverIndex::build(g);

  double scale = sc.rate_scale;
  if (scale <= 0.0)
    scale = *std::max_element(g.capacities().begin(), g.capacities().end());
  if (scale <= 0.0) scale = 1.0;
  Eigen::VectorXd caps =
      Eigen::Map<const Eigen::VectorXd>(g.capacities().data(), g.node_count()) /
      scale;

  SolverState s = make_initial_state(g, links, caps[g.source()]);
  Eigen::MatrixXd drift(g.node_count(), recv.count());
  res.z_trace.reserve(sc.max_iters);

  const int W = std::max(2, sc.window);
  const int R = recv.count();

  // Sliding-window sums of z, total multiplier mass, and per-receiver
  // delivered flow. Stationarity of z alone is not enough: the source rate
  // can plateau while interior queues still grow, so the multiplier mass
  // must settle too.
  std::vector<double> mass_trace;
  mass_trace.reserve(sc.max_iters);
  Eigen::MatrixXd delivered_ring = Eigen::MatrixXd::Zero(W, R);
  Eigen::VectorXd delivered_sum = Eigen::VectorXd::Zero(R);
  Eigen::VectorXd delivered_now(R);
  double z_sum = 0.0;

  double window_z = 0.0;
  for (int it = 1; it <= sc.max_iters; ++it) {
    step(s, g.source(), caps, links, recv, sc, drift);
    res.z_trace.push_back(s.z);
    mass_trace.push_back(s.lambda.sum());
    res.iters = it;

    for (int r = 0; r < R; ++r) {
      double in_flow = 0.0;
      for (int l : links.in[recv.receivers[r]]) in_flow += s.flows(l, r);
      delivered_now[r] = in_flow;
    }
    const int slot = (it - 1) % W;
    delivered_sum += delivered_now - delivered_ring.row(slot).transpose();
    delivered_ring.row(slot) = delivered_now;
    z_sum += s.z - (it > W ? res.z_trace[it - 1 - W] : 0.0);

    if (it == 1 || it % std::max(1, sc.trace_every) == 0)
      res.trace.push_back(
          {it, s.z * scale, s.lambda.row(g.source()).sum() / scale});

    if (it >= W && it % 200 == 0) {
      double z_lo = s.z, z_hi = s.z, m_lo = mass_trace[it - 1], m_hi = m_lo;
      double m_sum = 0.0;
      for (int i = it - W; i < it; ++i) {
        z_lo = std::min(z_lo, res.z_trace[i]);
        z_hi = std::max(z_hi, res.z_trace[i]);
        m_lo = std::min(m_lo, mass_trace[i]);
        m_hi = std::max(m_hi, mass_trace[i]);
        m_sum += mass_trace[i];
      }
      window_z = z_sum / W;
      const bool z_flat =
          z_hi - z_lo <= sc.conv_tol * std::max(window_z, 1e-12);
      const bool mass_flat =
          m_hi - m_lo <= sc.conv_tol * std::max(m_sum / W, 1e-12);
      if (z_flat && mass_flat) {
        res.converged = true;
        break;
      }
    }
  }
  const int W2 = std::min<int>(W, static_cast<int>(res.z_trace.size()));
  if (!res.converged) window_z = W2 > 0 ? z_sum / W2 : 0.0;

  // The injected-rate average overestimates while queues are still filling,
  // the delivered average overestimates while they drain; the smaller of the
  // two is the defensible rate claim.
  const double worst_delivered =
      W2 > 0 ? delivered_sum.minCoeff() / W2 : 0.0;
  res.rate = std::min(window_z, worst_delivered) * scale;
  for (double& z : res.z_trace) z *= scale;

  res.node_rates.assign(g.node_count(), 0.0);
  res.node_rates[g.source()] = window_z * scale;
  for (int r = 0; r < R; ++r)
    res.node_rates[recv.receivers[r]] =
        (W2 > 0 ? delivered_sum[r] / W2 : 0.0) * scale;
  return res;
}

void write_trace_csv(const RateResult& r, std::ostream& out) {
  out << "iter,z,sum_lambda_source\n";
  char buf[96];
  for (const auto& row : r.trace) {
    std::snprintf(buf, sizeof(buf), "%d,%.10g,%.10g\n", row.iter, row.z,
                  row.sum_lambda_source);
    out << buf;
  }
}

}  // namespace p2pcast
