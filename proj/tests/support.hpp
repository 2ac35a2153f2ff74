#pragma once

// Test-only oracles, deliberately independent of the library code paths they
// check: bitmask subset enumeration, bitwise field multiplication, min-cut
// enumeration, LP basis enumeration, and a direct linear-system stationary
// solve.

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <vector>

#include "p2pcast/oracle.hpp"
#include "p2pcast/overlay.hpp"
#include "p2pcast/rng.hpp"

namespace testsupport {

using p2pcast::CapacitatedDigraph;
using p2pcast::Configuration;
using p2pcast::NodeId;
using p2pcast::NodePair;
using p2pcast::OverlayGraph;
using p2pcast::Rng;

// Every degree-feasible subset of the potential pairs, found by scanning all
// 2^|E| bitmasks. Returned as sorted pair lists in lexicographic order.
inline std::vector<std::vector<NodePair>> brute_force_feasible_subsets(
    const OverlayGraph& g) {
  const auto& edges = g.potential_pairs();
  const int e = static_cast<int>(edges.size());
  std::vector<std::vector<NodePair>> out;
  for (std::uint32_t mask = 0; mask < (1u << e); ++mask) {
    std::vector<int> degree(g.node_count(), 0);
    std::vector<NodePair> pairs;
    bool ok = true;
    for (int i = 0; i < e && ok; ++i) {
      if (!(mask & (1u << i))) continue;
      pairs.push_back(edges[i]);
      if (++degree[edges[i].first] > g.degree_bound(edges[i].first) ||
          ++degree[edges[i].second] > g.degree_bound(edges[i].second))
        ok = false;
    }
    if (ok) out.push_back(std::move(pairs));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Bit-by-bit carryless multiplication reduced by x^8 + x^4 + x^3 + x + 1.
inline std::uint8_t gf_mul_slow(std::uint8_t a, std::uint8_t b) {
  int acc = 0;
  int aa = a;
  for (int bit = 0; bit < 8; ++bit) {
    if (b & (1 << bit)) acc ^= aa << bit;
  }
  for (int bit = 15; bit >= 8; --bit) {
    if (acc & (1 << bit)) acc ^= 0x11b << (bit - 8);
  }
  return static_cast<std::uint8_t>(acc);
}

// Max-flow via min-cut enumeration over all source-side subsets.
inline double min_cut_value(const CapacitatedDigraph& g, NodeId s, NodeId t) {
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << g.nodes); ++mask) {
    if (!(mask & (1u << s)) || (mask & (1u << t))) continue;
    double cut = 0.0;
    for (const auto& a : g.arcs)
      if ((mask & (1u << a.from)) && !(mask & (1u << a.to))) cut += a.cap;
    best = std::min(best, cut);
  }
  return best;
}

// LP optimum of max c'x s.t. Ax <= b, x >= 0 by enumerating all candidate
// basic solutions (choose n active constraints out of the m + n available).
inline double lp_by_basis_enumeration(const Eigen::MatrixXd& A,
                                      const Eigen::VectorXd& b,
                                      const Eigen::VectorXd& c) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  const int total = m + n;  // rows of [A; -I]
  std::vector<int> pick(n);
  double best = -std::numeric_limits<double>::infinity();

  const auto consider = [&]() {
    Eigen::MatrixXd M(n, n);
    Eigen::VectorXd rhs(n);
    for (int i = 0; i < n; ++i) {
      if (pick[i] < m) {
        M.row(i) = A.row(pick[i]);
        rhs[i] = b[pick[i]];
      } else {
        M.row(i).setZero();
        M(i, pick[i] - m) = -1.0;
        rhs[i] = 0.0;
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible()) return;
    const Eigen::VectorXd x = lu.solve(rhs);
    if (x.minCoeff() < -1e-8) return;
    if (((A * x) - b).maxCoeff() > 1e-8) return;
    best = std::max(best, c.dot(x));
  };

  // iterate over all n-subsets of [0, total)
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  for (;;) {
    pick = idx;
    consider();
    int i = n - 1;
    while (i >= 0 && idx[i] == total - n + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < n; ++j) idx[j] = idx[j - 1] + 1;
  }
  return best;
}

// Stationary distribution of a CTMC generator: solve Q^T p = 0 with the
// first balance equation replaced by the normalization sum(p) = 1. Rows are
// equilibrated and the solve runs in long double; the generators here can be
// extremely stiff (rate ratios of e^{beta dx}).
inline Eigen::VectorXd stationary_from_generator(const Eigen::MatrixXd& Q) {
  using LongMatrix =
      Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using LongVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  const int n = static_cast<int>(Q.rows());
  LongMatrix M = Q.transpose().cast<long double>();
  M.row(0).setOnes();
  LongVector rhs = LongVector::Zero(n);
  rhs[0] = 1.0L;
  for (int i = 1; i < n; ++i) {
    const long double s = M.row(i).cwiseAbs().maxCoeff();
    if (s > 0.0L) M.row(i) /= s;
  }
  LongVector col_scale(n);
  for (int j = 0; j < n; ++j) {
    const long double s = M.col(j).cwiseAbs().maxCoeff();
    col_scale[j] = s > 0.0L ? 1.0L / s : 1.0L;
    M.col(j) *= col_scale[j];
  }
  const Eigen::FullPivLU<LongMatrix> lu(M);
  LongVector y = lu.solve(rhs);
  // two steps of iterative refinement
  y += lu.solve(rhs - M * y);
  y += lu.solve(rhs - M * y);
  return (col_scale.array() * y.array()).matrix().cast<double>();
}

// Seeded random overlay: a random tree plus extra pairs, capacities around
// unit scale, bounds 2..4.
inline OverlayGraph random_overlay(std::uint64_t seed, int min_nodes = 4,
                                   int max_nodes = 8, int max_pairs = 12) {
  Rng rng(seed);
  const int n =
      min_nodes + static_cast<int>(rng.next_below(max_nodes - min_nodes + 1));
  std::vector<NodePair> pairs;
  for (NodeId v = 1; v < n; ++v)
    pairs.push_back(p2pcast::normalized_pair(
        v, static_cast<NodeId>(rng.next_below(v))));
  std::sort(pairs.begin(), pairs.end());
  const int extra = static_cast<int>(rng.next_below(
      std::max<std::uint64_t>(1, max_pairs - pairs.size() + 1)));
  for (int i = 0; i < extra; ++i) {
    const NodeId a = static_cast<NodeId>(rng.next_below(n));
    const NodeId b = static_cast<NodeId>(rng.next_below(n));
    if (a == b) continue;
    const NodePair p = p2pcast::normalized_pair(a, b);
    if (std::find(pairs.begin(), pairs.end(), p) == pairs.end())
      pairs.push_back(p);
  }
  std::vector<double> caps(n);
  std::vector<int> bounds(n);
  for (int v = 0; v < n; ++v) {
    caps[v] = 0.5 + 1.5 * rng.next_double();
    bounds[v] = 2 + static_cast<int>(rng.next_below(3));
  }
  return OverlayGraph(0, std::move(caps), std::move(bounds), std::move(pairs));
}

// Random degree-feasible configuration; optionally retried until it keeps
// every receiver reachable.
inline Configuration random_configuration(const OverlayGraph& g, Rng& rng,
                                          bool force_connected = false) {
  for (int attempt = 0; attempt < 200; ++attempt) {
    std::vector<NodePair> order = g.potential_pairs();
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.next_below(i)]);
    std::vector<int> degree(g.node_count(), 0);
    std::vector<NodePair> pairs;
    for (const auto& [u, v] : order) {
      if (rng.next_double() < 0.3) continue;
      if (degree[u] >= g.degree_bound(u) || degree[v] >= g.degree_bound(v))
        continue;
      pairs.emplace_back(u, v);
      ++degree[u];
      ++degree[v];
    }
    Configuration f = Configuration::make(g, std::move(pairs));
    if (!force_connected || p2pcast::is_connected_from_source(g, f)) return f;
  }
  // fall back to everything that fits, added greedily
  std::vector<int> degree(g.node_count(), 0);
  std::vector<NodePair> pairs;
  for (const auto& [u, v] : g.potential_pairs()) {
    if (degree[u] >= g.degree_bound(u) || degree[v] >= g.degree_bound(v))
      continue;
    pairs.emplace_back(u, v);
    ++degree[u];
    ++degree[v];
  }
  return Configuration::make(g, std::move(pairs));
}

}  // namespace testsupport
