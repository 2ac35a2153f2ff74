#include "p2pcast/oracle.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "p2pcast/links.hpp"

namespace p2pcast {

namespace {

constexpr double kFlowEps = 1e-12;

struct DinicEdge {
  int to;
  double cap;
  int rev;
};

class Dinic {
 public:
  explicit Dinic(int n) : adj_(n), level_(n), iter_(n) {}

  void add_edge(int u, int v, double cap) {
    adj_[u].push_back({v, cap, static_cast<int>(adj_[v].size())});
    adj_[v].push_back({u, 0.0, static_cast<int>(adj_[u].size()) - 1});
  }

  double run(int s, int t) {
    double flow = 0.0;
    while (bfs(s, t)) {
      std::fill(iter_.begin(), iter_.end(), 0);
      for (;;) {
        const double f = dfs(s, t, std::numeric_limits<double>::infinity());
        if (f <= kFlowEps) break;
        flow += f;
      }
    }
    return flow;
  }

 private:
  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::vector<int> queue{s};
    level_[s] = 0;
    for (std::size_t h = 0; h < queue.size(); ++h) {
      const int v = queue[h];
      for (const auto& e : adj_[v]) {
        if (e.cap > kFlowEps && level_[e.to] < 0) {
          level_[e.to] = level_[v] + 1;
          queue.push_back(e.to);
        }
      }
    }
    return level_[t] >= 0;
  }

  double dfs(int v, int t, double limit) {
    if (v == t) return limit;
    for (int& i = iter_[v]; i < static_cast<int>(adj_[v].size()); ++i) {
      auto& e = adj_[v][i];
      if (e.cap <= kFlowEps || level_[e.to] != level_[v] + 1) continue;
      const double got = dfs(e.to, t, std::min(limit, e.cap));
      if (got > kFlowEps) {
        e.cap -= got;
        adj_[e.to][e.rev].cap += got;
        return got;
      }
    }
    return 0.0;
  }

  std::vector<std::vector<DinicEdge>> adj_;
  std::vector<int> level_;
  std::vector<int> iter_;
};

}  // namespace

double max_flow(const CapacitatedDigraph& g, NodeId s, NodeId d) {
  if (s == d) throw std::invalid_argument("max_flow: source equals sink");
  if (s < 0 || s >= g.nodes || d < 0 || d >= g.nodes)
    throw std::invalid_argument("max_flow: node out of range");
  Dinic dinic(g.nodes);
  for (const auto& a : g.arcs) {
    if (a.cap < 0) throw std::invalid_argument("max_flow: negative capacity");
    dinic.add_edge(a.from, a.to, a.cap);
  }
  return dinic.run(s, d);
}

namespace {

// Variable layout for the rate LP: z, then one g per directed link, then one
// f per (link, receiver).
struct MpLayout {
  DirectedLinks links;
  ReceiverIndex recv;
  int n_vars = 0;
  int var_g(int link) const { return 1 + link; }
  int var_f(int link, int r) const {
    return 1 + links.count() + link * recv.count() + r;
  }
};

MpLayout mp_layout(const OverlayGraph& g, const Configuration& f) {
  MpLayout lay{DirectedLinks::build(g, f), ReceiverIndex::build(g), 0};
  lay.n_vars = 1 + lay.links.count() * (1 + lay.recv.count());
  return lay;
}

struct MpProblem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
};

MpProblem build_mp(const OverlayGraph& g, const MpLayout& lay) {
  const int L = lay.links.count();
  const int R = lay.recv.count();
  const int n = lay.n_vars;

  int rows = 0;
  for (int r = 0; r < R; ++r) rows += g.node_count() - 1;  // conservation
  rows += L * R;                                           // f <= g
  int cap_rows = 0;
  for (NodeId v = 0; v < g.node_count(); ++v)
    if (!lay.links.out[v].empty()) ++cap_rows;
  rows += cap_rows;

  MpProblem p;
  p.A = Eigen::MatrixXd::Zero(rows, n);
  p.b = Eigen::VectorXd::Zero(rows);
  p.c = Eigen::VectorXd::Zero(n);
  p.c[0] = 1.0;

  int row = 0;
  for (int r = 0; r < R; ++r) {
    const NodeId d = lay.recv.receivers[r];
    for (NodeId v = 0; v < g.node_count(); ++v) {
      if (v == d) continue;
      for (int l : lay.links.in[v]) p.A(row, lay.var_f(l, r)) += 1.0;
      for (int l : lay.links.out[v]) p.A(row, lay.var_f(l, r)) -= 1.0;
      if (v == g.source()) p.A(row, 0) += 1.0;
      ++row;
    }
  }
  for (int l = 0; l < L; ++l) {
    for (int r = 0; r < R; ++r) {
      p.A(row, lay.var_f(l, r)) = 1.0;
      p.A(row, lay.var_g(l)) = -1.0;
      ++row;
    }
  }
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (lay.links.out[v].empty()) continue;
    for (int l : lay.links.out[v]) p.A(row, lay.var_g(l)) = 1.0;
    p.b[row] = g.capacity(v);
    ++row;
  }
  return p;
}

}  // namespace

MpSolution solve_mp_full(const OverlayGraph& g, const Configuration& f) {
  if (g.node_count() < 2)
    throw std::invalid_argument("rate LP needs at least one receiver");
  MpSolution out;
  if (!is_connected_from_source(g, f)) return out;  // rate 0 by convention

  const MpLayout lay = mp_layout(g, f);
  const MpProblem p = build_mp(g, lay);
  out.lp = lp_maximize<double>(p.A, p.b, p.c);
  switch (out.lp.status) {
    case LpStatus::optimal:
      break;
    case LpStatus::unbounded:
      throw LpError("rate LP reported unbounded (malformed instance)");
    case LpStatus::iteration_limit:
      throw LpError("rate LP hit the pivot limit (numerical failure)");
  }
  out.lp_solved = true;
  out.rate = out.lp.value;
  return out;
}

double solve_mp(const OverlayGraph& g, const Configuration& f) {
  return solve_mp_full(g, f).rate;
}

std::string describe_mp_lp(const OverlayGraph& g, const Configuration& f) {
  const MpLayout lay = mp_layout(g, f);
  const int R = lay.recv.count();
  std::ostringstream os;
  os << "max z\n";
  for (int r = 0; r < R; ++r) {
    const NodeId d = lay.recv.receivers[r];
    for (NodeId v = 0; v < g.node_count(); ++v) {
      if (v == d) continue;
      os << "  conserve[v=" << v << ",d=" << d << "]:";
      for (int l : lay.links.in[v])
        os << " +f(" << lay.links.from[l] << "->" << lay.links.to[l] << ",d"
           << d << ")";
      if (v == g.source()) os << " +z";
      for (int l : lay.links.out[v])
        os << " -f(" << lay.links.from[l] << "->" << lay.links.to[l] << ",d"
           << d << ")";
      os << " <= 0\n";
    }
  }
  for (int l = 0; l < lay.links.count(); ++l)
    os << "  piggyback[" << lay.links.from[l] << "->" << lay.links.to[l]
       << "]: f <= g for every destination\n";
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (lay.links.out[v].empty()) continue;
    os << "  capacity[v=" << v << "]: sum g(" << v << "->*) <= "
       << g.capacity(v) << "\n";
  }
  return os.str();
}

double fullmesh_rate(const OverlayGraph& g) {
  const int receivers = g.node_count() - 1;
  if (receivers < 1)
    throw std::invalid_argument("fullmesh_rate needs at least one receiver");
  double total = 0.0;
  for (NodeId v = 0; v < g.node_count(); ++v) total += g.capacity(v);
  return std::min(g.capacity(g.source()), total / receivers);
}

double baseline_rate(const OverlayGraph& g, const Configuration& f) {
  const int n = g.node_count();
  if (n < 2) throw std::invalid_argument("baseline needs a receiver");
  CapacitatedDigraph net;
  net.nodes = n;
  for (NodeId v = 0; v < n; ++v) {
    const auto& peers = f.in_use(v);
    if (peers.empty()) continue;
    const double share = g.capacity(v) / static_cast<double>(peers.size());
    for (NodeId u : peers) net.arcs.push_back({v, u, share});
  }
  double rate = std::numeric_limits<double>::infinity();
  for (NodeId d = 0; d < n; ++d) {
    if (d == g.source()) continue;
    rate = std::min(rate, max_flow(net, g.source(), d));
    if (rate <= 0.0) return 0.0;
  }
  return rate;
}

}  // namespace p2pcast
