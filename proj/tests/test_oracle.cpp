#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "p2pcast/links.hpp"
#include "p2pcast/oracle.hpp"
#include "p2pcast/settings.hpp"
#include "p2pcast/simplex.hpp"
#include "support.hpp"

using namespace p2pcast;

namespace {

void check_duality_gap(const MpSolution& sol) {
  if (!sol.lp_solved) return;
  const double scale = std::max(1.0, std::abs(sol.lp.value));
  CHECK(std::abs(sol.lp.value - sol.lp.dual_value) <= 1e-6 * scale);
}

// Best min-over-receivers max flow over all allocations of each node's
// capacity to its out-links in multiples of C_v / steps. Exponential; only
// usable on instances with few branching nodes.
double grid_best_rate(const OverlayGraph& g, const Configuration& f,
                      int steps) {
  const DirectedLinks links = DirectedLinks::build(g, f);
  std::vector<NodeId> branching;
  for (NodeId v = 0; v < g.node_count(); ++v)
    if (!links.out[v].empty()) branching.push_back(v);

  std::vector<double> link_caps(links.count(), 0.0);
  double best = 0.0;

  const std::function<void(std::size_t)> assign_node = [&](std::size_t vi) {
    if (vi == branching.size()) {
      CapacitatedDigraph net;
      net.nodes = g.node_count();
      for (int l = 0; l < links.count(); ++l)
        net.arcs.push_back({links.from[l], links.to[l], link_caps[l]});
      double rate = std::numeric_limits<double>::infinity();
      for (NodeId d = 0; d < g.node_count(); ++d) {
        if (d == g.source()) continue;
        rate = std::min(rate, max_flow(net, g.source(), d));
      }
      best = std::max(best, rate);
      return;
    }
    const NodeId v = branching[vi];
    const auto& out = links.out[v];
    const double unit = g.capacity(v) / steps;
    // compositions of `steps` into |out| parts
    const std::function<void(std::size_t, int)> split = [&](std::size_t oi,
                                                            int left) {
      if (oi + 1 == out.size()) {
        link_caps[out[oi]] = unit * left;
        assign_node(vi + 1);
        return;
      }
      for (int take = 0; take <= left; ++take) {
        link_caps[out[oi]] = unit * take;
        split(oi + 1, left - take);
      }
    };
    split(0, steps);
  };
  assign_node(0);
  return best;
}

double grid_tolerance(const OverlayGraph& g, const Configuration& f,
                      int steps) {
  const DirectedLinks links = DirectedLinks::build(g, f);
  double tol = 0.0;
  for (NodeId v = 0; v < g.node_count(); ++v)
    tol += links.out[v].size() * g.capacity(v) / steps;
  return tol;
}

}  // namespace

TEST_CASE("simplex solves a textbook instance") {
  Eigen::MatrixXd A(2, 2);
  A << 1, 0, 0, 1;
  Eigen::VectorXd b(2);
  b << 1, 2;
  Eigen::VectorXd c(2);
  c << 1, 1;
  const auto sol = lp_maximize<double>(A, b, c);
  REQUIRE(sol.status == LpStatus::optimal);
  CHECK(sol.value == doctest::Approx(3.0));
  CHECK(sol.dual_value == doctest::Approx(3.0));
}

TEST_CASE("simplex with Bland's rule passes the classic cycling instance") {
  Eigen::MatrixXd A(3, 4);
  A << 0.25, -60, -0.04, 9,
      0.5, -90, -0.02, 3,
      0, 0, 1, 0;
  Eigen::VectorXd b(3);
  b << 0, 0, 1;
  Eigen::VectorXd c(4);
  c << 0.75, -150, 0.02, -6;
  const auto sol = lp_maximize<double>(A, b, c);
  REQUIRE(sol.status == LpStatus::optimal);
  const double expected = testsupport::lp_by_basis_enumeration(A, b, c);
  CHECK(sol.value == doctest::Approx(expected).epsilon(1e-9));
  CHECK(sol.value == doctest::Approx(0.05));
}

TEST_CASE("simplex agrees with basis enumeration on random instances") {
  Rng rng(2024);
  int solved = 0;
  for (int t = 0; t < 40; ++t) {
    const int m = 2 + static_cast<int>(rng.next_below(3));
    const int n = 2 + static_cast<int>(rng.next_below(3));
    Eigen::MatrixXd A(m, n);
    Eigen::VectorXd b(m), c(n);
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < n; ++j) A(i, j) = 2.0 * rng.next_double() - 1.0;
      b[i] = 2.0 * rng.next_double();
    }
    for (int j = 0; j < n; ++j) c[j] = 2.0 * rng.next_double() - 1.0;
    const auto sol = lp_maximize<double>(A, b, c);
    if (sol.status != LpStatus::optimal) continue;  // unbounded draws
    ++solved;
    const double expected = testsupport::lp_by_basis_enumeration(A, b, c);
    CHECK(sol.value == doctest::Approx(expected).epsilon(1e-7));
    CHECK(sol.dual_value ==
          doctest::Approx(sol.value).epsilon(1e-9).scale(1.0));
  }
  CHECK(solved >= 20);
}

TEST_CASE("simplex reports unbounded rays") {
  Eigen::MatrixXd A(1, 1);
  A << -1;
  Eigen::VectorXd b(1);
  b << 0;
  Eigen::VectorXd c(1);
  c << 1;
  CHECK(lp_maximize<double>(A, b, c).status == LpStatus::unbounded);
}

TEST_CASE("max_flow basics") {
  CapacitatedDigraph g;
  g.nodes = 2;
  g.arcs = {{0, 1, 7.0}};
  CHECK(max_flow(g, 0, 1) == doctest::Approx(7.0));
  CHECK_THROWS_AS(max_flow(g, 0, 0), std::invalid_argument);

  CapacitatedDigraph diamond;
  diamond.nodes = 4;
  diamond.arcs = {{0, 1, 1}, {0, 2, 1}, {1, 3, 1}, {2, 3, 1}};
  CHECK(max_flow(diamond, 0, 3) == doctest::Approx(2.0));
  CHECK(max_flow(diamond, 0, 3) ==
        doctest::Approx(testsupport::min_cut_value(diamond, 0, 3)));

  CapacitatedDigraph split;
  split.nodes = 3;
  split.arcs = {{0, 1, 5.0}};
  CHECK(max_flow(split, 0, 2) == doctest::Approx(0.0));
}

TEST_CASE("max_flow equals enumerated min cut on random digraphs") {
  Rng rng(31337);
  for (int t = 0; t < 50; ++t) {
    CapacitatedDigraph g;
    g.nodes = 4 + static_cast<int>(rng.next_below(4));
    const int arcs = 4 + static_cast<int>(rng.next_below(10));
    for (int a = 0; a < arcs; ++a) {
      const NodeId u = static_cast<NodeId>(rng.next_below(g.nodes));
      const NodeId v = static_cast<NodeId>(rng.next_below(g.nodes));
      if (u == v) continue;
      g.arcs.push_back({u, v, rng.next_double() * 3.0});
    }
    const double flow = max_flow(g, 0, g.nodes - 1);
    const double cut = testsupport::min_cut_value(g, 0, g.nodes - 1);
    CHECK(flow == doctest::Approx(cut).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("rate LP reproduces the four-config demo rates") {
  const FourConfigInstance fc = fourconfig_instance();
  const auto space = fc.space();
  REQUIRE(space.size() == 4);
  std::vector<double> rates;
  for (const auto& f : space) {
    const MpSolution sol = solve_mp_full(fc.graph, f);
    check_duality_gap(sol);
    rates.push_back(sol.rate);
  }
  // enumeration order: backbone only, +1-2, +both, +1-4
  CHECK(rates[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(rates[1] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rates[2] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rates[3] == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("rate LP on a unit chain and degenerate cases") {
  const OverlayGraph chain(0, {1, 1, 1}, {2, 2, 2}, {{0, 1}, {1, 2}});
  CHECK(solve_mp(chain, Configuration::make(chain, {{0, 1}, {1, 2}})) ==
        doctest::Approx(1.0).epsilon(1e-9));
  // unreachable receiver => rate 0 without running the LP
  const MpSolution zero = solve_mp_full(chain, Configuration::make(chain, {}));
  CHECK(zero.rate == 0.0);
  CHECK_FALSE(zero.lp_solved);

  const OverlayGraph lonely(0, {1.0}, {1}, {});
  CHECK_THROWS_AS(solve_mp(lonely, Configuration::make(lonely, {})),
                  std::invalid_argument);
}

TEST_CASE("rate LP matches the capacity-grid search") {
  struct Case {
    std::vector<NodePair> pairs;
    std::uint64_t cap_seed;
  };
  // shapes picked to keep the grid search tractable (few branching nodes)
  const std::vector<Case> cases = {
      {{{0, 1}, {0, 2}, {1, 3}, {2, 4}, {2, 5}}, 1},
      {{{0, 1}, {1, 2}, {1, 3}, {3, 4}, {3, 5}}, 2},
      {{{0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 4}}, 3},
  };
  const int steps = 32;
  for (const auto& c : cases) {
    int n = 0;
    for (const auto& [u, v] : c.pairs) n = std::max({n, u + 1, v + 1});
    Rng rng(c.cap_seed);
    std::vector<double> caps(n);
    for (auto& x : caps) x = 0.5 + 1.5 * rng.next_double();
    const OverlayGraph g(0, caps, std::vector<int>(n, n), c.pairs);
    const Configuration f = Configuration::make(g, c.pairs);

    const double lp = solve_mp(g, f);
    const double grid = grid_best_rate(g, f, steps);
    const double tol = grid_tolerance(g, f, steps);
    CHECK(grid <= lp + 1e-9);       // every grid point is feasible
    CHECK(lp - grid <= tol + 1e-9); // rounding the optimum loses <= tol
  }
}

TEST_CASE("fullmesh_rate") {
  OverlayGraph g(0, {768, 768, 768}, {2, 2, 2}, {{0, 1}, {0, 2}, {1, 2}});
  CHECK(fullmesh_rate(g) == doctest::Approx(768.0));

  OverlayGraph one(0, {300, 100}, {1, 1}, {{0, 1}});
  CHECK(fullmesh_rate(one) == doctest::Approx(300.0));  // single receiver: C_s

  OverlayGraph weak(0, {100, 10, 10, 10}, {3, 3, 3, 3},
                    {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  CHECK(fullmesh_rate(weak) == doctest::Approx((100.0 + 30.0) / 3.0));

  CHECK_THROWS_AS(fullmesh_rate(OverlayGraph(0, {1.0}, {1}, {})),
                  std::invalid_argument);
}

TEST_CASE("rate LP attains the fullmesh bound on unconstrained graphs") {
  Rng rng(555);
  for (int t = 0; t < 5; ++t) {
    std::vector<double> caps(5);
    for (auto& c : caps) c = 0.5 + 1.5 * rng.next_double();
    const OverlayGraph g = complete_graph(caps, std::vector<int>(5, 4));
    const Configuration full = Configuration::make(g, g.potential_pairs());
    CHECK(solve_mp(g, full) ==
          doctest::Approx(fullmesh_rate(g)).epsilon(1e-6));
  }
}

TEST_CASE("baseline_rate basics") {
  // a node with one in-use neighbor gives it the full capacity
  const OverlayGraph chain(0, {2, 3, 1}, {2, 2, 2}, {{0, 1}, {1, 2}});
  const Configuration f = Configuration::make(chain, {{0, 1}, {1, 2}});
  // node 1 splits its 3 between 0 and 2: edge 1->2 carries 1.5
  CHECK(baseline_rate(chain, f) == doctest::Approx(1.5));

  const OverlayGraph cap1(0, {2, 3, 1}, {2, 2, 2}, {{0, 1}, {1, 2}});
  const Configuration just_one = Configuration::make(cap1, {{0, 1}});
  CHECK(baseline_rate(cap1, just_one) == 0.0);  // node 2 unreachable
}

TEST_CASE("baseline never beats the LP and the LP never beats fullmesh") {
  for (std::uint64_t seed : {3u, 4u, 5u}) {
    const OverlayGraph g = testsupport::random_overlay(seed, 4, 6, 9);
    const auto space = enumerate_configurations(g);
    const double mesh = fullmesh_rate(g);
    for (const auto& f : space) {
      const double lp = solve_mp(g, f);
      const double base = baseline_rate(g, f);
      CHECK(base <= lp + 1e-9);
      CHECK(lp <= mesh + 1e-9);
      CHECK(base >= 0.0);
    }
  }
}

TEST_CASE("rate LP is monotone under added pairs") {
  const OverlayGraph g = testsupport::random_overlay(77, 5, 5, 8);
  const auto space = enumerate_configurations(g);
  std::map<std::string, double> rate;
  for (const auto& f : space) rate[f.key()] = solve_mp(g, f);
  for (const auto& f : space) {
    for (const auto& [u, v] : g.potential_pairs()) {
      if (f.contains(u, v)) continue;
      if (f.in_use_degree(u) >= g.degree_bound(u) ||
          f.in_use_degree(v) >= g.degree_bound(v))
        continue;
      const Configuration bigger = f.with_pair(g, u, v);
      CHECK(rate.at(bigger.key()) >= rate.at(f.key()) - 1e-9);
    }
  }
}

TEST_CASE("LP instance dump mentions every constraint family") {
  const FourConfigInstance fc = fourconfig_instance();
  const std::string text = describe_mp_lp(fc.graph, fc.full());
  CHECK(text.find("conserve") != std::string::npos);
  CHECK(text.find("piggyback") != std::string::npos);
  CHECK(text.find("capacity") != std::string::npos);
}
