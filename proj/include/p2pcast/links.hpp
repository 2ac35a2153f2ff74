#pragma once

#include <vector>

#include "p2pcast/overlay.hpp"

namespace p2pcast {

// Directed streaming links induced by a configuration: each in-use pair
// {u,v} enables (u,v) and (v,u), except that links into the source are
// dropped (the source never downloads).
struct DirectedLinks {
  std::vector<NodeId> from;
  std::vector<NodeId> to;
  std::vector<std::vector<int>> out;  // per node, link ids leaving it
  std::vector<std::vector<int>> in;   // per node, link ids entering it

  int count() const { return static_cast<int>(from.size()); }

  static DirectedLinks build(const OverlayGraph& g, const Configuration& f);
};

// Receivers R = V - {s} in node order, plus node -> receiver index (-1 for
// the source).
struct ReceiverIndex {
  std::vector<NodeId> receivers;
  std::vector<int> index_of;

  int count() const { return static_cast<int>(receivers.size()); }

  static ReceiverIndex build(const OverlayGraph& g);
};

}  // namespace p2pcast
