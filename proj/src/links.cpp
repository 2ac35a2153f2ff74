#include "p2pcast/links.hpp"

namespace p2pcast {

DirectedLinks DirectedLinks::build(const OverlayGraph& g,
                                   const Configuration& f) {
  DirectedLinks links;
  const int n = g.node_count();
  links.out.assign(n, {});
  links.in.assign(n, {});
  const auto add = [&](NodeId a, NodeId b) {
    if (b == g.source()) return;
    const int id = links.count();
    links.from.push_back(a);
    links.to.push_back(b);
    links.out[a].push_back(id);
    links.in[b].push_back(id);
  };
  for (const auto& [u, v] : f.pairs()) {
    add(u, v);
    add(v, u);
  }
  return links;
}

ReceiverIndex ReceiverIndex::build(const OverlayGraph& g) {
  ReceiverIndex idx;
  idx.index_of.assign(g.node_count(), -1);
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (v == g.source()) continue;
    idx.index_of[v] = idx.count();
    idx.receivers.push_back(v);
  }
  return idx;
}

}  // namespace p2pcast
