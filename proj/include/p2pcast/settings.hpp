#pragma once

#include <vector>

#include "p2pcast/overlay.hpp"

namespace p2pcast {

// Built-in 5-node overlay with unit capacities: a fixed backbone
// (source-1, source-2, source-4, 2-3, 3-4) plus two pairs node 1 may toggle
// (1-2 and 1-4). The hopping space has four configurations; the backbone
// alone supports broadcast rate 1/2 and each toggled pair raises it to 1.
struct FourConfigInstance {
  OverlayGraph graph;
  std::vector<NodePair> frozen_pairs;
  std::vector<NodePair> mutable_pairs;

  Configuration full() const;                 // both toggled pairs in use
  std::vector<Configuration> space() const;   // all four, enumeration order
};

FourConfigInstance fourconfig_instance();

}  // namespace p2pcast
