#include "p2pcast/settings.hpp"

namespace p2pcast {

FourConfigInstance fourconfig_instance() {
  std::vector<NodePair> frozen{{0, 1}, {0, 2}, {0, 4}, {2, 3}, {3, 4}};
  std::vector<NodePair> toggled{{1, 2}, {1, 4}};
  std::vector<NodePair> all = frozen;
  all.insert(all.end(), toggled.begin(), toggled.end());
  OverlayGraph graph(0, std::vector<double>(5, 1.0), std::vector<int>(5, 3),
                     all);
  return FourConfigInstance{std::move(graph), std::move(frozen),
                            std::move(toggled)};
}

Configuration FourConfigInstance::full() const {
  auto pairs = frozen_pairs;
  pairs.insert(pairs.end(), mutable_pairs.begin(), mutable_pairs.end());
  return Configuration::make(graph, std::move(pairs));
}

std::vector<Configuration> FourConfigInstance::space() const {
  return enumerate_configurations(graph, frozen_pairs, mutable_pairs);
}

}  // namespace p2pcast
