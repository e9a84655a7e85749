#pragma once

#include "cascades/events.hpp"
#include "cascades/graph.hpp"
#include "support/oracle.hpp"

namespace cascades::testing {

inline FollowerGraph graph_of(const Instance& inst) {
  GraphBuilder b;
  for (const auto& u : inst.graph_users) b.add_node(u);
  for (const auto& [follower, followee] : inst.follows) b.add_edge(follower, followee);
  return std::move(b).build();
}

inline ActivationSequence sequence_of(const Instance& inst) {
  ActivationSequence s;
  s.story_id = "random";
  std::int64_t t = 0;
  for (const auto& u : inst.order) s.activations.push_back({u, t++});
  return s;
}

}  // namespace cascades::testing
