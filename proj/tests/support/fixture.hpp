#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "cascades/events.hpp"
#include "cascades/graph.hpp"

namespace cascades::testing {

// Seven users; "X Y" means X follows Y. Activation order is 1..7.
inline constexpr const char* kFixtureEdges =
    "3 1\n4 1\n4 2\n5 2\n6 1\n6 3\n7 1\n";

inline FollowerGraph fixture_graph() {
  std::istringstream in(kFixtureEdges);
  return parse_follower_graph(in, "fixture");
}

inline ActivationSequence fixture_sequence() {
  ActivationSequence s;
  s.story_id = "fig4";
  for (int u = 1; u <= 7; ++u) s.activations.push_back({std::to_string(u), 10 * u});
  return s;
}

inline constexpr const char* kFixtureLog =
    "story_id,user_id,timestamp\n"
    "fig4,1,10\nfig4,2,20\nfig4,3,30\nfig4,4,40\nfig4,5,50\nfig4,6,60\nfig4,7,70\n";

}  // namespace cascades::testing
