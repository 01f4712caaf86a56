#pragma once

// Independent reference implementations of m-separation, used to check the
// production BFS against exhaustive and classical constructions.

#include "causalid/graph.hpp"

namespace causalid::testing {

// Enumerates every simple path between a and b and checks the blocking rule
// vertex by vertex: a non-collider blocks when it is in z, a collider blocks
// when neither it nor any descendant is in z. Exponential; fine for the
// small graphs the tests use.
bool path_enumeration_separated(const Admg& g, const NodeSet& a,
                                const NodeSet& b, const NodeSet& z);

// Moralization check for graphs without bidirected edges: restrict to the
// ancestral closure of a + b + z, connect co-parents, drop z, and test
// reachability. Classical d-separation, valid only for DAGs.
bool moral_separated(const Admg& g, const NodeSet& a, const NodeSet& b,
                     const NodeSet& z);

}  // namespace causalid::testing
