#pragma once

#include <string>
#include <vector>

#include "causalid/graph.hpp"

namespace causalid {

// Conditional independence statement X _||_ Y | Z.
struct CiStatement {
  NodeSet left, right, given;

  bool operator==(const CiStatement&) const = default;

  // `X _||_ Y | Z1, Z2`; the bar is omitted when given is empty.
  std::string to_string() const;
};

// m-separation: every path between a and b is blocked given z. A path is
// blocked if some non-collider on it is in z, or some collider on it has no
// descendant in z (itself included). a, b, z must be pairwise disjoint and
// a, b non-empty.
bool m_separated(const Admg& g, const NodeSet& a, const NodeSet& b,
                 const NodeSet& z);

// Pairwise independencies implied by the graph: for each non-adjacent pair,
// the first separating set found scanning subsets of the remaining nodes by
// size then lexicographically, up to max_given. Output ordered by pair.
std::vector<CiStatement> implied_independencies(const Admg& g, int max_given);

}  // namespace causalid
