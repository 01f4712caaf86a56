#pragma once

// Shared fixtures and randomized generators for the test suite. Everything
// here is seeded through causalid::Rng, so failures reproduce exactly.

#include <string>
#include <utility>
#include <vector>

#include "causalid/expr.hpp"
#include "causalid/graph.hpp"
#include "causalid/identify.hpp"
#include "causalid/oracle.hpp"
#include "causalid/rng.hpp"
#include "causalid/table.hpp"

namespace causalid::testing {

// Smoking -> Tar -> Cancer plus the direct edge Smoking -> Cancer.
Admg mediated_complete_graph();

// Smoking -> Tar -> Cancer with latent confounding between Smoking and Tar
// (Smoking <-> Tar).
Admg confounded_mediation_graph();

// Random ADMG over nodes N0..N{n-1}, n drawn from [2, max_nodes]. Directed
// edges follow a shuffled order, so the result is acyclic; a pair may carry
// both a directed and a bidirected edge.
Admg random_admg(Rng& rng, int max_nodes, double p_directed = 0.3,
                 double p_bidirected = 0.2);

// Random canonical expression of depth at most max_depth (>= 0). Built
// through the canonicalizing constructors, so every tree satisfies the
// class invariants.
ExpressionPtr random_expression(Rng& rng, int max_depth);

// Strictly positive random joint table over the given variables.
JointTable random_joint(Rng& rng,
                        const std::vector<std::pair<std::string, int>>& vars);

// Pinned three-node binary chain X1 -> X2 -> X3: fair root, each child
// copies its parent with probability 0.8.
DiscreteScm chain_scm();

// Random query over `observed` (size >= 3): one or two treatments, one or
// two outcomes, plus one conditioning variable when with_condition is set.
// All sets disjoint.
Query random_query(Rng& rng, const std::vector<std::string>& observed,
                   bool with_condition);

}  // namespace causalid::testing
