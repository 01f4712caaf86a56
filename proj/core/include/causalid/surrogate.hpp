#pragma once

#include <string>
#include <vector>

#include "causalid/identify.hpp"

namespace causalid {

// A dataset we may estimate from: collected in `domain`, under an
// intervention on `do_set` (empty = observational), recording the variables
// in `scope` (do_set included).
struct AvailableDistribution {
  std::string domain;
  NodeSet do_set;
  NodeSet scope;
};

struct SurrogateResult {
  IdStatus status = IdStatus::NonIdentifiable;
  ExpressionPtr estimand;  // set iff Identifiable; every term names a source
};

// Identification of P_x(y) in the target domain from the declared sources.
// Mirrors the id() recursion; before each step a source whose do-set equals
// the step's full intervention context and whose scope covers the needed
// variables supplies the answer directly. Source ties break toward the
// target domain, then observational data, then declaration order. Sound but
// not complete: on any gap the result is NonIdentifiable, never an unsound
// estimand.
SurrogateResult trso(const Admg& g, const Query& q,
                     const std::vector<AvailableDistribution>& sources,
                     const std::string& target_domain);

// Sources file: [{"domain": "pi1", "do": ["Smoking"], "scope": [...]}, ...].
std::vector<AvailableDistribution> sources_from_json(const std::string& text);

std::string to_json(const SurrogateResult& r);

}  // namespace causalid
