#pragma once

#include <optional>
#include <string>

#include "causalid/expr.hpp"
#include "causalid/graph.hpp"

namespace causalid {

// Causal query P_{treatments}(outcomes | conditions) over an ADMG.
// The three sets are pairwise disjoint; outcomes is non-empty.
struct Query {
  NodeSet treatments;
  NodeSet outcomes;
  NodeSet conditions;
};

enum class IdStatus { Identifiable, NonIdentifiable };

// Certificate of non-identifiability: a district of G minus the treatments
// trapped inside a strictly larger district of G.
struct HedgeWitness {
  NodeSet district;
  NodeSet containing_component;
  std::string description;
};

struct IdentificationResult {
  IdStatus status = IdStatus::NonIdentifiable;
  ExpressionPtr estimand;                // set iff Identifiable
  std::optional<HedgeWitness> witness;   // set iff NonIdentifiable
};

// Interventional identification. q.conditions must be empty. Returns either
// an estimand or a hedge witness. The estimand's free variables lie in
// outcomes + treatments + any variables the recursion widened the
// intervention onto; its value is constant in those extras. Deterministic:
// identical inputs render identical estimands.
IdentificationResult id(const Admg& g, const Query& q);

// Conditional identification: promotes conditions that rule 2 allows into
// the treatment set, identifies outcomes + remaining conditions, and divides
// by the sum over outcomes. With empty conditions this is exactly id().
IdentificationResult idc(const Admg& g, const Query& q);

std::string to_json(const IdentificationResult& r);

}  // namespace causalid
