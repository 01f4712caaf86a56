#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "causalid/falsify.hpp"
#include "causalid/graph.hpp"
#include "causalid/table.hpp"

namespace causalid {

// Exact discrete structural causal model over a latent DAG: every node has a
// finite cardinality and a conditional probability table over its parents.
class DiscreteScm {
 public:
  struct Cpt {
    std::vector<std::string> parents;  // sorted by name
    std::vector<double> table;         // rows over parent assignments
                                       // (row-major), row length = cardinality
  };

  DiscreteScm() = default;
  DiscreteScm(LatentDag graph, std::map<std::string, int> cardinalities,
              std::map<std::string, Cpt> cpts);

  const LatentDag& graph() const { return graph_; }
  int cardinality(const std::string& v) const;
  const Cpt& cpt(const std::string& v) const;
  const std::map<std::string, int>& cardinalities() const { return card_; }

 private:
  LatentDag graph_;
  std::map<std::string, int> card_;
  std::map<std::string, Cpt> cpts_;
};

// Seeded random model: random observed DAG (each node draws up to
// max_parents parents among its predecessors), parentless latent nodes with
// at least two observed children each, cardinalities in [2, max_card], CPT
// entries at least 0.05 before row normalization. Same seed, same model.
DiscreteScm random_scm(std::uint64_t seed, int n_observed, int n_latent,
                       int max_parents = 3, int max_card = 3);

// Exact joint over the observed nodes (latents summed out), or over all
// nodes with marginalize_latent = false. The observed state space must not
// exceed 1e7 entries.
JointTable exact_joint(const DiscreteScm& m, bool marginalize_latent = true);

// Replaces each assigned node's mechanism with a point mass and recomputes
// the exact joint over the remaining observed nodes.
JointTable interventional_joint(const DiscreteScm& m,
                                const std::map<std::string, int>& assignments);

// Randomized-design table over do_nodes plus the remaining observed nodes:
// uniform over do assignments times the interventional joint. This is the
// shape evaluate() expects for a (domain, do-set) registration.
JointTable experiment_table(const DiscreteScm& m, const NodeSet& do_nodes);

// Ancestral sampling; returns the observed columns as categorical data.
Dataset sample(const DiscreteScm& m, int n, std::uint64_t seed);

std::string to_json(const DiscreteScm& m);
DiscreteScm scm_from_json(const std::string& text);

}  // namespace causalid
