#include "support/generators.hpp"

#include <algorithm>

namespace causalid::testing {

Admg mediated_complete_graph() {
  return Admg({"Smoking", "Tar", "Cancer"},
              {{"Smoking", "Tar"}, {"Tar", "Cancer"}, {"Smoking", "Cancer"}},
              {});
}

Admg confounded_mediation_graph() {
  return Admg({"Smoking", "Tar", "Cancer"},
              {{"Smoking", "Tar"}, {"Tar", "Cancer"}},
              {{"Smoking", "Tar"}});
}

Admg random_admg(Rng& rng, int max_nodes, double p_directed,
                 double p_bidirected) {
  const int n = rng.range(2, max_nodes);
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("N" + std::to_string(i));
  std::vector<std::string> order = names;
  rng.shuffle(order);
  std::vector<std::pair<std::string, std::string>> directed, bidirected;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.chance(p_directed)) directed.push_back({order[i], order[j]});
      if (rng.chance(p_bidirected)) {
        bidirected.push_back({std::min(order[i], order[j]),
                              std::max(order[i], order[j])});
      }
    }
  }
  return Admg(names, directed, bidirected);
}

namespace {

const std::vector<std::string>& name_pool() {
  static const std::vector<std::string> pool = {"A", "B", "C", "D",
                                                "W", "X", "Y", "Z"};
  return pool;
}

VariableRef random_ref(Rng& rng, const std::string& name, bool allow_subscript,
                       std::vector<std::string>& spare) {
  VariableRef r;
  r.name = name;
  r.star = rng.chance(0.15);
  if (allow_subscript && rng.chance(0.12) && !spare.empty()) {
    const int k = rng.range(1, std::min<int>(2, static_cast<int>(spare.size())));
    for (int i = 0; i < k; ++i) {
      VariableRef iv;
      iv.name = spare.back();
      spare.pop_back();
      iv.star = rng.chance(0.3);
      r.interventions.push_back(std::move(iv));
      if (spare.empty()) break;
    }
  }
  return r;
}

ExpressionPtr random_prob(Rng& rng) {
  std::vector<std::string> pool = name_pool();
  rng.shuffle(pool);
  auto take = [&pool]() {
    std::string s = pool.back();
    pool.pop_back();
    return s;
  };
  const int n_out = rng.range(1, 3);
  const int n_cond = rng.range(0, 2);
  const int n_do = rng.range(0, 2);
  std::vector<std::string> out_names, cond_names, do_names;
  for (int i = 0; i < n_out; ++i) out_names.push_back(take());
  for (int i = 0; i < n_cond; ++i) cond_names.push_back(take());
  for (int i = 0; i < n_do; ++i) do_names.push_back(take());

  std::vector<VariableRef> outcomes, conditions, do_set;
  for (const auto& n : out_names) {
    outcomes.push_back(random_ref(rng, n, true, pool));
  }
  for (const auto& n : cond_names) {
    conditions.push_back(random_ref(rng, n, true, pool));
  }
  for (const auto& n : do_names) {
    do_set.push_back(random_ref(rng, n, false, pool));
  }
  std::optional<std::string> domain;
  if (rng.chance(0.3)) {
    static const std::vector<std::string> domains = {"pi1", "pi2", "pi*",
                                                     "obs", "exp3"};
    domain = domains[rng.below(domains.size())];
  }
  return expr_prob(make_prob_term(std::move(domain), std::move(do_set),
                                  std::move(outcomes), std::move(conditions)));
}

ExpressionPtr random_expr_rec(Rng& rng, int depth) {
  const int kind = depth == 0 ? (rng.chance(0.1) ? 0 : 1) : rng.range(0, 9);
  if (kind == 0) return expr_one();
  if (depth == 0 || kind <= 4) return random_prob(rng);
  if (kind <= 6) {  // sum
    ExpressionPtr body = random_expr_rec(rng, depth - 1);
    const std::set<std::string> free = free_variables(*body);
    if (free.empty()) return body;
    std::set<std::string> range;
    for (const auto& v : free) {
      if (rng.chance(0.4)) range.insert(v);
    }
    if (range.empty()) range.insert(*free.begin());
    return make_sum(range, std::move(body));
  }
  if (kind <= 8) {  // product
    const int k = rng.range(2, 3);
    std::vector<ExpressionPtr> factors;
    for (int i = 0; i < k; ++i) factors.push_back(random_expr_rec(rng, depth - 1));
    return make_product(std::move(factors));
  }
  return make_fraction(random_expr_rec(rng, depth - 1),
                       random_expr_rec(rng, depth - 1));
}

}  // namespace

ExpressionPtr random_expression(Rng& rng, int max_depth) {
  return random_expr_rec(rng, max_depth);
}

JointTable random_joint(Rng& rng,
                        const std::vector<std::pair<std::string, int>>& vars) {
  std::size_t n = 1;
  for (const auto& [name, card] : vars) n *= static_cast<std::size_t>(card);
  std::vector<double> vals(n);
  double total = 0.0;
  for (auto& v : vals) {
    v = rng.uniform(0.1, 1.0);
    total += v;
  }
  for (auto& v : vals) v /= total;
  return JointTable(vars, std::move(vals));
}

DiscreteScm chain_scm() {
  LatentDag g({"X1", "X2", "X3"}, {{"X1", "X2"}, {"X2", "X3"}}, {});
  std::map<std::string, int> card{{"X1", 2}, {"X2", 2}, {"X3", 2}};
  std::map<std::string, DiscreteScm::Cpt> cpts;
  cpts["X1"] = {{}, {0.5, 0.5}};
  cpts["X2"] = {{"X1"}, {0.8, 0.2, 0.2, 0.8}};
  cpts["X3"] = {{"X2"}, {0.8, 0.2, 0.2, 0.8}};
  return DiscreteScm(std::move(g), std::move(card), std::move(cpts));
}

Query random_query(Rng& rng, const std::vector<std::string>& observed,
                   bool with_condition) {
  std::vector<std::string> pool = observed;
  rng.shuffle(pool);
  const int spare = static_cast<int>(pool.size()) - (with_condition ? 1 : 0);
  const int n_treat = spare >= 4 ? rng.range(1, 2) : 1;
  const int n_out = spare - n_treat >= 2 ? rng.range(1, 2) : 1;
  Query q;
  std::size_t i = 0;
  for (int k = 0; k < n_treat; ++k) q.treatments.insert(pool[i++]);
  for (int k = 0; k < n_out; ++k) q.outcomes.insert(pool[i++]);
  if (with_condition) q.conditions.insert(pool[i++]);
  return q;
}

}  // namespace causalid::testing
