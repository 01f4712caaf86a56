#include "causalid/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>

#include <json.hpp>

#include "causalid/errors.hpp"
#include "causalid/rng.hpp"

namespace causalid {

namespace {

std::vector<std::string> topo_order(const LatentDag& g) {
  std::map<std::string, int> indeg;
  for (const auto& v : g.nodes()) indeg[v] = static_cast<int>(g.parents(v).size());
  std::set<std::string> ready;
  for (const auto& [v, d] : indeg) {
    if (d == 0) ready.insert(v);
  }
  std::vector<std::string> order;
  while (!ready.empty()) {
    const std::string v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(v);
    for (const auto& w : g.children(v)) {
      if (--indeg[w] == 0) ready.insert(w);
    }
  }
  return order;
}

// CPT as a table over (sorted parents..., node), node fastest. This matches
// the row-major layout of Cpt::table directly.
ValueTable cpt_table(const DiscreteScm& m, const std::string& v) {
  const auto& c = m.cpt(v);
  std::vector<std::pair<std::string, int>> vars;
  for (const auto& p : c.parents) vars.emplace_back(p, m.cardinality(p));
  vars.emplace_back(v, m.cardinality(v));
  return ValueTable(std::move(vars), c.table);
}

JointTable finish_joint(ValueTable t, const LatentDag& g,
                        const NodeSet& drop) {
  NodeSet latents = g.latent();
  NodeSet sum_out = drop;
  sum_out.insert(latents.begin(), latents.end());
  t = marginalize(t, sum_out);
  std::vector<std::string> order;
  for (const auto& v : g.nodes()) {
    if (t.has_variable(v)) order.push_back(v);
  }
  t = t.reordered(order);
  // Guard against drift when many tiny entries are summed.
  const double total = t.total();
  if (std::abs(total - 1.0) > 1e-6) {
    throw EvalError("joint does not normalize (sums to " + std::to_string(total) + ")");
  }
  std::vector<double> vals = t.values();
  for (double& x : vals) x /= total;
  std::vector<std::pair<std::string, int>> vars = t.variables();
  return JointTable(std::move(vars), std::move(vals));
}

void check_space(const DiscreteScm& m) {
  double observed_space = 1.0;
  for (const auto& v : m.graph().observed()) observed_space *= m.cardinality(v);
  if (observed_space > 1e7) {
    throw EvalError("observed state space exceeds 1e7 entries");
  }
}

}  // namespace

DiscreteScm::DiscreteScm(LatentDag graph, std::map<std::string, int> cardinalities,
                         std::map<std::string, Cpt> cpts)
    : graph_(std::move(graph)), card_(std::move(cardinalities)), cpts_(std::move(cpts)) {
  for (const auto& v : graph_.nodes()) {
    auto ct = card_.find(v);
    if (ct == card_.end()) throw DataError("no cardinality for node '" + v + "'");
    if (ct->second < 2) throw DataError("cardinality of '" + v + "' must be at least 2");
    auto it = cpts_.find(v);
    if (it == cpts_.end()) throw DataError("no table for node '" + v + "'");
    const Cpt& c = it->second;
    std::vector<std::string> expected(graph_.parents(v).begin(), graph_.parents(v).end());
    if (c.parents != expected) {
      throw DataError("table for '" + v + "' lists the wrong parents");
    }
    std::size_t rows = 1;
    for (const auto& p : c.parents) {
      auto pt = card_.find(p);
      if (pt == card_.end()) throw DataError("no cardinality for node '" + p + "'");
      rows *= static_cast<std::size_t>(pt->second);
    }
    const std::size_t width = static_cast<std::size_t>(ct->second);
    if (c.table.size() != rows * width) {
      throw DataError("table for '" + v + "' has " + std::to_string(c.table.size()) +
                      " entries, expected " + std::to_string(rows * width));
    }
    for (std::size_t r = 0; r < rows; ++r) {
      double sum = 0.0;
      for (std::size_t k = 0; k < width; ++k) {
        const double x = c.table[r * width + k];
        if (!(x >= 0.0)) throw DataError("negative entry in table for '" + v + "'");
        sum += x;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        throw DataError("row " + std::to_string(r) + " of table for '" + v +
                        "' sums to " + std::to_string(sum));
      }
    }
  }
  if (card_.size() != graph_.nodes().size()) {
    throw DataError("cardinalities listed for unknown nodes");
  }
  if (cpts_.size() != graph_.nodes().size()) {
    throw DataError("tables listed for unknown nodes");
  }
}

int DiscreteScm::cardinality(const std::string& v) const {
  auto it = card_.find(v);
  if (it == card_.end()) throw DataError("unknown node '" + v + "'");
  return it->second;
}

const DiscreteScm::Cpt& DiscreteScm::cpt(const std::string& v) const {
  auto it = cpts_.find(v);
  if (it == cpts_.end()) throw DataError("unknown node '" + v + "'");
  return it->second;
}

DiscreteScm random_scm(std::uint64_t seed, int n_observed, int n_latent,
                       int max_parents, int max_card) {
  if (n_observed < 1) throw DataError("need at least one observed node");
  if (n_latent < 0) throw DataError("negative latent count");
  if (n_latent > 0 && n_observed < 2) {
    throw DataError("latent nodes need at least two observed nodes");
  }
  if (max_parents < 0) throw DataError("negative max_parents");
  if (max_card < 2) throw DataError("max_card must be at least 2");

  Rng rng(seed);
  std::vector<std::string> observed, latent;
  for (int i = 1; i <= n_observed; ++i) observed.push_back("X" + std::to_string(i));
  for (int i = 1; i <= n_latent; ++i) latent.push_back("U" + std::to_string(i));

  std::vector<std::pair<std::string, std::string>> edges;
  for (int i = 0; i < n_observed; ++i) {
    const int cap = std::min(max_parents, i);
    const int k = cap == 0 ? 0 : rng.range(0, cap);
    std::vector<std::string> pred(observed.begin(), observed.begin() + i);
    rng.shuffle(pred);
    for (int t = 0; t < k; ++t) edges.emplace_back(pred[t], observed[i]);
  }
  for (const auto& u : latent) {
    std::vector<std::string> pool = observed;
    rng.shuffle(pool);
    edges.emplace_back(u, pool[0]);
    edges.emplace_back(u, pool[1]);
  }

  std::vector<std::string> nodes = observed;
  nodes.insert(nodes.end(), latent.begin(), latent.end());
  LatentDag g(nodes, edges, NodeSet(latent.begin(), latent.end()));

  std::map<std::string, int> card;
  for (const auto& v : nodes) card[v] = rng.range(2, max_card);

  std::map<std::string, DiscreteScm::Cpt> cpts;
  for (const auto& v : nodes) {
    DiscreteScm::Cpt c;
    c.parents.assign(g.parents(v).begin(), g.parents(v).end());
    std::size_t rows = 1;
    for (const auto& p : c.parents) rows *= static_cast<std::size_t>(card[p]);
    const std::size_t width = static_cast<std::size_t>(card[v]);
    c.table.resize(rows * width);
    for (std::size_t r = 0; r < rows; ++r) {
      double sum = 0.0;
      for (std::size_t k = 0; k < width; ++k) {
        const double x = 0.05 + rng.uniform();
        c.table[r * width + k] = x;
        sum += x;
      }
      for (std::size_t k = 0; k < width; ++k) c.table[r * width + k] /= sum;
    }
    cpts[v] = std::move(c);
  }
  return DiscreteScm(std::move(g), std::move(card), std::move(cpts));
}

JointTable exact_joint(const DiscreteScm& m, bool marginalize_latent) {
  check_space(m);
  ValueTable t({}, {1.0});
  for (const auto& v : m.graph().nodes()) t = multiply(t, cpt_table(m, v));
  if (!marginalize_latent) {
    LatentDag all(m.graph().nodes(), m.graph().directed_edges(), {});
    return finish_joint(std::move(t), all, {});
  }
  return finish_joint(std::move(t), m.graph(), {});
}

JointTable interventional_joint(const DiscreteScm& m,
                                const std::map<std::string, int>& assignments) {
  check_space(m);
  for (const auto& [v, value] : assignments) {
    if (!m.graph().has_node(v)) throw DataError("unknown node '" + v + "'");
    if (m.graph().is_latent(v)) throw DataError("cannot assign latent node '" + v + "'");
    if (value < 0 || value >= m.cardinality(v)) {
      throw DataError("value " + std::to_string(value) + " out of range for '" + v + "'");
    }
  }
  ValueTable t({}, {1.0});
  NodeSet assigned;
  for (const auto& v : m.graph().nodes()) {
    auto it = assignments.find(v);
    if (it == assignments.end()) {
      t = multiply(t, cpt_table(m, v));
      continue;
    }
    assigned.insert(v);
    std::vector<double> point(static_cast<std::size_t>(m.cardinality(v)), 0.0);
    point[static_cast<std::size_t>(it->second)] = 1.0;
    t = multiply(t, ValueTable({{v, m.cardinality(v)}}, std::move(point)));
  }
  return finish_joint(std::move(t), m.graph(), assigned);
}

JointTable experiment_table(const DiscreteScm& m, const NodeSet& do_nodes) {
  check_space(m);
  for (const auto& v : do_nodes) {
    if (!m.graph().has_node(v)) throw DataError("unknown node '" + v + "'");
    if (m.graph().is_latent(v)) throw DataError("cannot assign latent node '" + v + "'");
  }
  ValueTable t({}, {1.0});
  for (const auto& v : m.graph().nodes()) {
    if (do_nodes.count(v)) {
      // Randomized design: the assigned node is uniform with no parents.
      const int k = m.cardinality(v);
      std::vector<double> uniform(static_cast<std::size_t>(k), 1.0 / k);
      t = multiply(t, ValueTable({{v, k}}, std::move(uniform)));
    } else {
      t = multiply(t, cpt_table(m, v));
    }
  }
  return finish_joint(std::move(t), m.graph(), {});
}

Dataset sample(const DiscreteScm& m, int n, std::uint64_t seed) {
  if (n < 1) throw DataError("sample count must be at least 1");
  Rng rng(seed);
  const std::vector<std::string> order = topo_order(m.graph());
  std::map<std::string, std::vector<int>> draws;
  for (const auto& v : m.graph().observed()) draws[v] = {};
  std::map<std::string, int> state;
  for (int row = 0; row < n; ++row) {
    state.clear();
    for (const auto& v : order) {
      const auto& c = m.cpt(v);
      const int width = m.cardinality(v);
      std::size_t r = 0;
      for (const auto& p : c.parents) {
        r = r * static_cast<std::size_t>(m.cardinality(p)) +
            static_cast<std::size_t>(state.at(p));
      }
      std::vector<double> w(c.table.begin() + static_cast<std::ptrdiff_t>(r * width),
                            c.table.begin() + static_cast<std::ptrdiff_t>((r + 1) * width));
      const int value = static_cast<int>(rng.weighted(w));
      state[v] = value;
      auto it = draws.find(v);
      if (it != draws.end()) it->second.push_back(value);
    }
  }
  std::vector<Dataset::Column> columns;
  for (const auto& v : m.graph().observed()) {
    Dataset::Column col;
    col.name = v;
    col.kind = ColumnKind::Categorical;
    std::vector<std::string> levels;
    for (int k = 0; k < m.cardinality(v); ++k) levels.push_back(std::to_string(k));
    std::sort(levels.begin(), levels.end());
    std::map<std::string, int> code_of;
    for (std::size_t k = 0; k < levels.size(); ++k) code_of[levels[k]] = static_cast<int>(k);
    col.alphabet = levels;
    for (int value : draws.at(v)) col.codes.push_back(code_of.at(std::to_string(value)));
    columns.push_back(std::move(col));
  }
  return Dataset(std::move(columns));
}

std::string to_json(const DiscreteScm& m) {
  nlohmann::json j;
  j["nodes"] = m.graph().nodes();
  j["directed"] = nlohmann::json::array();
  for (const auto& [u, v] : m.graph().directed_edges()) j["directed"].push_back({u, v});
  j["latent"] = std::vector<std::string>(m.graph().latent().begin(), m.graph().latent().end());
  j["cardinalities"] = nlohmann::json::object();
  for (const auto& [v, k] : m.cardinalities()) j["cardinalities"][v] = k;
  j["cpts"] = nlohmann::json::object();
  for (const auto& v : m.graph().nodes()) {
    const auto& c = m.cpt(v);
    j["cpts"][v] = {{"parents", c.parents}, {"table", c.table}};
  }
  return j.dump(2);
}

DiscreteScm scm_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad JSON: ") + e.what());
  }
  try {
    std::vector<std::string> nodes = j.at("nodes").get<std::vector<std::string>>();
    std::vector<std::pair<std::string, std::string>> edges;
    for (const auto& e : j.at("directed")) {
      edges.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    }
    NodeSet latent;
    if (j.contains("latent")) {
      for (const auto& v : j["latent"]) latent.insert(v.get<std::string>());
    }
    std::map<std::string, int> card;
    for (const auto& [k, v] : j.at("cardinalities").items()) card[k] = v.get<int>();
    std::map<std::string, DiscreteScm::Cpt> cpts;
    for (const auto& [k, v] : j.at("cpts").items()) {
      DiscreteScm::Cpt c;
      c.parents = v.at("parents").get<std::vector<std::string>>();
      c.table = v.at("table").get<std::vector<double>>();
      cpts[k] = std::move(c);
    }
    return DiscreteScm(LatentDag(std::move(nodes), std::move(edges), std::move(latent)),
                       std::move(card), std::move(cpts));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad model JSON: ") + e.what());
  }
}

}  // namespace causalid
