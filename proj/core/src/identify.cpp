#include "causalid/identify.hpp"

#include <algorithm>
#include <iterator>

#include <json.hpp>

#include "causalid/separation.hpp"

namespace causalid {

namespace {

NodeSet set_minus(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::inserter(out, out.end()));
  return out;
}

NodeSet set_union(const NodeSet& a, const NodeSet& b) {
  NodeSet out = a;
  out.insert(b.begin(), b.end());
  return out;
}

NodeSet set_intersect(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::inserter(out, out.end()));
  return out;
}

std::string join(const NodeSet& s) {
  std::string out;
  for (const auto& v : s) {
    if (!out.empty()) out += ", ";
    out += v;
  }
  return out;
}

// The distribution carried through the recursion. Atomic means "the
// observational joint, marginalized to the current variable set"; its terms
// are only spelled out when they reach the estimand, which keeps the output
// in plain conditional form. Otherwise the distribution is an explicit
// expression whose conditionals are spelled as ratios of sums.
struct Kernel {
  bool atomic = true;
  ExpressionPtr expr;  // set iff !atomic
};

struct Rec {
  ExpressionPtr expr;  // set iff identified
  std::optional<HedgeWitness> witness;
};

struct Ctx {
  std::vector<std::string> pi;  // fixed topological order of the input graph
};

std::vector<std::string> pi_within(const Ctx& ctx, const NodeSet& v) {
  std::vector<std::string> out;
  for (const auto& name : ctx.pi) {
    if (v.count(name)) out.push_back(name);
  }
  return out;
}

ExpressionPtr atomic_joint(const Ctx& ctx, const NodeSet& v) {
  std::vector<VariableRef> outs;
  for (const auto& name : pi_within(ctx, v)) outs.push_back(ref(name));
  return expr_prob(make_prob_term(std::nullopt, {}, std::move(outs), {}));
}

// P(vi | predecessors of vi in pi, within v) under the kernel.
ExpressionPtr conditional_of(const Ctx& ctx, const Kernel& k, const NodeSet& v,
                             const std::string& vi) {
  std::vector<std::string> pred;
  for (const auto& name : pi_within(ctx, v)) {
    if (name == vi) break;
    pred.push_back(name);
  }
  if (k.atomic) {
    std::vector<VariableRef> conds;
    for (const auto& name : pred) conds.push_back(ref(name));
    return expr_prob(make_prob_term(std::nullopt, {}, {ref(vi)}, std::move(conds)));
  }
  NodeSet pred_set(pred.begin(), pred.end());
  NodeSet keep_num = pred_set;
  keep_num.insert(vi);
  ExpressionPtr num = make_sum(set_minus(v, keep_num), k.expr);
  if (pred.empty()) return num;  // kernels are normalized over v
  ExpressionPtr den = make_sum(set_minus(v, pred_set), k.expr);
  return make_fraction(std::move(num), std::move(den));
}

Rec fail(const NodeSet& district, const NodeSet& component) {
  HedgeWitness w;
  w.district = district;
  w.containing_component = component;
  w.description = "district {" + join(district) +
                  "} is trapped inside the larger district {" + join(component) +
                  "}; the confounding between them cannot be separated out";
  return Rec{nullptr, std::move(w)};
}

Rec id_rec(const Ctx& ctx, const Admg& g, const Kernel& kernel, NodeSet x,
           const NodeSet& y) {
  const NodeSet v = g.node_set();

  // Line 1: nothing to intervene on; marginalize the kernel to y.
  if (x.empty()) {
    ExpressionPtr body = kernel.atomic ? atomic_joint(ctx, v) : kernel.expr;
    return Rec{make_sum(set_minus(v, y), std::move(body)), std::nullopt};
  }

  // Line 2: restrict to the ancestors of y.
  const NodeSet anc = ancestors(g, y);
  if (anc != v) {
    Kernel restricted;
    restricted.atomic = kernel.atomic;
    if (!kernel.atomic) restricted.expr = make_sum(set_minus(v, anc), kernel.expr);
    return id_rec(ctx, subgraph(g, anc), restricted, set_intersect(x, anc), y);
  }

  // Line 3: widen x by the nodes that only matter through x.
  const NodeSet anc_cut = ancestors(mutilate(g, x, {}), y);
  const NodeSet w = set_minus(set_minus(v, x), anc_cut);
  if (!w.empty()) return id_rec(ctx, g, kernel, set_union(x, w), y);

  // Line 4: the treatment-free part splits into several districts.
  const std::vector<NodeSet> parts = districts(subgraph(g, set_minus(v, x)));
  if (parts.size() > 1) {
    std::vector<ExpressionPtr> factors;
    for (const auto& s : parts) {
      Rec sub = id_rec(ctx, g, kernel, set_minus(v, s), s);
      if (sub.witness) return sub;
      factors.push_back(std::move(sub.expr));
    }
    return Rec{make_sum(set_minus(v, set_union(y, x)), make_product(std::move(factors))),
               std::nullopt};
  }

  // Line 5: a single district s; compare with the districts of g itself.
  const NodeSet& s = parts.front();
  NodeSet hull;  // the district of g containing s
  for (const auto& d : districts(g)) {
    if (d.count(*s.begin())) {
      hull = d;
      break;
    }
  }

  // Line 5a: g is one big district; the effect is not identifiable.
  if (hull == v) return fail(s, hull);

  // Line 5b: s itself is a district of g; read its factors off the kernel.
  if (hull == s) {
    std::vector<ExpressionPtr> factors;
    const std::vector<std::string> order = pi_within(ctx, s);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      factors.push_back(conditional_of(ctx, kernel, v, *it));
    }
    return Rec{make_sum(set_minus(s, y), make_product(std::move(factors))),
               std::nullopt};
  }

  // Line 5c: s sits strictly inside the district `hull`; rebuild the kernel
  // on hull and recurse.
  Kernel next;
  const std::vector<std::string> order = pi_within(ctx, v);
  const std::vector<std::string> hull_order = pi_within(ctx, hull);
  const bool is_prefix =
      std::equal(hull_order.begin(), hull_order.end(), order.begin());
  if (kernel.atomic && is_prefix) {
    // The chain-rule factors over a prefix collapse back to a marginal.
    next.atomic = true;
  } else {
    std::vector<ExpressionPtr> factors;
    for (auto it = hull_order.rbegin(); it != hull_order.rend(); ++it) {
      factors.push_back(conditional_of(ctx, kernel, v, *it));
    }
    next.atomic = false;
    next.expr = make_product(std::move(factors));
  }
  return id_rec(ctx, subgraph(g, hull), next, set_intersect(x, hull), y);
}

void check_query_nodes(const Admg& g, const Query& q) {
  if (q.outcomes.empty()) throw QueryError("no outcome variables");
  for (const auto& v : q.treatments) g.check_node(v);
  for (const auto& v : q.outcomes) g.check_node(v);
  for (const auto& v : q.conditions) g.check_node(v);
  auto overlap = [](const NodeSet& a, const NodeSet& b, const char* what) {
    NodeSet both = set_intersect(a, b);
    if (!both.empty()) {
      throw QueryError(std::string(what) + " share variables: {" + join(both) + "}");
    }
  };
  overlap(q.treatments, q.outcomes, "treatments and outcomes");
  overlap(q.treatments, q.conditions, "treatments and conditions");
  overlap(q.outcomes, q.conditions, "outcomes and conditions");
}

}  // namespace

IdentificationResult id(const Admg& g, const Query& q) {
  check_query_nodes(g, q);
  if (!q.conditions.empty()) {
    throw QueryError("id() takes no conditions; use idc()");
  }
  Ctx ctx{topological_order(g)};
  Rec r = id_rec(ctx, g, Kernel{}, q.treatments, q.outcomes);
  IdentificationResult out;
  if (r.witness) {
    out.status = IdStatus::NonIdentifiable;
    out.witness = std::move(r.witness);
  } else {
    out.status = IdStatus::Identifiable;
    out.estimand = std::move(r.expr);
  }
  return out;
}

IdentificationResult idc(const Admg& g, const Query& q) {
  check_query_nodes(g, q);
  NodeSet x = q.treatments;
  NodeSet z = q.conditions;

  // Promote conditions that act like interventions: z' moves into x when y
  // and z' are m-separated given the rest, in the graph with incoming edges
  // to x and outgoing edges from z' removed.
  bool promoted = true;
  while (promoted) {
    promoted = false;
    for (const auto& zp : z) {
      const Admg cut = mutilate(g, x, {zp});
      NodeSet rest = set_union(x, set_minus(z, {zp}));
      if (m_separated(cut, q.outcomes, {zp}, rest)) {
        const std::string moved = zp;
        x.insert(moved);
        z.erase(moved);
        promoted = true;
        break;
      }
    }
  }

  Ctx ctx{topological_order(g)};
  Rec r = id_rec(ctx, g, Kernel{}, x, set_union(q.outcomes, z));
  IdentificationResult out;
  if (r.witness) {
    out.status = IdStatus::NonIdentifiable;
    out.witness = std::move(r.witness);
    return out;
  }
  out.status = IdStatus::Identifiable;
  if (z.empty()) {
    out.estimand = std::move(r.expr);
  } else {
    ExpressionPtr den = make_sum(q.outcomes, r.expr);
    out.estimand = make_fraction(std::move(r.expr), std::move(den));
  }
  return out;
}

std::string to_json(const IdentificationResult& r) {
  nlohmann::json j;
  j["status"] = r.status == IdStatus::Identifiable ? "Identifiable" : "NonIdentifiable";
  if (r.estimand) {
    j["estimand_text"] = render_text(*r.estimand);
    j["estimand_latex"] = render_latex(*r.estimand);
  }
  if (r.witness) {
    j["witness"] = {
        {"district", std::vector<std::string>(r.witness->district.begin(),
                                              r.witness->district.end())},
        {"containing_component",
         std::vector<std::string>(r.witness->containing_component.begin(),
                                  r.witness->containing_component.end())},
        {"description", r.witness->description},
    };
  }
  return j.dump(2);
}

}  // namespace causalid
