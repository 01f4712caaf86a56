#include "causalid/surrogate.hpp"

#include <algorithm>
#include <cctype>
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

bool subset_of(const NodeSet& a, const NodeSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

struct SCtx {
  std::vector<std::string> pi;
  const std::vector<AvailableDistribution>* sources = nullptr;
  std::string target;
};

std::vector<std::string> pi_within(const SCtx& ctx, const NodeSet& v) {
  std::vector<std::string> out;
  for (const auto& name : ctx.pi) {
    if (v.count(name)) out.push_back(name);
  }
  return out;
}

std::vector<VariableRef> refs_in_pi(const SCtx& ctx, const NodeSet& v) {
  std::vector<VariableRef> out;
  for (const auto& name : pi_within(ctx, v)) out.push_back(ref(name));
  return out;
}

// A source that ran exactly the experiment `want_do` and recorded `need`.
// Ties break toward the target domain, then observational data, then
// declaration order.
const AvailableDistribution* pick_source(const SCtx& ctx, const NodeSet& want_do,
                                         const NodeSet& need) {
  const AvailableDistribution* best = nullptr;
  int best_rank = 0;
  for (const auto& s : *ctx.sources) {
    if (s.do_set != want_do) continue;
    if (!subset_of(need, s.scope)) continue;
    const int rank = (s.domain == ctx.target ? 0 : 2) + (s.do_set.empty() ? 0 : 1);
    if (best == nullptr || rank < best_rank) {
      best = &s;
      best_rank = rank;
    }
  }
  return best;
}

// P^{domain}[b](vi | predecessors of vi within v), supplied by some source
// with do-set b; null when no source covers it.
ExpressionPtr supplied_conditional(const SCtx& ctx, const NodeSet& b,
                                   const NodeSet& v, const std::string& vi) {
  std::vector<std::string> pred;
  for (const auto& name : pi_within(ctx, v)) {
    if (name == vi) break;
    pred.push_back(name);
  }
  NodeSet need(pred.begin(), pred.end());
  need.insert(vi);
  need.insert(b.begin(), b.end());
  const AvailableDistribution* src = pick_source(ctx, b, need);
  if (src == nullptr) return nullptr;
  std::vector<VariableRef> conds;
  for (const auto& name : pred) conds.push_back(ref(name));
  return expr_prob(make_prob_term(src->domain, refs_in_pi(ctx, b), {ref(vi)},
                                  std::move(conds)));
}

// The distribution carried through the recursion. In both modes it equals
// "the joint under the absolute experiment b, marginalized to the current
// nodes". Atomic means no expression has been built for it yet, so reading
// anything off it needs a source that ran exactly b; otherwise expr spells
// it out with terms that already cite declared sources.
struct SKernel {
  bool atomic = true;
  NodeSet b;
  ExpressionPtr expr;  // set iff !atomic
};

// P(vi | predecessors of vi in pi, within v) under the kernel; null when the
// kernel is atomic and no source supplies the factor.
ExpressionPtr kernel_conditional(const SCtx& ctx, const SKernel& k,
                                 const NodeSet& v, const std::string& vi) {
  if (k.atomic) return supplied_conditional(ctx, k.b, v, vi);
  std::vector<std::string> pred;
  for (const auto& name : pi_within(ctx, v)) {
    if (name == vi) break;
    pred.push_back(name);
  }
  NodeSet pred_set(pred.begin(), pred.end());
  NodeSet keep_num = pred_set;
  keep_num.insert(vi);
  ExpressionPtr num = make_sum(set_minus(v, keep_num), k.expr);
  if (pred.empty()) return num;  // kernels are normalized over v
  ExpressionPtr den = make_sum(set_minus(v, pred_set), k.expr);
  return make_fraction(std::move(num), std::move(den));
}

// Mirror of the interventional identification recursion, with the carried
// distribution pinned to what declared sources can actually deliver. Every
// value the recursion needs must either come from a source that ran the
// right experiment or be rebuilt from an expression whose terms already cite
// sources; any gap makes the whole query non-identifiable (soundness over
// completeness).
ExpressionPtr trso_rec(const SCtx& ctx, const Admg& g, const SKernel& kernel,
                       NodeSet x, const NodeSet& y) {
  const NodeSet v = g.node_set();

  // Direct supply: some source ran exactly do(b + x) and recorded y.
  {
    const NodeSet want = set_union(kernel.b, x);
    const AvailableDistribution* src = pick_source(ctx, want, set_union(y, want));
    if (src != nullptr) {
      return expr_prob(make_prob_term(src->domain, refs_in_pi(ctx, want),
                                      refs_in_pi(ctx, y), {}));
    }
  }

  // Nothing left to intervene on: marginalize the carried distribution.
  if (x.empty()) {
    if (!kernel.atomic) return make_sum(set_minus(v, y), kernel.expr);
    // No source recorded the marginal directly; rebuild the joint from
    // supplied chain-rule factors.
    std::vector<ExpressionPtr> factors;
    const std::vector<std::string> order = pi_within(ctx, v);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      ExpressionPtr f = supplied_conditional(ctx, kernel.b, v, *it);
      if (!f) return nullptr;
      factors.push_back(std::move(f));
    }
    return make_sum(set_minus(v, y), make_product(std::move(factors)));
  }

  // Restrict to the ancestors of y.
  const NodeSet anc = ancestors(g, y);
  if (anc != v) {
    SKernel next;
    next.atomic = kernel.atomic;
    next.b = kernel.b;
    if (!kernel.atomic) next.expr = make_sum(set_minus(v, anc), kernel.expr);
    return trso_rec(ctx, subgraph(g, anc), next, set_intersect(x, anc), y);
  }

  // Widen x by the nodes that only matter through x.
  const NodeSet anc_cut = ancestors(mutilate(g, x, {}), y);
  const NodeSet w = set_minus(set_minus(v, x), anc_cut);
  if (!w.empty()) return trso_rec(ctx, g, kernel, set_union(x, w), y);

  // Several districts: solve each against everything else.
  const std::vector<NodeSet> parts = districts(subgraph(g, set_minus(v, x)));
  if (parts.size() > 1) {
    std::vector<ExpressionPtr> factors;
    for (const auto& s : parts) {
      ExpressionPtr sub = trso_rec(ctx, g, kernel, set_minus(v, s), s);
      if (!sub) return nullptr;
      factors.push_back(std::move(sub));
    }
    return make_sum(set_minus(v, set_union(y, x)), make_product(std::move(factors)));
  }

  const NodeSet& s = parts.front();
  NodeSet hull;
  for (const auto& d : districts(g)) {
    if (d.count(*s.begin())) {
      hull = d;
      break;
    }
  }

  // One big district: a hedge; no experiment on record can break it apart.
  if (hull == v) return nullptr;

  // s is a district of g: read its chain-rule factors off the kernel.
  if (hull == s) {
    std::vector<ExpressionPtr> factors;
    const std::vector<std::string> order = pi_within(ctx, s);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      ExpressionPtr f = kernel_conditional(ctx, kernel, v, *it);
      if (!f) return nullptr;
      factors.push_back(std::move(f));
    }
    return make_sum(set_minus(s, y), make_product(std::move(factors)));
  }

  // s sits strictly inside hull: recurse on hull with the kernel rebuilt.
  // A prefix of the topological order collapses to a plain marginal; any
  // other hull means the rest of v has effectively been intervened on, so
  // either spell the new kernel out from what the sources supply or carry
  // the harder experiment forward and hope a source ran it.
  const std::vector<std::string> order = pi_within(ctx, v);
  const std::vector<std::string> hull_order = pi_within(ctx, hull);
  const bool is_prefix =
      std::equal(hull_order.begin(), hull_order.end(), order.begin());
  SKernel next;
  if (is_prefix) {
    next.atomic = kernel.atomic;
    next.b = kernel.b;
    if (!kernel.atomic) next.expr = make_sum(set_minus(v, hull), kernel.expr);
  } else {
    next.b = set_union(kernel.b, set_minus(v, hull));
    std::vector<ExpressionPtr> factors;
    bool complete = true;
    for (auto it = hull_order.rbegin(); it != hull_order.rend(); ++it) {
      ExpressionPtr f = kernel_conditional(ctx, kernel, v, *it);
      if (!f) {
        complete = false;
        break;
      }
      factors.push_back(std::move(f));
    }
    if (complete) {
      next.atomic = false;
      next.expr = make_product(std::move(factors));
    } else {
      next.atomic = true;  // only reachable from an atomic kernel
    }
  }
  return trso_rec(ctx, subgraph(g, hull), next, set_intersect(x, hull), y);
}

std::string join(const NodeSet& s) {
  std::string out;
  for (const auto& v : s) {
    if (!out.empty()) out += ", ";
    out += v;
  }
  return out;
}

bool valid_domain_label(const std::string& d) {
  if (d.empty()) return false;
  std::size_t n = d.size();
  if (d.back() == '*') --n;
  if (n == 0 || !std::isalpha(static_cast<unsigned char>(d[0]))) return false;
  for (std::size_t i = 1; i < n; ++i) {
    if (!std::isalnum(static_cast<unsigned char>(d[i])) && d[i] != '_') return false;
  }
  return true;
}

}  // namespace

SurrogateResult trso(const Admg& g, const Query& q,
                     const std::vector<AvailableDistribution>& sources,
                     const std::string& target_domain) {
  if (q.outcomes.empty()) throw QueryError("no outcome variables");
  if (!q.conditions.empty()) throw QueryError("conditional queries are not supported here");
  for (const auto& v : q.treatments) g.check_node(v);
  for (const auto& v : q.outcomes) g.check_node(v);
  NodeSet both = set_intersect(q.treatments, q.outcomes);
  if (!both.empty()) {
    throw QueryError("treatments and outcomes share variables: {" + join(both) + "}");
  }

  if (!valid_domain_label(target_domain)) {
    throw QueryError("bad domain label '" + target_domain + "'");
  }
  const NodeSet all = g.node_set();
  bool target_declared = false;
  for (const auto& s : sources) {
    if (!valid_domain_label(s.domain)) {
      throw DataError("bad domain label '" + s.domain + "'");
    }
    if (!subset_of(s.do_set, s.scope)) {
      throw DataError("source '" + s.domain + "' intervenes on variables outside its scope");
    }
    if (!subset_of(s.scope, all)) {
      throw DataError("source '" + s.domain + "' records variables outside the graph");
    }
    if (s.domain == target_domain) target_declared = true;
  }
  if (!target_declared) {
    throw QueryError("target domain '" + target_domain + "' has no declared sources");
  }

  SCtx ctx{topological_order(g), &sources, target_domain};
  ExpressionPtr e = trso_rec(ctx, g, SKernel{}, q.treatments, q.outcomes);
  SurrogateResult out;
  if (e) {
    out.status = IdStatus::Identifiable;
    out.estimand = std::move(e);
  }
  return out;
}

std::vector<AvailableDistribution> sources_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad JSON: ") + e.what());
  }
  if (!j.is_array()) throw DataError("expected an array of sources");
  std::vector<AvailableDistribution> out;
  for (const auto& entry : j) {
    if (!entry.is_object() || !entry.contains("domain") || !entry.contains("scope")) {
      throw DataError("each source needs \"domain\" and \"scope\"");
    }
    AvailableDistribution s;
    try {
      s.domain = entry.at("domain").get<std::string>();
      for (const auto& v : entry.at("scope")) s.scope.insert(v.get<std::string>());
      if (entry.contains("do")) {
        for (const auto& v : entry.at("do")) s.do_set.insert(v.get<std::string>());
      }
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("bad source entry: ") + e.what());
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::string to_json(const SurrogateResult& r) {
  nlohmann::json j;
  j["status"] = r.status == IdStatus::Identifiable ? "Identifiable" : "NonIdentifiable";
  if (r.estimand) {
    j["estimand_text"] = render_text(*r.estimand);
    j["estimand_latex"] = render_latex(*r.estimand);
  }
  return j.dump(2);
}

}  // namespace causalid
