#include "causalid/expr.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace causalid {

namespace {

bool valid_ident(const std::string& s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  }
  return true;
}

bool valid_domain(const std::string& s) {
  if (!s.empty() && s.back() == '*') return valid_ident(s.substr(0, s.size() - 1));
  return valid_ident(s);
}

// Duplicate detection compares whole decorated references when by_name is
// false: ~Y and Y are distinct events and may legally coexist, while the
// same variable twice in a do-set is always a contradiction.
void check_refs(const std::vector<VariableRef>& refs, const char* where,
                bool by_name) {
  std::set<std::string> seen_names;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const VariableRef& r = refs[i];
    if (!valid_ident(r.name)) {
      throw ParseError(ParseError::Kind::Semantic, 0,
                       "invalid variable name '" + r.name + "' in " + where);
    }
    const bool dup =
        by_name ? !seen_names.insert(r.name).second
                : std::find(refs.begin(), refs.begin() + i, r) !=
                      refs.begin() + i;
    if (dup) {
      throw ParseError(ParseError::Kind::Semantic, 0,
                       "duplicate variable '" + r.name + "' in " + where);
    }
    for (const auto& iv : r.interventions) {
      if (!valid_ident(iv.name)) {
        throw ParseError(ParseError::Kind::Semantic, 0,
                         "invalid variable name '" + iv.name + "' in " + where);
      }
      if (!iv.interventions.empty()) {
        throw ParseError(ParseError::Kind::Semantic, 0,
                         "nested counterfactual subscript on '" + r.name + "'");
      }
    }
  }
}

}  // namespace

VariableRef ref(std::string name) { return VariableRef{std::move(name), false, {}}; }
VariableRef starred(std::string name) { return VariableRef{std::move(name), true, {}}; }

ProbTerm make_prob_term(std::optional<std::string> domain,
                        std::vector<VariableRef> do_set,
                        std::vector<VariableRef> outcomes,
                        std::vector<VariableRef> conditions) {
  if (domain && !valid_domain(*domain)) {
    throw ParseError(ParseError::Kind::Semantic, 0,
                     "invalid domain label '" + *domain + "'");
  }
  if (outcomes.empty()) {
    throw ParseError(ParseError::Kind::Semantic, 0, "term has no outcomes");
  }
  check_refs(do_set, "do-set", true);
  check_refs(outcomes, "outcomes", false);
  check_refs(conditions, "conditions", false);
  for (const auto& o : outcomes) {
    for (const auto& c : conditions) {
      if (o == c) {
        throw ParseError(ParseError::Kind::Semantic, 0,
                         "variable '" + o.name +
                             "' appears as both outcome and condition");
      }
    }
  }
  return ProbTerm{std::move(domain), std::move(do_set), std::move(outcomes),
                  std::move(conditions)};
}

bool operator==(const Expression& a, const Expression& b) {
  const auto& na = a.node();
  const auto& nb = b.node();
  if (na.index() != nb.index()) return false;
  if (a.is_one()) return true;
  if (const auto* p = a.as_prob()) return p->term == b.as_prob()->term;
  if (const auto* s = a.as_sum()) {
    const auto* t = b.as_sum();
    return s->range == t->range && *s->body == *t->body;
  }
  if (const auto* p = a.as_product()) {
    const auto* q = b.as_product();
    if (p->factors.size() != q->factors.size()) return false;
    for (std::size_t i = 0; i < p->factors.size(); ++i) {
      if (!(*p->factors[i] == *q->factors[i])) return false;
    }
    return true;
  }
  const auto* f = a.as_fraction();
  const auto* g = b.as_fraction();
  return *f->numerator == *g->numerator && *f->denominator == *g->denominator;
}

ExpressionPtr expr_one() {
  static const ExpressionPtr one = std::make_shared<Expression>(Expression::Node{One{}});
  return one;
}

ExpressionPtr expr_prob(ProbTerm term) {
  return std::make_shared<Expression>(Expression::Node{Prob{std::move(term)}});
}

ExpressionPtr make_sum(const std::set<std::string>& range, ExpressionPtr body) {
  const std::set<std::string> free = free_variables(*body);
  std::vector<std::string> effective;
  for (const auto& v : range) {
    if (free.count(v)) effective.push_back(v);
  }
  if (effective.empty()) return body;
  return std::make_shared<Expression>(
      Expression::Node{Sum{std::move(effective), std::move(body)}});
}

ExpressionPtr make_product(std::vector<ExpressionPtr> factors) {
  std::vector<ExpressionPtr> flat;
  for (auto& f : factors) {
    if (const auto* p = f->as_product()) {
      flat.insert(flat.end(), p->factors.begin(), p->factors.end());
    } else {
      flat.push_back(std::move(f));
    }
  }
  if (flat.empty()) return expr_one();
  if (flat.size() == 1) return flat.front();
  return std::make_shared<Expression>(Expression::Node{Product{std::move(flat)}});
}

ExpressionPtr make_fraction(ExpressionPtr numerator, ExpressionPtr denominator) {
  return std::make_shared<Expression>(
      Expression::Node{Fraction{std::move(numerator), std::move(denominator)}});
}

namespace {

void collect_free(const Expression& e, std::set<std::string>& bound,
                  std::set<std::string>& out) {
  if (e.is_one()) return;
  if (const auto* p = e.as_prob()) {
    auto add_ref = [&](const VariableRef& r) {
      if (!bound.count(r.name)) out.insert(r.name);
      for (const auto& iv : r.interventions) {
        if (!bound.count(iv.name)) out.insert(iv.name);
      }
    };
    for (const auto& r : p->term.do_set) add_ref(r);
    for (const auto& r : p->term.outcomes) add_ref(r);
    for (const auto& r : p->term.conditions) add_ref(r);
    return;
  }
  if (const auto* s = e.as_sum()) {
    std::vector<std::string> newly;
    for (const auto& v : s->range) {
      if (bound.insert(v).second) newly.push_back(v);
    }
    collect_free(*s->body, bound, out);
    for (const auto& v : newly) bound.erase(v);
    return;
  }
  if (const auto* p = e.as_product()) {
    for (const auto& f : p->factors) collect_free(*f, bound, out);
    return;
  }
  const auto* f = e.as_fraction();
  collect_free(*f->numerator, bound, out);
  collect_free(*f->denominator, bound, out);
}

}  // namespace

std::set<std::string> free_variables(const Expression& e) {
  std::set<std::string> bound, out;
  collect_free(e, bound, out);
  return out;
}

// ---- text rendering ----

namespace {

void render_ref_text(const VariableRef& r, std::ostringstream& os) {
  if (r.star) os << '~';
  os << r.name;
}

void render_ev_text(const VariableRef& r, std::ostringstream& os) {
  render_ref_text(r, os);
  if (r.interventions.empty()) return;
  os << " @ ";
  if (r.interventions.size() == 1) {
    render_ref_text(r.interventions.front(), os);
  } else {
    os << '(';
    for (std::size_t i = 0; i < r.interventions.size(); ++i) {
      if (i) os << ", ";
      render_ref_text(r.interventions[i], os);
    }
    os << ')';
  }
}

void render_text_rec(const Expression& e, std::ostringstream& os) {
  if (e.is_one()) {
    os << '1';
    return;
  }
  if (const auto* p = e.as_prob()) {
    const ProbTerm& t = p->term;
    os << 'P';
    if (t.domain) os << '^' << *t.domain;
    if (!t.do_set.empty()) {
      os << '[';
      for (std::size_t i = 0; i < t.do_set.size(); ++i) {
        if (i) os << ", ";
        render_ref_text(t.do_set[i], os);
      }
      os << ']';
    }
    os << '(';
    for (std::size_t i = 0; i < t.outcomes.size(); ++i) {
      if (i) os << ", ";
      render_ev_text(t.outcomes[i], os);
    }
    if (!t.conditions.empty()) {
      os << " | ";
      for (std::size_t i = 0; i < t.conditions.size(); ++i) {
        if (i) os << ", ";
        render_ev_text(t.conditions[i], os);
      }
    }
    os << ')';
    return;
  }
  if (const auto* s = e.as_sum()) {
    os << "sum_{";
    for (std::size_t i = 0; i < s->range.size(); ++i) {
      if (i) os << ',';
      os << s->range[i];
    }
    os << "} [ ";
    render_text_rec(*s->body, os);
    os << " ]";
    return;
  }
  if (const auto* p = e.as_product()) {
    for (std::size_t i = 0; i < p->factors.size(); ++i) {
      if (i) os << ' ';
      render_text_rec(*p->factors[i], os);
    }
    return;
  }
  const auto* f = e.as_fraction();
  os << "frac[ ";
  render_text_rec(*f->numerator, os);
  os << " ][ ";
  render_text_rec(*f->denominator, os);
  os << " ]";
}

}  // namespace

std::string render_text(const Expression& e) {
  std::ostringstream os;
  render_text_rec(e, os);
  return os.str();
}

// ---- LaTeX rendering ----

namespace {

std::string lowercase(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string latex_domain(const std::string& label) {
  std::string base = label;
  bool star = false;
  if (!base.empty() && base.back() == '*') {
    star = true;
    base.pop_back();
  }
  std::string out;
  if (base == "pi") {
    out = "\\pi";
  } else {
    std::size_t d = base.size();
    while (d > 0 && std::isdigit(static_cast<unsigned char>(base[d - 1]))) --d;
    if (d > 0 && d < base.size()) {
      std::string head = base.substr(0, d);
      if (head == "pi") head = "\\pi";
      out = head + "_{" + base.substr(d) + "}";
    } else {
      out = base;
    }
  }
  if (star) out += "^{*}";
  return out;
}

std::string latex_ref(const VariableRef& r);

std::string latex_do_list(const std::vector<VariableRef>& refs) {
  bool any_star = false;
  for (const auto& r : refs) any_star = any_star || r.star;
  std::string out;
  if (any_star) {
    out = "do(";
    for (std::size_t i = 0; i < refs.size(); ++i) {
      if (i) out += ", ";
      out += refs[i].star ? refs[i].name + "=" + lowercase(refs[i].name) + "^*"
                          : refs[i].name;
    }
    out += ")";
  } else {
    for (std::size_t i = 0; i < refs.size(); ++i) {
      if (i) out += ", ";
      out += refs[i].name;
    }
  }
  return out;
}

std::string latex_ref(const VariableRef& r) {
  std::string out = r.name;
  if (!r.interventions.empty()) out += "_{" + latex_do_list(r.interventions) + "}";
  if (r.star) out += "=" + lowercase(r.name) + "^*";
  return out;
}

void render_latex_rec(const Expression& e, std::ostringstream& os, bool in_product) {
  if (e.is_one()) {
    os << '1';
    return;
  }
  if (const auto* p = e.as_prob()) {
    const ProbTerm& t = p->term;
    os << 'P';
    if (t.domain) os << "^{" << latex_domain(*t.domain) << '}';
    if (!t.do_set.empty()) os << "_{" << latex_do_list(t.do_set) << '}';
    os << '(';
    for (std::size_t i = 0; i < t.outcomes.size(); ++i) {
      if (i) os << ", ";
      os << latex_ref(t.outcomes[i]);
    }
    if (!t.conditions.empty()) {
      os << " \\mid ";
      for (std::size_t i = 0; i < t.conditions.size(); ++i) {
        if (i) os << ", ";
        os << latex_ref(t.conditions[i]);
      }
    }
    os << ')';
    return;
  }
  if (const auto* s = e.as_sum()) {
    if (in_product) os << "\\left(";
    os << "\\sum_{";
    for (std::size_t i = 0; i < s->range.size(); ++i) {
      if (i) os << ", ";
      os << s->range[i];
    }
    os << "} ";
    render_latex_rec(*s->body, os, false);
    if (in_product) os << "\\right)";
    return;
  }
  if (const auto* p = e.as_product()) {
    for (std::size_t i = 0; i < p->factors.size(); ++i) {
      if (i) os << ' ';
      render_latex_rec(*p->factors[i], os, true);
    }
    return;
  }
  const auto* f = e.as_fraction();
  os << "\\frac{";
  render_latex_rec(*f->numerator, os, false);
  os << "}{";
  render_latex_rec(*f->denominator, os, false);
  os << '}';
}

}  // namespace

std::string render_latex(const Expression& e) {
  std::ostringstream os;
  render_latex_rec(e, os, false);
  return os.str();
}

// ---- simplify ----

namespace {

bool intersects(const std::set<std::string>& a, const std::set<std::string>& b) {
  for (const auto& x : a) {
    if (b.count(x)) return true;
  }
  return false;
}

ExpressionPtr simplify_rec(const ExpressionPtr& e, std::set<std::string>& bound);

// Cancels structurally identical factor pairs between numerator and
// denominator factor lists. A pair whose free variables touch an enclosing
// Sum range stays put: removing it would change the summed multiplicity.
ExpressionPtr rebuild_fraction(std::vector<ExpressionPtr> num,
                               std::vector<ExpressionPtr> den,
                               const std::set<std::string>& bound) {
  std::vector<bool> num_used(num.size(), false);
  std::vector<bool> den_used(den.size(), false);
  for (std::size_t i = 0; i < den.size(); ++i) {
    for (std::size_t j = 0; j < num.size(); ++j) {
      if (num_used[j]) continue;
      if (!(*num[j] == *den[i])) continue;
      if (intersects(free_variables(*num[j]), bound)) continue;
      num_used[j] = true;
      den_used[i] = true;
      break;
    }
  }
  std::vector<ExpressionPtr> num_rest, den_rest;
  for (std::size_t j = 0; j < num.size(); ++j) {
    if (!num_used[j]) num_rest.push_back(num[j]);
  }
  for (std::size_t i = 0; i < den.size(); ++i) {
    if (!den_used[i]) den_rest.push_back(den[i]);
  }
  if (den_rest.empty()) return make_product(std::move(num_rest));
  ExpressionPtr n = num_rest.empty() ? expr_one() : make_product(std::move(num_rest));
  return make_fraction(std::move(n), make_product(std::move(den_rest)));
}

std::vector<ExpressionPtr> factor_list(const ExpressionPtr& e) {
  if (const auto* p = e->as_product()) return p->factors;
  if (e->is_one()) return {};
  return {e};
}

ExpressionPtr simplify_rec(const ExpressionPtr& e, std::set<std::string>& bound) {
  if (e->is_one() || e->as_prob()) return e;
  if (const auto* s = e->as_sum()) {
    std::vector<std::string> newly;
    for (const auto& v : s->range) {
      if (bound.insert(v).second) newly.push_back(v);
    }
    ExpressionPtr body = simplify_rec(s->body, bound);
    for (const auto& v : newly) bound.erase(v);
    return make_sum(std::set<std::string>(s->range.begin(), s->range.end()),
                    std::move(body));
  }
  if (const auto* p = e->as_product()) {
    std::vector<ExpressionPtr> kept;
    for (const auto& f : p->factors) {
      ExpressionPtr sf = simplify_rec(f, bound);
      if (sf->is_one()) continue;
      kept.push_back(std::move(sf));
    }
    return make_product(std::move(kept));
  }
  const auto* f = e->as_fraction();
  ExpressionPtr num = simplify_rec(f->numerator, bound);
  ExpressionPtr den = simplify_rec(f->denominator, bound);
  if (den->is_one()) return num;
  return rebuild_fraction(factor_list(num), factor_list(den), bound);
}

}  // namespace

ExpressionPtr simplify(const ExpressionPtr& e) {
  std::set<std::string> bound;
  return simplify_rec(e, bound);
}

// ---- order-insensitive comparison ----

namespace {

std::string ref_sort_key(const VariableRef& r) {
  std::string key = r.name + (r.star ? "*" : "");
  std::vector<std::string> ivs;
  for (const auto& iv : r.interventions) {
    ivs.push_back(iv.name + (iv.star ? "*" : ""));
  }
  std::sort(ivs.begin(), ivs.end());
  for (const auto& s : ivs) key += "@" + s;
  return key;
}

void sort_refs(std::vector<VariableRef>& refs) {
  std::stable_sort(refs.begin(), refs.end(),
                   [](const VariableRef& a, const VariableRef& b) {
                     return ref_sort_key(a) < ref_sort_key(b);
                   });
}

ExpressionPtr commutative_normal(const ExpressionPtr& e) {
  if (e->is_one()) return e;
  if (const auto* p = e->as_prob()) {
    ProbTerm t = p->term;
    sort_refs(t.do_set);
    sort_refs(t.outcomes);
    sort_refs(t.conditions);
    return expr_prob(std::move(t));
  }
  if (const auto* s = e->as_sum()) {
    std::vector<std::string> range = s->range;
    std::sort(range.begin(), range.end());
    return std::make_shared<Expression>(
        Expression::Node{Sum{std::move(range), commutative_normal(s->body)}});
  }
  if (const auto* p = e->as_product()) {
    std::vector<ExpressionPtr> factors;
    for (const auto& f : p->factors) factors.push_back(commutative_normal(f));
    std::stable_sort(factors.begin(), factors.end(),
                     [](const ExpressionPtr& a, const ExpressionPtr& b) {
                       return render_text(*a) < render_text(*b);
                     });
    return std::make_shared<Expression>(Expression::Node{Product{std::move(factors)}});
  }
  const auto* f = e->as_fraction();
  return make_fraction(commutative_normal(f->numerator),
                       commutative_normal(f->denominator));
}

}  // namespace

bool equal_modulo_commutativity(const Expression& a, const Expression& b) {
  const auto pa = commutative_normal(std::make_shared<Expression>(a.node()));
  const auto pb = commutative_normal(std::make_shared<Expression>(b.node()));
  return *pa == *pb;
}

}  // namespace causalid
