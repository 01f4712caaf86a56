#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "causalid/errors.hpp"

namespace causalid {

// Probabilistic expression language.
//
//   expr     := factor { factor }                   juxtaposition = product
//   factor   := prob | sum | frac | "1" | "(" expr ")"
//   sum      := "sum_{" ident {"," ident} "}" "[" expr "]"
//   frac     := "frac[" expr "][" expr "]"
//   prob     := "P" ["^" domain] ["[" ref {"," ref} "]"]
//               "(" ev {"," ev} ["|" ev {"," ev}] ")"
//   ev       := ref ["@" (ref | "(" ref {"," ref} ")")]
//   ref      := ["~"] ident
//   domain   := ident ["*"]
//   ident    := letter { letter | digit | "_" }
//
// Whitespace is insignificant between tokens. Expressions are immutable
// values; operations return new trees and share unchanged subtrees.

// A variable occurrence. `star` marks an outcome value distinct from the
// variable's observed value (rendered ~X). `interventions` subscripts the
// occurrence with counterfactual do-assignments (rendered Y @ X); the
// subscripting refs themselves carry no further subscripts.
struct VariableRef {
  std::string name;
  bool star = false;
  std::vector<VariableRef> interventions;

  bool operator==(const VariableRef&) const = default;
};

VariableRef ref(std::string name);
VariableRef starred(std::string name);

// One P(...) term: optional population domain, do-subscript, outcomes and
// conditions. Outcomes are non-empty; no variable repeats within the do-set,
// and no decorated reference (name with its star and subscripts) repeats
// within outcomes or conditions or appears in both. Differently decorated
// occurrences of one variable, such as ~Y as outcome with Y as condition,
// are distinct events and legal.
struct ProbTerm {
  std::optional<std::string> domain;
  std::vector<VariableRef> do_set;
  std::vector<VariableRef> outcomes;
  std::vector<VariableRef> conditions;

  bool operator==(const ProbTerm&) const = default;
};

// Throws ParseError (Kind::Semantic, offset 0) on a malformed term.
ProbTerm make_prob_term(std::optional<std::string> domain,
                        std::vector<VariableRef> do_set,
                        std::vector<VariableRef> outcomes,
                        std::vector<VariableRef> conditions);

class Expression;
using ExpressionPtr = std::shared_ptr<const Expression>;

struct One {
  bool operator==(const One&) const = default;
};

struct Prob {
  ProbTerm term;
};

// Sum over assignments of `range` (a sorted set, always a subset of the
// body's free variables) of the body.
struct Sum {
  std::vector<std::string> range;
  ExpressionPtr body;
};

// Factors are never themselves Products; there are at least two.
struct Product {
  std::vector<ExpressionPtr> factors;
};

struct Fraction {
  ExpressionPtr numerator;
  ExpressionPtr denominator;
};

class Expression {
 public:
  using Node = std::variant<One, Prob, Sum, Product, Fraction>;

  explicit Expression(Node n) : node_(std::move(n)) {}

  const Node& node() const { return node_; }

  const Prob* as_prob() const { return std::get_if<Prob>(&node_); }
  const Sum* as_sum() const { return std::get_if<Sum>(&node_); }
  const Product* as_product() const { return std::get_if<Product>(&node_); }
  const Fraction* as_fraction() const { return std::get_if<Fraction>(&node_); }
  bool is_one() const { return std::holds_alternative<One>(node_); }

 private:
  Node node_;
};

bool operator==(const Expression& a, const Expression& b);
inline bool operator!=(const Expression& a, const Expression& b) { return !(a == b); }

ExpressionPtr expr_one();
ExpressionPtr expr_prob(ProbTerm term);

// Canonicalizing constructors. make_sum intersects the range with the body's
// free variables and collapses an empty effective range to the body itself.
// make_product flattens nested products; zero factors yield One, a single
// factor is returned as-is.
ExpressionPtr make_sum(const std::set<std::string>& range, ExpressionPtr body);
ExpressionPtr make_product(std::vector<ExpressionPtr> factors);
ExpressionPtr make_fraction(ExpressionPtr numerator, ExpressionPtr denominator);

// Variable names occurring in the tree that are not bound by an enclosing
// Sum range. Domain labels are not variables.
std::set<std::string> free_variables(const Expression& e);

// Parse text in the grammar above. Throws ParseError: syntax errors carry the
// byte offset and the set of expected tokens, semantic errors (duplicate
// variable within a term) carry the offset of the offending term.
ExpressionPtr parse(const std::string& text);

// Canonical text form; parse(render_text(e)) == *e for every valid tree.
std::string render_text(const Expression& e);

// LaTeX form. Domain labels are prettified (pi1 -> \pi_{1}, pi* -> \pi^{*});
// a fully unstarred do-subscript renders as P_{X}(...), any starred
// assignment as P_{do(X=x^*)}(...).
std::string render_latex(const Expression& e);

// Semantics-preserving cleanup: flattens Products, drops One factors,
// cancels structurally identical numerator/denominator factors (unless that
// would erase a variable bound by an enclosing Sum), collapses Sums whose
// effective range is empty.
ExpressionPtr simplify(const ExpressionPtr& e);

// Order-insensitive comparison: Product factor order and the order of
// outcomes/conditions/do-entries within ProbTerms are ignored.
bool equal_modulo_commutativity(const Expression& a, const Expression& b);

}  // namespace causalid
