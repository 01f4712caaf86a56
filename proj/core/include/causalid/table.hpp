#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "causalid/errors.hpp"
#include "causalid/expr.hpp"

namespace causalid {

// Dense table of non-negative reals over assignments of a fixed variable
// list. Values are row-major with the last variable fastest. Doubles as the
// result type of evaluate(); a JointTable additionally sums to 1 (1e-9).
class ValueTable {
 public:
  ValueTable() = default;
  ValueTable(std::vector<std::pair<std::string, int>> variables,
             std::vector<double> values);

  const std::vector<std::pair<std::string, int>>& variables() const { return vars_; }
  const std::vector<double>& values() const { return vals_; }
  std::size_t size() const { return vals_.size(); }

  int cardinality(const std::string& name) const;
  bool has_variable(const std::string& name) const;

  double at(const std::map<std::string, int>& assignment) const;

  double total() const;

  // Reorders axes to the given variable list (a permutation of the current one).
  ValueTable reordered(const std::vector<std::string>& order) const;

 private:
  std::vector<std::pair<std::string, int>> vars_;
  std::vector<double> vals_;

  friend ValueTable multiply(const ValueTable&, const ValueTable&);
  friend ValueTable divide(const ValueTable&, const ValueTable&);
  friend ValueTable marginalize(const ValueTable&, const std::set<std::string>&);
};

// Pointwise product, joining on shared variable names. Cardinality mismatch
// for a shared name throws EvalError.
ValueTable multiply(const ValueTable& a, const ValueTable& b);

// Pointwise quotient over the union of variables. A zero denominator at an
// assignment where the numerator matters throws EvalError naming the
// assignment.
ValueTable divide(const ValueTable& num, const ValueTable& den);

// Sums out the named variables (ignores names not present).
ValueTable marginalize(const ValueTable& t, const std::set<std::string>& names);

// Joint distribution: a ValueTable whose entries sum to 1 within 1e-9.
class JointTable {
 public:
  JointTable() = default;
  JointTable(std::vector<std::pair<std::string, int>> variables,
             std::vector<double> values);

  const ValueTable& table() const { return t_; }
  const std::vector<std::pair<std::string, int>>& variables() const { return t_.variables(); }
  const std::vector<double>& values() const { return t_.values(); }
  double at(const std::map<std::string, int>& assignment) const { return t_.at(assignment); }

 private:
  ValueTable t_;
};

// Tables available to evaluate(), keyed by (domain label, sorted do-set).
// A table registered with a non-empty do-set must carry the do variables as
// coordinates (a randomized-design table: uniform over do assignments times
// the interventional distribution), so that conditioning on them inside
// evaluate() recovers the interventional probabilities.
class TableRegistry {
 public:
  void add(const std::string& domain, const std::set<std::string>& do_set,
           JointTable table);

  const JointTable* find(const std::string& domain,
                         const std::set<std::string>& do_set) const;

 private:
  std::map<std::pair<std::string, std::vector<std::string>>, JointTable> tables_;
};

// Exact evaluation of a star-free, counterfactual-free expression. Every
// ProbTerm must resolve to a registered table: (term domain or target_domain,
// term do-set). Returns a table over the expression's free variables.
ValueTable evaluate(const Expression& e, const TableRegistry& tables,
                    const std::string& target_domain);

}  // namespace causalid
