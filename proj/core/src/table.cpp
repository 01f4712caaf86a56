#include "causalid/table.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace causalid {

namespace {

std::size_t space_size(const std::vector<std::pair<std::string, int>>& vars) {
  std::size_t n = 1;
  for (const auto& [name, card] : vars) n *= static_cast<std::size_t>(card);
  return n;
}

std::string format_assignment(const std::vector<std::pair<std::string, int>>& vars,
                              const std::vector<int>& values) {
  std::ostringstream os;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (i) os << ", ";
    os << vars[i].first << '=' << values[i];
  }
  return os.str();
}

}  // namespace

ValueTable::ValueTable(std::vector<std::pair<std::string, int>> variables,
                       std::vector<double> values)
    : vars_(std::move(variables)), vals_(std::move(values)) {
  std::set<std::string> seen;
  for (const auto& [name, card] : vars_) {
    if (card < 1) throw EvalError("variable '" + name + "' has cardinality " +
                                  std::to_string(card));
    if (!seen.insert(name).second) {
      throw EvalError("duplicate variable '" + name + "' in table");
    }
  }
  if (vals_.size() != space_size(vars_)) {
    throw EvalError("table has " + std::to_string(vals_.size()) +
                    " entries, expected " + std::to_string(space_size(vars_)));
  }
  for (double v : vals_) {
    if (!(v >= 0.0) || std::isnan(v)) throw EvalError("negative table entry");
  }
}

int ValueTable::cardinality(const std::string& name) const {
  for (const auto& [n, c] : vars_) {
    if (n == name) return c;
  }
  throw EvalError("no variable '" + name + "' in table");
}

bool ValueTable::has_variable(const std::string& name) const {
  for (const auto& [n, c] : vars_) {
    if (n == name) return true;
  }
  return false;
}

double ValueTable::at(const std::map<std::string, int>& assignment) const {
  std::size_t idx = 0;
  for (const auto& [name, card] : vars_) {
    auto it = assignment.find(name);
    if (it == assignment.end()) {
      throw EvalError("assignment missing variable '" + name + "'");
    }
    if (it->second < 0 || it->second >= card) {
      throw EvalError("value " + std::to_string(it->second) +
                      " out of range for '" + name + "'");
    }
    idx = idx * static_cast<std::size_t>(card) + static_cast<std::size_t>(it->second);
  }
  return vals_[idx];
}

double ValueTable::total() const {
  double t = 0.0;
  for (double v : vals_) t += v;
  return t;
}

ValueTable ValueTable::reordered(const std::vector<std::string>& order) const {
  if (order.size() != vars_.size()) throw EvalError("reorder: wrong arity");
  std::vector<std::pair<std::string, int>> new_vars;
  std::vector<std::size_t> src_axis;
  for (const auto& name : order) {
    bool found = false;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i].first == name) {
        new_vars.push_back(vars_[i]);
        src_axis.push_back(i);
        found = true;
        break;
      }
    }
    if (!found) throw EvalError("reorder: no variable '" + name + "'");
  }
  std::vector<std::size_t> src_stride(vars_.size(), 1);
  for (std::size_t i = vars_.size(); i-- > 1;) {
    src_stride[i - 1] = src_stride[i] * static_cast<std::size_t>(vars_[i].second);
  }
  std::vector<double> out(vals_.size());
  std::vector<int> digits(new_vars.size(), 0);
  for (std::size_t lin = 0; lin < out.size(); ++lin) {
    std::size_t src = 0;
    for (std::size_t a = 0; a < new_vars.size(); ++a) {
      src += src_stride[src_axis[a]] * static_cast<std::size_t>(digits[a]);
    }
    out[lin] = vals_[src];
    for (std::size_t a = new_vars.size(); a-- > 0;) {
      if (++digits[a] < new_vars[a].second) break;
      digits[a] = 0;
    }
  }
  return ValueTable(std::move(new_vars), std::move(out));
}

namespace {

// Shared iteration plan for pointwise binary ops over the union of two
// variable lists. Union order: a's variables, then b's new ones.
struct Join {
  std::vector<std::pair<std::string, int>> vars;
  std::vector<std::size_t> a_stride, b_stride;  // per union axis, 0 if absent

  Join(const ValueTable& a, const ValueTable& b) {
    for (const auto& v : a.variables()) vars.push_back(v);
    for (const auto& v : b.variables()) {
      bool shared = false;
      for (const auto& u : a.variables()) {
        if (u.first == v.first) {
          if (u.second != v.second) {
            throw EvalError("cardinality mismatch for variable '" + v.first + "'");
          }
          shared = true;
          break;
        }
      }
      if (!shared) vars.push_back(v);
    }
    a_stride = strides_for(a);
    b_stride = strides_for(b);
  }

  std::vector<std::size_t> strides_for(const ValueTable& t) const {
    std::vector<std::size_t> own(t.variables().size(), 1);
    for (std::size_t i = t.variables().size(); i-- > 1;) {
      own[i - 1] =
          own[i] * static_cast<std::size_t>(t.variables()[i].second);
    }
    std::vector<std::size_t> per_axis(vars.size(), 0);
    for (std::size_t a = 0; a < vars.size(); ++a) {
      for (std::size_t i = 0; i < t.variables().size(); ++i) {
        if (t.variables()[i].first == vars[a].first) per_axis[a] = own[i];
      }
    }
    return per_axis;
  }
};

template <typename F>
ValueTable pointwise(const ValueTable& a, const ValueTable& b, F op) {
  Join j(a, b);
  // Presence masks: a variable missing from one side contributes stride 0,
  // but stride of the last axis is legitimately 1, so track presence apart.
  std::vector<bool> in_a(j.vars.size(), false), in_b(j.vars.size(), false);
  for (std::size_t ax = 0; ax < j.vars.size(); ++ax) {
    in_a[ax] = a.has_variable(j.vars[ax].first);
    in_b[ax] = b.has_variable(j.vars[ax].first);
  }
  std::vector<double> out(space_size(j.vars));
  std::vector<int> digits(j.vars.size(), 0);
  for (std::size_t lin = 0; lin < out.size(); ++lin) {
    std::size_t ia = 0, ib = 0;
    for (std::size_t ax = 0; ax < j.vars.size(); ++ax) {
      if (in_a[ax]) ia += j.a_stride[ax] * static_cast<std::size_t>(digits[ax]);
      if (in_b[ax]) ib += j.b_stride[ax] * static_cast<std::size_t>(digits[ax]);
    }
    out[lin] = op(a.values()[ia], b.values()[ib], j.vars, digits);
    for (std::size_t ax = j.vars.size(); ax-- > 0;) {
      if (++digits[ax] < j.vars[ax].second) break;
      digits[ax] = 0;
    }
  }
  return ValueTable(j.vars, std::move(out));
}

}  // namespace

ValueTable multiply(const ValueTable& a, const ValueTable& b) {
  return pointwise(a, b,
                   [](double x, double y, const auto&, const auto&) { return x * y; });
}

ValueTable divide(const ValueTable& num, const ValueTable& den) {
  return pointwise(num, den,
                   [](double x, double y,
                      const std::vector<std::pair<std::string, int>>& vars,
                      const std::vector<int>& digits) {
                     if (y == 0.0) {
                       throw EvalError(
                           "zero denominator (conditioning on a zero-probability "
                           "event) at " + format_assignment(vars, digits));
                     }
                     return x / y;
                   });
}

ValueTable marginalize(const ValueTable& t, const std::set<std::string>& names) {
  std::vector<std::pair<std::string, int>> kept;
  for (const auto& v : t.variables()) {
    if (!names.count(v.first)) kept.push_back(v);
  }
  if (kept.size() == t.variables().size()) return t;
  std::vector<std::size_t> kept_axis;
  for (const auto& k : kept) {
    for (std::size_t i = 0; i < t.variables().size(); ++i) {
      if (t.variables()[i].first == k.first) kept_axis.push_back(i);
    }
  }
  std::vector<std::size_t> own(t.variables().size(), 1);
  for (std::size_t i = t.variables().size(); i-- > 1;) {
    own[i - 1] = own[i] * static_cast<std::size_t>(t.variables()[i].second);
  }
  std::vector<double> out(space_size(kept), 0.0);
  std::vector<int> digits(t.variables().size(), 0);
  for (std::size_t lin = 0; lin < t.values().size(); ++lin) {
    std::size_t dst = 0;
    for (std::size_t a = 0; a < kept.size(); ++a) {
      dst = dst * static_cast<std::size_t>(kept[a].second) +
            static_cast<std::size_t>(digits[kept_axis[a]]);
    }
    out[dst] += t.values()[lin];
    for (std::size_t ax = t.variables().size(); ax-- > 0;) {
      if (++digits[ax] < t.variables()[ax].second) break;
      digits[ax] = 0;
    }
  }
  return ValueTable(std::move(kept), std::move(out));
}

JointTable::JointTable(std::vector<std::pair<std::string, int>> variables,
                       std::vector<double> values)
    : t_(std::move(variables), std::move(values)) {
  const double total = t_.total();
  if (std::fabs(total - 1.0) > 1e-9) {
    throw EvalError("joint table sums to " + std::to_string(total) +
                    ", expected 1");
  }
}

void TableRegistry::add(const std::string& domain,
                        const std::set<std::string>& do_set, JointTable table) {
  for (const auto& v : do_set) {
    if (!table.table().has_variable(v)) {
      throw EvalError("interventional table for domain '" + domain +
                      "' lacks do-variable '" + v + "'");
    }
  }
  std::vector<std::string> key_do(do_set.begin(), do_set.end());
  tables_.insert_or_assign({domain, std::move(key_do)}, std::move(table));
}

const JointTable* TableRegistry::find(const std::string& domain,
                                      const std::set<std::string>& do_set) const {
  std::vector<std::string> key_do(do_set.begin(), do_set.end());
  auto it = tables_.find({domain, key_do});
  return it == tables_.end() ? nullptr : &it->second;
}

namespace {

std::string joined(const std::set<std::string>& s) {
  std::string out;
  for (const auto& v : s) {
    if (!out.empty()) out += ", ";
    out += v;
  }
  return out;
}

ValueTable scalar_table(double v) { return ValueTable({}, {v}); }

ValueTable eval_rec(const Expression& e, const TableRegistry& reg,
                    const std::string& target) {
  if (e.is_one()) return scalar_table(1.0);
  if (const auto* p = e.as_prob()) {
    const ProbTerm& t = p->term;
    auto reject_special = [](const std::vector<VariableRef>& refs) {
      for (const auto& r : refs) {
        if (r.star) {
          throw EvalError("cannot evaluate star-valued reference '~" + r.name + "'");
        }
        if (!r.interventions.empty()) {
          throw EvalError("cannot evaluate counterfactual reference '" + r.name + "'");
        }
      }
    };
    reject_special(t.do_set);
    reject_special(t.outcomes);
    reject_special(t.conditions);

    const std::string domain = t.domain.value_or(target);
    std::set<std::string> do_names, out_names, cond_names;
    for (const auto& r : t.do_set) do_names.insert(r.name);
    for (const auto& r : t.outcomes) out_names.insert(r.name);
    for (const auto& r : t.conditions) cond_names.insert(r.name);

    const JointTable* jt = reg.find(domain, do_names);
    if (!jt) {
      throw EvalError("no table registered for domain '" + domain +
                      "' with do-set {" + joined(do_names) + "}");
    }
    std::set<std::string> involved = do_names;
    involved.insert(out_names.begin(), out_names.end());
    involved.insert(cond_names.begin(), cond_names.end());
    std::set<std::string> drop;
    for (const auto& [name, card] : jt->variables()) {
      if (!involved.count(name)) drop.insert(name);
    }
    for (const auto& name : involved) {
      if (!jt->table().has_variable(name)) {
        throw EvalError("table for domain '" + domain + "' lacks variable '" +
                        name + "'");
      }
    }
    ValueTable num = marginalize(jt->table(), drop);
    std::set<std::string> denominator_axes = do_names;
    denominator_axes.insert(cond_names.begin(), cond_names.end());
    if (denominator_axes.empty()) return num;
    std::set<std::string> out_only;
    for (const auto& n : out_names) {
      if (!denominator_axes.count(n)) out_only.insert(n);
    }
    ValueTable den = marginalize(num, out_only);
    return divide(num, den);
  }
  if (const auto* s = e.as_sum()) {
    ValueTable body = eval_rec(*s->body, reg, target);
    return marginalize(body,
                       std::set<std::string>(s->range.begin(), s->range.end()));
  }
  if (const auto* p = e.as_product()) {
    ValueTable acc = scalar_table(1.0);
    for (const auto& f : p->factors) acc = multiply(acc, eval_rec(*f, reg, target));
    return acc;
  }
  const auto* f = e.as_fraction();
  ValueTable num = eval_rec(*f->numerator, reg, target);
  ValueTable den = eval_rec(*f->denominator, reg, target);
  return divide(num, den);
}

}  // namespace

ValueTable evaluate(const Expression& e, const TableRegistry& tables,
                    const std::string& target_domain) {
  return eval_rec(e, tables, target_domain);
}

}  // namespace causalid
