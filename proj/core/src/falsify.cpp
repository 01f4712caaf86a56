#include "causalid/falsify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "causalid/stats.hpp"

namespace causalid {

Dataset::Dataset(std::vector<Column> columns) : columns_(std::move(columns)) {
  std::set<std::string> names;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const Column& c = columns_[i];
    if (c.name.empty()) throw DataError("empty column name");
    if (!names.insert(c.name).second) throw DataError("duplicate column '" + c.name + "'");
    const std::size_t rows =
        c.kind == ColumnKind::Continuous ? c.numeric.size() : c.codes.size();
    if (i == 0) {
      n_rows_ = rows;
    } else if (rows != n_rows_) {
      throw DataError("column '" + c.name + "' has " + std::to_string(rows) +
                      " rows, expected " + std::to_string(n_rows_));
    }
    if (c.kind == ColumnKind::Categorical) {
      if (!std::is_sorted(c.alphabet.begin(), c.alphabet.end()) ||
          std::adjacent_find(c.alphabet.begin(), c.alphabet.end()) != c.alphabet.end()) {
        throw DataError("levels of column '" + c.name + "' must be sorted and distinct");
      }
      for (int code : c.codes) {
        if (code < 0 || static_cast<std::size_t>(code) >= c.alphabet.size()) {
          throw DataError("level code out of range in column '" + c.name + "'");
        }
      }
    }
  }
  if (columns_.empty() || n_rows_ == 0) {
    throw DataError("no data rows");
  }
}

const Dataset::Column& Dataset::column(const std::string& name) const {
  for (const auto& c : columns_) {
    if (c.name == name) return c;
  }
  throw DataError("no column named '" + name + "'");
}

bool Dataset::has_column(const std::string& name) const {
  for (const auto& c : columns_) {
    if (c.name == name) return true;
  }
  return false;
}

namespace {

std::vector<std::vector<std::string>> parse_csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false;
  bool cell_started = false;
  std::size_t i = 0;
  auto end_cell = [&]() {
    row.push_back(cell);
    cell.clear();
    cell_started = false;
  };
  auto end_row = [&]() {
    end_cell();
    rows.push_back(row);
    row.clear();
  };
  while (i < text.size()) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          i += 2;
          continue;
        }
        quoted = false;
        ++i;
        continue;
      }
      cell += c;
      ++i;
      continue;
    }
    if (c == '"' && !cell_started && cell.empty()) {
      quoted = true;
      cell_started = true;
      ++i;
      continue;
    }
    if (c == ',') {
      end_cell();
      ++i;
      continue;
    }
    if (c == '\n' || c == '\r') {
      end_row();
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      ++i;
      continue;
    }
    cell += c;
    cell_started = true;
    ++i;
  }
  if (quoted) throw DataError("unterminated quote in CSV input");
  if (cell_started || !cell.empty() || !row.empty()) end_row();
  // A fully empty trailing line is noise, not a record.
  while (!rows.empty() && rows.back().size() == 1 && rows.back()[0].empty()) {
    rows.pop_back();
  }
  return rows;
}

bool parses_as_number(const std::string& s, double* out) {
  if (s.empty()) return false;
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + s.size()) return false;
  *out = v;
  return true;
}

}  // namespace

Dataset load_csv_text(const std::string& text,
                      const std::map<std::string, ColumnKind>& kind_overrides) {
  const auto rows = parse_csv_rows(text);
  if (rows.empty()) throw DataError("empty CSV input");
  if (rows.size() < 2) throw DataError("no data rows");
  const std::vector<std::string>& header = rows[0];
  std::set<std::string> names(header.begin(), header.end());
  if (names.size() != header.size()) throw DataError("duplicate CSV header names");
  for (const auto& [name, kind] : kind_overrides) {
    (void)kind;
    if (!names.count(name)) throw DataError("type override for unknown column '" + name + "'");
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size()) {
      throw DataError("row " + std::to_string(r + 1) + " has " +
                      std::to_string(rows[r].size()) + " fields, expected " +
                      std::to_string(header.size()));
    }
  }

  std::vector<Dataset::Column> columns;
  for (std::size_t c = 0; c < header.size(); ++c) {
    Dataset::Column col;
    col.name = header[c];
    std::vector<double> numbers(rows.size() - 1);
    bool numeric = true;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      if (!parses_as_number(rows[r][c], &numbers[r - 1])) {
        numeric = false;
        break;
      }
    }
    auto ov = kind_overrides.find(col.name);
    ColumnKind kind = numeric ? ColumnKind::Continuous : ColumnKind::Categorical;
    if (ov != kind_overrides.end()) kind = ov->second;
    if (kind == ColumnKind::Continuous && !numeric) {
      throw DataError("column '" + col.name + "' declared numeric but holds text");
    }
    col.kind = kind;
    if (kind == ColumnKind::Continuous) {
      col.numeric = std::move(numbers);
    } else {
      std::set<std::string> levels;
      for (std::size_t r = 1; r < rows.size(); ++r) levels.insert(rows[r][c]);
      col.alphabet.assign(levels.begin(), levels.end());
      std::map<std::string, int> code;
      for (std::size_t k = 0; k < col.alphabet.size(); ++k) {
        code[col.alphabet[k]] = static_cast<int>(k);
      }
      for (std::size_t r = 1; r < rows.size(); ++r) {
        col.codes.push_back(code.at(rows[r][c]));
      }
    }
    columns.push_back(std::move(col));
  }
  return Dataset(std::move(columns));
}

Dataset load_csv(const std::string& path,
                 const std::map<std::string, ColumnKind>& kind_overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_csv_text(buf.str(), kind_overrides);
}

namespace {

// Least squares residuals of y on [1, preds...]. Near-singular pivots get a
// zero coefficient, which is all the degenerate inputs here deserve.
std::vector<double> ols_residuals(const std::vector<double>& y,
                                  const std::vector<const std::vector<double>*>& preds) {
  const std::size_t n = y.size();
  const std::size_t k = preds.size() + 1;
  std::vector<std::vector<double>> a(k, std::vector<double>(k, 0.0));
  std::vector<double> b(k, 0.0);
  auto x_at = [&](std::size_t j, std::size_t row) {
    return j == 0 ? 1.0 : (*preds[j - 1])[row];
  };
  for (std::size_t row = 0; row < n; ++row) {
    for (std::size_t p = 0; p < k; ++p) {
      b[p] += x_at(p, row) * y[row];
      for (std::size_t q = p; q < k; ++q) a[p][q] += x_at(p, row) * x_at(q, row);
    }
  }
  for (std::size_t p = 0; p < k; ++p) {
    for (std::size_t q = 0; q < p; ++q) a[p][q] = a[q][p];
  }
  // Gaussian elimination with partial pivoting.
  std::vector<double> beta(k, 0.0);
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t best = col;
    for (std::size_t r = col + 1; r < k; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[best][col])) best = r;
    }
    std::swap(a[col], a[best]);
    std::swap(b[col], b[best]);
    if (std::abs(a[col][col]) < 1e-12) {
      a[col][col] = 1.0;
      for (std::size_t q = col + 1; q < k; ++q) a[col][q] = 0.0;
      b[col] = 0.0;
      continue;
    }
    for (std::size_t r = col + 1; r < k; ++r) {
      const double f = a[r][col] / a[col][col];
      for (std::size_t q = col; q < k; ++q) a[r][q] -= f * a[col][q];
      b[r] -= f * b[col];
    }
  }
  for (std::size_t col = k; col-- > 0;) {
    double s = b[col];
    for (std::size_t q = col + 1; q < k; ++q) s -= a[col][q] * beta[q];
    beta[col] = s / a[col][col];
  }
  std::vector<double> resid(n);
  for (std::size_t row = 0; row < n; ++row) {
    double fit = 0.0;
    for (std::size_t p = 0; p < k; ++p) fit += beta[p] * x_at(p, row);
    resid[row] = y[row] - fit;
  }
  return resid;
}

double sum_squares(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= v.empty() ? 1.0 : static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss;
}

CiTestResult fisher_z_test(const Dataset& d, const CiStatement& s, double alpha) {
  const std::string& xn = *s.left.begin();
  const std::string& yn = *s.right.begin();
  for (const auto& name : {xn, yn}) {
    if (d.column(name).kind != ColumnKind::Continuous) {
      throw DataError("column '" + name + "' is not numeric");
    }
  }
  std::vector<const std::vector<double>*> preds;
  for (const auto& name : s.given) {
    const auto& c = d.column(name);
    if (c.kind != ColumnKind::Continuous) {
      throw DataError("column '" + name + "' is not numeric");
    }
    preds.push_back(&c.numeric);
  }
  const std::vector<double>& x = d.column(xn).numeric;
  const std::vector<double>& y = d.column(yn).numeric;
  const std::size_t n = d.n_rows();
  const std::size_t kz = s.given.size();
  if (n <= kz + 3) {
    throw DataError("need more than " + std::to_string(kz + 3) + " rows, have " +
                    std::to_string(n));
  }
  const double raw_x = sum_squares(x);
  const double raw_y = sum_squares(y);
  if (raw_x == 0.0) throw DataError("column '" + xn + "' is constant");
  if (raw_y == 0.0) throw DataError("column '" + yn + "' is constant");

  std::vector<double> rx = preds.empty() ? x : ols_residuals(x, preds);
  std::vector<double> ry = preds.empty() ? y : ols_residuals(y, preds);
  if (preds.empty()) {
    double mx = 0.0, my = 0.0;
    for (double v : rx) mx += v;
    for (double v : ry) my += v;
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    for (double& v : rx) v -= mx;
    for (double& v : ry) v -= my;
  }
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += rx[i] * rx[i];
    syy += ry[i] * ry[i];
    sxy += rx[i] * ry[i];
  }
  double r;
  if (sxx <= 1e-12 * raw_x || syy <= 1e-12 * raw_y) {
    // The conditioning set explains a variable away; no signal left to test.
    r = 0.0;
  } else {
    r = sxy / std::sqrt(sxx * syy);
  }
  const double cap = 1.0 - 1e-12;
  r = std::max(-cap, std::min(cap, r));
  const double z = std::sqrt(static_cast<double>(n - kz) - 3.0) * std::atanh(r);
  const double p = 2.0 * (1.0 - normal_cdf(std::abs(z)));
  CiTestResult out;
  out.statement = s;
  out.method = CiMethod::FisherZ;
  out.statistic = z;
  out.p_value = std::min(1.0, std::max(0.0, p));
  out.adjusted_p = out.p_value;
  out.rejected = out.p_value < alpha;
  return out;
}

CiTestResult g_test(const Dataset& d, const CiStatement& s, double alpha) {
  const std::string& xn = *s.left.begin();
  const std::string& yn = *s.right.begin();
  std::vector<const Dataset::Column*> zs;
  for (const auto& name : s.given) zs.push_back(&d.column(name));
  const auto& cx = d.column(xn);
  const auto& cy = d.column(yn);
  for (const auto* c : zs) {
    if (c->kind != ColumnKind::Categorical) {
      throw DataError("column '" + c->name + "' is not categorical");
    }
  }
  if (cx.kind != ColumnKind::Categorical) throw DataError("column '" + xn + "' is not categorical");
  if (cy.kind != ColumnKind::Categorical) throw DataError("column '" + yn + "' is not categorical");

  const std::size_t nx = cx.alphabet.size();
  const std::size_t ny = cy.alphabet.size();
  std::map<std::vector<int>, std::vector<double>> strata;
  for (std::size_t row = 0; row < d.n_rows(); ++row) {
    std::vector<int> key;
    for (const auto* c : zs) key.push_back(c->codes[row]);
    auto& counts = strata[key];
    if (counts.empty()) counts.assign(nx * ny, 0.0);
    counts[static_cast<std::size_t>(cx.codes[row]) * ny +
           static_cast<std::size_t>(cy.codes[row])] += 1.0;
  }
  double g = 0.0;
  for (const auto& [key, counts] : strata) {
    (void)key;
    std::vector<double> rx(nx, 0.0), ry(ny, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < nx; ++i) {
      for (std::size_t j = 0; j < ny; ++j) {
        rx[i] += counts[i * ny + j];
        ry[j] += counts[i * ny + j];
        total += counts[i * ny + j];
      }
    }
    if (total == 0.0) continue;
    for (std::size_t i = 0; i < nx; ++i) {
      for (std::size_t j = 0; j < ny; ++j) {
        const double o = counts[i * ny + j];
        if (o <= 0.0) continue;
        const double e = rx[i] * ry[j] / total;
        g += 2.0 * o * std::log(o / e);
      }
    }
  }
  double df = (static_cast<double>(nx) - 1.0) * (static_cast<double>(ny) - 1.0);
  for (const auto* c : zs) df *= static_cast<double>(c->alphabet.size());
  CiTestResult out;
  out.statement = s;
  out.method = CiMethod::GTest;
  out.statistic = g;
  out.p_value = df <= 0.0 ? 1.0 : 1.0 - chi_squared_cdf(g, df);
  out.p_value = std::min(1.0, std::max(0.0, out.p_value));
  out.adjusted_p = out.p_value;
  out.rejected = out.p_value < alpha;
  return out;
}

}  // namespace

CiTestResult test_independence(const Dataset& d, const CiStatement& s,
                               CiMethod method, double alpha) {
  if (s.left.size() != 1 || s.right.size() != 1) {
    throw DataError("only pairwise statements can be tested");
  }
  for (const auto& name : s.given) {
    if (s.left.count(name) || s.right.count(name)) {
      throw DataError("conditioning set overlaps the tested pair");
    }
  }
  if (method == CiMethod::FisherZ) return fisher_z_test(d, s, alpha);
  return g_test(d, s, alpha);
}

FalsificationReport falsify_report(const Admg& g, const Dataset& d, double alpha,
                                   int max_given, Correction correction) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DataError("alpha must lie strictly between 0 and 1");
  }
  if (max_given < 0) throw DataError("max_given must be non-negative");
  for (const auto& v : g.nodes()) {
    if (!d.has_column(v)) throw DataError("no column for node '" + v + "'");
  }
  bool all_cont = true, all_cat = true;
  for (const auto& v : g.nodes()) {
    const auto& c = d.column(v);
    all_cont = all_cont && c.kind == ColumnKind::Continuous;
    all_cat = all_cat && c.kind == ColumnKind::Categorical;
  }
  if (!all_cont && !all_cat) {
    throw DataError("mixed column types; tests need all numeric or all categorical");
  }
  const CiMethod method = all_cont ? CiMethod::FisherZ : CiMethod::GTest;

  FalsificationReport rep;
  rep.alpha = alpha;
  rep.correction = correction;
  const std::vector<CiStatement> statements = implied_independencies(g, max_given);
  rep.n_tests = static_cast<int>(statements.size());
  if (statements.empty()) {
    rep.verdict = Verdict::VacuouslyConsistent;
    return rep;
  }
  for (const auto& s : statements) {
    rep.results.push_back(test_independence(d, s, method, alpha));
  }
  const std::size_t m = rep.results.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return rep.results[a].p_value < rep.results[b].p_value;
  });
  switch (correction) {
    case Correction::Holm: {
      double running = 0.0;
      for (std::size_t rank = 0; rank < m; ++rank) {
        CiTestResult& t = rep.results[order[rank]];
        running = std::max(running, static_cast<double>(m - rank) * t.p_value);
        t.adjusted_p = std::min(1.0, running);
      }
      break;
    }
    case Correction::Bonferroni:
      for (auto& t : rep.results) {
        t.adjusted_p = std::min(1.0, static_cast<double>(m) * t.p_value);
      }
      break;
    case Correction::None:
      break;
  }
  bool any = false;
  for (auto& t : rep.results) {
    t.rejected = t.adjusted_p < alpha;
    any = any || t.rejected;
  }
  rep.verdict = any ? Verdict::Falsified : Verdict::Consistent;
  return rep;
}

const char* to_string(CiMethod m) {
  return m == CiMethod::FisherZ ? "fisher_z" : "g_test";
}

const char* to_string(Correction c) {
  switch (c) {
    case Correction::Holm: return "holm";
    case Correction::Bonferroni: return "bonferroni";
    case Correction::None: return "none";
  }
  return "none";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Consistent: return "CONSISTENT";
    case Verdict::Falsified: return "FALSIFIED";
    case Verdict::VacuouslyConsistent: return "VACUOUSLY CONSISTENT";
  }
  return "CONSISTENT";
}

namespace {

std::string fmt(double x) {
  std::ostringstream out;
  out.precision(6);
  out << x;
  return out.str();
}

}  // namespace

std::string to_text(const FalsificationReport& r) {
  std::ostringstream out;
  for (const auto& t : r.results) {
    out << t.statement.to_string() << "  " << (t.method == CiMethod::FisherZ ? "z=" : "g=")
        << fmt(t.statistic) << " p=" << fmt(t.p_value) << " adj=" << fmt(t.adjusted_p);
    if (t.rejected) out << " REJECTED";
    out << "\n";
  }
  out << "verdict: " << to_string(r.verdict) << " (" << r.n_tests << " tests, alpha "
      << fmt(r.alpha) << ", " << to_string(r.correction) << " correction)\n";
  return out.str();
}

std::string to_json(const FalsificationReport& r) {
  nlohmann::json j;
  switch (r.verdict) {
    case Verdict::Consistent: j["verdict"] = "consistent"; break;
    case Verdict::Falsified: j["verdict"] = "falsified"; break;
    case Verdict::VacuouslyConsistent: j["verdict"] = "vacuously_consistent"; break;
  }
  j["alpha"] = r.alpha;
  j["correction"] = to_string(r.correction);
  j["n_tests"] = r.n_tests;
  j["tests"] = nlohmann::json::array();
  for (const auto& t : r.results) {
    j["tests"].push_back({
        {"statement", t.statement.to_string()},
        {"method", to_string(t.method)},
        {"statistic", t.statistic},
        {"p_value", t.p_value},
        {"adjusted_p", t.adjusted_p},
        {"rejected", t.rejected},
    });
  }
  return j.dump(2);
}

}  // namespace causalid
