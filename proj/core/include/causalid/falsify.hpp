#pragma once

#include <map>
#include <string>
#include <vector>

#include "causalid/separation.hpp"

namespace causalid {

enum class ColumnKind { Categorical, Continuous };

class Dataset {
 public:
  struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::Continuous;
    std::vector<double> numeric;        // continuous values
    std::vector<int> codes;             // categorical level codes
    std::vector<std::string> alphabet;  // categorical level names, sorted
  };

  Dataset() = default;
  explicit Dataset(std::vector<Column> columns);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_columns() const { return columns_.size(); }
  const std::vector<Column>& columns() const { return columns_; }
  const Column& column(const std::string& name) const;
  bool has_column(const std::string& name) const;

 private:
  std::vector<Column> columns_;
  std::size_t n_rows_ = 0;
};

// RFC 4180 subset: comma separated, double-quote escaping, first row is the
// header. A column whose every value parses as a number is continuous unless
// overridden. Ragged rows and empty input are errors (with row numbers).
Dataset load_csv_text(const std::string& text,
                      const std::map<std::string, ColumnKind>& kind_overrides = {});
Dataset load_csv(const std::string& path,
                 const std::map<std::string, ColumnKind>& kind_overrides = {});

enum class CiMethod { FisherZ, GTest };

struct CiTestResult {
  CiStatement statement;
  CiMethod method = CiMethod::FisherZ;
  double statistic = 0.0;
  double p_value = 1.0;
  double adjusted_p = 1.0;
  bool rejected = false;
};

// Tests one pairwise statement (singleton left/right). FisherZ needs all
// involved columns continuous, GTest all categorical; anything else is a
// DataError. Before correction adjusted_p == p_value and rejected compares
// p_value to alpha.
CiTestResult test_independence(const Dataset& d, const CiStatement& s,
                               CiMethod method, double alpha = 0.05);

enum class Correction { Holm, Bonferroni, None };
enum class Verdict { Consistent, Falsified, VacuouslyConsistent };

struct FalsificationReport {
  std::vector<CiTestResult> results;
  Verdict verdict = Verdict::VacuouslyConsistent;
  double alpha = 0.05;
  Correction correction = Correction::Holm;
  int n_tests = 0;
};

// Tests every independence the graph implies (up to max_given conditioning
// variables) against the data, corrects for multiplicity, and reports
// FALSIFIED iff any corrected test rejects. A graph implying nothing is
// vacuously consistent.
FalsificationReport falsify_report(const Admg& g, const Dataset& d,
                                   double alpha = 0.05, int max_given = 3,
                                   Correction correction = Correction::Holm);

std::string to_text(const FalsificationReport& r);
std::string to_json(const FalsificationReport& r);

const char* to_string(CiMethod m);
const char* to_string(Correction c);
const char* to_string(Verdict v);

}  // namespace causalid
