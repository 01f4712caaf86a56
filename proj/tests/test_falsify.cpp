// Dataset loading, independence tests, multiplicity correction, and the
// graph-against-data verdict.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "doctest.h"

#include "causalid/errors.hpp"
#include "causalid/falsify.hpp"
#include "causalid/oracle.hpp"
#include "causalid/rng.hpp"
#include "support/generators.hpp"

using namespace causalid;

namespace {

Dataset make_continuous(
    const std::vector<std::pair<std::string, std::vector<double>>>& cols) {
  std::vector<Dataset::Column> out;
  for (const auto& [name, values] : cols) {
    Dataset::Column c;
    c.name = name;
    c.kind = ColumnKind::Continuous;
    c.numeric = values;
    out.push_back(std::move(c));
  }
  return Dataset(std::move(out));
}

// X -> Y -> Z with standardized-ish linear effects and fresh noise.
Dataset chain_numeric(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  std::vector<double> x(n), y(n), z(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = rng.normal();
    y[i] = 0.8 * x[i] + 0.6 * rng.normal();
    z[i] = 0.8 * y[i] + 0.6 * rng.normal();
  }
  return make_continuous({{"X", x}, {"Y", y}, {"Z", z}});
}

Admg chain_graph() {
  return Admg({"X", "Y", "Z"}, {{"X", "Y"}, {"Y", "Z"}}, {});
}

Admg edgeless_graph() { return Admg({"X", "Y", "Z"}, {}, {}); }

}  // namespace

TEST_CASE("CSV parsing handles quoting and type inference") {
  const std::string text =
      "name,score,\"note, quoted\"\n"
      "alice,1.5,\"says \"\"hi\"\"\"\n"
      "bob,-2e3,\"line\nbreak\"\r\n"
      "carol,0.25,plain\n";
  Dataset d = load_csv_text(text);
  REQUIRE(d.n_rows() == 3);
  REQUIRE(d.n_columns() == 3);

  const auto& name = d.column("name");
  CHECK(name.kind == ColumnKind::Categorical);
  REQUIRE(name.alphabet == std::vector<std::string>{"alice", "bob", "carol"});
  CHECK(name.codes == std::vector<int>{0, 1, 2});

  const auto& score = d.column("score");
  CHECK(score.kind == ColumnKind::Continuous);
  CHECK(score.numeric[0] == doctest::Approx(1.5));
  CHECK(score.numeric[1] == doctest::Approx(-2000.0));
  CHECK(score.numeric[2] == doctest::Approx(0.25));

  const auto& note = d.column("note, quoted");
  CHECK(note.kind == ColumnKind::Categorical);
  CHECK(note.alphabet[2] == "says \"hi\"");
  CHECK(note.alphabet[0] == "line\nbreak");

  CHECK(d.has_column("score"));
  CHECK_FALSE(d.has_column("missing"));
  CHECK_THROWS_AS(d.column("missing"), DataError);
}

TEST_CASE("CSV loading rejects malformed input") {
  CHECK_THROWS_WITH_AS(load_csv_text(""), "empty CSV input", DataError);
  CHECK_THROWS_WITH_AS(load_csv_text("a,b\n"), "no data rows", DataError);
  CHECK_THROWS_WITH_AS(load_csv_text("a,b\n1,2\n3\n"),
                       "row 3 has 1 fields, expected 2", DataError);
  CHECK_THROWS_WITH_AS(load_csv_text("a,a\n1,2\n"), "duplicate CSV header names",
                       DataError);
  CHECK_THROWS_AS(load_csv_text("a,b\n\"1,2\n"), DataError);  // unterminated quote
  // A blank trailing line is tolerated, a blank middle line is a short row.
  CHECK_NOTHROW(load_csv_text("a,b\n1,2\n\n"));
  CHECK_THROWS_AS(load_csv_text("a,b\n\n1,2\n"), DataError);
}

TEST_CASE("CSV type overrides") {
  const std::string text = "X,Y\n0,red\n1,blue\n0,red\n";
  SUBCASE("numbers can be forced categorical") {
    Dataset d = load_csv_text(text, {{"X", ColumnKind::Categorical}});
    const auto& x = d.column("X");
    CHECK(x.kind == ColumnKind::Categorical);
    CHECK(x.alphabet == std::vector<std::string>{"0", "1"});
    CHECK(x.codes == std::vector<int>{0, 1, 0});
  }
  SUBCASE("text cannot be forced numeric") {
    CHECK_THROWS_WITH_AS(load_csv_text(text, {{"Y", ColumnKind::Continuous}}),
                         "column 'Y' declared numeric but holds text", DataError);
  }
  SUBCASE("overrides must name real columns") {
    CHECK_THROWS_WITH_AS(load_csv_text(text, {{"Q", ColumnKind::Categorical}}),
                         "type override for unknown column 'Q'", DataError);
  }
}

TEST_CASE("Dataset construction is validated") {
  Dataset::Column a{"A", ColumnKind::Continuous, {1.0, 2.0}, {}, {}};
  Dataset::Column b{"B", ColumnKind::Continuous, {3.0}, {}, {}};
  CHECK_THROWS_AS(Dataset({a, b}), DataError);  // row counts differ
  CHECK_THROWS_AS(Dataset({a, a}), DataError);  // duplicate name
  CHECK_THROWS_WITH_AS(Dataset(std::vector<Dataset::Column>{}), "no data rows",
                       DataError);

  Dataset::Column empty_col{"A", ColumnKind::Continuous, {}, {}, {}};
  CHECK_THROWS_WITH_AS(Dataset({empty_col}), "no data rows", DataError);

  Dataset::Column bad_levels{"C", ColumnKind::Categorical, {}, {0, 1}, {"b", "a"}};
  CHECK_THROWS_AS(Dataset({bad_levels}), DataError);  // unsorted alphabet
  Dataset::Column bad_code{"C", ColumnKind::Categorical, {}, {0, 2}, {"a", "b"}};
  CHECK_THROWS_AS(Dataset({bad_code}), DataError);  // code out of range
}

TEST_CASE("Fisher z test separates signal from noise") {
  SUBCASE("independent normals are not rejected") {
    Rng rng(11);
    std::vector<double> x(500), y(500);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = rng.normal();
      y[i] = rng.normal();
    }
    Dataset d = make_continuous({{"X", x}, {"Y", y}});
    CiTestResult t = test_independence(d, {{"X"}, {"Y"}, {}}, CiMethod::FisherZ);
    CHECK(t.method == CiMethod::FisherZ);
    CHECK(t.p_value > 0.05);
    CHECK_FALSE(t.rejected);
    CHECK(t.adjusted_p == t.p_value);  // no correction applied here
  }
  SUBCASE("an exact copy is rejected overwhelmingly") {
    Rng rng(12);
    std::vector<double> x(200);
    for (auto& v : x) v = rng.normal();
    Dataset d = make_continuous({{"X", x}, {"Y", x}});
    CiTestResult t = test_independence(d, {{"X"}, {"Y"}, {}}, CiMethod::FisherZ);
    CHECK(t.rejected);
    CHECK(t.p_value < 1e-6);
  }
  SUBCASE("conditioning on a duplicate leaves nothing to test") {
    Rng rng(13);
    std::vector<double> x(200), z(200);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = rng.normal();
      z[i] = rng.normal();
    }
    Dataset d = make_continuous({{"X", x}, {"Y", z}, {"Z", z}});
    CiTestResult t = test_independence(d, {{"X"}, {"Y"}, {"Z"}}, CiMethod::FisherZ);
    CHECK(t.statistic == doctest::Approx(0.0));
    CHECK(t.p_value == doctest::Approx(1.0));
    CHECK_FALSE(t.rejected);
  }
  SUBCASE("the mediator screens a chain off") {
    Dataset d = chain_numeric(21, 800);
    CiTestResult direct = test_independence(d, {{"X"}, {"Z"}, {}}, CiMethod::FisherZ);
    CHECK(direct.rejected);  // marginal dependence down the chain
    CiTestResult screened =
        test_independence(d, {{"X"}, {"Z"}, {"Y"}}, CiMethod::FisherZ);
    CHECK_FALSE(screened.rejected);
  }
}

TEST_CASE("independence test input validation") {
  Dataset d = chain_numeric(5, 50);
  CHECK_THROWS_AS(test_independence(d, {{"X", "Y"}, {"Z"}, {}}, CiMethod::FisherZ),
                  DataError);
  CHECK_THROWS_AS(test_independence(d, {{"X"}, {}, {}}, CiMethod::FisherZ),
                  DataError);
  CHECK_THROWS_AS(test_independence(d, {{"X"}, {"Y"}, {"X"}}, CiMethod::FisherZ),
                  DataError);
  CHECK_THROWS_AS(test_independence(d, {{"X"}, {"Q"}, {}}, CiMethod::FisherZ),
                  DataError);

  SUBCASE("too few rows for the conditioning set") {
    Dataset tiny = load_csv_text("X,Y,Z\n1,2,3\n2,1,4\n3,3,1\n4,2,2\n");
    CHECK_THROWS_AS(test_independence(tiny, {{"X"}, {"Y"}, {"Z"}}, CiMethod::FisherZ),
                    DataError);
  }
  SUBCASE("constant columns carry no signal") {
    Rng rng(3);
    std::vector<double> x(50), c(50, 7.0);
    for (auto& v : x) v = rng.normal();
    Dataset flat = make_continuous({{"X", x}, {"Y", c}});
    CHECK_THROWS_WITH_AS(test_independence(flat, {{"X"}, {"Y"}, {}}, CiMethod::FisherZ),
                         "column 'Y' is constant", DataError);
  }
  SUBCASE("fisher z needs numeric columns") {
    Dataset mixed = load_csv_text("X,Y\n1,red\n2,blue\n3,red\n4,blue\n5,red\n");
    CHECK_THROWS_AS(test_independence(mixed, {{"X"}, {"Y"}, {}}, CiMethod::FisherZ),
                    DataError);
  }
  SUBCASE("g test needs categorical columns") {
    CHECK_THROWS_AS(test_independence(d, {{"X"}, {"Y"}, {}}, CiMethod::GTest),
                    DataError);
  }
}

TEST_CASE("G test on sampled chain data") {
  DiscreteScm m = causalid::testing::chain_scm();
  Dataset d = sample(m, 5000, 42);
  REQUIRE(d.n_rows() == 5000);
  REQUIRE(d.column("X1").kind == ColumnKind::Categorical);

  CiTestResult direct = test_independence(d, {{"X1"}, {"X2"}, {}}, CiMethod::GTest);
  CHECK(direct.method == CiMethod::GTest);
  CHECK(direct.rejected);
  CHECK(direct.p_value < 1e-6);

  CiTestResult screened =
      test_independence(d, {{"X1"}, {"X3"}, {"X2"}}, CiMethod::GTest);
  CHECK_FALSE(screened.rejected);

  SUBCASE("a single-level column yields zero degrees of freedom") {
    Dataset flat = load_csv_text("A,B\nyes,u\nyes,v\nyes,u\n",
                                 {{"A", ColumnKind::Categorical},
                                  {"B", ColumnKind::Categorical}});
    CiTestResult t = test_independence(flat, {{"A"}, {"B"}, {}}, CiMethod::GTest);
    CHECK(t.p_value == doctest::Approx(1.0));
    CHECK_FALSE(t.rejected);
  }
}

TEST_CASE("multiplicity corrections order correctly") {
  // Four independent-ish nodes give six unconditional pairwise tests.
  Rng rng(77);
  const std::size_t n = 300;
  std::vector<std::vector<double>> cols(4, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& c : cols) c[i] = rng.normal();
  }
  Dataset d = make_continuous(
      {{"A", cols[0]}, {"B", cols[1]}, {"C", cols[2]}, {"D", cols[3]}});
  Admg g({"A", "B", "C", "D"}, {}, {});

  FalsificationReport holm = falsify_report(g, d, 0.05, 3, Correction::Holm);
  FalsificationReport bonf = falsify_report(g, d, 0.05, 3, Correction::Bonferroni);
  FalsificationReport none = falsify_report(g, d, 0.05, 3, Correction::None);
  REQUIRE(holm.results.size() == 6);
  REQUIRE(bonf.results.size() == 6);
  REQUIRE(none.results.size() == 6);

  for (std::size_t i = 0; i < holm.results.size(); ++i) {
    CHECK(holm.results[i].statement == bonf.results[i].statement);
    // Raw p is correction-free; adjusted never drops below it.
    CHECK(holm.results[i].p_value == doctest::Approx(bonf.results[i].p_value));
    CHECK(holm.results[i].adjusted_p >= holm.results[i].p_value);
    CHECK(bonf.results[i].adjusted_p >= bonf.results[i].p_value);
    // Holm is uniformly no more conservative than Bonferroni.
    CHECK(holm.results[i].adjusted_p <= bonf.results[i].adjusted_p + 1e-15);
    CHECK(none.results[i].adjusted_p == none.results[i].p_value);
    CHECK(holm.results[i].adjusted_p <= 1.0);
  }

  // Holm's adjusted values are nondecreasing along the raw p ordering.
  std::vector<const CiTestResult*> by_p;
  for (const auto& t : holm.results) by_p.push_back(&t);
  std::sort(by_p.begin(), by_p.end(), [](const CiTestResult* a, const CiTestResult* b) {
    return a->p_value < b->p_value;
  });
  for (std::size_t i = 1; i < by_p.size(); ++i) {
    CHECK(by_p[i]->adjusted_p >= by_p[i - 1]->adjusted_p - 1e-15);
  }
}

TEST_CASE("falsification verdicts") {
  SUBCASE("the right graph on its own data is consistent") {
    Dataset d = chain_numeric(101, 2000);
    FalsificationReport r = falsify_report(chain_graph(), d);
    CHECK(r.verdict == Verdict::Consistent);
    CHECK(r.n_tests == 1);
    REQUIRE(r.results.size() == 1);
    CHECK(r.results[0].statement ==
          CiStatement{{"X"}, {"Z"}, {"Y"}});
  }
  SUBCASE("an edgeless graph over dependent data is falsified") {
    Dataset d = chain_numeric(102, 2000);
    FalsificationReport r = falsify_report(edgeless_graph(), d);
    CHECK(r.verdict == Verdict::Falsified);
    CHECK(r.n_tests == 3);
    int rejections = 0;
    for (const auto& t : r.results) rejections += t.rejected ? 1 : 0;
    CHECK(rejections >= 1);
  }
  SUBCASE("a complete graph implies nothing") {
    Rng rng(7);
    std::vector<double> a(40), b(40), c(40);
    for (std::size_t i = 0; i < 40; ++i) {
      a[i] = rng.normal();
      b[i] = rng.normal();
      c[i] = rng.normal();
    }
    Dataset d = make_continuous({{"Smoking", a}, {"Tar", b}, {"Cancer", c}});
    FalsificationReport r =
        falsify_report(causalid::testing::mediated_complete_graph(), d);
    CHECK(r.verdict == Verdict::VacuouslyConsistent);
    CHECK(r.n_tests == 0);
    CHECK(r.results.empty());
  }
  SUBCASE("categorical chain data against its own graph") {
    DiscreteScm m = causalid::testing::chain_scm();
    Dataset d = sample(m, 5000, 7);
    Admg g({"X1", "X2", "X3"}, {{"X1", "X2"}, {"X2", "X3"}}, {});
    FalsificationReport right = falsify_report(g, d);
    CHECK(right.verdict == Verdict::Consistent);
    FalsificationReport wrong = falsify_report(Admg({"X1", "X2", "X3"}, {}, {}), d);
    CHECK(wrong.verdict == Verdict::Falsified);
  }
}

TEST_CASE("falsify_report input validation") {
  Dataset d = chain_numeric(1, 100);
  Admg g = chain_graph();
  CHECK_THROWS_WITH_AS(falsify_report(g, d, 0.0),
                       "alpha must lie strictly between 0 and 1", DataError);
  CHECK_THROWS_AS(falsify_report(g, d, 1.0), DataError);
  CHECK_THROWS_AS(falsify_report(g, d, -0.1), DataError);
  CHECK_THROWS_AS(falsify_report(g, d, 0.05, -1), DataError);

  SUBCASE("every node needs a column") {
    Admg wide({"X", "Y", "Z", "Q"}, {}, {});
    CHECK_THROWS_WITH_AS(falsify_report(wide, d), "no column for node 'Q'",
                         DataError);
  }
  SUBCASE("mixed column kinds are refused") {
    Dataset mixed = load_csv_text("X,Y,Z\n1,red,3\n2,blue,1\n3,red,2\n4,blue,5\n5,red,4\n");
    CHECK_THROWS_AS(falsify_report(g, mixed), DataError);
  }
  SUBCASE("max_given zero tests only unconditional pairs") {
    FalsificationReport r = falsify_report(g, d, 0.05, 0);
    // X _||_ Z | Y needs one conditioning variable, so nothing is testable.
    CHECK(r.n_tests == 0);
    CHECK(r.verdict == Verdict::VacuouslyConsistent);
  }
}

TEST_CASE("fisher z level is roughly alpha under the null") {
  const double alpha = 0.05;
  const int sims = 300;
  const std::size_t n = 120;
  int rejections = 0;
  for (int s = 0; s < sims; ++s) {
    Rng rng(90000 + static_cast<std::uint64_t>(s));
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = rng.normal();
      y[i] = rng.normal();
    }
    Dataset d = make_continuous({{"X", x}, {"Y", y}});
    CiTestResult t = test_independence(d, {{"X"}, {"Y"}, {}}, CiMethod::FisherZ, alpha);
    rejections += t.rejected ? 1 : 0;
  }
  const double rate = static_cast<double>(rejections) / sims;
  const double slack = 3.0 * std::sqrt(alpha * (1.0 - alpha) / sims);
  CHECK(rate > alpha - slack - 1e-12);
  CHECK(rate < alpha + slack + 1e-12);
}

TEST_CASE("report rendering") {
  Dataset d = chain_numeric(55, 1500);
  FalsificationReport r = falsify_report(chain_graph(), d);

  SUBCASE("text layout") {
    const std::string text = to_text(r);
    CHECK(text.find("X _||_ Z | Y  z=") != std::string::npos);
    CHECK(text.find(" p=") != std::string::npos);
    CHECK(text.find(" adj=") != std::string::npos);
    CHECK(text.find("verdict: CONSISTENT (1 tests, alpha 0.05, holm correction)") !=
          std::string::npos);
  }
  SUBCASE("rejections are flagged in text") {
    Dataset dep = chain_numeric(56, 1500);
    FalsificationReport bad = falsify_report(edgeless_graph(), dep);
    const std::string text = to_text(bad);
    CHECK(text.find(" REJECTED") != std::string::npos);
    CHECK(text.find("verdict: FALSIFIED") != std::string::npos);
  }
  SUBCASE("json shape") {
    const auto j = nlohmann::json::parse(to_json(r));
    CHECK(j.at("verdict") == "consistent");
    CHECK(j.at("alpha") == doctest::Approx(0.05));
    CHECK(j.at("correction") == "holm");
    CHECK(j.at("n_tests") == 1);
    REQUIRE(j.at("tests").size() == 1);
    const auto& t = j.at("tests")[0];
    CHECK(t.at("statement") == "X _||_ Z | Y");
    CHECK(t.at("method") == "fisher_z");
    CHECK(t.contains("statistic"));
    CHECK(t.contains("p_value"));
    CHECK(t.contains("adjusted_p"));
    CHECK(t.at("rejected") == false);
  }
  SUBCASE("vacuous verdict renders distinctly") {
    Rng rng(9);
    std::vector<double> a(30), b(30), c(30);
    for (std::size_t i = 0; i < 30; ++i) {
      a[i] = rng.normal();
      b[i] = rng.normal();
      c[i] = rng.normal();
    }
    Dataset free_data =
        make_continuous({{"Smoking", a}, {"Tar", b}, {"Cancer", c}});
    FalsificationReport v =
        falsify_report(causalid::testing::mediated_complete_graph(), free_data);
    CHECK(to_text(v).find("verdict: VACUOUSLY CONSISTENT (0 tests") !=
          std::string::npos);
    const auto j = nlohmann::json::parse(to_json(v));
    CHECK(j.at("verdict") == "vacuously_consistent");
    CHECK(j.at("tests").empty());
  }
}
