// causalid: causal identification from the command line.
//
// Exit codes: 0 when the query succeeds (identifiable / separated /
// consistent), 1 when the answer is negative (not identifiable / not
// separated / falsified), 2 on usage or input errors.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "causalid/falsify.hpp"
#include "causalid/identify.hpp"
#include "causalid/oracle.hpp"
#include "causalid/separation.hpp"
#include "causalid/surrogate.hpp"

namespace {

using namespace causalid;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << "\n";
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + out_path + "'");
  out << text;
}

// Reads a graph file; JSON is recognized by extension or a leading brace.
// Bidirected-edge graphs are used as-is, explicit-latent graphs are
// projected onto their observed nodes.
Admg load_admg(const std::string& path) {
  const std::string text = slurp(path);
  GraphFormat fmt = GraphFormat::EdgeList;
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
    fmt = GraphFormat::Json;
  } else {
    for (char c : text) {
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
      if (c == '{') fmt = GraphFormat::Json;
      break;
    }
  }
  ParsedGraph g = parse_graph(text, fmt);
  if (std::holds_alternative<Admg>(g)) return std::get<Admg>(std::move(g));
  return latent_project(std::get<LatentDag>(g));
}

NodeSet to_set(const std::vector<std::string>& v) {
  return NodeSet(v.begin(), v.end());
}

nlohmann::json table_json(const JointTable& t) {
  nlohmann::json j;
  j["variables"] = nlohmann::json::array();
  for (const auto& [name, card] : t.variables()) {
    j["variables"].push_back({{"name", name}, {"cardinality", card}});
  }
  j["values"] = t.values();
  return j;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += "\"";
  return out;
}

std::string dataset_csv(const Dataset& d) {
  std::ostringstream out;
  for (std::size_t c = 0; c < d.columns().size(); ++c) {
    if (c) out << ",";
    out << csv_field(d.columns()[c].name);
  }
  out << "\n";
  for (std::size_t r = 0; r < d.n_rows(); ++r) {
    for (std::size_t c = 0; c < d.columns().size(); ++c) {
      if (c) out << ",";
      const auto& col = d.columns()[c];
      if (col.kind == ColumnKind::Categorical) {
        out << csv_field(col.alphabet[static_cast<std::size_t>(col.codes[r])]);
      } else {
        out << col.numeric[r];
      }
    }
    out << "\n";
  }
  return out.str();
}

int run(int argc, char** argv) {
  CLI::App app{"causal identification engine"};
  app.require_subcommand(1);

  std::string graph_path, data_path, sources_path, model_path, out_path;
  std::string format = "text", target_domain, correction = "holm";
  std::vector<std::string> do_vars, outcomes, given, left, right, randomize;
  std::vector<std::string> set_args, kind_args;
  double alpha = 0.05;
  int max_given = 3;
  bool keep_latent = false;
  std::uint64_t seed = 1;
  int n_observed = 4, n_latent = 1, max_parents = 3, max_card = 3, n_samples = 1000;
  std::string expr_text;

  auto* cid = app.add_subcommand("identify", "identify an interventional query");
  cid->add_option("--graph", graph_path, "graph file")->required();
  cid->add_option("--do", do_vars, "treatment variables")->delimiter(',');
  cid->add_option("--outcomes", outcomes, "outcome variables")->required()->delimiter(',');
  cid->add_option("--given", given, "conditioning variables")->delimiter(',');
  cid->add_option("--format", format)->check(CLI::IsMember({"text", "latex", "json"}));

  auto* ctr = app.add_subcommand("trso", "identify across domains from declared sources");
  ctr->add_option("--graph", graph_path, "graph file")->required();
  ctr->add_option("--do", do_vars, "treatment variables")->delimiter(',');
  ctr->add_option("--outcomes", outcomes, "outcome variables")->required()->delimiter(',');
  ctr->add_option("--sources", sources_path, "sources JSON file")->required();
  ctr->add_option("--target", target_domain, "target domain label")->required();
  ctr->add_option("--format", format)->check(CLI::IsMember({"text", "latex", "json"}));

  auto* cds = app.add_subcommand("dsep", "test one graphical separation statement");
  cds->add_option("--graph", graph_path, "graph file")->required();
  cds->add_option("--left", left, "first variable set")->required()->delimiter(',');
  cds->add_option("--right", right, "second variable set")->required()->delimiter(',');
  cds->add_option("--given", given, "conditioning variables")->delimiter(',');
  cds->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

  auto* cci = app.add_subcommand("ci", "list the graph's implied independencies");
  cci->add_option("--graph", graph_path, "graph file")->required();
  cci->add_option("--max-given", max_given, "conditioning set size cap");
  cci->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

  auto* cfa = app.add_subcommand("falsify", "test a graph against data");
  cfa->add_option("--graph", graph_path, "graph file")->required();
  cfa->add_option("--data", data_path, "CSV file")->required();
  cfa->add_option("--alpha", alpha, "significance level");
  cfa->add_option("--max-given", max_given, "conditioning set size cap");
  cfa->add_option("--correction", correction)
      ->check(CLI::IsMember({"holm", "bonferroni", "none"}));
  cfa->add_option("--categorical", kind_args, "treat these columns as categorical")
      ->delimiter(',');
  cfa->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

  auto* cex = app.add_subcommand("expr", "work with probability expressions");
  cex->require_subcommand(1);
  auto* cex_parse = cex->add_subcommand("parse", "parse and reprint canonically");
  auto* cex_latex = cex->add_subcommand("latex", "parse and print LaTeX");
  auto* cex_simplify = cex->add_subcommand("simplify", "parse, simplify, reprint");
  for (auto* sub : {cex_parse, cex_latex, cex_simplify}) {
    sub->add_option("expression", expr_text, "expression text")->required();
  }

  auto* cor = app.add_subcommand("oracle", "exact discrete models for testing");
  cor->require_subcommand(1);
  auto* cor_gen = cor->add_subcommand("gen", "generate a seeded random model");
  cor_gen->add_option("--seed", seed, "random seed");
  cor_gen->add_option("--observed", n_observed, "observed node count");
  cor_gen->add_option("--latent", n_latent, "latent node count");
  cor_gen->add_option("--max-parents", max_parents, "parent cap per node");
  cor_gen->add_option("--max-card", max_card, "cardinality cap per node");
  cor_gen->add_option("-o,--out", out_path, "output file (default stdout)");
  auto* cor_joint = cor->add_subcommand("joint", "exact observed joint");
  cor_joint->add_option("--model", model_path, "model JSON file")->required();
  cor_joint->add_flag("--keep-latent", keep_latent, "keep latent axes");
  cor_joint->add_option("-o,--out", out_path, "output file (default stdout)");
  auto* cor_int = cor->add_subcommand("intervene", "exact interventional joint");
  cor_int->add_option("--model", model_path, "model JSON file")->required();
  cor_int->add_option("--set", set_args, "assignments NAME=VALUE");
  cor_int->add_option("--randomize", randomize, "uniformly randomized variables");
  cor_int->add_option("-o,--out", out_path, "output file (default stdout)");
  auto* cor_sample = cor->add_subcommand("sample", "draw samples as CSV");
  cor_sample->add_option("--model", model_path, "model JSON file")->required();
  cor_sample->add_option("-n,--rows", n_samples, "sample count");
  cor_sample->add_option("--seed", seed, "random seed");
  cor_sample->add_option("-o,--out", out_path, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (cid->parsed()) {
    const Admg g = load_admg(graph_path);
    Query q{to_set(do_vars), to_set(outcomes), to_set(given)};
    const IdentificationResult r = given.empty() ? id(g, q) : idc(g, q);
    if (format == "json") {
      emit(to_json(r), out_path);
    } else if (r.status == IdStatus::Identifiable) {
      emit(format == "latex" ? render_latex(*r.estimand) : render_text(*r.estimand),
           out_path);
    } else {
      emit("not identifiable: " + r.witness->description, out_path);
    }
    return r.status == IdStatus::Identifiable ? 0 : 1;
  }

  if (ctr->parsed()) {
    const Admg g = load_admg(graph_path);
    Query q{to_set(do_vars), to_set(outcomes), {}};
    const auto sources = sources_from_json(slurp(sources_path));
    const SurrogateResult r = trso(g, q, sources, target_domain);
    if (format == "json") {
      emit(to_json(r), out_path);
    } else if (r.status == IdStatus::Identifiable) {
      emit(format == "latex" ? render_latex(*r.estimand) : render_text(*r.estimand),
           out_path);
    } else {
      emit("not identifiable from the declared sources", out_path);
    }
    return r.status == IdStatus::Identifiable ? 0 : 1;
  }

  if (cds->parsed()) {
    const Admg g = load_admg(graph_path);
    const bool sep = m_separated(g, to_set(left), to_set(right), to_set(given));
    if (format == "json") {
      emit(nlohmann::json{{"separated", sep}}.dump(2), out_path);
    } else {
      emit(sep ? "separated" : "not separated", out_path);
    }
    return sep ? 0 : 1;
  }

  if (cci->parsed()) {
    const Admg g = load_admg(graph_path);
    const auto all = implied_independencies(g, max_given);
    if (format == "json") {
      nlohmann::json j = nlohmann::json::array();
      for (const auto& s : all) j.push_back(s.to_string());
      emit(j.dump(2), out_path);
    } else {
      std::string text;
      for (const auto& s : all) text += s.to_string() + "\n";
      emit(text, out_path);
    }
    return 0;
  }

  if (cfa->parsed()) {
    std::map<std::string, ColumnKind> overrides;
    for (const auto& name : kind_args) overrides[name] = ColumnKind::Categorical;
    const Dataset d = load_csv(data_path, overrides);
    const Admg g = load_admg(graph_path);
    Correction corr = Correction::Holm;
    if (correction == "bonferroni") corr = Correction::Bonferroni;
    if (correction == "none") corr = Correction::None;
    const FalsificationReport rep = falsify_report(g, d, alpha, max_given, corr);
    emit(format == "json" ? to_json(rep) : to_text(rep), out_path);
    return rep.verdict == Verdict::Falsified ? 1 : 0;
  }

  if (cex->parsed()) {
    ExpressionPtr e = parse(expr_text);
    if (cex_simplify->parsed()) e = simplify(e);
    if (cex_latex->parsed()) {
      emit(render_latex(*e), out_path);
    } else {
      emit(render_text(*e), out_path);
    }
    return 0;
  }

  if (cor_gen->parsed()) {
    emit(to_json(random_scm(seed, n_observed, n_latent, max_parents, max_card)), out_path);
    return 0;
  }
  if (cor_joint->parsed()) {
    const DiscreteScm m = scm_from_json(slurp(model_path));
    emit(table_json(exact_joint(m, !keep_latent)).dump(2), out_path);
    return 0;
  }
  if (cor_int->parsed()) {
    const DiscreteScm m = scm_from_json(slurp(model_path));
    if (!set_args.empty() && !randomize.empty()) {
      std::cerr << "--set and --randomize cannot be combined\n";
      return 2;
    }
    if (!randomize.empty()) {
      emit(table_json(experiment_table(m, to_set(randomize))).dump(2), out_path);
      return 0;
    }
    std::map<std::string, int> assignments;
    for (const auto& a : set_args) {
      const std::size_t eq = a.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == a.size()) {
        std::cerr << "bad assignment '" << a << "', expected NAME=VALUE\n";
        return 2;
      }
      try {
        assignments[a.substr(0, eq)] = std::stoi(a.substr(eq + 1));
      } catch (const std::exception&) {
        std::cerr << "bad assignment '" << a << "', expected NAME=VALUE\n";
        return 2;
      }
    }
    emit(table_json(interventional_joint(m, assignments)).dump(2), out_path);
    return 0;
  }
  if (cor_sample->parsed()) {
    const DiscreteScm m = scm_from_json(slurp(model_path));
    emit(dataset_csv(sample(m, n_samples, seed)), out_path);
    return 0;
  }

  std::cerr << "no subcommand\n";
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const causalid::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
