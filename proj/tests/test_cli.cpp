// End-to-end checks of the installed command-line tool. Each case shells out
// to the built binary (path injected by the build) and inspects combined
// stdout/stderr plus the exit code.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "doctest.h"

#ifndef CAUSALID_CLI_PATH
#error "CAUSALID_CLI_PATH must point at the built binary"
#endif

namespace {

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + CAUSALID_CLI_PATH + "\" " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  REQUIRE(out.good());
  out << text;
}

// One fixture directory per test run, populated lazily.
const std::filesystem::path& fixtures() {
  static const std::filesystem::path dir = [] {
    std::string tmpl =
        (std::filesystem::temp_directory_path() / "causalid_cli_XXXXXX").string();
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    REQUIRE(mkdtemp(buf.data()) != nullptr);
    std::filesystem::path d(buf.data());

    write_file(d / "mediated.txt",
               "# treatment, mediator, outcome\n"
               "Smoking -> Tar\n"
               "Tar -> Cancer\n"
               "Smoking -> Cancer\n");
    write_file(d / "confounded.txt",
               "Smoking -> Tar\n"
               "Tar -> Cancer\n"
               "Smoking <-> Tar\n");
    write_file(d / "chain.txt", "X -> Y\nY -> Z\n");
    write_file(d / "fork.json",
               R"({"nodes": ["X", "Y", "U"],)"
               R"( "directed": [["X", "Y"], ["U", "X"], ["U", "Y"]],)"
               R"( "latent": ["U"]})");
    write_file(d / "sources.json",
               R"([{"domain": "pi*", "scope": ["Smoking", "Tar", "Cancer"]},)"
               R"( {"domain": "pi1", "scope": ["Smoking", "Tar"], "do": ["Smoking"]}])");
    write_file(d / "obs_only.json",
               R"([{"domain": "pi*", "scope": ["Smoking", "Tar", "Cancer"]}])");
    return d;
  }();
  return dir;
}

std::string fix(const std::string& name) { return (fixtures() / name).string(); }

}  // namespace

TEST_CASE("identify: adjustment over the mediator") {
  const RunResult r = run_cli("identify --graph " + fix("mediated.txt") +
                              " --do Smoking --outcomes Cancer");
  CHECK(r.code == 0);
  CHECK(r.out == "sum_{Tar} [ P(Cancer | Smoking, Tar) P(Tar | Smoking) ]\n");

  const RunResult latex = run_cli("identify --graph " + fix("mediated.txt") +
                                  " --do Smoking --outcomes Cancer --format latex");
  CHECK(latex.code == 0);
  CHECK(latex.out.find("\\sum_{Tar}") != std::string::npos);
  CHECK(latex.out.find("P(Cancer \\mid Smoking, Tar)") != std::string::npos);

  const RunResult json = run_cli("identify --graph " + fix("mediated.txt") +
                                 " --do Smoking --outcomes Cancer --format json");
  CHECK(json.code == 0);
  const auto j = nlohmann::json::parse(json.out);
  CHECK(j.at("status") == "Identifiable");
  CHECK(j.at("estimand_text") ==
        "sum_{Tar} [ P(Cancer | Smoking, Tar) P(Tar | Smoking) ]");
  CHECK(j.contains("estimand_latex"));
}

TEST_CASE("identify: confounded treatment is refused with a witness") {
  const RunResult r = run_cli("identify --graph " + fix("confounded.txt") +
                              " --do Smoking --outcomes Cancer");
  CHECK(r.code == 1);
  CHECK(r.out.rfind("not identifiable: ", 0) == 0);

  const RunResult json = run_cli("identify --graph " + fix("confounded.txt") +
                                 " --do Smoking --outcomes Cancer --format json");
  CHECK(json.code == 1);
  const auto j = nlohmann::json::parse(json.out);
  CHECK(j.at("status") == "NonIdentifiable");
  CHECK_FALSE(j.contains("estimand_text"));
  REQUIRE(j.contains("witness"));
  CHECK(j.at("witness").contains("district"));
  CHECK(j.at("witness").contains("containing_component"));
  CHECK(j.at("witness").contains("description"));
}

TEST_CASE("identify: conditional query and latent-graph input") {
  // The explicit-latent JSON graph projects to X -> Y plus X <-> Y, a bow.
  const RunResult r = run_cli("identify --graph " + fix("fork.json") +
                              " --do X --outcomes Y");
  CHECK(r.code == 1);

  // A condition that acts like an intervention is absorbed into the do-set.
  const RunResult promoted = run_cli("identify --graph " + fix("chain.txt") +
                                     " --do X --outcomes Z --given Y");
  CHECK(promoted.code == 0);
  CHECK(promoted.out == "P(Z | X, Y)\n");

  // Conditioning on a descendant of the outcome stays a genuine ratio.
  write_file(fixtures() / "desc.txt", "X -> Y\nY -> W\n");
  const RunResult cond = run_cli("identify --graph " + fix("desc.txt") +
                                 " --do X --outcomes Y --given W");
  CHECK(cond.code == 0);
  CHECK(cond.out.find("frac[") != std::string::npos);
}

TEST_CASE("trso: surrogate sources") {
  const std::string base = "trso --graph " + fix("confounded.txt") +
                           " --do Smoking --outcomes Cancer --target pi*";
  const RunResult r = run_cli(base + " --sources " + fix("sources.json"));
  CHECK(r.code == 0);
  CHECK(r.out ==
        "sum_{Tar} [ P^pi*(Cancer | Smoking, Tar) P^pi1[Smoking](Tar) ]\n");

  const RunResult json =
      run_cli(base + " --sources " + fix("sources.json") + " --format json");
  CHECK(json.code == 0);
  const auto j = nlohmann::json::parse(json.out);
  CHECK(j.at("status") == "Identifiable");
  CHECK(j.at("estimand_text") ==
        "sum_{Tar} [ P^pi*(Cancer | Smoking, Tar) P^pi1[Smoking](Tar) ]");

  const RunResult blocked = run_cli(base + " --sources " + fix("obs_only.json"));
  CHECK(blocked.code == 1);
  CHECK(blocked.out == "not identifiable from the declared sources\n");
}

TEST_CASE("dsep: separation statements and exit codes") {
  const RunResult sep = run_cli("dsep --graph " + fix("chain.txt") +
                                " --left X --right Z --given Y");
  CHECK(sep.code == 0);
  CHECK(sep.out == "separated\n");

  const RunResult open = run_cli("dsep --graph " + fix("chain.txt") +
                                 " --left X --right Z");
  CHECK(open.code == 1);
  CHECK(open.out == "not separated\n");

  const RunResult json = run_cli("dsep --graph " + fix("chain.txt") +
                                 " --left X --right Z --given Y --format json");
  CHECK(json.code == 0);
  CHECK(nlohmann::json::parse(json.out).at("separated") == true);
}

TEST_CASE("ci: implied independencies") {
  const RunResult r = run_cli("ci --graph " + fix("chain.txt"));
  CHECK(r.code == 0);
  CHECK(r.out == "X _||_ Z | Y\n");

  const RunResult capped = run_cli("ci --graph " + fix("chain.txt") + " --max-given 0");
  CHECK(capped.code == 0);
  CHECK(capped.out.empty());

  const RunResult json = run_cli("ci --graph " + fix("chain.txt") + " --format json");
  CHECK(json.code == 0);
  const auto j = nlohmann::json::parse(json.out);
  REQUIRE(j.is_array());
  REQUIRE(j.size() == 1);
  CHECK(j[0] == "X _||_ Z | Y");
}

TEST_CASE("falsify: verdict drives the exit code") {
  // Deterministic little dataset: Y copies X, Z is an independent pattern.
  std::string csv = "X,Y,Z\n";
  for (int i = 0; i < 40; ++i) {
    const int x = i % 2;
    const int z = (i / 2) % 2;
    csv += std::to_string(x) + "," + std::to_string(x) + "," + std::to_string(z) + "\n";
  }
  write_file(fixtures() / "copy.csv", csv);
  const std::string data = fix("copy.csv");

  // Vacuous: X -> Y implies nothing, so nothing can fail.
  write_file(fixtures() / "xy_edge.txt", "X -> Y\n");
  RunResult ok = run_cli("falsify --graph " + fix("xy_edge.txt") + " --data " +
                         data + " --categorical X,Y,Z");
  CHECK(ok.code == 0);
  CHECK(ok.out.find("verdict: VACUOUSLY CONSISTENT") != std::string::npos);

  // Falsified: an edgeless graph over X and Y, but Y copies X.
  write_file(fixtures() / "edgeless.txt",
             R"({"nodes": ["X", "Y"], "directed": [], "bidirected": []})");
  RunResult bad = run_cli("falsify --graph " + fix("edgeless.txt") + " --data " +
                          data + " --categorical X,Y,Z");
  CHECK(bad.code == 1);
  CHECK(bad.out.find("verdict: FALSIFIED") != std::string::npos);
  CHECK(bad.out.find("REJECTED") != std::string::npos);

  // Consistent with a real test: X _||_ Z holds in the data.
  write_file(fixtures() / "xz.json",
             R"({"nodes": ["X", "Z"], "directed": [], "bidirected": []})");
  RunResult fine = run_cli("falsify --graph " + fix("xz.json") + " --data " + data +
                           " --categorical X,Y,Z --format json");
  CHECK(fine.code == 0);
  const auto j = nlohmann::json::parse(fine.out);
  CHECK(j.at("verdict") == "consistent");
  CHECK(j.at("n_tests") == 1);
  CHECK(j.at("tests")[0].at("rejected") == false);
}

TEST_CASE("expr: parse, latex, simplify") {
  RunResult p = run_cli("expr parse \"P( Y|X )\"");
  CHECK(p.code == 0);
  CHECK(p.out == "P(Y | X)\n");

  RunResult l = run_cli("expr latex \"P[X](Y)\"");
  CHECK(l.code == 0);
  CHECK(l.out == "P_{X}(Y)\n");

  RunResult s = run_cli("expr simplify \"frac[ P(Y | X) P(X) ][ P(X) ]\"");
  CHECK(s.code == 0);
  CHECK(s.out == "P(Y | X)\n");

  RunResult bad = run_cli("expr parse \"P()\"");
  CHECK(bad.code == 2);
  CHECK(bad.out.find("error:") != std::string::npos);
}

TEST_CASE("oracle: gen, joint, intervene, sample pipeline") {
  const std::string model = fix("model.json");
  RunResult gen = run_cli("oracle gen --seed 3 --observed 3 --latent 1 -o " + model);
  CHECK(gen.code == 0);
  REQUIRE(std::filesystem::exists(model));

  RunResult joint = run_cli("oracle joint --model " + model);
  CHECK(joint.code == 0);
  {
    const auto j = nlohmann::json::parse(joint.out);
    REQUIRE(j.contains("variables"));
    REQUIRE(j.contains("values"));
    double total = 0.0;
    for (const auto& v : j.at("values")) total += v.get<double>();
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    for (const auto& var : j.at("variables")) {
      CHECK(var.at("name").get<std::string>()[0] == 'X');  // latents summed out
    }
  }

  RunResult kept = run_cli("oracle joint --model " + model + " --keep-latent");
  CHECK(kept.code == 0);
  {
    const auto j = nlohmann::json::parse(kept.out);
    bool has_latent = false;
    for (const auto& var : j.at("variables")) {
      has_latent = has_latent || var.at("name").get<std::string>()[0] == 'U';
    }
    CHECK(has_latent);
  }

  RunResult cut = run_cli("oracle intervene --model " + model + " --set X1=0");
  CHECK(cut.code == 0);
  {
    const auto j = nlohmann::json::parse(cut.out);
    for (const auto& var : j.at("variables")) {
      CHECK(var.at("name") != "X1");
    }
  }

  RunResult design = run_cli("oracle intervene --model " + model + " --randomize X1");
  CHECK(design.code == 0);
  {
    const auto j = nlohmann::json::parse(design.out);
    bool has_x1 = false;
    for (const auto& var : j.at("variables")) {
      has_x1 = has_x1 || var.at("name") == "X1";
    }
    CHECK(has_x1);
  }

  RunResult both = run_cli("oracle intervene --model " + model +
                           " --set X1=0 --randomize X2");
  CHECK(both.code == 2);
  RunResult mangled = run_cli("oracle intervene --model " + model + " --set X1");
  CHECK(mangled.code == 2);

  RunResult sampled = run_cli("oracle sample --model " + model + " -n 5 --seed 9");
  CHECK(sampled.code == 0);
  // Header plus five rows.
  int lines = 0;
  for (char c : sampled.out) lines += c == '\n' ? 1 : 0;
  CHECK(lines == 6);
  CHECK(sampled.out.rfind("X1,X2,X3\n", 0) == 0);

  RunResult again = run_cli("oracle sample --model " + model + " -n 5 --seed 9");
  CHECK(again.out == sampled.out);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("frobnicate").code == 2);
  CHECK(run_cli("identify --outcomes Y").code == 2);          // missing --graph
  CHECK(run_cli("identify --graph /nonexistent --outcomes Y").code == 2);
  CHECK(run_cli("dsep --graph " + fix("chain.txt") + " --left X").code == 2);
  CHECK(run_cli("identify --graph " + fix("chain.txt") +
                " --do X --outcomes Q").code == 2);  // unknown node
  CHECK(run_cli("falsify --graph " + fix("chain.txt") + " --data /nonexistent")
            .code == 2);
  CHECK(run_cli("--help").code == 0);
  const RunResult help = run_cli("--help");
  CHECK(help.out.find("identify") != std::string::npos);
}
