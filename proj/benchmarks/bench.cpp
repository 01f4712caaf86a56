#include <benchmark/benchmark.h>

#include "causalid/expr.hpp"
#include "causalid/graph.hpp"
#include "causalid/identify.hpp"
#include "causalid/oracle.hpp"
#include "causalid/separation.hpp"

namespace {

using namespace causalid;

const char* kFrontDoor = R"(Smoking -> Tar
Tar -> Cancer
Smoking <-> Cancer
)";

Admg front_door() {
  return std::get<Admg>(parse_graph(kFrontDoor, GraphFormat::EdgeList));
}

void BM_ParseExpr(benchmark::State& state) {
  const std::string text =
      "sum_{Tar} [ frac[ P(Cancer | Smoking, Tar) P(Tar | Smoking) ]"
      "[ sum_{Cancer} [ P(Cancer, Tar | Smoking) ] ] ]";
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse(text));
  }
}
BENCHMARK(BM_ParseExpr);

void BM_RenderText(benchmark::State& state) {
  const ExpressionPtr e = parse(
      "sum_{Tar} [ P(Cancer | Smoking, Tar) P(Tar | Smoking) ]");
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_text(*e));
  }
}
BENCHMARK(BM_RenderText);

void BM_IdentifyFrontDoor(benchmark::State& state) {
  const Admg g = front_door();
  const Query q{{"Smoking"}, {"Cancer"}, {}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(id(g, q));
  }
}
BENCHMARK(BM_IdentifyFrontDoor);

void BM_MSeparated(benchmark::State& state) {
  const DiscreteScm m = random_scm(11, 8, 2, 3, 2);
  const Admg g = latent_project(m.graph());
  const auto& nodes = g.nodes();
  std::vector<std::string> v(nodes.begin(), nodes.end());
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        m_separated(g, {v[0]}, {v[v.size() - 1]}, {v[2], v[4]}));
  }
}
BENCHMARK(BM_MSeparated);

void BM_ExactJoint(benchmark::State& state) {
  const DiscreteScm m = random_scm(7, 8, 2, 3, 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact_joint(m));
  }
}
BENCHMARK(BM_ExactJoint);

void BM_ImpliedIndependencies(benchmark::State& state) {
  const DiscreteScm m = random_scm(3, 7, 2, 3, 2);
  const Admg g = latent_project(m.graph());
  for (auto _ : state) {
    benchmark::DoNotOptimize(implied_independencies(g, 2));
  }
}
BENCHMARK(BM_ImpliedIndependencies);

}  // namespace

BENCHMARK_MAIN();
