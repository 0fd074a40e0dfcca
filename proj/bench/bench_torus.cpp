#include <benchmark/benchmark.h>

#include "torus/dihedral.hpp"
#include "torus/survey.hpp"

using namespace torus;

namespace {

GLattice order60_J() {
  GroupPtr G = make_group(nlohmann::json::parse(
      R"({"kind":"semidirect","normal":{"kind":"cyclic","n":15},"quotient":{"kind":"cyclic","n":4},"action":[[0,"s^2"]],"names":["s","t"]})"));
  WeightedMultiset ms = WeightedMultiset::of({Subgroup(G, {G->parse_element("s^3"), G->parse_element("t^2")}),
                                              Subgroup(G, {G->parse_element("t")})});
  return build_J(ms).lattice;
}

void BM_h1_table_parallel(benchmark::State& st) {
  GLattice M = order60_J();
  for (auto _ : st) benchmark::DoNotOptimize(coflabby_report(M, SubgroupFilter::All, st.range(0)));
}
void BM_h1_table_serial(benchmark::State& st) {
  GLattice M = order60_J();
  for (auto _ : st) benchmark::DoNotOptimize(coflabby_report_serial(M, SubgroupFilter::All));
}

void BM_survey_parallel(benchmark::State& st) {
  GroupPtr G = make_dihedral(8);
  SurveyOptions opt;
  opt.max_members = 2;
  for (auto _ : st) benchmark::DoNotOptimize(run_survey(G, opt, st.range(0)));
}
void BM_survey_serial(benchmark::State& st) {
  GroupPtr G = make_dihedral(8);
  SurveyOptions opt;
  opt.max_members = 2;
  for (auto _ : st) benchmark::DoNotOptimize(run_survey_serial(G, opt));
}

void BM_resolution_cases_parallel(benchmark::State& st) {
  DihedralBundle b = build_bundle(5);
  for (auto _ : st) benchmark::DoNotOptimize(certify_coflabby_resolution(b, st.range(0)));
}
void BM_resolution_cases_serial(benchmark::State& st) {
  DihedralBundle b = build_bundle(5);
  for (auto _ : st) benchmark::DoNotOptimize(certify_coflabby_resolution_serial(b));
}

}  // namespace

BENCHMARK(BM_h1_table_parallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_h1_table_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_survey_parallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_survey_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_resolution_cases_parallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_resolution_cases_serial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
