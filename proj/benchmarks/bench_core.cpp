#include <benchmark/benchmark.h>

#include <cmath>

#include "sntk/centre_manifold.hpp"
#include "sntk/conjugacy.hpp"
#include "sntk/continuation.hpp"
#include "sntk/formal_nf.hpp"
#include "sntk/nf_match.hpp"
#include "sntk/saddle_node.hpp"

using namespace sntk;

static void BM_DerivativeBundle(benchmark::State& state) {
  const ScalarModel1P m = builtin_scalar("fraedrich");
  double T = 286.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(m.derivative_bundle(T, 0.9987));
    T += 1e-9;
  }
}
BENCHMARK(BM_DerivativeBundle);

static void BM_PlanarJet(benchmark::State& state) {
  const PlanarModel2P m = builtin_planar("stommel2d");
  const int order = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(m.jet({0.9997, 0.9245, 0.9637, 7.5}, PlanarVar::x, PlanarVar::y, order));
  }
}
BENCHMARK(BM_PlanarJet)->Arg(2)->Arg(4)->Arg(8);

static void BM_LocateSaddleNode(benchmark::State& state) {
  const ScalarModel1P m = builtin_scalar("stommel1d");
  for (auto _ : state) benchmark::DoNotOptimize(locate_saddle_node(m, 0.93, 0.97));
}
BENCHMARK(BM_LocateSaddleNode);

static void BM_ReduceToTakens(benchmark::State& state) {
  std::vector<double> c(static_cast<std::size_t>(state.range(0)) - 1);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = i == 0 ? -1.5 : 1.0 / static_cast<double>(i + 1);
  const PolySeries s(c);
  for (auto _ : state) benchmark::DoNotOptimize(reduce_to_takens(s));
}
BENCHMARK(BM_ReduceToTakens)->Arg(4)->Arg(8)->Arg(16);

static void BM_MatchCurve(benchmark::State& state) {
  const ScalarModel1P m = builtin_scalar("stommel1d");
  const SaddleNodePoint sn = locate_saddle_node(m, 0.93, 0.97);
  std::vector<double> mus;
  for (int k = 0; k <= 10; ++k) mus.push_back(std::ldexp(1e-2, -k));
  const int jobs = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(match_curve(m, sn, mus, jobs));
}
BENCHMARK(BM_MatchCurve)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

static void BM_Conjugacy(benchmark::State& state) {
  const ScalarModel1P m("f", "x", "mu", {}, "mu - x^2 + 0.3*x^3");
  const SaddleNodePoint sn = locate_saddle_node(m, 0.01, 0.01);
  ConjugacyOptions o;
  o.points = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(conjugate_to_normal_form(m, sn, 0.01, o));
}
BENCHMARK(BM_Conjugacy)->Arg(65)->Arg(257)->Unit(benchmark::kMillisecond);

static void BM_CmReduce(benchmark::State& state) {
  const PlanarModel2P m = builtin_planar("stommel2d", {{"alpha", 36.0}});
  const BranchPoint bp = seed_stommel_fold(m, 7.5, FoldBranch::minus);
  for (auto _ : state) benchmark::DoNotOptimize(cm_reduce(jordanize(m, {bp.x, bp.y, bp.p, bp.m})));
}
BENCHMARK(BM_CmReduce);

static void BM_ContinueBranch(benchmark::State& state) {
  const PlanarModel2P m = builtin_planar("stommel2d", {{"alpha", 36.0}});
  const BranchPoint start = seed_stommel_fold(m, 4.0, FoldBranch::plus);
  ContinuationOptions o;
  o.m_min = 4.0;
  o.m_max = 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(continue_branch(m, start, o));
}
BENCHMARK(BM_ContinueBranch)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
