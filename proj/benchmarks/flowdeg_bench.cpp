/// Microbenchmarks for the hot paths: semigroup application, one period of
/// transmission-line integration, averaged-field evaluation, and a full
/// planar degree computation.

#include <benchmark/benchmark.h>

#include "flowdeg/averaging.hpp"
#include "flowdeg/degree.hpp"
#include "flowdeg/evolve.hpp"
#include "flowdeg/problems.hpp"

namespace {

using flowdeg::Region;
using flowdeg::Vector;

const flowdeg::ProblemPreset& line_preset() {
  static const flowdeg::ProblemPreset preset =
      flowdeg::make_preset("txline-default");
  return preset;
}

void BM_SemigroupApply(benchmark::State& state) {
  const auto& problem = line_preset().problem;
  const Vector x = Vector::Constant(problem.op().dim(), 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(problem.op().semigroup_apply(0.05, x));
  }
}
BENCHMARK(BM_SemigroupApply);

void BM_ResolventApply(benchmark::State& state) {
  const auto& problem = line_preset().problem;
  const flowdeg::Resolvent resolvent(problem.op(), 1.0);
  const Vector y = Vector::Constant(problem.op().dim(), 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(resolvent.apply(y));
  }
}
BENCHMARK(BM_ResolventApply);

void BM_IntegratePeriod(benchmark::State& state) {
  const auto& problem = line_preset().problem;
  const Vector x0 = Vector::Zero(problem.op().dim());
  flowdeg::IntegrateOptions options;
  options.refine = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        flowdeg::translate(problem, x0, problem.period(), 1.0, 1.0,
                           static_cast<int>(state.range(0)), options));
  }
}
BENCHMARK(BM_IntegratePeriod)->Arg(256)->Arg(1024);

void BM_AveragedField(benchmark::State& state) {
  const auto& problem = line_preset().problem;
  const flowdeg::AveragedField averaged = flowdeg::average_field(problem);
  const Vector x = Vector::Constant(problem.op().dim(), 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(averaged(x));
  }
}
BENCHMARK(BM_AveragedField);

void BM_PlanarDegree(benchmark::State& state) {
  const auto preset = flowdeg::make_preset("cubic-2d");
  const flowdeg::Field field = [&preset](const Vector& x) {
    return (-x + preset.problem.f(0.0, x, 1.0)).eval();
  };
  const Region region = Region::box((Vector(2) << -2.0, -2.0).finished(),
                                    (Vector(2) << 2.0, 2.0).finished());
  for (auto _ : state) {
    benchmark::DoNotOptimize(flowdeg::brouwer_degree(field, region));
  }
}
BENCHMARK(BM_PlanarDegree);

}  // namespace

BENCHMARK_MAIN();
