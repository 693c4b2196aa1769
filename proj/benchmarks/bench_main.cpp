#include <random>
#include <string>

#include <benchmark/benchmark.h>

#include "afp/atlas.hpp"
#include "afp/engine.hpp"
#include "afp/spec.hpp"

namespace {

afp::CyclicMap bundled_map(const char* name) {
  return afp::map_from(afp::load_spec(std::string(AFP_SPEC_DIR) + "/" + name + ".afp"));
}

void BM_ClassConstant(benchmark::State& state) {
  const afp::CyclicMap map = bundled_map("example_3_8");
  const afp::GridPlan plan{1.0 / static_cast<double>(state.range(0)), 1'000'000};
  for (auto _ : state) {
    auto est = afp::empirical_constant(map.domain(), map, afp::OperatorClass::GMohseni, plan, 100'000'000, 42);
    benchmark::DoNotOptimize(est.constant);
  }
  state.SetLabel("1/h = " + std::to_string(state.range(0)));
}
BENCHMARK(BM_ClassConstant)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_AxiomCheck(benchmark::State& state) {
  const afp::GSpace space({afp::RealSubset::interval(0, 1)}, afp::GMetricDef{});
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> pts(static_cast<std::size_t>(state.range(0)));
  for (double& x : pts) x = u(rng);
  for (auto _ : state) {
    auto rep = afp::check_axioms(space, pts);
    benchmark::DoNotOptimize(rep.sample_size);
  }
}
BENCHMARK(BM_AxiomCheck)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Picard(benchmark::State& state) {
  const afp::CyclicMap map = bundled_map("example_cyclic_seq");
  afp::SolveConfig cfg;
  cfg.epsilon = 1e-12;
  cfg.x0 = 1.0;
  for (auto _ : state) {
    auto t = afp::picard_solve(map.domain(), map, cfg);
    benchmark::DoNotOptimize(t.hit_index);
  }
}
BENCHMARK(BM_Picard);

void BM_FixedPointSet(benchmark::State& state) {
  const afp::CyclicMap map = bundled_map("example_3_8");
  const afp::GridPlan plan{0.0001, 1'000'000};
  for (auto _ : state) {
    auto f = afp::enumerate_fset(map.domain(), map, 0.3, plan);
    benchmark::DoNotOptimize(f.members.size());
  }
}
BENCHMARK(BM_FixedPointSet)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
