#include <benchmark/benchmark.h>

#include "squidsim/calibrate.hpp"
#include "squidsim/link.hpp"

using namespace squidsim;

namespace {

void BM_delivery_serial(benchmark::State& state)
{
  const LinkParams p;
  for (auto _ : state)
    benchmark::DoNotOptimize(delivery_rate_serial(p, 2.5, 10.0, state.range(0), 17));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_delivery_parallel(benchmark::State& state)
{
  const LinkParams p;
  for (auto _ : state)
    benchmark::DoNotOptimize(delivery_rate_parallel(p, 2.5, 10.0, state.range(0), 17));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

// A heading-only sweep whose seed and every grid point miss, so the whole
// grid is evaluated.
CalibrationTargets exhausting_targets()
{
  return parse_targets(
      "heading.scenario = scenarios/heading_step.scn\n"
      "heading.step = 20, 90, 180\n"
      "bound heading.rise 1.5 2.5\n"
      "sweep control.heading.kp 0.002 0.003 0.004 0.005 0.006 0.007 0.008 0.009\n",
      SQUIDSIM_DATA_DIR);
}

SimConfig detuned()
{
  SimConfig c;
  c.control.heading.kp = 0.001;
  return c;
}

void BM_calibrate_serial(benchmark::State& state)
{
  const auto t = exhausting_targets();
  for (auto _ : state) benchmark::DoNotOptimize(calibrate_serial(detuned(), t));
}

void BM_calibrate_parallel(benchmark::State& state)
{
  const auto t = exhausting_targets();
  for (auto _ : state) benchmark::DoNotOptimize(calibrate_parallel(detuned(), t));
}

}  // namespace

BENCHMARK(BM_delivery_serial)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_delivery_parallel)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_calibrate_serial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_calibrate_parallel)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
