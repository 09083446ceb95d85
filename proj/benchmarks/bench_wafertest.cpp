#include <benchmark/benchmark.h>

#include "trapqa/wafertest.hpp"
#include "trapqa/yieldmap.hpp"

using namespace trapqa;

static void BM_RunChipClean(benchmark::State& state) {
    const ChipNetlist netlist = default_netlist();
    const TestPlan plan = build_default_plan(netlist);
    const TestLimits limits = default_limits();
    for (auto _ : state) benchmark::DoNotOptimize(run_chip(netlist, {}, limits, plan));
}
BENCHMARK(BM_RunChipClean)->Unit(benchmark::kMicrosecond);

static void BM_SingleFaultSweep(benchmark::State& state) {
    const ChipNetlist netlist = default_netlist();
    const TestPlan plan = build_default_plan(netlist);
    const TestLimits limits = default_limits();
    const auto catalog = single_fault_catalog(netlist, plan);
    for (auto _ : state) {
        int mismatches = 0;
        for (const auto& e : catalog) mismatches += run_chip(netlist, {e.fault}, limits, plan).outcome != e.expected;
        benchmark::DoNotOptimize(mismatches);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(catalog.size()));
}
BENCHMARK(BM_SingleFaultSweep)->Unit(benchmark::kMillisecond);

static void BM_SimulateWafer(benchmark::State& state) {
    const WaferLayout layout = layout_wafer();
    const ChipNetlist netlist = default_netlist();
    const TestLimits limits = default_limits();
    const auto rules = reference_plant_rules();
    const auto threads = static_cast<unsigned>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(simulate_wafer(layout, netlist, limits, rules, 7, threads));
}
BENCHMARK(BM_SimulateWafer)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
