#include <benchmark/benchmark.h>

#include "trapqa/diagnosis.hpp"
#include "trapqa/electrostatics.hpp"
#include "trapqa/units.hpp"

using namespace trapqa;
using units::um;

static void BM_RectPotential(benchmark::State& state) {
    const Rect r{-50 * um, 50 * um, -50 * um, 50 * um};
    Vec3 p(10 * um, 20 * um, 100 * um);
    for (auto _ : state) {
        benchmark::DoNotOptimize(rect_potential(r, 1.0, p));
        p.x() += 1e-9;
    }
}
BENCHMARK(BM_RectPotential);

static void BM_RectField(benchmark::State& state) {
    const Rect r{-50 * um, 50 * um, -50 * um, 50 * um};
    Vec3 p(10 * um, 20 * um, 100 * um);
    for (auto _ : state) {
        benchmark::DoNotOptimize(rect_field(r, 1.0, p));
        p.x() += 1e-9;
    }
}
BENCHMARK(BM_RectField);

static void BM_FindRfMinima(benchmark::State& state) {
    const TrapGeometry g = reference_rf_geometry();
    const DriveParams d{120.0, units::angular(17 * units::MHz)};
    for (auto _ : state) {
        benchmark::DoNotOptimize(find_rf_minima(g, d, calcium40(), {0.0, -300 * um, 300 * um, 40 * um, 300 * um}));
    }
}
BENCHMARK(BM_FindRfMinima)->Unit(benchmark::kMillisecond);

static void BM_EquilibriumShorted(benchmark::State& state) {
    const TrapGeometry g = reference_trap_geometry();
    const VoltageMap v{{"DC16", 3.0}, {"DC18", 0.0}, {"DC20", 3.0}, {"DC51", 3.0}, {"DC53", 0.0}, {"DC55", 3.0}};
    const auto u = scenario_potential(g, v, FaultScenario::shorted("DC55"), 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(equilibrium_position(u, -150 * um, 150 * um));
}
BENCHMARK(BM_EquilibriumShorted)->Unit(benchmark::kMillisecond);
