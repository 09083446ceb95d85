#include <benchmark/benchmark.h>

#include "trapqa/heating.hpp"
#include "trapqa/thermometry.hpp"
#include "trapqa/units.hpp"
#include "trapqa/yieldmap.hpp"

using namespace trapqa;

static void BM_FitRtCurve(benchmark::State& state) {
    const RTModel truth{995.32, 98835.16, 229.27};
    std::vector<RTSample> samples;
    for (double t = 6.0; t <= 300.0; t += 18.0) samples.push_back({t, model_resistance(truth, t)});
    for (auto _ : state) benchmark::DoNotOptimize(fit_rt_curve(samples));
}
BENCHMARK(BM_FitRtCurve)->Unit(benchmark::kMillisecond);

static void BM_InvertTemperature(benchmark::State& state) {
    const RTModel truth{995.32, 98835.16, 229.27};
    for (auto _ : state) benchmark::DoNotOptimize(invert_temperature(truth, 1010.0, 1.0));
}
BENCHMARK(BM_InvertTemperature)->Unit(benchmark::kMicrosecond);

static void BM_PowerLawFit(benchmark::State& state) {
    std::vector<HeatingPoint> points;
    for (double f : {0.3, 0.5, 0.8, 1.1, 1.5, 2.0, 2.6}) {
        const double w = units::angular(f * units::MHz);
        points.push_back({"s", w, 5e13 / (w * w), 0.1 * 5e13 / (w * w)});
    }
    for (auto _ : state) benchmark::DoNotOptimize(power_law_fit(points));
}
BENCHMARK(BM_PowerLawFit);

static void BM_ReticlePeriodicity(benchmark::State& state) {
    const WaferLayout layout = layout_wafer();
    const WaferResult w = synthesize_outcomes(layout, reference_plant_rules(), 7);
    for (auto _ : state) benchmark::DoNotOptimize(reticle_periodicity(w, FailureCode::LeakDcGnd, 0.01));
}
BENCHMARK(BM_ReticlePeriodicity)->Unit(benchmark::kMicrosecond);
