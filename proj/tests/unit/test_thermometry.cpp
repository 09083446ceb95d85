#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "trapqa/errors.hpp"
#include "trapqa/random.hpp"
#include "trapqa/thermometry.hpp"

using namespace trapqa;

namespace {

double oracle_j5(double x) {
    const int n = 200000;
    const double h = x / n;
    auto f = [](double t) { return t == 0.0 ? 0.0 : std::pow(t, 5) * std::exp(t) / ((std::exp(t) - 1) * (std::exp(t) - 1)); };
    double s = f(0) + f(x);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return s * h / 3.0;
}

const RTModel kModel{995.32, 98835.16, 229.27};

std::vector<RTSample> sweep(const RTModel& m, double noise, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<RTSample> out;
    for (double t : {6.0, 8.0, 10.0, 12.0, 15.0, 20.0, 30.0, 45.0, 60.0, 80.0, 100.0, 140.0, 180.0, 220.0, 260.0, 300.0}) {
        const double r = model_resistance(m, t);
        out.push_back({t, r * (1.0 + noise * gauss(rng))});
    }
    return out;
}

}  // namespace

TEST(Thermometry, IntegralMatchesSimpsonOracle) {
    for (double x : {0.01, 0.5, 2.0, 10.0, 25.0, 60.0}) {
        const double ref = oracle_j5(x);
        EXPECT_NEAR(bloch_gruneisen_integral(x), ref, 1e-9 * ref + 1e-18) << x;
    }
}

TEST(Thermometry, IntegralLimits) {
    EXPECT_DOUBLE_EQ(bloch_gruneisen_integral(0.0), 0.0);
    const double zeta5 = 1.0369277551433699;
    EXPECT_NEAR(bloch_gruneisen_integral(500.0), 120.0 * zeta5, 1e-9);
    EXPECT_NEAR(bloch_gruneisen_integral(1e-3), 0.25e-12, 1e-18);
    EXPECT_THROW(bloch_gruneisen_integral(-1.0), DomainError);
}

TEST(Thermometry, ModelIsMonotoneAndLinearWhenHot) {
    double prev = 0.0;
    for (double t = 2.0; t <= 300.0; t += 2.0) {
        const double r = model_resistance(kModel, t);
        EXPECT_GT(r, prev);
        prev = r;
    }
    const double s200 = model_slope(kModel, 200.0), s290 = model_slope(kModel, 290.0);
    EXPECT_NEAR(s200 / s290, 1.0, 0.03);
    EXPECT_LT(model_slope(kModel, 5.0), 0.01 * s290);
}

TEST(Thermometry, AnalyticSlopeMatchesFiniteDifference) {
    for (double t : {4.0, 12.0, 40.0, 150.0, 290.0}) {
        const double h = 1e-4 * t;
        const double num = (model_resistance(kModel, t + h) - model_resistance(kModel, t - h)) / (2 * h);
        EXPECT_NEAR(model_slope(kModel, t), num, 1e-6 * std::abs(num) + 1e-9);
    }
}

TEST(Thermometry, NoiselessFitRecoversParameters) {
    const RTFit fit = fit_rt_curve(sweep(kModel, 0.0, 1));
    EXPECT_NEAR(fit.model.residual_resistance / kModel.residual_resistance, 1.0, 1e-3);
    EXPECT_NEAR(fit.model.amplitude / kModel.amplitude, 1.0, 1e-3);
    EXPECT_NEAR(fit.model.debye_temperature / kModel.debye_temperature, 1.0, 1e-3);
    EXPECT_LT(fit.rms_residual, 1e-2);
}

TEST(Thermometry, NoisyFitRecoversParametersWithinTwoPercent) {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        const RTFit fit = fit_rt_curve(sweep(kModel, 1e-3, seed));
        EXPECT_NEAR(fit.model.residual_resistance / kModel.residual_resistance, 1.0, 0.02) << seed;
        EXPECT_NEAR(fit.model.amplitude / kModel.amplitude, 1.0, 0.02) << seed;
        EXPECT_NEAR(fit.model.debye_temperature / kModel.debye_temperature, 1.0, 0.02) << seed;
    }
}

TEST(Thermometry, FitNeedsEnoughSpan) {
    auto s = sweep(kModel, 0.0, 1);
    EXPECT_THROW(fit_rt_curve(std::span(s).first(4)), DomainError);
    std::vector<RTSample> narrow{{100, 1}, {110, 2}, {120, 3}, {130, 4}, {140, 5}};
    EXPECT_THROW(fit_rt_curve(narrow), DomainError);
}

TEST(Thermometry, InversionRoundTrip) {
    for (double t = 3.0; t <= 300.0; t *= 1.37) {
        const TemperatureEstimate e = invert_temperature(kModel, model_resistance(kModel, t), 1.0);
        EXPECT_NEAR(e.temperature, t, 1e-3);
        EXPECT_NEAR(e.sigma, 1.0 / model_slope(kModel, t), 1e-6 / model_slope(kModel, t));
    }
    EXPECT_THROW(invert_temperature(kModel, 10.0, 1.0), RangeError);
    EXPECT_THROW(invert_temperature(kModel, 1e9, 1.0), RangeError);
}

TEST(Thermometry, CalibratedSensorsReproduceSensitivity) {
    const RTModel ts1 = calibrate_rt_model(10.8e3, 286.2, 1.0);
    const RTModel ts2 = calibrate_rt_model(32.3e3, 997.2625, 2.5);
    EXPECT_NEAR(sensitivity(ts1, 10.0, 15.0), 1.0, 1e-6);
    EXPECT_NEAR(sensitivity(ts2, 10.0, 15.0), 2.5, 1e-6);
    EXPECT_NEAR(model_resistance(ts1, 300.0), 10.8e3, 1e-6);
    EXPECT_NEAR(model_resistance(ts2, 10.0), 997.2625, 1e-6);
    // Frozen calibration results.
    EXPECT_NEAR(ts1.debye_temperature, 219.254, 1e-3);
    EXPECT_NEAR(ts2.debye_temperature, 229.272, 1e-3);
}

TEST(Thermometry, SensitivityIsAverageSlopeOverWindow) {
    const double avg = (model_resistance(kModel, 15.0) - model_resistance(kModel, 10.0)) / 5.0;
    EXPECT_NEAR(sensitivity(kModel, 10.0, 15.0), avg, 0.05 * avg);
    EXPECT_THROW(sensitivity(kModel, 15.0, 10.0), DomainError);
}

TEST(Thermometry, SpreadProjection) {
    EXPECT_NEAR(wafer_spread_projection(200.0, 10.8e3, 286.2), 5.3, 1e-12);
    EXPECT_NEAR(wafer_spread_projection(1.6e3, 32.3e3, 997.2625), 49.4, 1e-12);
}

TEST(Thermometry, ReferenceSensorSpecs) {
    const SensorSpec a = ts1_sensor(), b = ts2_sensor();
    EXPECT_DOUBLE_EQ(a.room_temp_mean, 10.8e3);
    EXPECT_DOUBLE_EQ(b.room_temp_mean, 32.3e3);
    EXPECT_NEAR(a.trace.length, 0.705, 1e-12);
    EXPECT_NEAR(b.trace.length, 0.935, 1e-12);
}
