#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "trapqa/errors.hpp"
#include "trapqa/heating.hpp"
#include "trapqa/random.hpp"
#include "trapqa/units.hpp"

using namespace trapqa;

namespace {

std::vector<HeatingPoint> site10() {
    const double rows[][3] = {{0.42, 65.9, 0.8}, {0.60, 21.8, 2.9}, {0.79, 13.8, 1.5}, {1.00, 8.5, 1.1},
                              {1.01, 11, 15},    {1.19, 3.7, 1.2},  {1.19, 5.5, 0.6},  {1.38, 6.8, 0.8}};
    std::vector<HeatingPoint> out;
    for (const auto& r : rows) out.push_back({"10", units::angular(r[0] * units::MHz), r[1], r[2]});
    return out;
}

}  // namespace

TEST(Heating, NbarFromRatio) {
    const NbarEstimate e = nbar_from_sidebands({0.3, 0.6, 200, 0.0});
    EXPECT_DOUBLE_EQ(e.nbar, 1.0);
    EXPECT_NEAR(e.sigma, 0.2449489743, 1e-9);
}

TEST(Heating, NbarSigmaMatchesBinomialMonteCarlo) {
    const SidebandMeasurement m{0.2, 0.5, 400, 0.0};
    const NbarEstimate e = nbar_from_sidebands(m);
    SplitMix64 rng(77);
    std::binomial_distribution<int> red(m.shots, m.red_excitation), blue(m.shots, m.blue_excitation);
    double sum = 0.0, sum2 = 0.0;
    const int n = 40000;
    int used = 0;
    for (int i = 0; i < n; ++i) {
        const double r = static_cast<double>(red(rng)) / blue(rng);
        if (r >= 1.0) continue;
        const double nb = r / (1 - r);
        sum += nb;
        sum2 += nb * nb;
        ++used;
    }
    const double mean = sum / used;
    EXPECT_NEAR(std::sqrt(sum2 / used - mean * mean), e.sigma, 0.08 * e.sigma);
}

TEST(Heating, BootstrapIsSeededAndConsistent) {
    const SidebandMeasurement m{0.2, 0.5, 400, 0.0};
    const NbarEstimate a = nbar_bootstrap(m, 4000, 9), b = nbar_bootstrap(m, 4000, 9);
    EXPECT_EQ(a.nbar, b.nbar);
    EXPECT_EQ(a.sigma, b.sigma);
    EXPECT_NEAR(a.sigma, nbar_from_sidebands(m).sigma, 0.1 * a.sigma);
}

TEST(Heating, SidebandValidation) {
    EXPECT_THROW(nbar_from_sidebands({0.6, 0.3, 100, 0.0}), DomainError);
    EXPECT_THROW(nbar_from_sidebands({0.1, 0.0, 100, 0.0}), DomainError);
    EXPECT_THROW(nbar_from_sidebands({0.1, 0.3, 0, 0.0}), DomainError);
}

TEST(Heating, WeightedLineFitMatchesNormalEquations) {
    const std::vector<double> x{0, 1, 2, 3, 4}, y{1.1, 2.9, 5.2, 7.1, 8.8}, s{0.1, 0.2, 0.1, 0.3, 0.2};
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double w = 1 / (s[i] * s[i]);
        sw += w, sx += w * x[i], sy += w * y[i], sxx += w * x[i] * x[i], sxy += w * x[i] * y[i];
    }
    const double d = sw * sxx - sx * sx;
    const LineFit f = weighted_line_fit(x, y, s);
    EXPECT_NEAR(f.slope, (sw * sxy - sx * sy) / d, 1e-12);
    EXPECT_NEAR(f.intercept, (sxx * sy - sx * sxy) / d, 1e-12);
    EXPECT_NEAR(f.slope_sigma, std::sqrt(sw / d), 1e-12);
    EXPECT_NEAR(f.intercept_sigma, std::sqrt(sxx / d), 1e-12);
    EXPECT_NEAR(f.covariance, -sx / d, 1e-12);
    EXPECT_EQ(f.dof, 3);
}

TEST(Heating, UnweightedFitUsesResidualScatter) {
    const std::vector<double> x{0, 1, 2, 3}, y{0, 1.1, 1.9, 3.0}, s{0, 0, 0, 0};
    const LineFit f = weighted_line_fit(x, y, s);
    EXPECT_NEAR(f.slope, 0.98, 1e-12);
    EXPECT_GT(f.slope_sigma, 0.0);
    const std::vector<double> mixed{0, 1, 0, 1};
    EXPECT_THROW(weighted_line_fit(x, y, mixed), DomainError);
}

TEST(Heating, HeatingRateIsSlopeOfNbar) {
    std::vector<NbarPoint> p;
    for (double t : {0.0, 5e-3, 10e-3, 20e-3}) p.push_back({t, 0.1 + 12.0 * t, 0.02});
    const LineFit f = heating_rate_fit(p);
    EXPECT_NEAR(f.slope, 12.0, 1e-9);
    EXPECT_NEAR(f.intercept, 0.1, 1e-12);
}

TEST(Heating, PowerLawRecoversExactExponent) {
    std::vector<HeatingPoint> p;
    for (double f : {0.4, 0.7, 1.0, 1.3, 1.6}) {
        const double w = units::angular(f * units::MHz);
        const double rate = 3e13 * std::pow(w, -2.0);
        p.push_back({"s", w, rate, 0.05 * rate});
    }
    const PowerLawFit fit = power_law_fit(p);
    EXPECT_NEAR(fit.alpha, 2.0, 1e-6);
    EXPECT_NEAR(fit.amplitude / 3e13, 1.0, 1e-6);
    EXPECT_NEAR(fit.chi2, 0.0, 1e-12);
}

TEST(Heating, SiteTenFrozenFit) {
    const PowerLawFit f = power_law_fit(site10());
    EXPECT_NEAR(f.alpha, 2.2514, 1e-4);
    EXPECT_NEAR(f.alpha_sigma, 0.0601, 1e-4);
    EXPECT_NEAR(f.chi2 / f.dof, 3.95, 0.01);
    EXPECT_GT(f.alpha_sigma_scaled, f.alpha_sigma);
    EXPECT_EQ(f.points, 8);
}

TEST(Heating, SiteTenUnweightedFit) {
    auto p = site10();
    for (auto& h : p) h.rate_sigma = 0.0;
    EXPECT_NEAR(power_law_fit(p).alpha, 2.135, 1e-3);
}

TEST(Heating, PowerLawNeedsTwoFrequencies) {
    std::vector<HeatingPoint> p{{"a", 1e6, 10, 1}, {"a", 1e6, 11, 1}, {"a", 1e6, 12, 1}};
    EXPECT_THROW(power_law_fit(std::span(p).first(2)), DomainError);
    EXPECT_THROW(power_law_fit(p), DomainError);
}

TEST(Heating, FilteredNoiseShapeIsLowPass) {
    EXPECT_NEAR(filtered_noise_shape(0.0, 1e6), 1.0, 1e-12);
    EXPECT_NEAR(filtered_noise_shape(1e6, 1e6), 0.5, 1e-12);
    EXPECT_LT(filtered_noise_shape(1e7, 1e6), 0.01);
}
