#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "trapqa/diagnosis.hpp"
#include "trapqa/errors.hpp"
#include "trapqa/random.hpp"
#include "trapqa/units.hpp"

using namespace trapqa;
using units::um;

namespace {

const VoltageMap kAxial{{"DC16", 3.0}, {"DC18", 0.0}, {"DC20", 3.0}, {"DC51", 3.0}, {"DC53", 0.0}, {"DC55", 3.0}};

double position(const TrapGeometry& g, const FaultScenario& s, double scale) {
    const Equilibrium e = equilibrium_position(scenario_potential(g, kAxial, s, scale), -150 * um, 150 * um);
    EXPECT_FALSE(e.at_boundary);
    return e.position;
}

std::vector<PositionMeasurement> synthesize(const std::string& site, double nominal, FaultClass kind, double d) {
    std::vector<PositionMeasurement> out;
    for (double s : {1.0, 2.0, 4.0}) {
        double off = 0.0;
        if (kind == FaultClass::ShortedCompatible) off = d;
        if (kind == FaultClass::FloatingOrCharge) off = d / s;
        out.push_back({site, 0.0, s, nominal + off});
    }
    return out;
}

}  // namespace

TEST(Diagnosis, EquilibriumOfQuadraticWell) {
    const auto well = [](double x) { return (x - 12.3e-6) * (x - 12.3e-6); };
    const Equilibrium e = equilibrium_position(well, -100e-6, 100e-6);
    EXPECT_FALSE(e.at_boundary);
    EXPECT_NEAR(e.position, 12.3e-6, 1e-9);
}

TEST(Diagnosis, EquilibriumReportsBoundary) {
    const Equilibrium e = equilibrium_position([](double x) { return x; }, -1e-4, 1e-4);
    EXPECT_TRUE(e.at_boundary);
    EXPECT_DOUBLE_EQ(e.position, -1e-4);
    EXPECT_THROW(equilibrium_position([](double x) { return x; }, 1.0, 0.0), DomainError);
}

TEST(Diagnosis, NominalTrapIsCentred) {
    const TrapGeometry g = reference_trap_geometry();
    EXPECT_NEAR(position(g, FaultScenario::nominal(), 1.0), 0.0, 0.1 * um);
}

TEST(Diagnosis, ShortedPositionIsScaleInvariant) {
    const TrapGeometry g = reference_trap_geometry();
    const FaultScenario s = FaultScenario::shorted("DC55");
    const double p1 = position(g, s, 1.0);
    EXPECT_GT(std::abs(p1), 10 * um);
    for (double scale : {2.0, 4.0}) EXPECT_NEAR(position(g, s, scale), p1, 0.1 * um);
}

TEST(Diagnosis, FloatingPositionDependsOnScale) {
    const TrapGeometry g = reference_trap_geometry();
    const FaultScenario s = FaultScenario::floating("DC55", 1.0);
    EXPECT_GT(std::abs(position(g, s, 4.0) - position(g, s, 1.0)), 5 * um);
}

TEST(Diagnosis, FloatingConvergesToShortedShapeAtLargeScale) {
    const TrapGeometry g = reference_trap_geometry();
    const auto shorted = scenario_potential(g, kAxial, FaultScenario::shorted("DC55"), 1.0);
    double prev = std::numeric_limits<double>::infinity();
    for (double s : {1.0, 10.0, 100.0}) {
        const auto floating = scenario_potential(g, kAxial, FaultScenario::floating("DC55", 1.0), s);
        double worst = 0.0;
        for (double x = -150 * um; x <= 150 * um; x += 10 * um) {
            worst = std::max(worst, std::abs(floating(x) / s - shorted(x)));
        }
        EXPECT_LT(worst, prev);
        prev = worst;
    }
    EXPECT_LT(prev, 0.01 * std::abs(shorted(0.0)));
}

TEST(Diagnosis, HarmonicPlusConstantForceDisplacementGoesAsInverseScale) {
    const double k = 2.0, f = 3e-6;
    std::vector<double> ls, lx;
    for (double s : {1.0, 2.0, 4.0, 8.0}) {
        const auto u = [=](double x) { return s * 0.5 * k * x * x - f * x; };
        const Equilibrium e = equilibrium_position(u, -50e-6, 50e-6);
        ls.push_back(std::log(s));
        lx.push_back(std::log(e.position));
    }
    const double slope = (lx.back() - lx.front()) / (ls.back() - ls.front());
    EXPECT_NEAR(slope, -1.0, 1e-3);
}

TEST(Diagnosis, GapChargeDisplacementFallsWithScale) {
    const TrapGeometry g = reference_trap_geometry();
    const FaultScenario s = FaultScenario::gap_charge({{150.5 * um, 158.5 * um, 40 * um, 135 * um}}, 0.5);
    const double d1 = position(g, s, 1.0), d4 = position(g, s, 4.0);
    EXPECT_LT(d1, 0.0);
    EXPECT_NEAR(std::log(d4 / d1) / std::log(4.0), -1.0, 0.05);
}

TEST(Diagnosis, ScenarioValidation) {
    const TrapGeometry g = reference_trap_geometry();
    EXPECT_THROW(scenario_potential(g, kAxial, FaultScenario::shorted("XX"), 1.0), LookupError);
    EXPECT_THROW(scenario_potential(g, kAxial, FaultScenario::gap_charge({}, 1.0), 1.0), DomainError);
    EXPECT_THROW(scenario_potential(g, kAxial, FaultScenario::nominal(), 0.0), DomainError);
}

TEST(Diagnosis, PhysicalScenariosClassifyCorrectly) {
    const TrapGeometry g = reference_trap_geometry();
    const std::pair<FaultScenario, FaultClass> cases[] = {
        {FaultScenario::shorted("DC55"), FaultClass::ShortedCompatible},
        {FaultScenario::floating("DC54", 0.5), FaultClass::FloatingOrCharge},
        {FaultScenario::floating("DC55", 1.0), FaultClass::Unclassified},
        {FaultScenario::gap_charge({{150.5 * um, 158.5 * um, 40 * um, 135 * um}}, 0.5), FaultClass::FloatingOrCharge},
        {FaultScenario::nominal(), FaultClass::Nominal},
    };
    for (const auto& [scenario, expected] : cases) {
        std::vector<PositionMeasurement> m;
        for (double s : {1.0, 2.0, 4.0}) m.push_back({"S", 0.0, s, position(g, scenario, s)});
        const auto c = classify_fault(m, {{"S", 0.0}}, {0.1 * um, 0.0});
        EXPECT_EQ(c.overall, expected) << to_string(scenario.kind);
    }
}

TEST(Diagnosis, SyntheticScenariosRecoveredExactly) {
    SplitMix64 rng(3);
    const double tol = 0.5 * um;
    const FaultClass kinds[] = {FaultClass::Nominal, FaultClass::ShortedCompatible, FaultClass::FloatingOrCharge};
    int correct = 0, total = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const FaultClass kind = kinds[trial % 3];
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        // Displacement at least 3x tolerance at the largest scale.
        const double mag = (kind == FaultClass::FloatingOrCharge ? 4.0 : 1.0) * (3.0 + 20.0 * rng.uniform()) * tol;
        const double nominal = (rng.uniform() - 0.5) * 800 * um;
        const auto m = synthesize("site", nominal, kind, sign * mag);
        const auto c = classify_fault(m, {{"site", nominal}}, {tol, 0.0});
        correct += c.overall == kind;
        ++total;
    }
    EXPECT_EQ(correct, total);
}

TEST(Diagnosis, OutwardDirectionRelativeToCentre) {
    const auto m = synthesize("A", 400 * um, FaultClass::FloatingOrCharge, 12 * um);
    const auto c = classify_fault(m, {{"A", 400 * um}});
    ASSERT_EQ(c.sites.size(), 1u);
    EXPECT_TRUE(c.sites[0].outward);
    const auto m2 = synthesize("B", 400 * um, FaultClass::FloatingOrCharge, -12 * um);
    EXPECT_FALSE(classify_fault(m2, {{"B", 400 * um}}).sites[0].outward);
}

TEST(Diagnosis, ConflictingSitesAreUnclassified) {
    auto m = synthesize("A", 0.0, FaultClass::ShortedCompatible, 5 * um);
    const auto m2 = synthesize("B", 0.0, FaultClass::FloatingOrCharge, 20 * um);
    m.insert(m.end(), m2.begin(), m2.end());
    EXPECT_EQ(classify_fault(m, {{"A", 0.0}, {"B", 0.0}}).overall, FaultClass::Unclassified);
}

TEST(Diagnosis, GrowingOffsetIsUnclassified) {
    std::vector<PositionMeasurement> m{{"A", 0.0, 1.0, 2 * um}, {"A", 0.0, 2.0, 4 * um}, {"A", 0.0, 4.0, 8 * um}};
    EXPECT_EQ(classify_fault(m, {{"A", 0.0}}).overall, FaultClass::Unclassified);
}

TEST(Diagnosis, ClassificationInputErrors) {
    const std::vector<PositionMeasurement> one{{"A", 0.0, 1.0, 0.0}, {"A", 0.0, 1.0, 0.0}};
    EXPECT_THROW(classify_fault(one, {{"A", 0.0}}), DomainError);
    const auto m = synthesize("A", 0.0, FaultClass::Nominal, 0.0);
    EXPECT_THROW(classify_fault(m, {{"B", 0.0}}), LookupError);
}
