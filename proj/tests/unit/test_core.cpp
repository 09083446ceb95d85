#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "trapqa/errors.hpp"
#include "trapqa/materials.hpp"
#include "trapqa/random.hpp"
#include "trapqa/units.hpp"

using namespace trapqa;

TEST(Materials, TraceResistanceIsRhoLOverA) {
    const TraceGeometry t{1.0, 1e-3, 1e-3};
    EXPECT_DOUBLE_EQ(trace_resistance(t, 2e-8), 2e-8 / 1e-6);
}

TEST(Materials, TraceResistanceRejectsBadInput) {
    EXPECT_THROW(trace_resistance({0.0, 1e-4, 1e-6}, 1e-8), DomainError);
    EXPECT_THROW(trace_resistance({1e-2, 1e-4, 1e-6}, 0.0), DomainError);
}

TEST(Materials, ResistivityLookupHitsTabulatedPoints) {
    const Material al = pure_aluminum();
    for (const auto& [t, rho] : al.resistivity_by_temperature) {
        EXPECT_DOUBLE_EQ(resistivity_at(al, t), rho);
    }
}

TEST(Materials, AlloyIsMoreResistiveThanPureAluminumCold) {
    EXPECT_GT(resistivity_at(al_si_cu_alloy(), 10.0), resistivity_at(pure_aluminum(), 10.0));
}

TEST(Materials, Calcium40) {
    const IonSpecies ion = calcium40();
    EXPECT_NEAR(ion.mass / units::atomic_mass_unit, 40.0, 0.05);
    EXPECT_DOUBLE_EQ(ion.charge, units::elementary_charge);
}

TEST(Materials, DriveValidation) {
    EXPECT_THROW(validate(DriveParams{100.0, 0.0}), DomainError);
    EXPECT_THROW(validate(DriveParams{-1.0, 1e8}), DomainError);
    EXPECT_NO_THROW(validate(DriveParams{100.0, 1e8}));
}

TEST(Errors, ConfigErrorCarriesPointer) {
    const ConfigError e("bad value", "/nets/3/role");
    EXPECT_EQ(e.pointer(), "/nets/3/role");
    EXPECT_STREQ(e.what(), "/nets/3/role: bad value");
}

TEST(Random, SplitMixIsDeterministic) {
    SplitMix64 a(42), b(42);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(Random, DeriveSeedSeparatesKeys) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t k = 0; k < 1000; ++k) seen.insert(derive_seed(7, k));
    EXPECT_EQ(seen.size(), 1000u);
}

TEST(Random, UniformMomentsMatchUnitInterval) {
    SplitMix64 rng(2024);
    double sum = 0.0, sum2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        sum += u;
        sum2 += u * u;
    }
    EXPECT_NEAR(sum / n, 0.5, 0.003);
    EXPECT_NEAR(sum2 / n - (sum / n) * (sum / n), 1.0 / 12.0, 0.002);
}
