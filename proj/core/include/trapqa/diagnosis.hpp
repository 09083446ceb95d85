#pragma once

// Fault scenarios for a trapped ion displaced along the trap axis, and the
// position-versus-confinement test that separates a grounded (shorted)
// electrode from a floating electrode or trapped surface charge.

#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "trapqa/electrostatics.hpp"

namespace trapqa {

struct FaultScenario {
    enum class Kind { Nominal, Shorted, Floating, GapCharge };

    Kind kind = Kind::Nominal;
    std::string electrode;       // Shorted / Floating
    double held_voltage = 0.0;   // Floating: voltage the disconnected electrode keeps
    std::vector<Rect> regions;   // GapCharge: charged dielectric patches in the plane
    double effective_voltage = 0.0;  // GapCharge

    static FaultScenario nominal() { return {}; }
    static FaultScenario shorted(std::string id) { return {Kind::Shorted, std::move(id), 0.0, {}, 0.0}; }
    static FaultScenario floating(std::string id, double held) {
        return {Kind::Floating, std::move(id), held, {}, 0.0};
    }
    static FaultScenario gap_charge(std::vector<Rect> regions, double voltage) {
        return {Kind::GapCharge, {}, 0.0, std::move(regions), voltage};
    }
};

std::string_view to_string(FaultScenario::Kind kind);

/// Referenced electrode must exist; gap-charge rectangles must be non-degenerate.
void validate(const FaultScenario& scenario, const TrapGeometry& geometry);

/// Electrostatic potential (V) along the ion axis x -> phi(x, axis_y, axis_z).
using AxialPotential = std::function<double(double)>;

/// Applies `scale` to the voltage set under a fault:
///  - Nominal:   every voltage scaled.
///  - Shorted:   the electrode sits at 0 V whatever the scale.
///  - Floating:  the electrode keeps held_voltage while the rest scale.
///  - GapCharge: the patch contribution stays fixed while the electrodes scale.
AxialPotential scenario_potential(const TrapGeometry& geometry, const VoltageMap& voltages,
                                  const FaultScenario& scenario, double scale);

struct EquilibriumOptions {
    int coarse_samples = 401;
    double tolerance = 0.1e-6;  // m
};

struct Equilibrium {
    double position = 0.0;
    /// Coarse minimum sits on an interval end: no interior minimum was found.
    bool at_boundary = false;
};

/// Coarse scan, golden-section refinement to `tolerance`, then one parabolic
/// step through the final bracket.
Equilibrium equilibrium_position(const AxialPotential& potential, double lo, double hi,
                                 const EquilibriumOptions& options = {});

struct PositionMeasurement {
    std::string site;
    double nominal_axial_frequency = 0.0;  // rad/s at scale 1
    double voltage_scale = 1.0;
    double measured_position = 0.0;  // m along the axis
};

enum class FaultClass { Nominal, ShortedCompatible, FloatingOrCharge, Unclassified };

std::string_view to_string(FaultClass c);

struct SiteClassification {
    std::string site;
    FaultClass fault_class = FaultClass::Unclassified;
    /// Offsets point away from the trap centre (the sign expected for negative
    /// charge sitting at the centre).
    bool outward = false;
    std::vector<double> offsets;  // measured - nominal, ascending scale
};

struct FaultClassification {
    FaultClass overall = FaultClass::Unclassified;
    std::vector<SiteClassification> sites;
};

struct ClassifyOptions {
    double tolerance = 0.5e-6;  // m, "constant" vs "moving"
    double trap_center = 0.0;   // m
};

/// Per site (at least two scales each): positions at nominal everywhere give
/// Nominal; scale-independent offset gives ShortedCompatible; an offset that
/// shrinks monotonically toward nominal gives FloatingOrCharge. Anything else,
/// including motion away from nominal, is Unclassified. Floating electrodes and
/// surface charge produce the same signature and are reported together.
FaultClassification classify_fault(std::span<const PositionMeasurement> measurements,
                                   const std::map<std::string, double>& nominal_positions,
                                   const ClassifyOptions& options = {});

}  // namespace trapqa
