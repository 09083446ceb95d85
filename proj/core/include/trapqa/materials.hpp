#pragma once

// Shared domain types: metals, traces, ion species and RF drive parameters.

#include <string>
#include <utility>
#include <vector>

namespace trapqa {

/// A conductor/dielectric pair as used by the loss model: a resistivity table for the
/// metal and a single loss tangent for the surrounding oxide.
struct Material {
    std::string name;
    /// (temperature K, resistivity Ohm*m), strictly increasing in temperature.
    std::vector<std::pair<double, double>> resistivity_by_temperature;
    double tan_delta = 1e-3;
};

/// Throws DomainError when the table is empty, unsorted, has a nonpositive
/// resistivity, or tan_delta is outside (0, 1).
void validate(const Material& material);

/// Piecewise-linear interpolation of the resistivity table. Exact at the knots.
/// Throws RangeError outside the tabulated temperature span.
double resistivity_at(const Material& material, double temperature);

/// Pure aluminium: 2.65e-8 Ohm*m at 300 K, 4.3e-10 Ohm*m at 10 K.
Material pure_aluminum();
/// Al-Si-Cu alloy used on the older silicon traps: 3.0e-8 at 300 K, 2.4e-9 at 10 K.
Material al_si_cu_alloy();

struct TraceGeometry {
    double length = 0.0;     // m
    double width = 0.0;      // m
    double thickness = 0.0;  // m
};

void validate(const TraceGeometry& trace);

/// R = rho * L / (w * t).
double trace_resistance(const TraceGeometry& trace, double resistivity);

/// Effective RF electrode traces. Lengths are chosen so that the 300 K
/// resistivities above give the lumped RF resistances of the two stack types
/// (4 um thick RF metal on fused silica: 1.1 Ohm; 2 um on shielded silicon: 3.0 Ohm).
TraceGeometry fused_silica_rf_trace();
TraceGeometry silicon_rf_trace();

struct IonSpecies {
    double mass = 0.0;    // kg
    double charge = 0.0;  // C
};

void validate(const IonSpecies& ion);

/// 40Ca+ (39.962590863 u, +e).
IonSpecies calcium40();

struct DriveParams {
    double rf_amplitude = 0.0;          // V, zero-to-peak
    double rf_angular_frequency = 0.0;  // rad/s
};

void validate(const DriveParams& drive);

}  // namespace trapqa
