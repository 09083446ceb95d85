#pragma once

// Lumped RC model of RF power loss in a surface trap: series electrode
// resistance R, RF-to-ground capacitance C and a shunt conductance
// G = omega * C * tan(delta) describing the inter-metal oxide.

#include <complex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trapqa/materials.hpp"

namespace trapqa {

struct CircuitModel {
    double capacitance = 0.0;        // F, RF to GND
    double series_resistance = 0.0;  // Ohm, total RF electrode resistance
    double tan_delta = 1e-3;
};

void validate(const CircuitModel& model);

/// G = omega * C * tan(delta).
double conductance(const CircuitModel& model, double omega);

/// Z = R + (G - i omega C) / (G^2 + omega^2 C^2).
std::complex<double> impedance(const CircuitModel& model, double omega);

/// Closed-form dissipated power
///   P = V0^2/2 * [R (C^2 w^2 + G^2) + G] / [R^2 (G^2 + C^2 w^2) + 2 G R + 1]
/// using the model's resistance as given (no distributed-resistance correction).
double power_exact(const DriveParams& drive, const CircuitModel& model);

/// Same quantity through P = V0^2/2 * Re(1/Z), evaluated in complex arithmetic.
/// Kept as an independent route to cross-check power_exact.
double power_from_impedance(const DriveParams& drive, const CircuitModel& model);

/// Above this value of C*R*omega the small-loss expansion is flagged.
inline constexpr double kApproximationLimit = 0.1;

struct DissipationReport {
    double p_ohmic = 0.0;   // W, V0^2/6 C^2 R w^2
    double p_diel = 0.0;    // W, V0^2/2 w C tan(delta)
    double p_total = 0.0;   // W
    double p_exact = 0.0;   // W, power_exact with R_eff = R/3
    double approximation_error = 0.0;  // |p_exact - p_total| / p_exact
    double crw = 0.0;                  // C * R * omega
    bool outside_validity = false;     // crw > kApproximationLimit
};

/// Approximate Ohmic + dielectric split. The distributed RF electrode enters as
/// R_eff = R/3; the exact reference value is evaluated with the same R_eff.
DissipationReport power_approx(const DriveParams& drive, const CircuitModel& model);

/// Spatial integral of R' I(x)^2 for a linearly decaying feed current
/// I(x) = I0 (1 - x/L): equals R_M I0^2 / 3.
double distributed_ohmic_power(double total_resistance, double feed_current_amplitude);

/// One trap variant: capacitance, oxide loss tangent, drive and the RF
/// electrode resistance at each temperature of interest.
struct TrapPreset {
    std::string name;
    double capacitance = 0.0;
    double tan_delta = 1e-3;
    DriveParams drive;
    std::vector<std::pair<double, double>> resistance_by_temperature;  // (K, Ohm)
};

/// Partially shielded Si, fully shielded Si and fused silica at 300 K and 10 K,
/// driven at 2 pi x 22 MHz, 160 V, tan(delta) = 1e-3.
std::vector<TrapPreset> reference_presets();

struct DissipationRow {
    std::string trap;
    double temperature = 0.0;
    double capacitance = 0.0;
    double resistance = 0.0;
    DissipationReport report;
};

/// One row per (preset, temperature), in preset order.
std::vector<DissipationRow> dissipation_report(std::span<const TrapPreset> presets);

std::string format_table_text(std::span<const DissipationRow> rows);
std::string format_table_csv(std::span<const DissipationRow> rows);

}  // namespace trapqa
