#include "trapqa/dissipation.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "trapqa/errors.hpp"
#include "trapqa/units.hpp"

namespace trapqa {

void validate(const CircuitModel& model) {
    if (!(model.capacitance > 0.0)) throw DomainError("capacitance must be positive");
    if (!(model.series_resistance >= 0.0)) throw DomainError("resistance must be >= 0");
    if (!(model.tan_delta >= 0.0 && model.tan_delta < 1.0)) {
        throw DomainError("tan_delta must lie in [0, 1)");
    }
}

double conductance(const CircuitModel& model, double omega) {
    if (!(omega > 0.0)) throw DomainError("omega must be positive");
    return omega * model.capacitance * model.tan_delta;
}

std::complex<double> impedance(const CircuitModel& model, double omega) {
    validate(model);
    const double g = conductance(model, omega);
    const double wc = omega * model.capacitance;
    const double den = g * g + wc * wc;
    return {model.series_resistance + g / den, -wc / den};
}

double power_exact(const DriveParams& drive, const CircuitModel& model) {
    validate(drive);
    validate(model);
    const double w = drive.rf_angular_frequency;
    const double r = model.series_resistance;
    const double g = conductance(model, w);
    const double c2w2 = model.capacitance * model.capacitance * w * w;
    const double num = r * (c2w2 + g * g) + g;
    const double den = r * r * (g * g + c2w2) + 2.0 * g * r + 1.0;
    return 0.5 * drive.rf_amplitude * drive.rf_amplitude * num / den;
}

double power_from_impedance(const DriveParams& drive, const CircuitModel& model) {
    validate(drive);
    const std::complex<double> z = impedance(model, drive.rf_angular_frequency);
    return 0.5 * drive.rf_amplitude * drive.rf_amplitude * std::real(1.0 / z);
}

DissipationReport power_approx(const DriveParams& drive, const CircuitModel& model) {
    validate(drive);
    validate(model);
    const double v2 = drive.rf_amplitude * drive.rf_amplitude;
    const double w = drive.rf_angular_frequency;
    const double c = model.capacitance;
    const double r = model.series_resistance;

    DissipationReport out;
    out.p_ohmic = v2 / 6.0 * c * c * r * w * w;
    out.p_diel = 0.5 * v2 * w * c * model.tan_delta;
    out.p_total = out.p_ohmic + out.p_diel;

    CircuitModel effective = model;
    effective.series_resistance = r / 3.0;
    out.p_exact = power_exact(drive, effective);
    out.approximation_error =
        out.p_exact > 0.0 ? std::abs(out.p_exact - out.p_total) / out.p_exact : 0.0;
    out.crw = c * r * w;
    out.outside_validity = out.crw > kApproximationLimit;
    return out;
}

double distributed_ohmic_power(double total_resistance, double feed_current_amplitude) {
    if (total_resistance < 0.0 || feed_current_amplitude < 0.0) {
        throw DomainError("resistance and current amplitude must be nonnegative");
    }
    return total_resistance * feed_current_amplitude * feed_current_amplitude / 3.0;
}

std::vector<TrapPreset> reference_presets() {
    using namespace units;
    const DriveParams drive{160.0, angular(22.0 * MHz)};
    return {
        {"Silicon, partially shielded", 28.0 * pF, 1e-3, drive, {{300.0, 3.0}, {10.0, 0.31}}},
        {"Silicon, fully shielded", 42.0 * pF, 1e-3, drive, {{300.0, 3.0}, {10.0, 0.31}}},
        {"Fused silica, no shield", 12.0 * pF, 1e-3, drive, {{300.0, 1.1}, {10.0, 0.025}}},
    };
}

std::vector<DissipationRow> dissipation_report(std::span<const TrapPreset> presets) {
    std::vector<DissipationRow> rows;
    for (const auto& preset : presets) {
        for (const auto& [temperature, resistance] : preset.resistance_by_temperature) {
            const CircuitModel model{preset.capacitance, resistance, preset.tan_delta};
            rows.push_back({preset.name, temperature, preset.capacitance, resistance,
                            power_approx(preset.drive, model)});
        }
    }
    return rows;
}

namespace {

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

}  // namespace

std::string format_table_text(std::span<const DissipationRow> rows) {
    std::ostringstream os;
    char line[256];
    std::snprintf(line, sizeof line, "%-30s %6s %8s %9s %10s %10s %10s %10s %10s\n", "trap",
                  "T[K]", "C[pF]", "R[Ohm]", "P_ohm[mW]", "P_diel[mW]", "P_d[mW]",
                  "P_exact", "rel.err");
    os << line;
    for (const auto& row : rows) {
        const auto& r = row.report;
        std::snprintf(line, sizeof line,
                      "%-30s %6.0f %8.1f %9.3f %10.3f %10.3f %10.3f %10.3f %10.2e%s\n",
                      row.trap.c_str(), row.temperature, row.capacitance / units::pF,
                      row.resistance, r.p_ohmic / units::mW, r.p_diel / units::mW,
                      r.p_total / units::mW, r.p_exact / units::mW, r.approximation_error,
                      r.outside_validity ? "  (CR*omega > 0.1)" : "");
        os << line;
    }
    return os.str();
}

std::string format_table_csv(std::span<const DissipationRow> rows) {
    std::ostringstream os;
    os << "trap,temperature_K,capacitance_pF,resistance_ohm,p_ohmic_mW,p_diel_mW,p_total_mW,"
          "p_exact_mW,approximation_error,crw,outside_validity\n";
    char buf[320];
    for (const auto& row : rows) {
        const auto& r = row.report;
        std::snprintf(buf, sizeof buf, ",%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.6e,%.6e,%d\n",
                      row.temperature, row.capacitance / units::pF, row.resistance,
                      r.p_ohmic / units::mW, r.p_diel / units::mW, r.p_total / units::mW,
                      r.p_exact / units::mW, r.approximation_error, r.crw,
                      r.outside_validity ? 1 : 0);
        os << csv_quote(row.trap) << buf;
    }
    return os.str();
}

}  // namespace trapqa
