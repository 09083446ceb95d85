#include "trapqa/materials.hpp"

#include <algorithm>
#include <cmath>

#include "trapqa/errors.hpp"
#include "trapqa/units.hpp"

namespace trapqa {

void validate(const Material& material) {
    const auto& table = material.resistivity_by_temperature;
    if (table.empty()) {
        throw DomainError("material '" + material.name + "' has an empty resistivity table");
    }
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (!(table[i].second > 0.0)) {
            throw DomainError("material '" + material.name + "': resistivity must be positive");
        }
        if (i > 0 && !(table[i].first > table[i - 1].first)) {
            throw DomainError("material '" + material.name +
                              "': temperatures must be strictly increasing");
        }
    }
    if (!(material.tan_delta > 0.0 && material.tan_delta < 1.0)) {
        throw DomainError("material '" + material.name + "': tan_delta must lie in (0, 1)");
    }
}

double resistivity_at(const Material& material, double temperature) {
    validate(material);
    const auto& table = material.resistivity_by_temperature;
    if (temperature < table.front().first || temperature > table.back().first) {
        throw RangeError("temperature " + std::to_string(temperature) +
                         " K outside the resistivity table of '" + material.name + "'");
    }
    auto hi = std::lower_bound(table.begin(), table.end(), temperature,
                               [](const auto& knot, double t) { return knot.first < t; });
    if (hi->first == temperature) return hi->second;
    auto lo = hi - 1;
    const double f = (temperature - lo->first) / (hi->first - lo->first);
    return lo->second + f * (hi->second - lo->second);
}

Material pure_aluminum() {
    return {"pure-Al", {{10.0, 4.3e-10}, {300.0, 2.65e-8}}, 1e-3};
}

Material al_si_cu_alloy() {
    return {"Al-Si-Cu", {{10.0, 2.4e-9}, {300.0, 3.0e-8}}, 1e-3};
}

void validate(const TraceGeometry& trace) {
    if (!(trace.length > 0.0 && trace.width > 0.0 && trace.thickness > 0.0)) {
        throw DomainError("trace length, width and thickness must all be positive");
    }
}

double trace_resistance(const TraceGeometry& trace, double resistivity) {
    validate(trace);
    if (!(resistivity > 0.0)) throw DomainError("resistivity must be positive");
    return resistivity * trace.length / (trace.width * trace.thickness);
}

TraceGeometry fused_silica_rf_trace() {
    using namespace units;
    return {16.6 * mm, 100.0 * um, 4.0 * um};
}

TraceGeometry silicon_rf_trace() {
    using namespace units;
    return {20.0 * mm, 100.0 * um, 2.0 * um};
}

void validate(const IonSpecies& ion) {
    if (!(ion.mass > 0.0)) throw DomainError("ion mass must be positive");
    if (ion.charge == 0.0 || !std::isfinite(ion.charge)) {
        throw DomainError("ion charge must be nonzero");
    }
}

IonSpecies calcium40() {
    return {39.962590863 * units::atomic_mass_unit, units::elementary_charge};
}

void validate(const DriveParams& drive) {
    if (!(drive.rf_amplitude >= 0.0)) throw DomainError("RF amplitude must be >= 0");
    if (!(drive.rf_angular_frequency > 0.0)) throw DomainError("RF frequency must be > 0");
}

}  // namespace trapqa
