#include "trapqa/diagnosis.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "trapqa/errors.hpp"

namespace trapqa {

std::string_view to_string(FaultScenario::Kind kind) {
    switch (kind) {
        case FaultScenario::Kind::Nominal: return "NOMINAL";
        case FaultScenario::Kind::Shorted: return "SHORTED";
        case FaultScenario::Kind::Floating: return "FLOATING";
        case FaultScenario::Kind::GapCharge: return "GAP_CHARGE";
    }
    return "?";
}

std::string_view to_string(FaultClass c) {
    switch (c) {
        case FaultClass::Nominal: return "NOMINAL";
        case FaultClass::ShortedCompatible: return "SHORTED_COMPATIBLE";
        case FaultClass::FloatingOrCharge: return "FLOATING_OR_CHARGE";
        case FaultClass::Unclassified: return "UNCLASSIFIED";
    }
    return "?";
}

void validate(const FaultScenario& scenario, const TrapGeometry& geometry) {
    using K = FaultScenario::Kind;
    if (scenario.kind == K::Shorted || scenario.kind == K::Floating) {
        geometry.electrode(scenario.electrode);
    }
    if (scenario.kind == K::GapCharge) {
        if (scenario.regions.empty()) throw DomainError("gap-charge scenario without regions");
        for (const auto& r : scenario.regions) {
            if (!(r.x2 > r.x1 && r.y2 > r.y1)) {
                throw DomainError("gap-charge region is degenerate");
            }
        }
    }
}

AxialPotential scenario_potential(const TrapGeometry& geometry, const VoltageMap& voltages,
                                  const FaultScenario& scenario, double scale) {
    validate(scenario, geometry);
    if (!(scale > 0.0)) throw DomainError("voltage scale must be positive");
    using K = FaultScenario::Kind;

    // Effective per-electrode voltages for this scale.
    auto effective = std::make_shared<std::vector<std::pair<const ElectrodeShape*, double>>>();
    for (const auto& [id, v] : voltages) {
        const ElectrodeShape& e = geometry.electrode(id);
        double ve = scale * v;
        if (scenario.kind != K::Nominal && scenario.kind != K::GapCharge &&
            id == scenario.electrode) {
            ve = scenario.kind == K::Shorted ? 0.0 : scenario.held_voltage;
        }
        effective->emplace_back(&e, ve);
    }
    if (scenario.kind == K::Floating && !voltages.contains(scenario.electrode)) {
        effective->emplace_back(&geometry.electrode(scenario.electrode), scenario.held_voltage);
    }
    auto patches = std::make_shared<std::vector<Rect>>(
        scenario.kind == K::GapCharge ? scenario.regions : std::vector<Rect>{});
    const double patch_v = scenario.effective_voltage;
    const double y = geometry.axis_y;
    const double z = geometry.axis_z;
    if (!(z > 0.0)) throw DomainError("geometry ion axis must lie above the plane");

    return [effective, patches, patch_v, y, z](double x) {
        const Vec3 p(x, y, z);
        double phi = 0.0;
        for (const auto& [e, v] : *effective) {
            if (v == 0.0) continue;
            for (const auto& r : e->rects) phi += rect_potential(r, v, p);
        }
        for (const auto& r : *patches) phi += rect_potential(r, patch_v, p);
        return phi;
    };
}

Equilibrium equilibrium_position(const AxialPotential& potential, double lo, double hi,
                                 const EquilibriumOptions& options) {
    if (!(hi > lo)) throw DomainError("search interval must have hi > lo");
    const int n = std::max(options.coarse_samples, 3);
    const double dx = (hi - lo) / (n - 1);
    int best = 0;
    double best_u = potential(lo);
    for (int i = 1; i < n; ++i) {
        const double u = potential(lo + i * dx);
        if (u < best_u) {
            best_u = u;
            best = i;
        }
    }
    if (best == 0 || best == n - 1) return {lo + best * dx, true};

    // Golden section on the bracket around the coarse minimum.
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo + (best - 1) * dx;
    double b = lo + (best + 1) * dx;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = potential(c), fd = potential(d);
    while (b - a > options.tolerance) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = potential(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = potential(d);
        }
    }
    // Parabola through the final bracket; exact for quadratic wells.
    const double m = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fa = potential(a), fm = potential(m), fb = potential(b);
    const double curvature = fa - 2.0 * fm + fb;
    double x = m;
    if (curvature > 0.0) {
        x = m + 0.5 * h * (fa - fb) / curvature;
        x = std::clamp(x, a, b);
    }
    return {x, false};
}

namespace {

FaultClass classify_site(const std::vector<double>& offsets, double tol) {
    const bool all_nominal =
        std::all_of(offsets.begin(), offsets.end(), [&](double d) { return std::abs(d) <= tol; });
    if (all_nominal) return FaultClass::Nominal;

    const auto [mn, mx] = std::minmax_element(offsets.begin(), offsets.end());
    if (*mx - *mn <= tol) return FaultClass::ShortedCompatible;

    // Offsets must shrink toward nominal at every step without changing sign
    // (beyond tolerance) and with a total shift larger than the tolerance.
    const double sign = offsets.front() >= 0.0 ? 1.0 : -1.0;
    for (std::size_t i = 1; i < offsets.size(); ++i) {
        const double prev = sign * offsets[i - 1];
        const double cur = sign * offsets[i];
        if (cur > prev || cur < -tol) return FaultClass::Unclassified;
    }
    if (sign * (offsets.front() - offsets.back()) <= tol) return FaultClass::Unclassified;
    return FaultClass::FloatingOrCharge;
}

}  // namespace

FaultClassification classify_fault(std::span<const PositionMeasurement> measurements,
                                   const std::map<std::string, double>& nominal_positions,
                                   const ClassifyOptions& options) {
    std::map<std::string, std::vector<const PositionMeasurement*>> by_site;
    for (const auto& m : measurements) {
        if (!(m.voltage_scale > 0.0)) throw DomainError("voltage scale must be positive");
        by_site[m.site].push_back(&m);
    }

    FaultClassification out;
    bool any_fault = false;
    FaultClass fault = FaultClass::Nominal;
    bool conflict = false;
    for (auto& [site, ms] : by_site) {
        auto nominal = nominal_positions.find(site);
        if (nominal == nominal_positions.end()) {
            throw LookupError("no nominal position for site '" + site + "'");
        }
        std::sort(ms.begin(), ms.end(), [](auto* a, auto* b) { return a->voltage_scale < b->voltage_scale; });
        SiteClassification sc;
        sc.site = site;
        for (const auto* m : ms) sc.offsets.push_back(m->measured_position - nominal->second);

        std::size_t distinct = 1;
        for (std::size_t i = 1; i < ms.size(); ++i) {
            if (ms[i]->voltage_scale != ms[i - 1]->voltage_scale) ++distinct;
        }
        if (distinct < 2) {
            throw DomainError("site '" + site + "' needs measurements at two or more scales");
        }
        sc.fault_class = classify_site(sc.offsets, options.tolerance);
        const double direction = nominal->second - options.trap_center;
        sc.outward = sc.offsets.front() * direction > 0.0;

        if (sc.fault_class == FaultClass::Unclassified) {
            conflict = true;
        } else if (sc.fault_class != FaultClass::Nominal) {
            if (any_fault && fault != sc.fault_class) conflict = true;
            any_fault = true;
            fault = sc.fault_class;
        }
        out.sites.push_back(std::move(sc));
    }
    if (out.sites.empty()) {
        out.overall = FaultClass::Unclassified;
    } else if (conflict) {
        out.overall = FaultClass::Unclassified;
    } else {
        out.overall = any_fault ? fault : FaultClass::Nominal;
    }
    return out;
}

}  // namespace trapqa
