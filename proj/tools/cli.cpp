#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "trapqa/diagnosis.hpp"
#include "trapqa/dissipation.hpp"
#include "trapqa/electrostatics.hpp"
#include "trapqa/errors.hpp"
#include "trapqa/heating.hpp"
#include "trapqa/io.hpp"
#include "trapqa/thermometry.hpp"
#include "trapqa/units.hpp"
#include "trapqa/wafertest.hpp"
#include "trapqa/yieldmap.hpp"

namespace trapqa::cli {

namespace {

using io::Json;

struct OptionDef {
    const char* name;
    const char* help;
    bool flag = false;
};

struct SubcommandDef {
    const char* name;
    const char* help;
    std::vector<OptionDef> options;
};

const std::vector<SubcommandDef>& subcommands() {
    static const std::vector<SubcommandDef> defs = {
        {"dissipation",
         "RF power dissipation of the lumped RC trap model (Ohmic + dielectric loss) for the three "
         "reference stacks at 300 K and 10 K",
         {{"presets", "'reference' or a preset JSON file"}}},
        {"wafertest",
         "Electrical wafer test: continuity, two leakage passes and resistance with abort on first failure",
         {{"netlist", "'default' or a netlist JSON file"},
          {"faults", "'none' or a fault JSON file"},
          {"limits", "'default' or a limits JSON file"},
          {"log", "write the step log CSV here"},
          {"sweep", "run the exhaustive single-fault sweep", true},
          {"wafer", "simulate a whole wafer with planted faults", true},
          {"layout", "wafer layout JSON (wafer mode)"},
          {"plant", "'reference', 'none' or a plant-rule JSON file (wafer mode)"},
          {"threads", "worker threads for wafer mode (0 = all cores)"}}},
        {"yieldmap",
         "Yield statistics, Poisson defect density, reticle periodicity and edge concentration; SVG/CSV wafermap",
         {{"results", "wafer result JSON (from 'wafertest --wafer')"},
          {"layout", "layout JSON; without --results gives an untested wafer"},
          {"map", "write the SVG wafermap here"},
          {"csv", "write the per-site CSV here"},
          {"stats", "write statistics JSON here"},
          {"periodicity-code", "failure code for the reticle periodicity test (LEAK_DC_GND)"},
          {"edge-code", "failure code for the edge concentration test (CONTINUITY_FAIL)"},
          {"annulus", "edge annulus as a fraction of the wafer radius (0.2)"},
          {"process-steps", "process steps for the defects-per-step figure (104)"}}},
        {"field",
         "Gapless-plane electrostatics: potential and field scans, RF pseudopotential minima and secular frequencies",
         {{"geometry", "'reference', 'reference-rf', 'five-wire' or a geometry JSON file"},
          {"voltages", "voltage-set JSON (static electrode voltages)"},
          {"drive", "drive JSON with rf_amplitude_V / rf_frequency_MHz"},
          {"rf-amplitude", "RF amplitude in V (120)"},
          {"rf-frequency-MHz", "RF frequency in MHz (17)"},
          {"scan", "scan axis x, y or z (x)"},
          {"from", "scan start in um (-200)"},
          {"to", "scan end in um (200)"},
          {"points", "scan points (81)"},
          {"at", "scan origin x,y,z in um (default: ion axis)"},
          {"minima", "locate RF minima and secular frequencies instead of scanning", true}}},
        {"strayfield",
         "Stray field from compensation voltages (applied vs simulated) and the resulting micromotion index",
         {{"geometry", "'reference', 'reference-rf', 'five-wire' or a geometry JSON file"},
          {"applied", "applied voltage-set JSON"},
          {"simulated", "simulated voltage-set JSON"},
          {"point", "ion position x,y,z in um (default: ion axis at x = 0)"},
          {"radial-MHz", "radial secular frequency in MHz (2.6)"},
          {"rf-frequency-MHz", "RF frequency in MHz (17)"},
          {"wavelength-nm", "probe wavelength for the k projection in nm (729)"}}},
        {"diagnose",
         "Fault scenarios (shorted, floating, trapped charge): equilibrium position versus confinement and classification",
         {{"geometry", "'reference' or a geometry JSON file"},
          {"voltages", "nominal DC voltage-set JSON"},
          {"scenario", "scenario JSON"},
          {"scales", "comma separated voltage scales (1,2,4)"},
          {"from", "search start along the axis in um (-150)"},
          {"to", "search end along the axis in um (150)"},
          {"measurements", "measured positions CSV (site,scale,position_um)"},
          {"nominal", "nominal positions CSV (site,nominal_um)"},
          {"tolerance-um", "position tolerance in um (0.5)"},
          {"center-um", "trap centre along the axis in um (0)"}}},
        {"thermo",
         "Meander resistance thermometry: Bloch-Grueneisen fits, sensitivity and temperature inversion",
         {{"samples", "calibration CSV (T_K,R_ohm) to fit"},
          {"model", "R(T) model JSON"},
          {"sensor", "calibrated reference sensor TS1 or TS2"},
          {"resistance", "measured resistance in Ohm to invert"},
          {"resolution", "meter resolution in Ohm (1)"},
          {"window", "sensitivity window lo,hi in K (10,15)"}}},
        {"heating",
         "Ion heating rates: sideband thermometry, heating-rate line fits and power-law fits versus axial frequency",
         {{"points", "heating-rate CSV (site,frequency_MHz,rate_quanta_per_s,sigma)"},
          {"site", "restrict the power-law fit to one site"},
          {"nbar", "nbar-versus-wait CSV (wait_time_ms,nbar,sigma)"},
          {"sideband", "red,blue,shots for a single sideband measurement"},
          {"bootstrap", "bootstrap draws for the sideband uncertainty"}}},
        {"validate",
         "Schema and invariant checks of configuration files without running them",
         {}},
    };
    return defs;
}

// --- option access -------------------------------------------------------

std::string opt(const CommandSpec& s, const std::string& name, const std::string& fallback = {}) {
    auto it = s.options.find(name);
    return it == s.options.end() ? fallback : it->second;
}

bool has(const CommandSpec& s, const std::string& name) { return s.options.contains(name); }

double parse_number(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + text + "'", "--" + what);
    }
}

double num(const CommandSpec& s, const std::string& name, double fallback) {
    return has(s, name) ? parse_number(opt(s, name), name) : fallback;
}

std::vector<double> num_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(item, what));
    return out;
}

Vec3 point_um(const std::string& text, const std::string& what) {
    const auto v = num_list(text, what);
    if (v.size() != 3) throw ConfigError("expected x,y,z in um", "--" + what);
    return Vec3(v[0], v[1], v[2]) * units::um;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Rounds values that would print as "-0.0000" at 4 decimals.
double tidy(double v) { return std::abs(v) < 5e-5 ? 0.0 : v; }

void emit(const CommandSpec& s, const std::string& content, std::ostream& out) {
    if (s.out.empty()) {
        out << content;
    } else {
        io::write_file_atomic(s.out, content);
    }
}

void emit_to(const std::string& path, const std::string& content) { io::write_file_atomic(path, content); }

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// --- loaders -------------------------------------------------------------

// Built-in names also accept their older aliases (paper, paper-rf, table2).
TrapGeometry load_geometry(const std::string& name) {
    if (name == "reference" || name == "paper") return reference_trap_geometry();
    if (name == "reference-rf" || name == "paper-rf") return reference_rf_geometry();
    if (name == "five-wire") {
        TrapGeometry g = five_wire_geometry();
        g.axis_z = 100e-6;
        return g;
    }
    return io::geometry_from_json(io::read_json_file(name));
}

ChipNetlist load_netlist(const std::string& name) {
    if (name.empty() || name == "default") return default_netlist();
    return io::netlist_from_json(io::read_json_file(name));
}

FaultSet load_faults(const std::string& name) {
    if (name.empty() || name == "none") return {};
    return io::faults_from_json(io::read_json_file(name));
}

TestLimits load_limits(const std::string& name) {
    if (name.empty() || name == "default" || name == "table2") return default_limits();
    TestLimits l = io::limits_from_json(io::read_json_file(name));
    validate(l);
    return l;
}

std::vector<PlantRule> plant_rules_from_json(const Json& j) {
    if (!j.contains("rules") || !j["rules"].is_array()) throw ConfigError("expected an array", "/rules");
    std::vector<PlantRule> out;
    for (std::size_t i = 0; i < j["rules"].size(); ++i) {
        const Json& r = j["rules"][i];
        const std::string ptr = "/rules/" + std::to_string(i);
        try {
            PlantRule rule;
            rule.code = parse_failure_code(r.at("code").get<std::string>());
            rule.count = r.at("count").get<int>();
            const std::string where = r.value("where", std::string("anywhere"));
            if (where == "anywhere") {
                rule.where = PlantRule::Where::Anywhere;
            } else if (where == "cell") {
                rule.where = PlantRule::Where::Cell;
                rule.cell = {r.at("cell").at(0).get<int>(), r.at("cell").at(1).get<int>()};
            } else if (where == "edge") {
                rule.where = PlantRule::Where::Edge;
                rule.annulus_fraction = r.value("annulus_fraction", 0.2);
            } else {
                throw ConfigError("unknown placement '" + where + "'", ptr + "/where");
            }
            out.push_back(rule);
        } catch (const Json::exception& e) {
            throw ConfigError(e.what(), ptr);
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(e.what(), ptr);
        }
    }
    return out;
}

// --- subcommands -----------------------------------------------------------

int cmd_dissipation(const CommandSpec& s, std::ostream& out) {
    const std::string src = opt(s, "presets", "reference");
    const std::vector<TrapPreset> presets =
        src == "reference" || src == "paper" ? reference_presets() : io::presets_from_json(io::read_json_file(src));
    const auto rows = dissipation_report(presets);
    std::string format = s.format;
    if (format.empty()) format = s.out.extension() == ".csv" ? "csv" : s.out.extension() == ".json" ? "json" : "text";
    if (format == "csv") {
        emit(s, format_table_csv(rows), out);
    } else if (format == "json") {
        Json arr = Json::array();
        for (const auto& r : rows) {
            arr.push_back({{"trap", r.trap},
                           {"temperature_K", r.temperature},
                           {"capacitance_pF", r.capacitance / units::pF},
                           {"resistance_ohm", r.resistance},
                           {"p_ohmic_mW", r.report.p_ohmic / units::mW},
                           {"p_diel_mW", r.report.p_diel / units::mW},
                           {"p_total_mW", r.report.p_total / units::mW},
                           {"p_exact_mW", r.report.p_exact / units::mW},
                           {"approximation_error", r.report.approximation_error},
                           {"crw", r.report.crw},
                           {"outside_validity", r.report.outside_validity}});
        }
        emit(s, dump({{"rows", arr}}), out);
    } else if (format == "text") {
        emit(s, format_table_text(rows), out);
    } else {
        throw ConfigError("dissipation supports text, csv and json", "--format");
    }
    return kOk;
}

int cmd_wafertest(const CommandSpec& s, std::ostream& out) {
    const ChipNetlist netlist = load_netlist(opt(s, "netlist"));
    const TestLimits limits = load_limits(opt(s, "limits"));
    const TestPlan plan = build_default_plan(netlist);

    if (has(s, "wafer")) {
        const LayoutParams params =
            has(s, "layout") ? io::layout_from_json(io::read_json_file(opt(s, "layout"))) : LayoutParams{};
        const WaferLayout layout = layout_wafer(params);
        const std::string plant = opt(s, "plant", "reference");
        std::vector<PlantRule> rules;
        if (plant == "reference") rules = reference_plant_rules();
        else if (plant != "none") rules = plant_rules_from_json(io::read_json_file(plant));
        const auto threads = static_cast<unsigned>(num(s, "threads", 0));
        const WaferResult result = simulate_wafer(layout, netlist, limits, rules, s.seed, threads);
        emit(s, dump(io::to_json(result)), out);
        return kOk;
    }

    if (has(s, "sweep")) {
        const auto catalog = single_fault_catalog(netlist, plan);
        int mismatches = 0, false_pass = 0;
        std::map<FailureCode, int> counts;
        for (const auto& entry : catalog) {
            const ChipResult r = run_chip(netlist, {entry.fault}, limits, plan);
            ++counts[r.outcome];
            if (r.outcome == FailureCode::Pass) ++false_pass;
            if (r.outcome != entry.expected) ++mismatches;
        }
        const ChipResult clean = run_chip(netlist, {}, limits, plan);
        Json j = {{"catalog_size", catalog.size()},
                  {"mismatches", mismatches},
                  {"false_pass", false_pass},
                  {"empty_fault_set", std::string(to_string(clean.outcome))}};
        Json hist = Json::object();
        for (const auto& [c, n] : counts) hist[std::string(to_string(c))] = n;
        j["outcomes"] = hist;
        emit(s, dump(j), out);
        return (mismatches == 0 && clean.outcome == FailureCode::Pass) ? kOk : kDomainError;
    }

    const FaultSet faults = load_faults(opt(s, "faults"));
    const ChipResult r = run_chip(netlist, faults, limits, plan);
    if (has(s, "log")) emit_to(opt(s, "log"), step_log_csv(r));
    if (s.format == "json") {
        Json j = io::to_json(r, false);
        j["plan_length"] = plan.size();
        emit(s, dump(j), out);
    } else {
        std::string text = fmt("outcome: %s\nsteps: %d/%zu\nelapsed_model: %.3f s\n",
                               std::string(to_string(r.outcome)).c_str(), r.steps_executed, plan.size(),
                               r.elapsed_model);
        if (r.outcome != FailureCode::Pass && !r.step_log.empty()) {
            const auto& last = r.step_log.back();
            text += fmt("failed step: %d %s %s\n", last.index, std::string(to_string(last.step.kind)).c_str(),
                        last.step.net.c_str());
        }
        emit(s, text, out);
    }
    return kOk;
}

Json periodicity_json(const PeriodicityReport& p) {
    Json cells = Json::array();
    for (const auto& c : p.cells) {
        cells.push_back({{"cell", {c.cell.row, c.cell.col}},
                         {"sites", c.sites},
                         {"failures", c.failures},
                         {"p_value", c.p_value},
                         {"p_adjusted", c.p_adjusted},
                         {"flagged", c.flagged}});
    }
    Json flagged = Json::array();
    for (const auto& c : p.flagged) flagged.push_back({c.row, c.col});
    return {{"code", std::string(to_string(p.code))},
            {"total_failures", p.total_failures},
            {"pooled_rate", p.pooled_rate},
            {"cells", cells},
            {"flagged", flagged}};
}

int cmd_yieldmap(const CommandSpec& s, std::ostream& out) {
    WaferResult result;
    if (has(s, "results")) {
        result = io::wafer_result_from_json(io::read_json_file(opt(s, "results")));
    } else {
        const LayoutParams params =
            has(s, "layout") ? io::layout_from_json(io::read_json_file(opt(s, "layout"))) : LayoutParams{};
        result.layout = layout_wafer(params);
    }
    const FailureCode per_code = parse_failure_code(opt(s, "periodicity-code", "LEAK_DC_GND"));
    const FailureCode edge_code = parse_failure_code(opt(s, "edge-code", "CONTINUITY_FAIL"));
    const double annulus = num(s, "annulus", 0.2);
    const int steps = static_cast<int>(num(s, "process-steps", 104));

    const YieldStats stats = yield_stats(result);
    const PeriodicityReport per = reticle_periodicity(result, per_code);

    Json j;
    j["total"] = stats.total;
    j["passes"] = stats.passes;
    j["yield_defined"] = stats.yield.has_value();
    j["yield"] = stats.yield ? Json(*stats.yield) : Json(nullptr);
    Json hist = Json::object();
    for (const auto& [c, n] : stats.failures) hist[std::string(to_string(c))] = n;
    j["failures"] = hist;
    if (stats.yield && *stats.yield > 0.0) {
        const double nd = infer_defects(*stats.yield, stats.total);
        j["defects"] = {{"N_d", nd}, {"process_steps", steps}, {"per_step", defects_per_step(nd, steps)}};
    } else {
        j["defects"] = nullptr;
    }
    j["periodicity"] = periodicity_json(per);
    try {
        const EdgeReport e = edge_concentration(result, edge_code, annulus);
        j["edge"] = {{"code", std::string(to_string(edge_code))},
                     {"annulus_fraction", annulus},
                     {"edge_sites", e.edge_sites},
                     {"edge_failures", e.edge_failures},
                     {"interior_sites", e.interior_sites},
                     {"interior_failures", e.interior_failures},
                     {"edge_rate", e.edge_rate},
                     {"interior_rate", e.interior_rate},
                     {"z", e.z},
                     {"p_value", e.p_value}};
    } catch (const DomainError& e) {
        j["edge"] = {{"code", std::string(to_string(edge_code))}, {"undefined", e.what()}};
    }

    RenderOptions ro;
    ro.starred_cells = per.flagged;
    ro.star_code = per_code;
    bool wrote = false;
    if (has(s, "map")) {
        emit_to(opt(s, "map"), render_svg(result, ro));
        wrote = true;
    }
    if (has(s, "csv")) {
        emit_to(opt(s, "csv"), render_csv(result));
        wrote = true;
    }
    if (has(s, "stats")) {
        emit_to(opt(s, "stats"), dump(j));
        wrote = true;
    }
    if (!wrote || !s.out.empty()) {
        if (s.format == "svg") emit(s, render_svg(result, ro), out);
        else if (s.format == "csv") emit(s, render_csv(result), out);
        else emit(s, dump(j), out);
    }
    return kOk;
}

DriveParams drive_for(const CommandSpec& s) {
    DriveParams d{num(s, "rf-amplitude", 120.0), units::angular(num(s, "rf-frequency-MHz", 17.0) * units::MHz)};
    if (has(s, "drive")) d = io::drive_from_json(io::read_json_file(opt(s, "drive")), d);
    validate(d);
    return d;
}

int cmd_field(const CommandSpec& s, std::ostream& out) {
    const TrapGeometry g = load_geometry(opt(s, "geometry", "reference-rf"));
    const DriveParams drive = drive_for(s);
    VoltageMap v;
    if (has(s, "voltages")) v = io::voltages_from_json(io::read_json_file(opt(s, "voltages")));
    Vec3 at(0.0, g.axis_y, g.axis_z);
    if (has(s, "at")) at = point_um(opt(s, "at"), "at");

    if (has(s, "minima")) {
        const IonSpecies ion = calcium40();
        SearchWindow w{at.x(), -300e-6, 300e-6, 40e-6, 300e-6};
        const auto minima = find_rf_minima(g, drive, ion, w);
        VoltageMap dc;
        for (const auto& [id, volts] : v) {
            if (g.electrode(id).role != ElectrodeRole::Rf) dc[id] = volts;
        }
        Json arr = Json::array();
        for (const auto& m : minima) {
            const SecularResult sec = secular_frequencies(g, drive, dc, ion, m.position);
            Json f = Json::array();
            for (double w_i : sec.frequencies) f.push_back(w_i / units::two_pi / units::MHz);
            arr.push_back({{"position_um", {m.position.x() / units::um, m.position.y() / units::um, m.position.z() / units::um}},
                           {"height_um", m.height / units::um},
                           {"depth_meV", m.depth / units::elementary_charge * 1e3},
                           {"secular_MHz", f},
                           {"unstable", sec.unstable}});
        }
        emit(s, dump({{"minima", arr}}), out);
        return kOk;
    }

    if (v.empty()) {
        for (const auto& e : g.electrodes) {
            if (e.role == ElectrodeRole::Rf) v[e.id] = drive.rf_amplitude;
        }
    }
    const std::string axis = opt(s, "scan", "x");
    const int k = axis == "x" ? 0 : axis == "y" ? 1 : axis == "z" ? 2 : -1;
    if (k < 0) throw ConfigError("scan axis must be x, y or z", "--scan");
    const double from = num(s, "from", -200.0) * units::um;
    const double to = num(s, "to", 200.0) * units::um;
    const int n = static_cast<int>(num(s, "points", 81));
    if (n < 2) throw ConfigError("need at least two points", "--points");
    std::string csv = "x_um,y_um,z_um,phi_V,Ex_V_per_m,Ey_V_per_m,Ez_V_per_m\n";
    for (int i = 0; i < n; ++i) {
        Vec3 p = at;
        p[k] = from + (to - from) * i / (n - 1);
        const FieldSample f = evaluate(g, v, p);
        csv += fmt("%.4f,%.4f,%.4f,%.9g,%.9g,%.9g,%.9g\n", p.x() / units::um, p.y() / units::um, p.z() / units::um,
                   f.potential, f.field.x(), f.field.y(), f.field.z());
    }
    emit(s, csv, out);
    return kOk;
}

int cmd_strayfield(const CommandSpec& s, std::ostream& out) {
    const TrapGeometry g = load_geometry(opt(s, "geometry", "reference"));
    if (!has(s, "applied") || !has(s, "simulated")) {
        throw ConfigError("strayfield needs --applied and --simulated", "--applied");
    }
    const VoltageMap applied = io::voltages_from_json(io::read_json_file(opt(s, "applied")));
    const VoltageMap simulated = io::voltages_from_json(io::read_json_file(opt(s, "simulated")));
    Vec3 p(0.0, g.axis_y, g.axis_z);
    if (has(s, "point")) p = point_um(opt(s, "point"), "point");
    const Vec3 e = stray_field(applied, simulated, g, p);
    const DriveParams drive{0.0, units::angular(num(s, "rf-frequency-MHz", 17.0) * units::MHz)};
    const double wr = units::angular(num(s, "radial-MHz", 2.6) * units::MHz);
    const double k = units::two_pi / (num(s, "wavelength-nm", 729.0) * units::nm);
    const double beta = micromotion_index(e.norm(), drive, calcium40(), wr, k);
    const Json j = {{"point_um", {p.x() / units::um, p.y() / units::um, p.z() / units::um}},
                    {"E_V_per_mm", {e.x() * 1e-3, e.y() * 1e-3, e.z() * 1e-3}},
                    {"magnitude_V_per_mm", e.norm() * 1e-3},
                    {"micromotion_beta", beta}};
    emit(s, dump(j), out);
    return kOk;
}

int cmd_diagnose(const CommandSpec& s, std::ostream& out) {
    if (has(s, "measurements")) {
        if (!has(s, "nominal")) throw ConfigError("classification needs --nominal", "--nominal");
        const auto m = io::measurements_from_csv(
            io::parse_csv(io::read_text_file(opt(s, "measurements")), opt(s, "measurements")));
        const auto nominal = io::nominal_positions_from_csv(
            io::parse_csv(io::read_text_file(opt(s, "nominal")), opt(s, "nominal")));
        ClassifyOptions co;
        co.tolerance = num(s, "tolerance-um", 0.5) * units::um;
        co.trap_center = num(s, "center-um", 0.0) * units::um;
        const FaultClassification c = classify_fault(m, nominal, co);
        Json sites = Json::array();
        for (const auto& site : c.sites) {
            Json offs = Json::array();
            for (double o : site.offsets) offs.push_back(o / units::um);
            sites.push_back({{"site", site.site},
                             {"class", std::string(to_string(site.fault_class))},
                             {"outward", site.outward},
                             {"offsets_um", offs}});
        }
        emit(s, dump({{"overall", std::string(to_string(c.overall))}, {"sites", sites}}), out);
        return kOk;
    }

    const TrapGeometry g = load_geometry(opt(s, "geometry", "reference"));
    if (!has(s, "voltages")) throw ConfigError("prediction needs --voltages", "--voltages");
    const VoltageMap v = io::voltages_from_json(io::read_json_file(opt(s, "voltages")));
    const FaultScenario scenario =
        has(s, "scenario") ? io::scenario_from_json(io::read_json_file(opt(s, "scenario"))) : FaultScenario::nominal();
    const auto scales = num_list(opt(s, "scales", "1,2,4"), "scales");
    const double lo = num(s, "from", -150.0) * units::um;
    const double hi = num(s, "to", 150.0) * units::um;
    std::string csv = "scale,nominal_um,scenario_um,offset_um,at_boundary\n";
    for (double sc : scales) {
        const Equilibrium nom = equilibrium_position(scenario_potential(g, v, FaultScenario::nominal(), sc), lo, hi);
        const Equilibrium pos = equilibrium_position(scenario_potential(g, v, scenario, sc), lo, hi);
        csv += fmt("%.6g,%.4f,%.4f,%.4f,%d\n", sc, tidy(nom.position / units::um), tidy(pos.position / units::um),
                   tidy((pos.position - nom.position) / units::um), (nom.at_boundary || pos.at_boundary) ? 1 : 0);
    }
    emit(s, csv, out);
    return kOk;
}

struct ReferenceSensor {
    SensorSpec spec;
    double cryo_std;  // Ohm at 10 K
    double slope;     // Ohm/K in 10-15 K
};

ReferenceSensor reference_sensor(const std::string& name) {
    if (name == "TS1") return {ts1_sensor(), 5.3, 1.0};
    if (name == "TS2") return {ts2_sensor(), 49.4, 2.5};
    throw ConfigError("unknown sensor '" + name + "' (TS1 or TS2)", "--sensor");
}

int cmd_thermo(const CommandSpec& s, std::ostream& out) {
    const auto window = num_list(opt(s, "window", "10,15"), "window");
    if (window.size() != 2) throw ConfigError("expected lo,hi", "--window");
    Json j;
    RTModel model;
    if (has(s, "samples")) {
        const auto samples =
            io::rt_samples_from_csv(io::parse_csv(io::read_text_file(opt(s, "samples")), opt(s, "samples")));
        const RTFit fit = fit_rt_curve(samples);
        model = fit.model;
        j["fit"] = {{"rms_residual_ohm", fit.rms_residual}, {"iterations", fit.iterations}, {"samples", samples.size()}};
    } else if (has(s, "model")) {
        model = io::rt_model_from_json(io::read_json_file(opt(s, "model")));
    } else {
        const ReferenceSensor ref = reference_sensor(opt(s, "sensor", "TS2"));
        // Cryogenic mean implied by projecting the room-temperature spread onto the 10 K spread.
        const double r10 = ref.cryo_std / ref.spec.room_temp_std * ref.spec.room_temp_mean;
        model = calibrate_rt_model(ref.spec.room_temp_mean, r10, ref.slope);
        j["sensor"] = {{"name", ref.spec.name},
                       {"room_mean_ohm", ref.spec.room_temp_mean},
                       {"room_std_ohm", ref.spec.room_temp_std},
                       {"cryo_mean_ohm", r10},
                       {"cryo_std_projection_ohm",
                        wafer_spread_projection(ref.spec.room_temp_std, ref.spec.room_temp_mean, r10)}};
    }
    j["model"] = io::to_json(model);
    j["sensitivity_ohm_per_K"] = sensitivity(model, window[0], window[1]);
    j["window_K"] = window;
    if (has(s, "resistance")) {
        const TemperatureEstimate t =
            invert_temperature(model, num(s, "resistance", 0.0), num(s, "resolution", 1.0));
        j["temperature_K"] = t.temperature;
        j["temperature_sigma_K"] = t.sigma;
    }
    emit(s, dump(j), out);
    return kOk;
}

int cmd_heating(const CommandSpec& s, std::ostream& out) {
    Json j = Json::object();
    if (has(s, "points")) {
        auto pts = io::heating_points_from_csv(io::parse_csv(io::read_text_file(opt(s, "points")), opt(s, "points")));
        if (has(s, "site")) {
            const std::string site = opt(s, "site");
            std::erase_if(pts, [&](const HeatingPoint& p) { return p.site != site; });
            if (pts.empty()) throw LookupError("no points for site '" + site + "'");
        }
        const PowerLawFit f = power_law_fit(pts);
        j["power_law"] = {{"alpha", f.alpha},
                          {"alpha_sigma", f.alpha_sigma},
                          {"alpha_sigma_scaled", f.alpha_sigma_scaled},
                          {"amplitude_at_1MHz", f.amplitude * std::pow(units::angular(units::MHz), -f.alpha)},
                          {"chi2", f.chi2},
                          {"dof", f.dof},
                          {"points", f.points}};
    }
    if (has(s, "nbar")) {
        const auto pts = io::nbar_points_from_csv(io::parse_csv(io::read_text_file(opt(s, "nbar")), opt(s, "nbar")));
        const LineFit f = heating_rate_fit(pts);
        j["heating_rate"] = {{"rate_quanta_per_s", f.slope},
                             {"rate_sigma", f.slope_sigma},
                             {"intercept", f.intercept},
                             {"intercept_sigma", f.intercept_sigma},
                             {"covariance", f.covariance},
                             {"chi2", f.chi2},
                             {"dof", f.dof}};
    }
    if (has(s, "sideband")) {
        const auto v = num_list(opt(s, "sideband"), "sideband");
        if (v.size() != 3) throw ConfigError("expected red,blue,shots", "--sideband");
        const SidebandMeasurement m{v[0], v[1], static_cast<int>(v[2]), 0.0};
        const NbarEstimate e = has(s, "bootstrap") ? nbar_bootstrap(m, static_cast<int>(num(s, "bootstrap", 0)), s.seed)
                                                   : nbar_from_sidebands(m);
        j["sideband"] = {{"nbar", e.nbar}, {"sigma", e.sigma}, {"method", has(s, "bootstrap") ? "bootstrap" : "first-order"}};
    }
    if (j.empty()) throw ConfigError("heating needs --points, --nbar or --sideband", "--points");
    emit(s, dump(j), out);
    return kOk;
}

int cmd_validate(const CommandSpec& s, std::ostream& out) {
    std::vector<std::filesystem::path> paths;
    std::stringstream ss(opt(s, "paths"));
    std::string p;
    while (std::getline(ss, p, '\n')) {
        if (!p.empty()) paths.emplace_back(p);
    }
    const auto findings = validate_config(paths);
    std::string text;
    for (const auto& f : findings) text += f + "\n";
    text += fmt("%zu finding(s) in %zu file(s)\n", findings.size(), paths.size());
    emit(s, text, out);
    return findings.empty() ? kOk : kConfigError;
}

}  // namespace

int parse_command_line(const std::vector<std::string>& args, CommandSpec& spec, std::ostream& out,
                       std::ostream& err) {
    CLI::App app{"Fabrication QA and characterization toolkit for surface-electrode ion traps", "trapqa"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string out_path, format;
    std::uint64_t seed = kDefaultSeed;
    app.add_option("-o,--out", out_path, "output file (written atomically); stdout when absent");
    app.add_option("-f,--format", format, "text, csv, json or svg");
    app.add_option("--seed", seed, "seed for every random draw")->capture_default_str();

    std::map<std::string, std::string> values;
    std::map<std::string, bool> flags;
    std::vector<std::string> validate_paths;
    std::vector<std::pair<CLI::App*, const SubcommandDef*>> subs;
    for (const auto& def : subcommands()) {
        CLI::App* sub = app.add_subcommand(def.name, def.help);
        for (const auto& o : def.options) {
            const std::string key = std::string(def.name) + ":" + o.name;
            if (o.flag) sub->add_flag(std::string("--") + o.name, flags[key], o.help);
            else sub->add_option(std::string("--") + o.name, values[key], o.help);
        }
        if (std::string(def.name) == "validate") {
            sub->add_option("paths", validate_paths, "configuration files")->required();
        }
        subs.emplace_back(sub, &def);
    }

    std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? -1 : kConfigError;  // -1: help printed, nothing to run
    }

    spec = CommandSpec{};
    spec.out = out_path;
    spec.format = format;
    spec.seed = seed;
    for (const auto& [sub, def] : subs) {
        if (!sub->parsed()) continue;
        spec.subcommand = def->name;
        for (const auto& o : def->options) {
            const std::string key = std::string(def->name) + ":" + o.name;
            if (sub->count(std::string("--") + o.name) == 0) continue;
            spec.options[o.name] = o.flag ? "true" : values[key];
        }
        if (spec.subcommand == "validate") {
            std::string joined;
            for (const auto& p : validate_paths) joined += p + "\n";
            spec.options["paths"] = joined;
        }
    }
    return kOk;
}

int execute(const CommandSpec& spec, std::ostream& out, std::ostream& err) {
    try {
        if (spec.subcommand == "dissipation") return cmd_dissipation(spec, out);
        if (spec.subcommand == "wafertest") return cmd_wafertest(spec, out);
        if (spec.subcommand == "yieldmap") return cmd_yieldmap(spec, out);
        if (spec.subcommand == "field") return cmd_field(spec, out);
        if (spec.subcommand == "strayfield") return cmd_strayfield(spec, out);
        if (spec.subcommand == "diagnose") return cmd_diagnose(spec, out);
        if (spec.subcommand == "thermo") return cmd_thermo(spec, out);
        if (spec.subcommand == "heating") return cmd_heating(spec, out);
        if (spec.subcommand == "validate") return cmd_validate(spec, out);
        err << "error: unknown subcommand '" << spec.subcommand << "'\n";
        return kConfigError;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const LookupError& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kDomainError;
    } catch (const nlohmann::json::exception& e) {
        err << "config error: " << e.what() << "\n";
        return kConfigError;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CommandSpec spec;
    const int rc = parse_command_line(args, spec, out, err);
    if (rc == -1) return kOk;
    if (rc != kOk) return rc;
    return execute(spec, out, err);
}

std::vector<std::string> validate_config(const std::vector<std::filesystem::path>& paths) {
    std::vector<std::string> findings;
    for (const auto& path : paths) {
        const std::string name = path.string();
        auto add = [&](const std::string& msg) { findings.push_back(name + ": " + msg); };
        try {
            if (path.extension() == ".csv") {
                const io::CsvTable t = io::parse_csv(io::read_text_file(path), name);
                auto has_col = [&](const char* c) { return std::find(t.header.begin(), t.header.end(), c) != t.header.end(); };
                if (has_col("T_K")) io::rt_samples_from_csv(t);
                else if (has_col("frequency_MHz")) io::heating_points_from_csv(t);
                else if (has_col("wait_time_ms")) io::nbar_points_from_csv(t);
                else if (has_col("position_um")) io::measurements_from_csv(t);
                else if (has_col("nominal_um")) io::nominal_positions_from_csv(t);
                else add("header: unrecognised CSV columns");
                continue;
            }
            const Json j = io::read_json_file(path);
            if (!j.is_object()) {
                add(": expected a JSON object");
                continue;
            }
            if (j.contains("nets")) {
                io::netlist_from_json(j);
            } else if (j.contains("faults")) {
                // Net references are checked against the default netlist.
                validate(io::faults_from_json(j), default_netlist());
            } else if (j.contains("continuity")) {
                for (const auto& f : limit_findings(io::limits_from_json(j))) add("/" + f);
            } else if (j.contains("presets")) {
                io::presets_from_json(j);
            } else if (j.contains("electrodes")) {
                io::geometry_from_json(j);
            } else if (j.contains("voltages_V")) {
                io::voltages_from_json(j);
            } else if (j.contains("resistivity")) {
                io::material_from_json(j);
            } else if (j.contains("results")) {
                io::wafer_result_from_json(j);
            } else if (j.contains("rules")) {
                plant_rules_from_json(j);
            } else if (j.contains("residual_ohm")) {
                io::rt_model_from_json(j);
            } else if (j.contains("kind")) {
                io::scenario_from_json(j);
            } else if (j.contains("wafer_diameter_mm") || j.contains("chip_pitch_mm")) {
                layout_wafer(io::layout_from_json(j));
            } else if (j.contains("rf_amplitude_V") || j.contains("rf_frequency_MHz")) {
                io::drive_from_json(j, DriveParams{0.0, 1.0});
            } else {
                add(": unrecognised configuration file");
            }
        } catch (const ConfigError& e) {
            if (e.pointer() == name) add(e.what() + e.pointer().size() + 2);
            else add(e.what());
        } catch (const Error& e) {
            add(e.what());
        } catch (const nlohmann::json::exception& e) {
            add(e.what());
        }
    }
    return findings;
}

}  // namespace trapqa::cli
