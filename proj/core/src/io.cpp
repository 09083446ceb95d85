#include "trapqa/io.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include "trapqa/errors.hpp"
#include "trapqa/units.hpp"

namespace trapqa::io {

namespace {

// Typed access to a JSON object with pointer-carrying errors.
class Node {
public:
    Node(const Json& j, std::string ptr) : j_(j), ptr_(std::move(ptr)) {}

    const Json& json() const { return j_; }
    const std::string& ptr() const { return ptr_; }
    std::string at(std::string_view key) const { return ptr_ + "/" + std::string(key); }

    bool has(std::string_view key) const { return j_.is_object() && j_.contains(key); }

    Node child(std::string_view key) const {
        require_object();
        auto it = j_.find(key);
        if (it == j_.end()) throw ConfigError("missing required key", at(key));
        return {*it, at(key)};
    }

    double num(std::string_view key) const {
        const Node c = child(key);
        if (!c.j_.is_number()) throw ConfigError("expected a number", c.ptr_);
        return c.j_.get<double>();
    }
    double num(std::string_view key, double fallback) const { return has(key) ? num(key) : fallback; }

    int integer(std::string_view key) const {
        const Node c = child(key);
        if (!c.j_.is_number_integer()) throw ConfigError("expected an integer", c.ptr_);
        return c.j_.get<int>();
    }
    int integer(std::string_view key, int fallback) const { return has(key) ? integer(key) : fallback; }

    std::string str(std::string_view key) const {
        const Node c = child(key);
        if (!c.j_.is_string()) throw ConfigError("expected a string", c.ptr_);
        return c.j_.get<std::string>();
    }
    std::string str(std::string_view key, std::string fallback) const {
        return has(key) ? str(key) : std::move(fallback);
    }

    bool boolean(std::string_view key, bool fallback) const {
        if (!has(key)) return fallback;
        const Node c = child(key);
        if (!c.j_.is_boolean()) throw ConfigError("expected true or false", c.ptr_);
        return c.j_.get<bool>();
    }

    std::vector<Node> array(std::string_view key) const {
        const Node c = child(key);
        return c.elements();
    }

    std::vector<Node> elements() const {
        if (!j_.is_array()) throw ConfigError("expected an array", ptr_);
        std::vector<Node> out;
        for (std::size_t i = 0; i < j_.size(); ++i) out.emplace_back(j_[i], ptr_ + "/" + std::to_string(i));
        return out;
    }

    double as_num() const {
        if (!j_.is_number()) throw ConfigError("expected a number", ptr_);
        return j_.get<double>();
    }

    std::vector<double> numbers(std::size_t expected) const {
        const auto e = elements();
        if (e.size() != expected) {
            throw ConfigError("expected " + std::to_string(expected) + " numbers", ptr_);
        }
        std::vector<double> out;
        for (const auto& n : e) out.push_back(n.as_num());
        return out;
    }

    void require_object() const {
        if (!j_.is_object()) throw ConfigError("expected an object", ptr_);
    }

private:
    const Json& j_;
    std::string ptr_;
};

Window window_from(const Node& n, std::string_view key, double scale) {
    const auto v = n.child(key).numbers(2);
    return {v[0] * scale, v[1] * scale};
}

Json window_to(const Window& w, double scale) { return Json::array({w.lo / scale, w.hi / scale}); }

// Converts library exceptions raised while building a value into ConfigError at `ptr`.
template <typename F>
auto at_pointer(const std::string& ptr, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ConfigError& e) {
        if (!e.pointer().empty()) throw;
        throw ConfigError(e.what(), ptr);
    } catch (const Error& e) {
        throw ConfigError(e.what(), ptr);
    }
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open file", path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json read_json_file(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what(), path.string());
    }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write file", tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw ConfigError("write failed", tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw ConfigError("cannot move output into place", path.string());
    }
}

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw ConfigError("missing column '" + std::string(name) + "'", source + ":header");
}

double CsvTable::number(std::size_t row, std::size_t col) const {
    const std::string where = source + ":" + std::to_string(lines[row]);
    if (col >= rows[row].size()) throw ConfigError("missing field " + std::to_string(col + 1), where);
    const std::string& s = rows[row][col];
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
        throw ConfigError("not a number: '" + s + "'", where);
    }
    return v;
}

CsvTable parse_csv(std::string_view text, std::string source) {
    CsvTable t;
    t.source = std::move(source);
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return std::string(s);
    };
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        const std::string trimmed = trim(line);
        if (trimmed.empty() || trimmed.front() == '#') {
            if (end == text.size()) break;
            continue;
        }
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = trimmed.find(',', start);
            fields.push_back(trim(std::string_view(trimmed).substr(start, comma - start)));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (t.header.empty()) {
            t.header = std::move(fields);
        } else {
            t.rows.push_back(std::move(fields));
            t.lines.push_back(line_no);
        }
        if (end == text.size()) break;
    }
    if (t.header.empty()) throw ConfigError("CSV has no header", t.source);
    return t;
}

Material material_from_json(const Json& j) {
    const Node n(j, "");
    Material m;
    m.name = n.str("name");
    m.tan_delta = n.num("tan_delta");
    for (const auto& e : n.array("resistivity")) {
        const auto v = e.numbers(2);
        m.resistivity_by_temperature.emplace_back(v[0], v[1]);
    }
    at_pointer("/resistivity", [&] {
        validate(m);
        return 0;
    });
    return m;
}

Json to_json(const Material& m) {
    Json rho = Json::array();
    for (const auto& [t, r] : m.resistivity_by_temperature) rho.push_back({t, r});
    return {{"name", m.name}, {"tan_delta", m.tan_delta}, {"resistivity", rho}};
}

std::vector<TrapPreset> presets_from_json(const Json& j) {
    const Node root(j, "");
    std::vector<TrapPreset> out;
    for (const auto& n : root.array("presets")) {
        TrapPreset p;
        p.name = n.str("name");
        p.capacitance = n.num("capacitance_pF") * units::pF;
        p.tan_delta = n.num("tan_delta");
        p.drive.rf_amplitude = n.num("rf_amplitude_V");
        p.drive.rf_angular_frequency = units::angular(n.num("rf_frequency_MHz") * units::MHz);
        for (const auto& e : n.array("resistance_ohm")) {
            const auto v = e.numbers(2);
            p.resistance_by_temperature.emplace_back(v[0], v[1]);
        }
        at_pointer(n.ptr(), [&] {
            validate(CircuitModel{p.capacitance, 0.0, p.tan_delta});
            validate(p.drive);
            return 0;
        });
        for (std::size_t i = 0; i < p.resistance_by_temperature.size(); ++i) {
            if (!(p.resistance_by_temperature[i].second >= 0.0)) {
                throw ConfigError("resistance must be nonnegative", n.at("resistance_ohm") + "/" + std::to_string(i));
            }
        }
        out.push_back(std::move(p));
    }
    return out;
}

Json presets_to_json(std::span<const TrapPreset> presets) {
    Json arr = Json::array();
    for (const auto& p : presets) {
        Json r = Json::array();
        for (const auto& [t, ohm] : p.resistance_by_temperature) r.push_back({t, ohm});
        arr.push_back({{"name", p.name},
                       {"capacitance_pF", p.capacitance / units::pF},
                       {"tan_delta", p.tan_delta},
                       {"rf_amplitude_V", p.drive.rf_amplitude},
                       {"rf_frequency_MHz", p.drive.rf_angular_frequency / units::two_pi / units::MHz},
                       {"resistance_ohm", r}});
    }
    return {{"presets", arr}};
}

TrapGeometry geometry_from_json(const Json& j) {
    const Node root(j, "");
    TrapGeometry g;
    g.axis_y = root.num("axis_y_um") * units::um;
    g.axis_z = root.num("axis_z_um") * units::um;
    for (const auto& e : root.array("electrodes")) {
        ElectrodeShape s;
        s.id = e.str("id");
        s.role = at_pointer(e.at("role"), [&] { return parse_electrode_role(e.str("role")); });
        for (const auto& r : e.array("rects_um")) {
            const auto v = r.numbers(4);
            s.rects.push_back({v[0] * units::um, v[1] * units::um, v[2] * units::um, v[3] * units::um});
        }
        g.electrodes.push_back(std::move(s));
    }
    at_pointer("/electrodes", [&] {
        validate(g);
        return 0;
    });
    return g;
}

Json to_json(const TrapGeometry& g) {
    Json electrodes = Json::array();
    for (const auto& e : g.electrodes) {
        Json rects = Json::array();
        for (const auto& r : e.rects) {
            rects.push_back({r.x1 / units::um, r.x2 / units::um, r.y1 / units::um, r.y2 / units::um});
        }
        electrodes.push_back({{"id", e.id}, {"role", std::string(to_string(e.role))}, {"rects_um", rects}});
    }
    return {{"convention", "x along the trap axis, y in-plane radial, z surface normal; um"},
            {"axis_y_um", g.axis_y / units::um},
            {"axis_z_um", g.axis_z / units::um},
            {"electrodes", electrodes}};
}

VoltageMap voltages_from_json(const Json& j) {
    const Node root(j, "");
    const Node v = root.child("voltages_V");
    v.require_object();
    VoltageMap out;
    for (const auto& [id, val] : v.json().items()) {
        if (!val.is_number()) throw ConfigError("expected a number", v.at(id));
        out[id] = val.get<double>();
    }
    return out;
}

Json voltages_to_json(const VoltageMap& v) {
    Json m = Json::object();
    for (const auto& [id, val] : v) m[id] = val;
    return {{"voltages_V", m}};
}

DriveParams drive_from_json(const Json& j, const DriveParams& fallback) {
    const Node n(j, "");
    DriveParams d = fallback;
    if (n.has("rf_amplitude_V")) d.rf_amplitude = n.num("rf_amplitude_V");
    if (n.has("rf_frequency_MHz")) d.rf_angular_frequency = units::angular(n.num("rf_frequency_MHz") * units::MHz);
    at_pointer("", [&] {
        validate(d);
        return 0;
    });
    return d;
}

ChipNetlist netlist_from_json(const Json& j) {
    const Node root(j, "");
    ChipNetlist nl;
    for (const auto& n : root.array("nets")) {
        Net net;
        net.id = n.str("id");
        net.role = at_pointer(n.at("role"), [&] { return parse_net_role(n.str("role")); });
        if (n.has("pads")) {
            const auto pads = n.array("pads");
            if (pads.size() != 2) throw ConfigError("expected two pads", n.at("pads"));
            for (const auto& p : pads) {
                if (!p.json().is_string()) throw ConfigError("expected a string", p.ptr());
            }
            net.pad_a = pads[0].json().get<std::string>();
            net.pad_b = pads[1].json().get<std::string>();
        }
        net.nominal_loop_resistance = n.num("loop_resistance_ohm", 0.0);
        net.nominal_isolation = n.num("isolation_ohm", std::numeric_limits<double>::infinity());
        nl.nets.push_back(std::move(net));
    }
    validate(nl);
    return nl;
}

Json to_json(const ChipNetlist& nl) {
    Json nets = Json::array();
    for (const auto& n : nl.nets) {
        Json e = {{"id", n.id}, {"role", std::string(to_string(n.role))}};
        if (n.has_loop()) {
            e["pads"] = {n.pad_a, n.pad_b};
            e["loop_resistance_ohm"] = n.nominal_loop_resistance;
        }
        if (std::isfinite(n.nominal_isolation)) e["isolation_ohm"] = n.nominal_isolation;
        nets.push_back(e);
    }
    return {{"nets", nets}};
}

FaultSet faults_from_json(const Json& j) {
    const Node root(j, "");
    FaultSet out;
    for (const auto& n : root.array("faults")) {
        Fault f;
        f.kind = at_pointer(n.at("kind"), [&] { return parse_fault_kind(n.str("kind")); });
        f.net = n.str("net", "");
        f.other_net = n.str("other_net", "");
        f.resistance = n.num("resistance_ohm", 0.0);
        f.factor = n.num("factor", 1.0);
        f.step_index = n.integer("step", -1);
        f.from_pass = n.integer("from_pass", 1);
        out.push_back(std::move(f));
    }
    return out;
}

Json faults_to_json(const FaultSet& faults) {
    Json arr = Json::array();
    for (const auto& f : faults) {
        Json e = {{"kind", std::string(to_string(f.kind))}};
        switch (f.kind) {
            case Fault::Kind::Short:
                e["other_net"] = f.other_net;
                [[fallthrough]];
            case Fault::Kind::LeakToGnd:
                e["net"] = f.net;
                e["resistance_ohm"] = f.resistance;
                e["from_pass"] = f.from_pass;
                break;
            case Fault::Kind::Open: e["net"] = f.net; break;
            case Fault::Kind::ResistanceShift:
                e["net"] = f.net;
                e["factor"] = f.factor;
                break;
            case Fault::Kind::HwFail: e["step"] = f.step_index; break;
        }
        arr.push_back(e);
    }
    return {{"faults", arr}};
}

TestLimits limits_from_json(const Json& j) {
    const Node root(j, "");
    TestLimits l;
    auto continuity = [&](const Node& n, ContinuityLimits& c) {
        c.force_current = n.num("force_mA") * units::mA;
        c.voltage = window_from(n, "voltage_mV", units::mV);
        c.current = window_from(n, "current_mA", units::mA);
    };
    auto leakage = [&](const Node& n, LeakageLimits& c) {
        c.force_voltage = n.num("force_V");
        c.current_max = n.num("current_max_nA") * units::nA;
        c.voltage = window_from(n, "voltage_mV", units::mV);
    };
    continuity(root.child("continuity"), l.continuity);
    if (root.has("sensor_continuity")) continuity(root.child("sensor_continuity"), l.sensor_continuity);
    leakage(root.child("leakage_dc"), l.leakage_dc);
    leakage(root.child("leakage_rf"), l.leakage_rf);
    const Node r = root.child("resistance");
    l.resistance.force_voltage = r.num("force_mV") * units::mV;
    l.resistance.dc = window_from(r, "dc_ohm", 1.0);
    l.resistance.rf = window_from(r, "rf_ohm", 1.0);
    l.resistance.ts1 = window_from(r, "ts1_kohm", units::kOhm);
    l.resistance.ts2 = window_from(r, "ts2_kohm", units::kOhm);
    l.resistance.swap_sensor_bands = r.boolean("swap_sensor_bands", true);
    l.compliance_voltage = root.num("compliance_V", l.compliance_voltage);
    l.step_time = root.num("step_time_ms", l.step_time * 1e3) * 1e-3;
    l.leakage_noise_sigma = root.num("leakage_noise_nA", 0.0) * units::nA;
    return l;
}

Json to_json(const TestLimits& l) {
    auto continuity = [](const ContinuityLimits& c) {
        return Json{{"force_mA", c.force_current / units::mA},
                    {"voltage_mV", window_to(c.voltage, units::mV)},
                    {"current_mA", window_to(c.current, units::mA)}};
    };
    auto leakage = [](const LeakageLimits& c) {
        return Json{{"force_V", c.force_voltage},
                    {"current_max_nA", c.current_max / units::nA},
                    {"voltage_mV", window_to(c.voltage, units::mV)}};
    };
    return {{"continuity", continuity(l.continuity)},
            {"sensor_continuity", continuity(l.sensor_continuity)},
            {"leakage_dc", leakage(l.leakage_dc)},
            {"leakage_rf", leakage(l.leakage_rf)},
            {"resistance",
             {{"force_mV", l.resistance.force_voltage / units::mV},
              {"dc_ohm", window_to(l.resistance.dc, 1.0)},
              {"rf_ohm", window_to(l.resistance.rf, 1.0)},
              {"ts1_kohm", window_to(l.resistance.ts1, units::kOhm)},
              {"ts2_kohm", window_to(l.resistance.ts2, units::kOhm)},
              {"swap_sensor_bands", l.resistance.swap_sensor_bands}}},
            {"compliance_V", l.compliance_voltage},
            {"step_time_ms", l.step_time * 1e3},
            {"leakage_noise_nA", l.leakage_noise_sigma / units::nA}};
}

LayoutParams layout_from_json(const Json& j) {
    const Node n(j, "");
    LayoutParams p;
    p.wafer_diameter = n.num("wafer_diameter_mm", p.wafer_diameter / units::mm) * units::mm;
    p.edge_exclusion = n.num("edge_exclusion_mm", p.edge_exclusion / units::mm) * units::mm;
    if (n.has("chip_pitch_mm")) {
        const auto v = n.child("chip_pitch_mm").numbers(2);
        p.chip_width = v[0] * units::mm;
        p.chip_height = v[1] * units::mm;
    }
    if (n.has("shot_offset_mm")) {
        const auto v = n.child("shot_offset_mm").numbers(2);
        p.shot_offset_x = v[0] * units::mm;
        p.shot_offset_y = v[1] * units::mm;
    }
    if (n.has("test_cells")) {
        p.test_cells.clear();
        for (const auto& c : n.array("test_cells")) {
            const auto v = c.numbers(2);
            p.test_cells.push_back({static_cast<int>(v[0]), static_cast<int>(v[1])});
        }
    }
    return p;
}

Json to_json(const LayoutParams& p) {
    Json cells = Json::array();
    for (const auto& c : p.test_cells) cells.push_back({c.row, c.col});
    return {{"wafer_diameter_mm", p.wafer_diameter / units::mm},
            {"edge_exclusion_mm", p.edge_exclusion / units::mm},
            {"chip_pitch_mm", {p.chip_width / units::mm, p.chip_height / units::mm}},
            {"shot_offset_mm", {p.shot_offset_x / units::mm, p.shot_offset_y / units::mm}},
            {"test_cells", cells}};
}

Json to_json(const ChipResult& r, bool with_log) {
    Json j = {{"chip_id", r.chip_id},
              {"outcome", std::string(to_string(r.outcome))},
              {"steps_executed", r.steps_executed},
              {"elapsed_model_s", r.elapsed_model}};
    if (with_log) {
        Json log = Json::array();
        for (const auto& s : r.step_log) {
            log.push_back({{"index", s.index},
                           {"net", s.step.net},
                           {"kind", std::string(to_string(s.step.kind))},
                           {"pass", s.step.pass},
                           {"forced", s.measurement.forced},
                           {"measured_V", s.measurement.voltage},
                           {"measured_I", s.measurement.current},
                           {"verdict", s.passed ? "PASS" : std::string(to_string(s.measurement.code_if_failed))}});
        }
        j["step_log"] = log;
    }
    return j;
}

Json to_json(const WaferResult& r) {
    Json results = Json::array();
    for (const auto& c : r.results) results.push_back(to_json(c, false));
    return {{"layout", to_json(r.layout.params)},
            {"site_count", r.layout.sites.size()},
            {"results", results}};
}

WaferResult wafer_result_from_json(const Json& j) {
    const Node root(j, "");
    WaferResult w;
    w.layout = at_pointer("/layout", [&] { return layout_wafer(layout_from_json(root.child("layout").json())); });
    if (root.has("site_count") &&
        static_cast<std::size_t>(root.integer("site_count")) != w.layout.sites.size()) {
        throw ConfigError("layout produces " + std::to_string(w.layout.sites.size()) + " sites",
                          "/site_count");
    }
    for (const auto& n : root.array("results")) {
        ChipResult c;
        c.chip_id = n.integer("chip_id");
        c.outcome = at_pointer(n.at("outcome"), [&] { return parse_failure_code(n.str("outcome")); });
        c.steps_executed = n.integer("steps_executed", 0);
        c.elapsed_model = n.num("elapsed_model_s", 0.0);
        w.results.push_back(std::move(c));
    }
    validate(w);
    return w;
}

FaultScenario scenario_from_json(const Json& j) {
    const Node n(j, "");
    const std::string kind = n.str("kind");
    if (kind == "NOMINAL") return FaultScenario::nominal();
    if (kind == "SHORTED") return FaultScenario::shorted(n.str("electrode"));
    if (kind == "FLOATING") return FaultScenario::floating(n.str("electrode"), n.num("held_voltage_V"));
    if (kind == "GAP_CHARGE") {
        std::vector<Rect> regions;
        for (const auto& r : n.array("regions_um")) {
            const auto v = r.numbers(4);
            regions.push_back({v[0] * units::um, v[1] * units::um, v[2] * units::um, v[3] * units::um});
        }
        return FaultScenario::gap_charge(std::move(regions), n.num("effective_voltage_V"));
    }
    throw ConfigError("unknown scenario kind '" + kind + "'", "/kind");
}

RTModel rt_model_from_json(const Json& j) {
    const Node n(j, "");
    RTModel m{n.num("residual_ohm"), n.num("amplitude_ohm"), n.num("debye_K")};
    at_pointer("", [&] {
        validate(m);
        return 0;
    });
    return m;
}

Json to_json(const RTModel& m) {
    return {{"residual_ohm", m.residual_resistance}, {"amplitude_ohm", m.amplitude}, {"debye_K", m.debye_temperature}};
}

std::vector<RTSample> rt_samples_from_csv(const CsvTable& t) {
    const auto ct = t.column("T_K"), cr = t.column("R_ohm");
    std::vector<RTSample> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) out.push_back({t.number(i, ct), t.number(i, cr)});
    return out;
}

std::vector<HeatingPoint> heating_points_from_csv(const CsvTable& t) {
    const auto cs = t.column("site"), cf = t.column("frequency_MHz"), cr = t.column("rate_quanta_per_s"),
               ce = t.column("sigma");
    std::vector<HeatingPoint> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (cs >= t.rows[i].size()) throw ConfigError("missing site", t.source + ":" + std::to_string(t.lines[i]));
        out.push_back({t.rows[i][cs], units::angular(t.number(i, cf) * units::MHz), t.number(i, cr), t.number(i, ce)});
    }
    return out;
}

std::vector<NbarPoint> nbar_points_from_csv(const CsvTable& t) {
    const auto ct = t.column("wait_time_ms"), cn = t.column("nbar"), cs = t.column("sigma");
    std::vector<NbarPoint> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        out.push_back({t.number(i, ct) * 1e-3, t.number(i, cn), t.number(i, cs)});
    }
    return out;
}

std::vector<PositionMeasurement> measurements_from_csv(const CsvTable& t) {
    const auto cs = t.column("site"), cv = t.column("scale"), cp = t.column("position_um");
    std::size_t cf = t.header.size();
    for (std::size_t i = 0; i < t.header.size(); ++i) {
        if (t.header[i] == "nominal_axial_frequency_MHz") cf = i;
    }
    std::vector<PositionMeasurement> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (cs >= t.rows[i].size()) throw ConfigError("missing site", t.source + ":" + std::to_string(t.lines[i]));
        PositionMeasurement m;
        m.site = t.rows[i][cs];
        m.voltage_scale = t.number(i, cv);
        m.measured_position = t.number(i, cp) * units::um;
        if (cf < t.header.size()) m.nominal_axial_frequency = units::angular(t.number(i, cf) * units::MHz);
        out.push_back(std::move(m));
    }
    return out;
}

std::map<std::string, double> nominal_positions_from_csv(const CsvTable& t) {
    const auto cs = t.column("site"), cp = t.column("nominal_um");
    std::map<std::string, double> out;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        if (cs >= t.rows[i].size()) throw ConfigError("missing site", t.source + ":" + std::to_string(t.lines[i]));
        out[t.rows[i][cs]] = t.number(i, cp) * units::um;
    }
    return out;
}

}  // namespace trapqa::io
