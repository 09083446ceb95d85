#include "trapqa/wafertest.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <set>
#include <thread>

#include "trapqa/errors.hpp"
#include "trapqa/random.hpp"

namespace trapqa {

namespace {

template <typename E, std::size_t N>
E parse_enum(std::string_view text, const std::pair<E, std::string_view> (&table)[N],
             std::string_view what) {
    for (const auto& [e, name] : table) {
        if (name == text) return e;
    }
    throw ConfigError("unknown " + std::string(what) + " '" + std::string(text) + "'");
}

template <typename E, std::size_t N>
std::string_view enum_name(E e, const std::pair<E, std::string_view> (&table)[N]) {
    for (const auto& [v, name] : table) {
        if (v == e) return name;
    }
    return "?";
}

constexpr std::pair<NetRole, std::string_view> kRoles[] = {
    {NetRole::DcLoop, "DC_LOOP"}, {NetRole::Rf, "RF"}, {NetRole::Gnd, "GND"}, {NetRole::Sensor, "SENSOR"}};

constexpr std::pair<Fault::Kind, std::string_view> kFaultKinds[] = {
    {Fault::Kind::Open, "OPEN"},
    {Fault::Kind::Short, "SHORT"},
    {Fault::Kind::LeakToGnd, "LEAK_TO_GND"},
    {Fault::Kind::ResistanceShift, "RESISTANCE_SHIFT"},
    {Fault::Kind::HwFail, "HW_FAIL"}};

constexpr std::pair<TestKind, std::string_view> kTestKinds[] = {
    {TestKind::Continuity, "CONTINUITY"},
    {TestKind::LeakageDc, "LEAKAGE_DC"},
    {TestKind::LeakageRfSelf, "LEAKAGE_RF_SELF"},
    {TestKind::LeakageRfSense, "LEAKAGE_RF_SENSE"},
    {TestKind::Resistance, "RESISTANCE"}};

constexpr std::pair<FailureCode, std::string_view> kCodes[] = {
    {FailureCode::Pass, "PASS"},
    {FailureCode::HwFail, "HW_FAIL"},
    {FailureCode::ContinuityFail, "CONTINUITY_FAIL"},
    {FailureCode::LeakDcDc, "LEAK_DC_DC"},
    {FailureCode::LeakDcRf, "LEAK_DC_RF"},
    {FailureCode::LeakDcGnd, "LEAK_DC_GND"},
    {FailureCode::LeakRf, "LEAK_RF"},
    {FailureCode::ResFailDc, "RES_FAIL_DC"},
    {FailureCode::ResFailRf, "RES_FAIL_RF"},
    {FailureCode::ResFailTs, "RES_FAIL_TS"}};

}  // namespace

std::string_view to_string(NetRole role) { return enum_name(role, kRoles); }
NetRole parse_net_role(std::string_view text) { return parse_enum(text, kRoles, "net role"); }
std::string_view to_string(Fault::Kind kind) { return enum_name(kind, kFaultKinds); }
Fault::Kind parse_fault_kind(std::string_view text) { return parse_enum(text, kFaultKinds, "fault kind"); }
std::string_view to_string(TestKind kind) { return enum_name(kind, kTestKinds); }
TestKind parse_test_kind(std::string_view text) { return parse_enum(text, kTestKinds, "test kind"); }
std::string_view to_string(FailureCode code) { return enum_name(code, kCodes); }
FailureCode parse_failure_code(std::string_view text) { return parse_enum(text, kCodes, "failure code"); }

std::size_t ChipNetlist::index_of(std::string_view id) const {
    for (std::size_t i = 0; i < nets.size(); ++i) {
        if (nets[i].id == id) return i;
    }
    throw LookupError("unknown net '" + std::string(id) + "'");
}

bool ChipNetlist::contains(std::string_view id) const {
    return std::any_of(nets.begin(), nets.end(), [&](const Net& n) { return n.id == id; });
}

void validate(const ChipNetlist& netlist) {
    if (netlist.nets.empty()) throw ConfigError("netlist has no nets", "/nets");
    std::set<std::string, std::less<>> seen;
    for (std::size_t i = 0; i < netlist.nets.size(); ++i) {
        const Net& n = netlist.nets[i];
        const std::string ptr = "/nets/" + std::to_string(i);
        if (n.id.empty()) throw ConfigError("net id is empty", ptr + "/id");
        if (!seen.insert(n.id).second) throw ConfigError("duplicate net id '" + n.id + "'", ptr + "/id");
        if (n.role != NetRole::Gnd) {
            if (!n.has_loop()) throw ConfigError("net '" + n.id + "' needs two bond pads", ptr + "/pads");
            if (n.pad_a == n.pad_b) throw ConfigError("net '" + n.id + "' uses the same pad twice", ptr + "/pads");
            if (!(n.nominal_loop_resistance > 0.0)) {
                throw ConfigError("net '" + n.id + "' needs a positive loop resistance", ptr + "/loop_resistance_ohm");
            }
        }
        if (!(n.nominal_isolation > 0.0)) {
            throw ConfigError("net '" + n.id + "' needs a positive isolation", ptr + "/isolation_ohm");
        }
    }
}

ChipNetlist default_netlist() {
    ChipNetlist nl;
    char buf[16];
    auto loop = [&](std::string id, NetRole role, double r) {
        nl.nets.push_back({id, role, id + "_A", id + "_B", r, std::numeric_limits<double>::infinity()});
    };
    for (int i = 1; i <= 6; ++i) {
        std::snprintf(buf, sizeof buf, "CMP%d", i);
        loop(buf, NetRole::DcLoop, 25.0);
    }
    for (int i = 1; i <= 70; ++i) {
        std::snprintf(buf, sizeof buf, "DC%02d", i);
        loop(buf, NetRole::DcLoop, 25.0);
    }
    nl.nets.push_back({"GND", NetRole::Gnd, {}, {}, 0.0, std::numeric_limits<double>::infinity()});
    for (int i = 1; i <= 3; ++i) {
        std::snprintf(buf, sizeof buf, "RF%d", i);
        loop(buf, NetRole::Rf, 10.0);
    }
    loop("TS1", NetRole::Sensor, 10.8e3);
    loop("TS2", NetRole::Sensor, 32.3e3);
    return nl;
}

void validate(const FaultSet& faults, const ChipNetlist& netlist) {
    for (std::size_t i = 0; i < faults.size(); ++i) {
        const Fault& f = faults[i];
        const std::string ptr = "/faults/" + std::to_string(i);
        auto need_net = [&](const std::string& id, const char* field) -> const Net& {
            if (!netlist.contains(id)) throw ConfigError("unknown net '" + id + "'", ptr + field);
            return netlist.net(id);
        };
        switch (f.kind) {
            case Fault::Kind::Open:
                if (!need_net(f.net, "/net").has_loop()) {
                    throw ConfigError("OPEN needs a loop net, '" + f.net + "' has none", ptr + "/net");
                }
                break;
            case Fault::Kind::Short:
                need_net(f.net, "/net");
                need_net(f.other_net, "/other_net");
                if (f.net == f.other_net) throw ConfigError("SHORT joins a net to itself", ptr);
                [[fallthrough]];
            case Fault::Kind::LeakToGnd:
                need_net(f.net, "/net");
                if (!(f.resistance > 0.0)) throw ConfigError("path resistance must be positive", ptr + "/resistance_ohm");
                if (f.from_pass != 1 && f.from_pass != 2) throw ConfigError("from_pass must be 1 or 2", ptr + "/from_pass");
                break;
            case Fault::Kind::ResistanceShift:
                if (!need_net(f.net, "/net").has_loop()) {
                    throw ConfigError("RESISTANCE_SHIFT needs a loop net", ptr + "/net");
                }
                if (!(f.factor > 0.0)) throw ConfigError("shift factor must be positive", ptr + "/factor");
                break;
            case Fault::Kind::HwFail:
                if (f.step_index < 0) throw ConfigError("HW_FAIL needs a step index >= 0", ptr + "/step");
                break;
        }
    }
}

TestLimits default_limits() { return TestLimits{}; }

std::vector<std::string> limit_findings(const TestLimits& l) {
    std::vector<std::string> out;
    auto window = [&](const Window& w, const std::string& name) {
        if (!(w.lo <= w.hi)) out.push_back(name + ": window lower bound exceeds upper bound");
    };
    auto positive = [&](double v, const std::string& name) {
        if (!(v > 0.0)) out.push_back(name + ": must be positive");
    };
    for (auto [c, name] : {std::pair{&l.continuity, "continuity"}, std::pair{&l.sensor_continuity, "sensor_continuity"}}) {
        positive(c->force_current, std::string(name) + ".force");
        window(c->voltage, std::string(name) + ".voltage");
        window(c->current, std::string(name) + ".current");
    }
    for (auto [c, name] : {std::pair{&l.leakage_dc, "leakage_dc"}, std::pair{&l.leakage_rf, "leakage_rf"}}) {
        positive(c->force_voltage, std::string(name) + ".force");
        positive(c->current_max, std::string(name) + ".current_max");
        window(c->voltage, std::string(name) + ".voltage");
    }
    positive(l.resistance.force_voltage, "resistance.force");
    window(l.resistance.dc, "resistance.dc");
    window(l.resistance.rf, "resistance.rf");
    window(l.resistance.ts1, "resistance.ts1");
    window(l.resistance.ts2, "resistance.ts2");
    positive(l.compliance_voltage, "compliance_voltage");
    positive(l.step_time, "step_time");
    if (!(l.leakage_noise_sigma >= 0.0)) out.push_back("leakage_noise_sigma: must be nonnegative");
    return out;
}

void validate(const TestLimits& limits) {
    const auto findings = limit_findings(limits);
    if (!findings.empty()) throw ConfigError(findings.front(), "/limits");
}

Window sensor_band(const ResistanceLimits& limits, std::string_view net_id) {
    const bool is_ts2 = net_id == "TS2";
    return (is_ts2 != limits.swap_sensor_bands) ? limits.ts2 : limits.ts1;
}

TestPlan build_default_plan(const ChipNetlist& netlist) {
    std::vector<const Net*> sorted;
    for (const auto& n : netlist.nets) sorted.push_back(&n);
    std::sort(sorted.begin(), sorted.end(), [](const Net* a, const Net* b) { return a->id < b->id; });

    TestPlan plan;
    for (const Net* n : sorted) {
        if (n->has_loop()) plan.push_back({TestKind::Continuity, n->id, 0});
    }
    for (int pass = 1; pass <= 2; ++pass) {
        for (const Net* n : sorted) {
            if (n->is_dc_like()) plan.push_back({TestKind::LeakageDc, n->id, pass});
        }
        for (const Net* n : sorted) {
            if (n->role == NetRole::Rf) plan.push_back({TestKind::LeakageRfSelf, n->id, pass});
        }
        for (const Net* n : sorted) {
            if (n->is_dc_like()) plan.push_back({TestKind::LeakageRfSense, n->id, pass});
        }
    }
    for (const Net* n : sorted) {
        if (n->has_loop()) plan.push_back({TestKind::Resistance, n->id, 0});
    }
    return plan;
}

void validate(const TestPlan& plan, const ChipNetlist& netlist) {
    if (plan.empty()) throw ConfigError("test plan is empty", "/plan");
    for (std::size_t i = 0; i < plan.size(); ++i) {
        const PlanStep& s = plan[i];
        const std::string ptr = "/plan/" + std::to_string(i);
        if (!netlist.contains(s.net)) throw ConfigError("step names unknown net '" + s.net + "'", ptr);
        const Net& n = netlist.net(s.net);
        bool ok = true;
        switch (s.kind) {
            case TestKind::Continuity:
            case TestKind::Resistance: ok = n.has_loop(); break;
            case TestKind::LeakageDc:
            case TestKind::LeakageRfSense: ok = n.is_dc_like(); break;
            case TestKind::LeakageRfSelf: ok = n.role == NetRole::Rf; break;
        }
        if (!ok) {
            throw ConfigError(std::string(to_string(s.kind)) + " does not apply to " +
                                  std::string(to_string(n.role)) + " net '" + n.id + "'", ptr);
        }
        const bool leakage = s.kind == TestKind::LeakageDc || s.kind == TestKind::LeakageRfSelf ||
                             s.kind == TestKind::LeakageRfSense;
        if (leakage && s.pass != 1 && s.pass != 2) throw ConfigError("leakage step needs pass 1 or 2", ptr);
    }
}

namespace {

double loop_resistance(const Net& net, const FaultSet& faults, bool& open) {
    double r = net.nominal_loop_resistance;
    open = false;
    for (const auto& f : faults) {
        if (f.net != net.id) continue;
        if (f.kind == Fault::Kind::Open) open = true;
        if (f.kind == Fault::Kind::ResistanceShift) r *= f.factor;
    }
    return r;
}

// A conductive path from the sensed net; partner < 0 means the ground plane or
// the net's intrinsic isolation.
struct Path {
    int partner;
    double resistance;
};

std::vector<Path> paths_from(const ChipNetlist& nl, std::size_t idx, const FaultSet& faults, int pass) {
    std::vector<Path> out;
    const Net& n = nl.nets[idx];
    int gnd = -1;
    for (std::size_t i = 0; i < nl.nets.size(); ++i) {
        if (nl.nets[i].role == NetRole::Gnd) {
            gnd = static_cast<int>(i);
            break;
        }
    }
    for (const auto& f : faults) {
        if (f.from_pass > pass) continue;
        if (f.kind == Fault::Kind::Short) {
            if (f.net == n.id) out.push_back({static_cast<int>(nl.index_of(f.other_net)), f.resistance});
            else if (f.other_net == n.id) out.push_back({static_cast<int>(nl.index_of(f.net)), f.resistance});
        } else if (f.kind == Fault::Kind::LeakToGnd && f.net == n.id) {
            out.push_back({gnd, f.resistance});
        }
    }
    return out;
}

double gaussian(std::uint64_t seed) {
    SplitMix64 rng(seed);
    double u1 = rng.uniform();
    while (u1 <= 0.0) u1 = rng.uniform();
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

FailureCode dc_partner_code(const ChipNetlist& nl, int partner) {
    if (partner < 0) return FailureCode::LeakDcGnd;
    switch (nl.nets[static_cast<std::size_t>(partner)].role) {
        case NetRole::Gnd: return FailureCode::LeakDcGnd;
        case NetRole::Rf: return FailureCode::LeakDcRf;
        default: return FailureCode::LeakDcDc;
    }
}

}  // namespace

Measurement simulate_measurement(const ChipNetlist& netlist, const FaultSet& faults,
                                 const TestLimits& limits, const PlanStep& step, int step_index,
                                 const RunOptions& options) {
    for (const auto& f : faults) {
        if (f.kind == Fault::Kind::HwFail && f.step_index == step_index) {
            Measurement m;
            m.hardware_failure = true;
            m.code_if_failed = FailureCode::HwFail;
            return m;
        }
    }
    const std::size_t idx = netlist.index_of(step.net);
    const Net& net = netlist.nets[idx];
    Measurement m;

    switch (step.kind) {
        case TestKind::Continuity: {
            const ContinuityLimits& c =
                net.role == NetRole::Sensor ? limits.sensor_continuity : limits.continuity;
            bool open = false;
            const double r = loop_resistance(net, faults, open);
            m.forced = c.force_current;
            m.code_if_failed = FailureCode::ContinuityFail;
            if (open) {
                m.voltage = limits.compliance_voltage;
                m.current = 0.0;
            } else if (c.force_current * r > limits.compliance_voltage) {
                m.voltage = limits.compliance_voltage;
                m.current = limits.compliance_voltage / r;
            } else {
                m.voltage = c.force_current * r;
                m.current = c.force_current;
            }
            return m;
        }
        case TestKind::Resistance: {
            bool open = false;
            const double r = loop_resistance(net, faults, open);
            m.forced = limits.resistance.force_voltage;
            m.voltage = m.forced;
            m.current = open ? 0.0 : m.forced / r;
            m.code_if_failed = net.role == NetRole::Rf       ? FailureCode::ResFailRf
                               : net.role == NetRole::Sensor ? FailureCode::ResFailTs
                                                             : FailureCode::ResFailDc;
            return m;
        }
        case TestKind::LeakageDc:
        case TestKind::LeakageRfSelf:
        case TestKind::LeakageRfSense: break;
    }

    const bool rf_stress = step.kind != TestKind::LeakageDc;
    const double v = rf_stress ? limits.leakage_rf.force_voltage : limits.leakage_dc.force_voltage;
    m.forced = v;
    double current = std::isfinite(net.nominal_isolation) ? v / net.nominal_isolation : 0.0;
    double dominant = current;
    int dominant_partner = -1;
    for (const Path& p : paths_from(netlist, idx, faults, step.pass)) {
        bool driven = true;
        if (step.kind == TestKind::LeakageRfSense) {
            driven = p.partner >= 0 && netlist.nets[static_cast<std::size_t>(p.partner)].role == NetRole::Rf;
        }
        if (!driven) continue;
        const double i = v / p.resistance;
        current += i;
        if (i > dominant) {
            dominant = i;
            dominant_partner = p.partner;
        }
    }
    if (limits.leakage_noise_sigma > 0.0) {
        const std::uint64_t key = static_cast<std::uint64_t>(step_index) * 3u + static_cast<std::uint64_t>(step.pass);
        current += limits.leakage_noise_sigma * gaussian(derive_seed(options.noise_seed, key));
    }
    m.current = current;
    m.voltage = 0.0;  // sensed node held at virtual ground by the ammeter

    switch (step.kind) {
        case TestKind::LeakageDc: m.code_if_failed = dc_partner_code(netlist, dominant_partner); break;
        case TestKind::LeakageRfSense: m.code_if_failed = FailureCode::LeakDcRf; break;
        default: {
            const bool to_dc = dominant_partner >= 0 &&
                               netlist.nets[static_cast<std::size_t>(dominant_partner)].is_dc_like();
            m.code_if_failed = to_dc ? FailureCode::LeakDcRf : FailureCode::LeakRf;
        }
    }
    return m;
}

namespace {

bool within_limits(const Net& net, const PlanStep& step, const Measurement& m, const TestLimits& l) {
    if (m.hardware_failure) return false;
    switch (step.kind) {
        case TestKind::Continuity: {
            const ContinuityLimits& c = net.role == NetRole::Sensor ? l.sensor_continuity : l.continuity;
            return c.voltage.contains(m.voltage) && c.current.contains(m.current);
        }
        case TestKind::LeakageDc:
            return std::abs(m.current) <= l.leakage_dc.current_max && l.leakage_dc.voltage.contains(m.voltage);
        case TestKind::LeakageRfSelf:
        case TestKind::LeakageRfSense:
            return std::abs(m.current) <= l.leakage_rf.current_max && l.leakage_rf.voltage.contains(m.voltage);
        case TestKind::Resistance: {
            if (!(m.current > 0.0)) return false;
            const double r = m.voltage / m.current;
            const Window w = net.role == NetRole::Rf       ? l.resistance.rf
                             : net.role == NetRole::Sensor ? sensor_band(l.resistance, net.id)
                                                           : l.resistance.dc;
            return w.contains(r);
        }
    }
    return false;
}

}  // namespace

ChipResult run_chip(const ChipNetlist& netlist, const FaultSet& faults, const TestLimits& limits,
                    const TestPlan& plan, int chip_id, const RunOptions& options) {
    validate(plan, netlist);
    validate(faults, netlist);
    ChipResult out;
    out.chip_id = chip_id;
    out.step_log.reserve(plan.size());
    for (std::size_t i = 0; i < plan.size(); ++i) {
        const PlanStep& step = plan[i];
        const int index = static_cast<int>(i);
        StepResult sr{index, step, simulate_measurement(netlist, faults, limits, step, index, options), true};
        const Net& net = netlist.net(step.net);
        sr.passed = within_limits(net, step, sr.measurement, limits);
        if (!sr.passed && step.kind == TestKind::Continuity && !sr.measurement.hardware_failure) {
            // Voltage inside the window with a wrong current points at the source, not the loop.
            const ContinuityLimits& c =
                net.role == NetRole::Sensor ? limits.sensor_continuity : limits.continuity;
            if (c.voltage.contains(sr.measurement.voltage)) sr.measurement.code_if_failed = FailureCode::HwFail;
        }
        out.step_log.push_back(sr);
        ++out.steps_executed;
        if (!sr.passed) {
            out.outcome = sr.measurement.code_if_failed;
            break;
        }
    }
    out.elapsed_model = out.steps_executed * limits.step_time;
    return out;
}

std::vector<ChipResult> run_wafer(std::span<const ChipJob> jobs, const TestLimits& limits,
                                  const TestPlan& plan, unsigned threads, const RunOptions& options) {
    validate(limits);
    std::vector<ChipResult> results(jobs.size());
    for (const auto& job : jobs) {
        if (!job.netlist) throw ConfigError("chip " + std::to_string(job.chip_id) + " has no netlist");
    }
    unsigned n = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs.size(), 1)));

    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    auto worker = [&](unsigned w) {
        try {
            for (std::size_t i = next++; i < jobs.size(); i = next++) {
                const ChipJob& job = jobs[i];
                RunOptions opt = options;
                opt.noise_seed = derive_seed(options.noise_seed, static_cast<std::uint64_t>(job.chip_id));
                results[i] = run_chip(*job.netlist, job.faults, limits, plan, job.chip_id, opt);
            }
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    if (n <= 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < n; ++w) pool.emplace_back(worker, w);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

FailureCode expected_code(const Fault& fault, const ChipNetlist& netlist) {
    switch (fault.kind) {
        case Fault::Kind::Open: return FailureCode::ContinuityFail;
        case Fault::Kind::HwFail: return FailureCode::HwFail;
        case Fault::Kind::LeakToGnd:
            return netlist.net(fault.net).role == NetRole::Rf ? FailureCode::LeakRf : FailureCode::LeakDcGnd;
        case Fault::Kind::Short: {
            const Net& a = netlist.net(fault.net);
            const Net& b = netlist.net(fault.other_net);
            const bool a_rf = a.role == NetRole::Rf, b_rf = b.role == NetRole::Rf;
            if (a.role == NetRole::Gnd || b.role == NetRole::Gnd) {
                return (a_rf || b_rf) ? FailureCode::LeakRf : FailureCode::LeakDcGnd;
            }
            if (a_rf && b_rf) return FailureCode::LeakRf;
            if (a_rf || b_rf) return FailureCode::LeakDcRf;
            return FailureCode::LeakDcDc;
        }
        case Fault::Kind::ResistanceShift:
            switch (netlist.net(fault.net).role) {
                case NetRole::Rf: return FailureCode::ResFailRf;
                case NetRole::Sensor: return FailureCode::ResFailTs;
                default: return FailureCode::ResFailDc;
            }
    }
    return FailureCode::Pass;
}

std::vector<CatalogEntry> single_fault_catalog(const ChipNetlist& netlist, const TestPlan& plan) {
    constexpr double kShort = 1e6;
    constexpr double kLeak = 100e3;
    std::vector<CatalogEntry> out;
    auto add = [&](Fault f) {
        const FailureCode c = expected_code(f, netlist);
        out.push_back({std::move(f), c});
    };
    const auto& nets = netlist.nets;
    for (const auto& n : nets) {
        if (n.has_loop()) add(Fault::open(n.id));
    }
    for (std::size_t i = 0; i < nets.size(); ++i) {
        for (std::size_t j = i + 1; j < nets.size(); ++j) {
            const bool i_ok = nets[i].is_dc_like() || nets[i].role == NetRole::Rf;
            const bool j_ok = nets[j].is_dc_like() || nets[j].role == NetRole::Rf;
            if (i_ok && j_ok) add(Fault::short_circuit(nets[i].id, nets[j].id, kShort));
        }
    }
    for (const auto& n : nets) {
        if (n.role != NetRole::Gnd) add(Fault::leak_to_gnd(n.id, kLeak));
    }
    // Shifts that stay inside the continuity window but leave the resistance band.
    for (const auto& n : nets) {
        if (!n.has_loop()) continue;
        double factor = 3.0;
        if (n.role == NetRole::Rf) factor = 6.0;
        if (n.role == NetRole::Sensor) factor = 1.5;
        add(Fault::resistance_shift(n.id, factor));
    }
    for (std::size_t s = 0; s < plan.size(); ++s) add(Fault::hw_fail(static_cast<int>(s)));
    return out;
}

std::string step_log_csv(const ChipResult& result) {
    std::string out = "step_index,net,test_kind,pass,forced,measured_V,measured_I,verdict\n";
    char buf[256];
    for (const auto& s : result.step_log) {
        std::snprintf(buf, sizeof buf, "%d,%s,%s,%d,%.9g,%.9g,%.9g,%s\n", s.index, s.step.net.c_str(),
                      std::string(to_string(s.step.kind)).c_str(), s.step.pass, s.measurement.forced,
                      s.measurement.voltage, s.measurement.current,
                      s.passed ? "PASS" : std::string(to_string(s.measurement.code_if_failed)).c_str());
        out += buf;
    }
    return out;
}

}  // namespace trapqa
