#pragma once

// Electrical wafer test: continuity, two leakage passes and resistance,
// executed against a simulated chip with injectable faults. The first limit
// violation aborts the chip and labels it with a failure code.

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace trapqa {

enum class NetRole { DcLoop, Rf, Gnd, Sensor };

std::string_view to_string(NetRole role);
NetRole parse_net_role(std::string_view text);

struct Net {
    std::string id;
    NetRole role = NetRole::DcLoop;
    std::string pad_a;  // empty for nets without a loop (GND)
    std::string pad_b;
    double nominal_loop_resistance = 0.0;  // Ohm
    double nominal_isolation = std::numeric_limits<double>::infinity();  // Ohm

    bool has_loop() const { return !pad_a.empty() && !pad_b.empty(); }
    /// DC loops and sensors: the nets sensed in the DC leakage steps.
    bool is_dc_like() const { return role == NetRole::DcLoop || role == NetRole::Sensor; }
};

struct ChipNetlist {
    std::vector<Net> nets;

    /// Index of `id`, or throws LookupError.
    std::size_t index_of(std::string_view id) const;
    const Net& net(std::string_view id) const { return nets[index_of(id)]; }
    bool contains(std::string_view id) const;
};

/// Unique ids; DC_LOOP, SENSOR and RF nets carry two distinct pads and a
/// positive loop resistance; isolation is positive. Throws ConfigError.
void validate(const ChipNetlist& netlist);

/// The default chip: DC01..DC70 and CMP1..CMP6 as 25 Ohm DC loops, RF1..RF3 as
/// 10 Ohm RF loops, one GND net, and the two meander sensors TS1 (10.8 kOhm)
/// and TS2 (32.3 kOhm). Its default plan has 480 steps.
ChipNetlist default_netlist();

struct Fault {
    enum class Kind { Open, Short, LeakToGnd, ResistanceShift, HwFail };

    Kind kind = Kind::Open;
    std::string net;        // Open, LeakToGnd, ResistanceShift; first net of a Short
    std::string other_net;  // Short
    double resistance = 0.0;  // Ohm, Short / LeakToGnd
    double factor = 1.0;      // ResistanceShift
    int step_index = -1;      // HwFail
    /// Leakage pass from which a Short or LeakToGnd path exists. 2 models a
    /// breakdown created by the first leakage pass; continuity and resistance
    /// see every path.
    int from_pass = 1;

    static Fault open(std::string net) { return {Kind::Open, std::move(net), {}, 0.0, 1.0, -1, 1}; }
    static Fault short_circuit(std::string a, std::string b, double r, int from_pass = 1) {
        return {Kind::Short, std::move(a), std::move(b), r, 1.0, -1, from_pass};
    }
    static Fault leak_to_gnd(std::string net, double r, int from_pass = 1) {
        return {Kind::LeakToGnd, std::move(net), {}, r, 1.0, -1, from_pass};
    }
    static Fault resistance_shift(std::string net, double factor) {
        return {Kind::ResistanceShift, std::move(net), {}, 0.0, factor, -1, 1};
    }
    static Fault hw_fail(int step) { return {Kind::HwFail, {}, {}, 0.0, 1.0, step, 1}; }
};

std::string_view to_string(Fault::Kind kind);
Fault::Kind parse_fault_kind(std::string_view text);

using FaultSet = std::vector<Fault>;

/// Referenced nets exist; resistances and factors positive; opens only on loop nets.
void validate(const FaultSet& faults, const ChipNetlist& netlist);

struct Window {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double v) const { return v >= lo && v <= hi; }
};

struct ContinuityLimits {
    double force_current = 1e-3;  // A
    Window voltage{0.0, 0.1};
    Window current{0.8e-3, 1.3e-3};
};

struct LeakageLimits {
    double force_voltage = 50.0;  // V
    double current_max = 100e-9;  // A
    Window voltage{-0.1, 0.1};
};

struct ResistanceLimits {
    double force_voltage = 5e-3;  // V
    Window dc{0.0, 50.0};
    Window rf{0.0, 50.0};
    Window ts1{28.9e3, 35.7e3};  // as printed for "TS1"
    Window ts2{10.3e3, 11.3e3};  // as printed for "TS2"
    /// Bind the TS1 band to the TS2 net and vice versa. The printed labels are
    /// inverted with respect to the sensor geometry (TS2 is the 32 kOhm meander).
    bool swap_sensor_bands = true;
};

struct TestLimits {
    ContinuityLimits continuity;
    /// Continuity for the 10-32 kOhm sensor loops, which cannot carry 1 mA
    /// inside a 100 mV window.
    ContinuityLimits sensor_continuity{100e-6, {0.0, 5.0}, {80e-6, 130e-6}};
    LeakageLimits leakage_dc{50.0, 100e-9, {-0.1, 0.1}};
    LeakageLimits leakage_rf{300.0, 100e-9, {-0.1, 0.1}};
    ResistanceLimits resistance;
    double compliance_voltage = 10.0;  // V, current-source ceiling
    double step_time = 16.25e-3;       // s per executed step
    double leakage_noise_sigma = 0.0;  // A, Gaussian, off by default
};

/// Default limits (1 mA continuity, 50 V / 300 V leakage at 100 nA, 5 mV resistance).
TestLimits default_limits();

/// Human-readable problems (inverted windows, nonpositive forces...). Empty when valid.
std::vector<std::string> limit_findings(const TestLimits& limits);
/// Throws ConfigError with the first finding.
void validate(const TestLimits& limits);

/// Resistance band applied to a sensor net ("TS1"/"TS2"); other ids use ts1.
Window sensor_band(const ResistanceLimits& limits, std::string_view net_id);

enum class TestKind {
    Continuity,
    LeakageDc,       // net held at 0 V, every other net at the DC leakage voltage
    LeakageRfSelf,   // RF net at the RF leakage voltage, everything else at 0 V
    LeakageRfSense,  // every RF net at the RF leakage voltage, DC-like net sensed
    Resistance,
};

std::string_view to_string(TestKind kind);
TestKind parse_test_kind(std::string_view text);

struct PlanStep {
    TestKind kind = TestKind::Continuity;
    std::string net;
    int pass = 0;  // 1 or 2 for leakage steps, 0 otherwise
};

using TestPlan = std::vector<PlanStep>;

/// Continuity on every loop net, two identical leakage passes (DC steps for
/// DC-like nets, RF self steps, RF sense steps for DC-like nets) and resistance
/// on every loop net. Ascending net id inside each phase.
TestPlan build_default_plan(const ChipNetlist& netlist);

/// Throws ConfigError when a step names an unknown net or a kind that does not
/// apply to the net's role.
void validate(const TestPlan& plan, const ChipNetlist& netlist);

enum class FailureCode {
    Pass,
    HwFail,
    ContinuityFail,
    LeakDcDc,
    LeakDcRf,
    LeakDcGnd,
    LeakRf,
    ResFailDc,
    ResFailRf,
    ResFailTs,
};

inline constexpr FailureCode kAllFailureCodes[] = {
    FailureCode::HwFail,    FailureCode::ContinuityFail, FailureCode::LeakDcDc,
    FailureCode::LeakDcRf,  FailureCode::LeakDcGnd,      FailureCode::LeakRf,
    FailureCode::ResFailDc, FailureCode::ResFailRf,      FailureCode::ResFailTs,
};

std::string_view to_string(FailureCode code);
FailureCode parse_failure_code(std::string_view text);

struct Measurement {
    double forced = 0.0;   // A for continuity, V otherwise
    double voltage = 0.0;  // V
    double current = 0.0;  // A
    bool hardware_failure = false;
    /// Code assigned if this measurement violates its limits.
    FailureCode code_if_failed = FailureCode::Pass;
};

struct RunOptions {
    std::uint64_t noise_seed = 0;
};

/// Simulated instrument reading for one plan step. Pure.
Measurement simulate_measurement(const ChipNetlist& netlist, const FaultSet& faults,
                                 const TestLimits& limits, const PlanStep& step, int step_index,
                                 const RunOptions& options = {});

struct StepResult {
    int index = 0;
    PlanStep step;
    Measurement measurement;
    bool passed = true;
};

struct ChipResult {
    int chip_id = 0;
    FailureCode outcome = FailureCode::Pass;
    int steps_executed = 0;
    std::vector<StepResult> step_log;
    double elapsed_model = 0.0;  // s
};

ChipResult run_chip(const ChipNetlist& netlist, const FaultSet& faults, const TestLimits& limits,
                    const TestPlan& plan, int chip_id = 0, const RunOptions& options = {});

struct ChipJob {
    int chip_id = 0;
    std::shared_ptr<const ChipNetlist> netlist;
    FaultSet faults;
};

/// Runs every job, optionally on several threads (0 = hardware concurrency).
/// The result vector is aligned with `jobs` whatever the scheduling. Each
/// chip's noise stream is derived from (noise_seed, chip_id).
std::vector<ChipResult> run_wafer(std::span<const ChipJob> jobs, const TestLimits& limits,
                                  const TestPlan& plan, unsigned threads = 0,
                                  const RunOptions& options = {});

/// Failure code a single fault of this kind must produce, for nets of the
/// given roles. Pass for faults the test cannot see.
FailureCode expected_code(const Fault& fault, const ChipNetlist& netlist);

struct CatalogEntry {
    Fault fault;
    FailureCode expected = FailureCode::Pass;
};

/// Every single-fault chip of the catalog OPEN, SHORT(DC,DC), SHORT(DC,RF),
/// SHORT(RF,RF), LEAK_TO_GND, out-of-band RESISTANCE_SHIFT and HW_FAIL over all
/// applicable nets / steps of `plan`.
std::vector<CatalogEntry> single_fault_catalog(const ChipNetlist& netlist, const TestPlan& plan);

/// Step log as CSV: step_index,net,test_kind,pass,forced,measured_V,measured_I,verdict.
std::string step_log_csv(const ChipResult& result);

}  // namespace trapqa
