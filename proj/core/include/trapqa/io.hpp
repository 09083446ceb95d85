#pragma once

// File formats. Files carry unit-suffixed keys (rects_um, capacitance_pF, ...)
// that are converted to SI at parse time. Schema problems raise ConfigError
// whose pointer() is a JSON pointer into the offending document (or a
// "file:line" location for CSV).

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "trapqa/diagnosis.hpp"
#include "trapqa/dissipation.hpp"
#include "trapqa/electrostatics.hpp"
#include "trapqa/heating.hpp"
#include "trapqa/materials.hpp"
#include "trapqa/thermometry.hpp"
#include "trapqa/wafertest.hpp"
#include "trapqa/yieldmap.hpp"

namespace trapqa::io {

using Json = nlohmann::json;

std::string read_text_file(const std::filesystem::path& path);
Json read_json_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

struct CsvTable {
    std::string source;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<int> lines;  // 1-based source line of each row

    /// Column index of `name`, or ConfigError.
    std::size_t column(std::string_view name) const;
    double number(std::size_t row, std::size_t col) const;
};

/// Comma separated, first non-comment line is the header; '#' starts a comment
/// line; surrounding whitespace is trimmed.
CsvTable parse_csv(std::string_view text, std::string source = "<csv>");

// Materials: {"name", "tan_delta", "resistivity": [[T_K, rho_ohm_m], ...]}
Material material_from_json(const Json& j);
Json to_json(const Material& m);

// Dissipation presets: {"presets": [{"name", "capacitance_pF", "tan_delta",
// "rf_amplitude_V", "rf_frequency_MHz", "resistance_ohm": [[T_K, R], ...]}]}
std::vector<TrapPreset> presets_from_json(const Json& j);
Json presets_to_json(std::span<const TrapPreset> presets);

// Geometry: {"axis_y_um", "axis_z_um", "electrodes": [{"id", "role",
// "rects_um": [[x1, x2, y1, y2], ...]}]}. z is the surface normal.
TrapGeometry geometry_from_json(const Json& j);
Json to_json(const TrapGeometry& g);

// Voltage set: {"voltages_V": {"id": volts, ...}}
VoltageMap voltages_from_json(const Json& j);
Json voltages_to_json(const VoltageMap& v);

DriveParams drive_from_json(const Json& j, const DriveParams& fallback);

// Netlist: {"nets": [{"id", "role", "pads": [a, b], "loop_resistance_ohm",
// "isolation_ohm" (optional)}]}
ChipNetlist netlist_from_json(const Json& j);
Json to_json(const ChipNetlist& n);

// Faults: {"faults": [{"kind", "net", "other_net", "resistance_ohm", "factor",
// "step", "from_pass"}]}
FaultSet faults_from_json(const Json& j);
Json faults_to_json(const FaultSet& f);

TestLimits limits_from_json(const Json& j);
Json to_json(const TestLimits& l);

LayoutParams layout_from_json(const Json& j);
Json to_json(const LayoutParams& p);

Json to_json(const ChipResult& r, bool with_log);
/// {"layout": ..., "site_count", "results": [{"chip_id", "outcome", "steps_executed", "elapsed_model_s"}]}
Json to_json(const WaferResult& r);
WaferResult wafer_result_from_json(const Json& j);

// Scenario: {"kind", "electrode", "held_voltage_V", "regions_um", "effective_voltage_V"}
FaultScenario scenario_from_json(const Json& j);

// R(T) model: {"residual_ohm", "amplitude_ohm", "debye_K"}
RTModel rt_model_from_json(const Json& j);
Json to_json(const RTModel& m);

/// Columns T_K, R_ohm.
std::vector<RTSample> rt_samples_from_csv(const CsvTable& t);
/// Columns site, frequency_MHz, rate_quanta_per_s, sigma. Frequencies become rad/s.
std::vector<HeatingPoint> heating_points_from_csv(const CsvTable& t);
/// Columns wait_time_ms, nbar, sigma.
std::vector<NbarPoint> nbar_points_from_csv(const CsvTable& t);
/// Columns site, scale, position_um and optionally nominal_axial_frequency_MHz.
std::vector<PositionMeasurement> measurements_from_csv(const CsvTable& t);
/// Columns site, nominal_um.
std::map<std::string, double> nominal_positions_from_csv(const CsvTable& t);

}  // namespace trapqa::io
