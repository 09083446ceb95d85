#pragma once

// Wafer layout, yield statistics, spatial defect analytics and wafermap output.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trapqa/wafertest.hpp"

namespace trapqa {

struct ReticleCell {
    int row = 0;  // 0 = top row of the shot
    int col = 0;  // 0 = left column
    auto operator<=>(const ReticleCell&) const = default;
};

struct Site {
    int chip_id = 0;
    double x = 0.0;  // m, chip centre
    double y = 0.0;
    int shot = 0;
    ReticleCell cell;
};

struct LayoutParams {
    double wafer_diameter = 0.200;   // m
    double edge_exclusion = 2.5e-3;  // m
    double chip_width = 6.8e-3;      // m, reticle cell pitch in x
    double chip_height = 6.5e-3;     // m, reticle cell pitch in y
    double shot_offset_x = 0.0;      // m, centre of the reference shot
    double shot_offset_y = 0.0;
    std::vector<ReticleCell> test_cells{{0, 0}, {2, 2}};
};

struct ShotRect {
    int index = 0;
    double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
};

struct WaferLayout {
    LayoutParams params;
    std::vector<Site> sites;  // chip_id = position + 1; rows top to bottom, left to right
    std::vector<ShotRect> shots;  // shots holding at least one site

    double radius() const { return 0.5 * params.wafer_diameter; }
};

/// Tiles 3x3 reticle shots on a grid centred on the shot offset; a productive
/// cell is kept iff its whole rectangle lies within radius - edge_exclusion.
/// Default parameters give 477 sites. Throws ConfigError on bad parameters or
/// an empty layout.
WaferLayout layout_wafer(const LayoutParams& params = {});

struct WaferResult {
    WaferLayout layout;
    /// Either empty (nothing tested yet) or aligned with layout.sites.
    std::vector<ChipResult> results;
};

/// Throws ConfigError unless results are empty or match the sites one to one.
void validate(const WaferResult& result);

struct YieldStats {
    int total = 0;
    int passes = 0;
    std::optional<double> yield;  // undefined for an empty result
    std::map<FailureCode, int> failures;  // nonzero codes only
};

YieldStats yield_stats(const WaferResult& result);

/// N_d = -k ln Y. Throws DomainError unless 0 < Y <= 1 and k > 0.
double infer_defects(double yield_fraction, double chip_count);
/// N_d / process_steps.
double defects_per_step(double defects, int process_steps = 104);
/// Y = exp(-N_d / k).
double poisson_yield(double defects, double chip_count);

struct CellStat {
    ReticleCell cell;
    int sites = 0;
    int failures = 0;
    double p_value = 1.0;     // one-sided binomial tail against the pooled rate
    double p_adjusted = 1.0;  // Bonferroni over the 9 cells
    bool flagged = false;
};

struct PeriodicityReport {
    FailureCode code = FailureCode::Pass;
    int total_failures = 0;
    double pooled_rate = 0.0;
    std::vector<CellStat> cells;  // all 9 cells, row-major
    std::vector<ReticleCell> flagged;
};

PeriodicityReport reticle_periodicity(const WaferResult& result, FailureCode code,
                                      double alpha = 0.01);

struct EdgeReport {
    int edge_sites = 0, edge_failures = 0;
    int interior_sites = 0, interior_failures = 0;
    double edge_rate = 0.0, interior_rate = 0.0;
    double z = 0.0;
    double p_value = 1.0;  // one-sided, edge rate > interior rate
};

/// Sites whose centre lies beyond (1 - annulus_fraction) of the wafer radius
/// form the edge region. Two-proportion z-test with pooled variance.
/// Throws DomainError when the code never occurs or a region is empty.
EdgeReport edge_concentration(const WaferResult& result, FailureCode code,
                              double annulus_fraction = 0.2);

struct PlantRule {
    enum class Where { Anywhere, Cell, Edge };

    FailureCode code = FailureCode::Pass;
    int count = 0;  // chips receiving the fault
    Where where = Where::Anywhere;
    ReticleCell cell;              // Where::Cell
    double annulus_fraction = 0.2; // Where::Edge
};

/// Assigns one fault per chosen chip so that `count` chips of the eligible,
/// still unassigned sites fail with `code`. Rules apply in order; choices are
/// a pure function of the seed. Throws DomainError if a rule cannot be met.
std::vector<FaultSet> plant_faults(const WaferLayout& layout, const ChipNetlist& netlist,
                                   const TestPlan& plan, std::span<const PlantRule> rules,
                                   std::uint64_t seed);

/// Single fault producing `code` on `netlist`, net chosen from `pick` in [0, 1).
Fault representative_fault(const ChipNetlist& netlist, const TestPlan& plan, FailureCode code,
                           double pick);

/// Fault mix resembling the reference wafer: 258 of 477 pass, 15.5 % continuity
/// failures concentrated at the edge, 29.8 % leakage failures with the DC-GND
/// share clustered in one reticle cell.
std::vector<PlantRule> reference_plant_rules();

/// Plants faults and runs every chip.
WaferResult simulate_wafer(const WaferLayout& layout, const ChipNetlist& netlist,
                           const TestLimits& limits, std::span<const PlantRule> rules,
                           std::uint64_t seed, unsigned threads = 0);

/// Same outcomes without running the test engine: every chip fails exactly
/// with its planted code. Used by the statistics calibration.
WaferResult synthesize_outcomes(const WaferLayout& layout, std::span<const PlantRule> rules,
                                std::uint64_t seed);

struct RenderOptions {
    double pixels_per_mm = 4.0;
    bool draw_shots = true;
    /// Cells to star; chips failing with star_code there receive a marker.
    std::vector<ReticleCell> starred_cells;
    FailureCode star_code = FailureCode::LeakDcGnd;
    std::string title = "wafer map";
};

/// Fill colour of each outcome in the SVG (also listed in the legend).
std::string_view outcome_color(FailureCode code);

std::string render_svg(const WaferResult& result, const RenderOptions& options = {});
/// chip_id,x,y,shot,cell,outcome with x, y in mm and cell as "r<row>c<col>";
/// one row per site ("UNTESTED" when the wafer has no results).
std::string render_csv(const WaferResult& result);

}  // namespace trapqa
