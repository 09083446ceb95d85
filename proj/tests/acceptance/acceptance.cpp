// Acceptance suite: one PASS/FAIL line per criterion; exit status is the number of failures.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "cli.hpp"
#include "trapqa/diagnosis.hpp"
#include "trapqa/dissipation.hpp"
#include "trapqa/electrostatics.hpp"
#include "trapqa/heating.hpp"
#include "trapqa/io.hpp"
#include "trapqa/random.hpp"
#include "trapqa/thermometry.hpp"
#include "trapqa/units.hpp"
#include "trapqa/wafertest.hpp"
#include "trapqa/yieldmap.hpp"

using namespace trapqa;
namespace fs = std::filesystem;
using units::um;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

int run_cli(std::vector<std::string> args, std::string* out = nullptr) {
    args.insert(args.begin(), "trapqa");
    std::ostringstream o, e;
    const int rc = cli::run(args, o, e);
    if (out) *out = o.str();
    return rc;
}

// Tolerances and fixed inputs.
constexpr double kDissipationRelTol = 0.05;
constexpr double kDissipationMaxSeconds = 1.0;
constexpr double kApproxRelTol = 1e-3;
constexpr double kDistributedRelTol = 1e-10;
constexpr int kDistributedPanels = 1000000;
constexpr double kDefectsTol = 0.1;
constexpr double kPerStepTol = 0.01;
constexpr double kRoundTripTol = 1e-12;
constexpr double kSweepMaxSeconds = 10.0;
constexpr double kElapsedTol = 0.1;
constexpr int kSpatialSeeds = 100;
constexpr int kMinDetections = 99;
constexpr int kMaxNullFlags = 5;
constexpr double kSpatialAlpha = 0.01;
constexpr double kSpatialMaxSeconds = 30.0;
constexpr int kFieldPoints = 100;
constexpr double kFieldRelTol = 1e-6;
constexpr double kBoundaryTol = 1e-3;
constexpr double kGeometryRelTol = 0.20;
constexpr double kGeometryMaxSeconds = 60.0;
constexpr double kExactAlphaTol = 1e-6;
constexpr double kFitNoiselessTol = 1e-3;
constexpr double kFitNoisyTol = 0.02;
constexpr double kFitNoise = 1e-3;
constexpr double kInversionTol = 1e-3;  // K
constexpr double kSensitivityTol = 0.5;  // Ohm/K
constexpr double kSolverTol = 0.1e-6;
constexpr double kSlopeTol = 1e-3;
constexpr double kClassifyTol = 0.5e-6;

Outcome criterion1() {
    const auto t0 = Clock::now();
    std::string out;
    if (run_cli({"-f", "json", "dissipation"}, &out) != 0) return {false, "CLI failed"};
    const double elapsed = seconds_since(t0);
    const auto rows = io::Json::parse(out)["rows"];
    // Rounded reference figures per row: P_ohmic, P_diel, P_total (mW); NaN = no reference figure.
    const double nan = std::nan("");
    const double ref[6][3] = {{190, 50, 240}, {20, nan, 70}, {430, 74, 504},
                              {45, nan, 119}, {13, 21, 34},  {0.3, nan, 21.3}};
    double worst = 0.0;
    int checked = 0;
    for (int i = 0; i < 6; ++i) {
        const double got[3] = {rows[i]["p_ohmic_mW"], rows[i]["p_diel_mW"], rows[i]["p_total_mW"]};
        for (int k = 0; k < 3; ++k) {
            if (std::isnan(ref[i][k])) continue;
            worst = std::max(worst, std::abs(got[k] - ref[i][k]) / ref[i][k]);
            ++checked;
        }
    }
    return {worst <= kDissipationRelTol && elapsed < kDissipationMaxSeconds,
            fmt("%d figures, max rel dev %.4f (tol %.2f), %.3f s", checked, worst, kDissipationRelTol, elapsed)};
}

Outcome criterion2() {
    double worst = 0.0;
    for (const auto& row : dissipation_report(reference_presets())) worst = std::max(worst, row.report.approximation_error);
    return {worst < kApproxRelTol, fmt("max rel error %.2e (tol %.0e)", worst, kApproxRelTol)};
}

Outcome criterion3() {
    const double r_total = 3.0, i0 = 1.7, length = 0.02;
    const double r_per_len = r_total / length;
    const double h = length / kDistributedPanels;
    auto f = [&](double x) { return r_per_len * i0 * i0 * (1 - x / length) * (1 - x / length); };
    double s = 0.5 * (f(0.0) + f(length));
    for (int i = 1; i < kDistributedPanels; ++i) s += f(i * h);
    s *= h;
    const double rel = std::abs(distributed_ohmic_power(r_total, i0) - s) / s;
    return {rel < kDistributedRelTol, fmt("rel dev %.2e vs %d-panel quadrature (tol %.0e)", rel, kDistributedPanels, kDistributedRelTol)};
}

Outcome criterion4() {
    const double y = 258.0 / 477.0;
    const double nd = infer_defects(y, 477);
    const double per = defects_per_step(nd, 104);
    const double rt = std::abs(poisson_yield(nd, 477) - y);
    return {std::abs(nd - 293.2) <= kDefectsTol && std::abs(per - 2.82) <= kPerStepTol && rt < kRoundTripTol,
            fmt("N_d %.3f, per step %.4f, round trip %.1e", nd, per, rt)};
}

Outcome criterion5() {
    const auto t0 = Clock::now();
    const ChipNetlist netlist = default_netlist();
    const TestPlan plan = build_default_plan(netlist);
    const TestLimits limits = default_limits();
    const auto catalog = single_fault_catalog(netlist, plan);
    int false_pass = 0, mismatch = 0;
    for (const auto& e : catalog) {
        const FailureCode got = run_chip(netlist, {e.fault}, limits, plan).outcome;
        false_pass += got == FailureCode::Pass;
        mismatch += got != e.expected;
    }
    const bool clean = run_chip(netlist, {}, limits, plan).outcome == FailureCode::Pass;
    const double elapsed = seconds_since(t0);
    return {false_pass == 0 && mismatch == 0 && clean && elapsed < kSweepMaxSeconds,
            fmt("%zu faults, %d false PASS, %d code mismatches, empty set %s, %.2f s", catalog.size(), false_pass,
                mismatch, clean ? "PASS" : "FAIL", elapsed)};
}

Outcome criterion6() {
    const ChipNetlist netlist = default_netlist();
    const ChipResult r = run_chip(netlist, {}, default_limits(), build_default_plan(netlist));
    return {r.outcome == FailureCode::Pass && r.steps_executed == 480 && std::abs(r.elapsed_model - 7.8) <= kElapsedTol,
            fmt("%d steps, elapsed_model %.4f s", r.steps_executed, r.elapsed_model)};
}

Outcome criterion7() {
    const auto t0 = Clock::now();
    const WaferLayout layout = layout_wafer();
    const ReticleCell target{1, 2};
    using W = PlantRule::Where;
    const std::vector<PlantRule> cell_rules{{FailureCode::LeakDcGnd, 30, W::Cell, target, 0.2},
                                            {FailureCode::LeakDcGnd, 7, W::Anywhere, {}, 0.2}};
    const std::vector<PlantRule> cell_null{{FailureCode::LeakDcGnd, 37, W::Anywhere, {}, 0.2}};
    const std::vector<PlantRule> edge_rules{{FailureCode::ContinuityFail, 30, W::Edge, {}, 0.2},
                                            {FailureCode::ContinuityFail, 7, W::Anywhere, {}, 0.2}};
    const std::vector<PlantRule> edge_null{{FailureCode::ContinuityFail, 37, W::Anywhere, {}, 0.2}};
    int cell_hits = 0, cell_false = 0, edge_hits = 0, edge_false = 0;
    for (int seed = 1; seed <= kSpatialSeeds; ++seed) {
        const auto s = static_cast<std::uint64_t>(seed);
        const auto p = reticle_periodicity(synthesize_outcomes(layout, cell_rules, s), FailureCode::LeakDcGnd, kSpatialAlpha);
        cell_hits += std::find(p.flagged.begin(), p.flagged.end(), target) != p.flagged.end();
        cell_false += !reticle_periodicity(synthesize_outcomes(layout, cell_null, s), FailureCode::LeakDcGnd, kSpatialAlpha)
                           .flagged.empty();
        edge_hits += edge_concentration(synthesize_outcomes(layout, edge_rules, s), FailureCode::ContinuityFail).p_value <
                     kSpatialAlpha;
        edge_false += edge_concentration(synthesize_outcomes(layout, edge_null, s), FailureCode::ContinuityFail).p_value <
                      kSpatialAlpha;
    }
    const double elapsed = seconds_since(t0);
    return {cell_hits >= kMinDetections && cell_false <= kMaxNullFlags && edge_hits >= kMinDetections &&
                edge_false <= kMaxNullFlags && elapsed < kSpatialMaxSeconds,
            fmt("cell %d/%d detected, %d null flags; edge %d/%d detected, %d null flags; %.2f s", cell_hits,
                kSpatialSeeds, cell_false, edge_hits, kSpatialSeeds, edge_false, elapsed)};
}

double oracle_rect_potential(const Rect& r, const Vec3& p) {
    using boost::math::quadrature::gauss;
    const double z = p.z();
    auto composite = [&](auto&& f, double a, double b) {
        const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / (0.5 * z))));
        const double w = (b - a) / panels;
        double s = 0.0;
        for (int i = 0; i < panels; ++i) s += gauss<double, 20>::integrate(f, a + i * w, a + (i + 1) * w);
        return s;
    };
    auto inner = [&](double xs) {
        return composite(
            [&](double ys) {
                const double d2 = (p.x() - xs) * (p.x() - xs) + (p.y() - ys) * (p.y() - ys) + z * z;
                return 1.0 / (d2 * std::sqrt(d2));
            },
            r.y1, r.y2);
    };
    return z / units::two_pi * composite(inner, r.x1, r.x2);
}

Outcome criterion8() {
    SplitMix64 rng(derive_seed(cli::kDefaultSeed, 8));
    const Rect rect{-60 * um, 40 * um, -20 * um, 90 * um};
    double worst_phi = 0.0, worst_grad = 0.0;
    for (int i = 0; i < kFieldPoints; ++i) {
        const Vec3 p((rng.uniform() - 0.5) * 400 * um, (rng.uniform() - 0.5) * 400 * um, (5.0 + 250.0 * rng.uniform()) * um);
        const double ref = oracle_rect_potential(rect, p);
        worst_phi = std::max(worst_phi, std::abs(rect_potential(rect, 1.0, p) - ref) / std::abs(ref));
        const Vec3 e = rect_field(rect, 1.0, p);
        const double h = 1e-3 * p.z();
        for (int k = 0; k < 3; ++k) {
            Vec3 dp = Vec3::Zero();
            dp[k] = h;
            // Fourth-order central difference.
            const double num = -(-rect_potential(rect, 1.0, p + 2 * dp) + 8 * rect_potential(rect, 1.0, p + dp) -
                                 8 * rect_potential(rect, 1.0, p - dp) + rect_potential(rect, 1.0, p - 2 * dp)) /
                               (12 * h);
            worst_grad = std::max(worst_grad, std::abs(e[k] - num) / e.norm());
        }
    }
    const double z0 = 1e-12;
    const double inside = rect_potential(rect, 1.0, Vec3(-10 * um, 35 * um, z0));
    const double outside = rect_potential(rect, 1.0, Vec3(200 * um, 35 * um, z0));
    const double boundary = std::max(std::abs(inside - 1.0), std::abs(outside));
    return {worst_phi < kFieldRelTol && worst_grad < kFieldRelTol && boundary < kBoundaryTol,
            fmt("phi %.1e, grad %.1e over %d points; boundary %.1e", worst_phi, worst_grad, kFieldPoints, boundary)};
}

Outcome criterion9() {
    const auto t0 = Clock::now();
    const TrapGeometry g = reference_rf_geometry();
    const DriveParams d{120.0, units::angular(17 * units::MHz)};
    const IonSpecies ion = calcium40();
    const auto minima = find_rf_minima(g, d, ion, {0.0, -300 * um, 300 * um, 40 * um, 300 * um});
    if (minima.size() != 2) return {false, fmt("%zu minima found", minima.size())};
    const double height = 0.5 * (minima[0].height + minima[1].height);
    const double separation = std::abs(minima[1].position.y() - minima[0].position.y());
    const SecularResult s = secular_frequencies(g, d, {}, ion, minima[1].position);
    const double radial = s.frequencies[1] / units::two_pi;
    const double elapsed = seconds_since(t0);
    auto within = [](double v, double ref) { return std::abs(v - ref) <= kGeometryRelTol * ref; };
    return {within(height, 125 * um) && within(separation, 100 * um) && within(radial, 2.6 * units::MHz) &&
                elapsed < kGeometryMaxSeconds,
            fmt("height %.1f um, separation %.1f um, radial %.3f MHz, %.2f s", height / um, separation / um,
                radial / units::MHz, elapsed)};
}

Outcome criterion10() {
    const auto table = io::parse_csv(io::read_text_file(fs::path(TRAPQA_DATA_DIR) / "heating_rates.csv"));
    auto points = io::heating_points_from_csv(table);
    std::erase_if(points, [](const HeatingPoint& p) { return p.site != "10"; });
    const PowerLawFit site = power_law_fit(points);
    std::vector<HeatingPoint> synth;
    for (double f : {0.3, 0.5, 0.8, 1.1, 1.5}) {
        const double w = units::angular(f * units::MHz);
        synth.push_back({"synthetic", w, 5e13 / (w * w), 0.0});
    }
    const double alpha = power_law_fit(synth).alpha;
    const bool ok = site.alpha >= 1.5 && site.alpha <= 2.5 && site.alpha_sigma > 0.0 &&
                    std::abs(alpha - 2.0) <= kExactAlphaTol;
    return {ok, fmt("site 10 alpha %.3f +/- %.3f (%d points); synthetic alpha %.9f", site.alpha, site.alpha_sigma,
                    site.points, alpha)};
}

Outcome criterion11() {
    const RTModel truth{995.32, 98835.16, 229.27};
    auto sweep = [&](double noise, std::uint64_t seed) {
        SplitMix64 rng(seed);
        std::vector<RTSample> out;
        for (double t : {6.0, 8.0, 10.0, 12.0, 15.0, 20.0, 30.0, 45.0, 60.0, 80.0, 100.0, 140.0, 180.0, 220.0, 260.0, 300.0}) {
            // Box-Muller from the counter-based generator.
            const double g = std::sqrt(-2.0 * std::log(1.0 - rng.uniform())) * std::cos(units::two_pi * rng.uniform());
            out.push_back({t, model_resistance(truth, t) * (1.0 + noise * g)});
        }
        return out;
    };
    auto worst_param = [&](const RTModel& m) {
        return std::max({std::abs(m.residual_resistance / truth.residual_resistance - 1.0),
                         std::abs(m.amplitude / truth.amplitude - 1.0),
                         std::abs(m.debye_temperature / truth.debye_temperature - 1.0)});
    };
    const double clean = worst_param(fit_rt_curve(sweep(0.0, 1)).model);
    const double noisy = worst_param(fit_rt_curve(sweep(kFitNoise, derive_seed(cli::kDefaultSeed, 11))).model);
    double inv = 0.0;
    for (double t = 2.0; t <= 300.0; t += 1.7) {
        inv = std::max(inv, std::abs(invert_temperature(truth, model_resistance(truth, t), 1.0).temperature - t));
    }
    const double s1 = sensitivity(calibrate_rt_model(10.8e3, 286.2, 1.0), 10.0, 15.0);
    const double s2 = sensitivity(calibrate_rt_model(32.3e3, 997.2625, 2.5), 10.0, 15.0);
    const bool ok = clean < kFitNoiselessTol && noisy < kFitNoisyTol && inv < kInversionTol &&
                    std::abs(s1 - 1.0) <= kSensitivityTol && std::abs(s2 - 2.5) <= kSensitivityTol;
    return {ok, fmt("fit %.1e noiseless, %.1e noisy; inversion %.1e K; TS1 %.3f, TS2 %.3f Ohm/K", clean, noisy, inv, s1, s2)};
}

Outcome criterion12() {
    const TrapGeometry g = reference_trap_geometry();
    const VoltageMap v{{"DC16", 3.0}, {"DC18", 0.0}, {"DC20", 3.0}, {"DC51", 3.0}, {"DC53", 0.0}, {"DC55", 3.0}};
    const double lo = -150 * um, hi = 150 * um;
    auto position = [&](const FaultScenario& s, double scale) {
        return equilibrium_position(scenario_potential(g, v, s, scale), lo, hi).position;
    };

    double drift = 0.0;
    for (const char* id : {"DC16", "DC20", "DC51", "DC55"}) {
        const FaultScenario s = FaultScenario::shorted(id);
        const double p1 = position(s, 1.0);
        for (double scale : {2.0, 4.0}) drift = std::max(drift, std::abs(position(s, scale) - p1));
    }

    std::vector<double> ls, lx;
    for (double s : {1.0, 2.0, 4.0, 8.0}) {
        const auto u = [s](double x) { return s * x * x - 1e-6 * x; };
        ls.push_back(std::log(s));
        lx.push_back(std::log(equilibrium_position(u, -10e-6, 10e-6).position));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < ls.size(); ++i) sx += ls[i], sy += lx[i], sxx += ls[i] * ls[i], sxy += ls[i] * lx[i];
    const double n = static_cast<double>(ls.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);

    // Synthetic scenarios generated by scenario_potential.
    SplitMix64 rng(derive_seed(cli::kDefaultSeed, 12));
    const double nominal = position(FaultScenario::nominal(), 1.0);
    const char* zero_volt[] = {"DC17", "DC19", "DC52", "DC54"};
    const char* driven[] = {"DC16", "DC20", "DC51", "DC55"};
    int cases = 0, correct = 0;
    for (int trial = 0; trial < 60; ++trial) {
        FaultScenario s;
        FaultClass expected;
        const double mag = 0.2 + 0.8 * rng.uniform();
        const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
        switch (trial % 4) {
            case 0:
                s = FaultScenario::shorted(driven[trial / 4 % 4]);
                expected = FaultClass::ShortedCompatible;
                break;
            case 1:
                s = FaultScenario::floating(zero_volt[trial / 4 % 4], sign * mag);
                expected = FaultClass::FloatingOrCharge;
                break;
            case 2: {
                const double x0 = (rng.uniform() - 0.5) * 300 * um;
                s = FaultScenario::gap_charge({{x0, x0 + 8 * um, 40 * um, 135 * um}}, sign * mag);
                expected = FaultClass::FloatingOrCharge;
                break;
            }
            default:
                s = FaultScenario::nominal();
                expected = FaultClass::Nominal;
        }
        std::vector<PositionMeasurement> m;
        double biggest = 0.0;
        for (double scale : {1.0, 2.0, 4.0}) {
            const double p = position(s, scale);
            biggest = std::max(biggest, std::abs(p - nominal));
            m.push_back({"site", 0.0, scale, p});
        }
        if (expected != FaultClass::Nominal && biggest < 3.0 * kClassifyTol) continue;
        ++cases;
        correct += classify_fault(m, {{"site", nominal}}, {kClassifyTol, 0.0}).overall == expected;
    }
    return {drift <= kSolverTol && std::abs(slope + 1.0) <= kSlopeTol && cases > 0 && correct == cases,
            fmt("shorted drift %.3f um; log-log slope %.6f; classified %d/%d", drift / um, slope, correct, cases)};
}

Outcome criterion13() {
    const fs::path dir = fs::temp_directory_path() / "trapqa_acceptance";
    fs::create_directories(dir);
    std::vector<std::string> digests[2];
    for (int run = 0; run < 2; ++run) {
        const std::string tag = std::to_string(run);
        const std::string results = (dir / ("wafer" + tag + ".json")).string();
        const std::string threads = run == 0 ? "1" : "4";
        if (run_cli({"--seed", "424242", "-o", results, "wafertest", "--wafer", "--threads", threads}) != 0) {
            return {false, "wafertest failed"};
        }
        const std::string svg = (dir / ("map" + tag + ".svg")).string();
        const std::string csv = (dir / ("map" + tag + ".csv")).string();
        const std::string stats = (dir / ("stats" + tag + ".json")).string();
        if (run_cli({"yieldmap", "--results", results, "--map", svg, "--csv", csv, "--stats", stats}) != 0) {
            return {false, "yieldmap failed"};
        }
        std::string nbar;
        run_cli({"--seed", "424242", "-f", "json", "heating", "--sideband", "0.2,0.5,400", "--bootstrap", "500"}, &nbar);
        for (const auto& p : {results, svg, csv, stats}) digests[run].push_back(io::read_text_file(p));
        digests[run].push_back(nbar);
    }
    std::size_t bytes = 0;
    bool same = true;
    for (std::size_t i = 0; i < digests[0].size(); ++i) {
        same = same && digests[0][i] == digests[1][i];
        bytes += digests[0][i].size();
    }
    fs::remove_all(dir);
    return {same, fmt("%zu artifacts, %zu bytes, identical across runs (1 vs 4 threads)", digests[0].size(), bytes)};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"RF dissipation table", criterion1},
        {"approximation consistency", criterion2},
        {"distributed-resistance oracle", criterion3},
        {"Poisson yield", criterion4},
        {"wafer-test soundness and completeness", criterion5},
        {"wafer-test step model", criterion6},
        {"spatial statistics", criterion7},
        {"electrostatics oracles", criterion8},
        {"reference-geometry physics", criterion9},
        {"heating-rate fit", criterion10},
        {"thermometry round trips", criterion11},
        {"diagnosis invariants", criterion12},
        {"CLI determinism", criterion13},
    };
    int failures = 0;
    int index = 1;
    for (const auto& [name, check] : criteria) {
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s %2d  %-40s %s\n", o.pass ? "PASS" : "FAIL", index++, name, o.detail.c_str());
        failures += !o.pass;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
    return failures;
}
