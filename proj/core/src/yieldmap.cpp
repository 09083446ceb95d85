#include "trapqa/yieldmap.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/binomial.hpp>

#include "trapqa/errors.hpp"
#include "trapqa/random.hpp"

namespace trapqa {

WaferLayout layout_wafer(const LayoutParams& params) {
    const double radius = 0.5 * params.wafer_diameter;
    if (!(params.wafer_diameter > 0.0)) throw ConfigError("wafer diameter must be positive", "/wafer_diameter_mm");
    if (!(params.chip_width > 0.0) || !(params.chip_height > 0.0)) {
        throw ConfigError("chip pitch must be positive", "/chip_pitch_mm");
    }
    if (!(params.edge_exclusion >= 0.0) || params.edge_exclusion >= radius) {
        throw ConfigError("edge exclusion must lie in [0, radius)", "/edge_exclusion_mm");
    }
    for (const auto& c : params.test_cells) {
        if (c.row < 0 || c.row > 2 || c.col < 0 || c.col > 2) {
            throw ConfigError("test cell outside the 3x3 reticle", "/test_cells");
        }
    }
    const double usable = radius - params.edge_exclusion;
    const double w = params.chip_width, h = params.chip_height;
    const double shot_w = 3.0 * w, shot_h = 3.0 * h;
    const int nx = static_cast<int>(std::ceil((radius + std::abs(params.shot_offset_x)) / shot_w)) + 1;
    const int ny = static_cast<int>(std::ceil((radius + std::abs(params.shot_offset_y)) / shot_h)) + 1;

    struct Raw {
        double x, y;
        int shot_i, shot_j;
        ReticleCell cell;
    };
    std::vector<Raw> raw;
    for (int sj = ny; sj >= -ny; --sj) {
        for (int si = -nx; si <= nx; ++si) {
            const double sx = params.shot_offset_x + si * shot_w;
            const double sy = params.shot_offset_y + sj * shot_h;
            for (int r = 0; r < 3; ++r) {
                for (int c = 0; c < 3; ++c) {
                    const ReticleCell cell{r, c};
                    if (std::find(params.test_cells.begin(), params.test_cells.end(), cell) !=
                        params.test_cells.end()) {
                        continue;
                    }
                    const double cx = sx + (c - 1) * w;
                    const double cy = sy + (1 - r) * h;
                    const double fx = std::abs(cx) + 0.5 * w;
                    const double fy = std::abs(cy) + 0.5 * h;
                    if (std::hypot(fx, fy) <= usable) raw.push_back({cx, cy, si, sj, cell});
                }
            }
        }
    }
    if (raw.empty()) throw ConfigError("layout parameters leave no productive site");

    // Shots are numbered in scan order (top to bottom, left to right).
    std::vector<std::pair<int, int>> shot_keys;
    for (const auto& r : raw) shot_keys.emplace_back(-r.shot_j, r.shot_i);
    std::sort(shot_keys.begin(), shot_keys.end());
    shot_keys.erase(std::unique(shot_keys.begin(), shot_keys.end()), shot_keys.end());

    std::stable_sort(raw.begin(), raw.end(), [](const Raw& a, const Raw& b) {
        if (a.y != b.y) return a.y > b.y;
        return a.x < b.x;
    });

    WaferLayout layout;
    layout.params = params;
    for (std::size_t k = 0; k < shot_keys.size(); ++k) {
        const double sx = params.shot_offset_x + shot_keys[k].second * shot_w;
        const double sy = params.shot_offset_y - shot_keys[k].first * shot_h;
        layout.shots.push_back({static_cast<int>(k), sx - 0.5 * shot_w, sx + 0.5 * shot_w,
                                sy - 0.5 * shot_h, sy + 0.5 * shot_h});
    }
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto key = std::make_pair(-raw[i].shot_j, raw[i].shot_i);
        const auto it = std::lower_bound(shot_keys.begin(), shot_keys.end(), key);
        layout.sites.push_back({static_cast<int>(i) + 1, raw[i].x, raw[i].y,
                                static_cast<int>(it - shot_keys.begin()), raw[i].cell});
    }
    return layout;
}

void validate(const WaferResult& result) {
    if (result.results.empty()) return;
    if (result.results.size() != result.layout.sites.size()) {
        throw ConfigError("result count " + std::to_string(result.results.size()) +
                              " differs from site count " + std::to_string(result.layout.sites.size()),
                          "/results");
    }
    for (std::size_t i = 0; i < result.results.size(); ++i) {
        if (result.results[i].chip_id != result.layout.sites[i].chip_id) {
            throw ConfigError("result for chip " + std::to_string(result.results[i].chip_id) +
                                  " is out of site order", "/results/" + std::to_string(i));
        }
    }
}

YieldStats yield_stats(const WaferResult& result) {
    validate(result);
    YieldStats s;
    s.total = static_cast<int>(result.results.size());
    for (const auto& r : result.results) {
        if (r.outcome == FailureCode::Pass) ++s.passes;
        else ++s.failures[r.outcome];
    }
    if (s.total > 0) s.yield = static_cast<double>(s.passes) / s.total;
    return s;
}

double infer_defects(double yield_fraction, double chip_count) {
    if (!(chip_count > 0.0)) throw DomainError("chip count must be positive");
    if (yield_fraction == 0.0) throw DomainError("zero yield: defect count diverges");
    if (!(yield_fraction > 0.0 && yield_fraction <= 1.0)) throw DomainError("yield must lie in (0, 1]");
    return -chip_count * std::log(yield_fraction);
}

double defects_per_step(double defects, int process_steps) {
    if (process_steps <= 0) throw DomainError("process step count must be positive");
    return defects / process_steps;
}

double poisson_yield(double defects, double chip_count) {
    if (!(chip_count > 0.0)) throw DomainError("chip count must be positive");
    return std::exp(-defects / chip_count);
}

PeriodicityReport reticle_periodicity(const WaferResult& result, FailureCode code, double alpha) {
    validate(result);
    PeriodicityReport rep;
    rep.code = code;
    std::array<int, 9> sites{}, fails{};
    for (std::size_t i = 0; i < result.results.size(); ++i) {
        const auto& c = result.layout.sites[i].cell;
        const int k = 3 * c.row + c.col;
        ++sites[static_cast<std::size_t>(k)];
        if (result.results[i].outcome == code) ++fails[static_cast<std::size_t>(k)];
    }
    const int n_sites = std::accumulate(sites.begin(), sites.end(), 0);
    rep.total_failures = std::accumulate(fails.begin(), fails.end(), 0);
    rep.pooled_rate = n_sites > 0 ? static_cast<double>(rep.total_failures) / n_sites : 0.0;
    for (int k = 0; k < 9; ++k) {
        CellStat cs;
        cs.cell = {k / 3, k % 3};
        cs.sites = sites[static_cast<std::size_t>(k)];
        cs.failures = fails[static_cast<std::size_t>(k)];
        if (rep.total_failures > 0 && cs.sites > 0 && cs.failures > 0 && rep.pooled_rate < 1.0) {
            const boost::math::binomial_distribution<double> null(cs.sites, rep.pooled_rate);
            // P(X >= k) = cdf(complement(X <= k - 1)).
            cs.p_value = boost::math::cdf(boost::math::complement(null, cs.failures - 1));
        }
        cs.p_adjusted = std::min(1.0, 9.0 * cs.p_value);
        cs.flagged = cs.p_adjusted < alpha;
        if (cs.flagged) rep.flagged.push_back(cs.cell);
        rep.cells.push_back(cs);
    }
    return rep;
}

EdgeReport edge_concentration(const WaferResult& result, FailureCode code, double annulus_fraction) {
    validate(result);
    if (!(annulus_fraction > 0.0 && annulus_fraction < 1.0)) {
        throw DomainError("annulus fraction must lie in (0, 1)");
    }
    const double r_edge = (1.0 - annulus_fraction) * result.layout.radius();
    EdgeReport rep;
    for (std::size_t i = 0; i < result.results.size(); ++i) {
        const auto& s = result.layout.sites[i];
        const bool edge = std::hypot(s.x, s.y) > r_edge;
        const bool fail = result.results[i].outcome == code;
        (edge ? rep.edge_sites : rep.interior_sites) += 1;
        if (fail) (edge ? rep.edge_failures : rep.interior_failures) += 1;
    }
    if (rep.edge_sites == 0 || rep.interior_sites == 0) {
        throw DomainError("edge or interior region holds no tested site: rate undefined");
    }
    const int total_fail = rep.edge_failures + rep.interior_failures;
    if (total_fail == 0) {
        throw DomainError("no " + std::string(to_string(code)) + " failures: rates undefined");
    }
    rep.edge_rate = static_cast<double>(rep.edge_failures) / rep.edge_sites;
    rep.interior_rate = static_cast<double>(rep.interior_failures) / rep.interior_sites;
    const double pooled = static_cast<double>(total_fail) / (rep.edge_sites + rep.interior_sites);
    const double se = std::sqrt(pooled * (1.0 - pooled) * (1.0 / rep.edge_sites + 1.0 / rep.interior_sites));
    if (se > 0.0) {
        rep.z = (rep.edge_rate - rep.interior_rate) / se;
        rep.p_value = 0.5 * std::erfc(rep.z / std::sqrt(2.0));
    } else {
        // Every site failed: no evidence either way.
        rep.z = 0.0;
        rep.p_value = 0.5;
    }
    return rep;
}

Fault representative_fault(const ChipNetlist& netlist, const TestPlan& plan, FailureCode code,
                           double pick) {
    std::vector<const Net*> dc, rf, loops;
    for (const auto& n : netlist.nets) {
        if (n.is_dc_like()) dc.push_back(&n);
        if (n.role == NetRole::Rf) rf.push_back(&n);
        if (n.has_loop()) loops.push_back(&n);
    }
    auto by_id = [](const Net* a, const Net* b) { return a->id < b->id; };
    std::sort(dc.begin(), dc.end(), by_id);
    std::sort(rf.begin(), rf.end(), by_id);
    std::sort(loops.begin(), loops.end(), by_id);
    auto choose = [&](const std::vector<const Net*>& v) -> std::size_t {
        if (v.empty()) throw DomainError("netlist cannot express " + std::string(to_string(code)));
        return std::min(v.size() - 1, static_cast<std::size_t>(pick * static_cast<double>(v.size())));
    };
    auto only_role = [&](NetRole role) {
        std::vector<const Net*> v;
        for (const Net* n : loops) {
            if (n->role == role) v.push_back(n);
        }
        return v;
    };
    switch (code) {
        case FailureCode::ContinuityFail: return Fault::open(loops[choose(loops)]->id);
        case FailureCode::LeakDcDc: {
            const std::size_t i = choose(dc);
            if (dc.size() < 2) throw DomainError("netlist needs two DC nets for LEAK_DC_DC");
            return Fault::short_circuit(dc[i]->id, dc[(i + 1) % dc.size()]->id, 1e6);
        }
        case FailureCode::LeakDcRf: {
            const std::size_t i = choose(dc);
            if (rf.empty()) throw DomainError("netlist has no RF net");
            return Fault::short_circuit(dc[i]->id, rf[i % rf.size()]->id, 1e6);
        }
        case FailureCode::LeakDcGnd: return Fault::leak_to_gnd(dc[choose(dc)]->id, 100e3);
        case FailureCode::LeakRf: return Fault::leak_to_gnd(rf[choose(rf)]->id, 100e3);
        case FailureCode::ResFailDc: {
            const auto v = only_role(NetRole::DcLoop);
            return Fault::resistance_shift(v[choose(v)]->id, 3.0);
        }
        case FailureCode::ResFailRf: {
            const auto v = only_role(NetRole::Rf);
            return Fault::resistance_shift(v[choose(v)]->id, 6.0);
        }
        case FailureCode::ResFailTs: {
            const auto v = only_role(NetRole::Sensor);
            return Fault::resistance_shift(v[choose(v)]->id, 1.5);
        }
        case FailureCode::HwFail: {
            if (plan.empty()) throw DomainError("empty plan");
            const auto step = std::min(plan.size() - 1, static_cast<std::size_t>(pick * static_cast<double>(plan.size())));
            return Fault::hw_fail(static_cast<int>(step));
        }
        case FailureCode::Pass: break;
    }
    throw DomainError("PASS is not a fault");
}

namespace {

// Planted code per site (Pass where nothing was planted).
std::vector<FailureCode> plant_codes(const WaferLayout& layout, std::span<const PlantRule> rules,
                                     std::uint64_t seed) {
    std::vector<FailureCode> codes(layout.sites.size(), FailureCode::Pass);
    const double radius = layout.radius();
    for (std::size_t r = 0; r < rules.size(); ++r) {
        const PlantRule& rule = rules[r];
        if (rule.code == FailureCode::Pass) throw DomainError("plant rule with PASS code");
        if (rule.count < 0) throw DomainError("plant rule count must be nonnegative");
        std::vector<std::size_t> eligible;
        for (std::size_t i = 0; i < layout.sites.size(); ++i) {
            if (codes[i] != FailureCode::Pass) continue;
            const Site& s = layout.sites[i];
            bool ok = true;
            if (rule.where == PlantRule::Where::Cell) ok = s.cell == rule.cell;
            if (rule.where == PlantRule::Where::Edge) {
                ok = std::hypot(s.x, s.y) > (1.0 - rule.annulus_fraction) * radius;
            }
            if (ok) eligible.push_back(i);
        }
        if (static_cast<std::size_t>(rule.count) > eligible.size()) {
            throw DomainError("plant rule " + std::to_string(r) + " asks for " + std::to_string(rule.count) +
                              " chips but only " + std::to_string(eligible.size()) + " are eligible");
        }
        // Partial Fisher-Yates driven by a per-rule stream.
        SplitMix64 rng(derive_seed(seed, r));
        for (int k = 0; k < rule.count; ++k) {
            const std::size_t span = eligible.size() - static_cast<std::size_t>(k);
            const std::size_t j = static_cast<std::size_t>(k) +
                                  std::min(span - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(span)));
            std::swap(eligible[static_cast<std::size_t>(k)], eligible[j]);
            codes[eligible[static_cast<std::size_t>(k)]] = rule.code;
        }
    }
    return codes;
}

}  // namespace

std::vector<FaultSet> plant_faults(const WaferLayout& layout, const ChipNetlist& netlist,
                                   const TestPlan& plan, std::span<const PlantRule> rules,
                                   std::uint64_t seed) {
    const auto codes = plant_codes(layout, rules, seed);
    std::vector<FaultSet> out(layout.sites.size());
    for (std::size_t i = 0; i < codes.size(); ++i) {
        if (codes[i] == FailureCode::Pass) continue;
        SplitMix64 rng(derive_seed(seed ^ 0x5bd1e995ULL, static_cast<std::uint64_t>(layout.sites[i].chip_id)));
        out[i].push_back(representative_fault(netlist, plan, codes[i], rng.uniform()));
    }
    return out;
}

std::vector<PlantRule> reference_plant_rules() {
    using W = PlantRule::Where;
    return {
        {FailureCode::ContinuityFail, 50, W::Edge, {}, 0.2},
        {FailureCode::ContinuityFail, 24, W::Anywhere, {}, 0.2},
        {FailureCode::LeakDcGnd, 40, W::Cell, {1, 2}, 0.2},
        {FailureCode::LeakDcGnd, 20, W::Anywhere, {}, 0.2},
        {FailureCode::LeakDcRf, 45, W::Anywhere, {}, 0.2},
        {FailureCode::LeakDcDc, 37, W::Anywhere, {}, 0.2},
        {FailureCode::ResFailTs, 2, W::Anywhere, {}, 0.2},
        {FailureCode::HwFail, 1, W::Anywhere, {}, 0.2},
    };
}

WaferResult simulate_wafer(const WaferLayout& layout, const ChipNetlist& netlist,
                           const TestLimits& limits, std::span<const PlantRule> rules,
                           std::uint64_t seed, unsigned threads) {
    validate(netlist);
    const TestPlan plan = build_default_plan(netlist);
    auto faults = plant_faults(layout, netlist, plan, rules, seed);
    auto shared = std::make_shared<const ChipNetlist>(netlist);
    std::vector<ChipJob> jobs;
    jobs.reserve(layout.sites.size());
    for (std::size_t i = 0; i < layout.sites.size(); ++i) {
        jobs.push_back({layout.sites[i].chip_id, shared, std::move(faults[i])});
    }
    RunOptions opt;
    opt.noise_seed = seed;
    return {layout, run_wafer(jobs, limits, plan, threads, opt)};
}

WaferResult synthesize_outcomes(const WaferLayout& layout, std::span<const PlantRule> rules,
                                std::uint64_t seed) {
    const auto codes = plant_codes(layout, rules, seed);
    WaferResult out{layout, {}};
    out.results.reserve(codes.size());
    for (std::size_t i = 0; i < codes.size(); ++i) {
        ChipResult r;
        r.chip_id = layout.sites[i].chip_id;
        r.outcome = codes[i];
        out.results.push_back(std::move(r));
    }
    return out;
}

}  // namespace trapqa
