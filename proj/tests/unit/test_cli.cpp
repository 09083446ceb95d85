#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "trapqa/io.hpp"

using namespace trapqa;
namespace fs = std::filesystem;

namespace {

struct Invocation {
    int code;
    std::string out;
    std::string err;
};

Invocation run(std::vector<std::string> args) {
    args.insert(args.begin(), "trapqa");
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string data(const char* name) { return (fs::path(TRAPQA_DATA_DIR) / name).string(); }

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "trapqa_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST(Cli, HelpNamesTopics) {
    const Invocation r = run({"--help"});
    EXPECT_EQ(r.code, 0);
    for (const char* sub : {"dissipation", "wafertest", "yieldmap", "field", "strayfield", "diagnose", "thermo",
                            "heating", "validate"}) {
        EXPECT_NE(r.out.find(sub), std::string::npos) << sub;
    }
}

TEST(Cli, UnknownOptionIsConfigError) {
    EXPECT_EQ(run({"dissipation", "--bogus"}).code, cli::kConfigError);
    EXPECT_EQ(run({}).code, cli::kConfigError);
}

TEST(Cli, DissipationFormats) {
    const Invocation text = run({"dissipation"});
    EXPECT_EQ(text.code, 0);
    EXPECT_NE(text.out.find("191.748"), std::string::npos);
    const Invocation json = run({"-f", "json", "dissipation"});
    const auto j = io::Json::parse(json.out);
    EXPECT_EQ(j["rows"].size(), 6u);
    EXPECT_EQ(run({"-f", "xml", "dissipation"}).code, cli::kConfigError);
}

TEST(Cli, MissingInputIsConfigError) {
    const Invocation r = run({"dissipation", "--presets", "/nonexistent.json"});
    EXPECT_EQ(r.code, cli::kConfigError);
    EXPECT_NE(r.err.find("config error"), std::string::npos);
}

TEST(Cli, DomainErrorExitCode) {
    const Invocation r = run({"heating", "--sideband", "0.7,0.3,100"});
    EXPECT_EQ(r.code, cli::kDomainError);
}

TEST(Cli, WafertestSingleChipAndLog) {
    const fs::path log = scratch("log.csv");
    const Invocation r = run({"wafertest", "--faults", data("chip_faults_example.json"), "--log", log.string()});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("LEAK_DC_GND"), std::string::npos);
    EXPECT_NE(io::read_text_file(log).find("LEAK_DC_GND"), std::string::npos);
}

TEST(Cli, WaferToYieldmapPipeline) {
    const fs::path results = scratch("wafer.json"), svg = scratch("map.svg"), stats = scratch("stats.json");
    ASSERT_EQ(run({"--seed", "3", "-o", results.string(), "wafertest", "--wafer", "--plant", data("plant_reference.json")}).code, 0);
    ASSERT_EQ(run({"yieldmap", "--results", results.string(), "--map", svg.string(), "--stats", stats.string()}).code, 0);
    const auto j = io::read_json_file(stats);
    EXPECT_EQ(j["passes"], 258);
    EXPECT_NEAR(j["defects"]["per_step"].get<double>(), 2.8187, 1e-4);
    EXPECT_EQ(j["periodicity"]["flagged"].size(), 1u);
    EXPECT_NE(io::read_text_file(svg).find("data-star"), std::string::npos);
}

TEST(Cli, EmptyWaferYieldUndefined) {
    const Invocation r = run({"yieldmap"});
    EXPECT_EQ(r.code, 0);
    const auto j = io::Json::parse(r.out);
    EXPECT_FALSE(j["yield_defined"].get<bool>());
    EXPECT_TRUE(j["yield"].is_null());
    EXPECT_TRUE(j["edge"].contains("undefined"));
}

TEST(Cli, FieldScanCsv) {
    const Invocation r = run({"field", "--scan", "z", "--from", "50", "--to", "200", "--points", "4"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out.rfind("x_um,y_um,z_um,phi_V,Ex_V_per_m,Ey_V_per_m,Ez_V_per_m\n", 0), 0u);
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 5);
    EXPECT_EQ(run({"field", "--scan", "w"}).code, cli::kConfigError);
}

TEST(Cli, DiagnosePredictAndClassify) {
    const Invocation p = run({"diagnose", "--voltages", data("axial_voltages.json"), "--scenario", data("scenario_shorted.json")});
    EXPECT_EQ(p.code, 0);
    EXPECT_NE(p.out.find("52.17"), std::string::npos);
    const Invocation c = run({"diagnose", "--measurements", data("position_measurements.csv"), "--nominal", data("nominal_positions.csv")});
    EXPECT_EQ(io::Json::parse(c.out)["overall"], "FLOATING_OR_CHARGE");
}

TEST(Cli, ThermoAndHeating) {
    const auto t = io::Json::parse(run({"thermo", "--sensor", "TS1"}).out);
    EXPECT_NEAR(t["sensitivity_ohm_per_K"].get<double>(), 1.0, 1e-6);
    const auto h = io::Json::parse(run({"heating", "--points", data("heating_rates.csv"), "--site", "10"}).out);
    EXPECT_NEAR(h["power_law"]["alpha"].get<double>(), 2.2514, 1e-4);
    EXPECT_EQ(run({"heating", "--points", data("heating_rates.csv"), "--site", "99"}).code, cli::kConfigError);
}

TEST(Cli, ValidateReportsFindings) {
    EXPECT_EQ(run({"validate", data("default_netlist.json"), data("default_limits.json")}).code, 0);
    const fs::path bad = scratch("bad_faults.json");
    std::ofstream(bad) << R"({"faults":[{"kind":"OPEN","net":"NOPE"}]})";
    const Invocation r = run({"validate", bad.string()});
    EXPECT_EQ(r.code, cli::kConfigError);
    EXPECT_NE(r.out.find("/faults/0/net"), std::string::npos);
}

TEST(Cli, SeededArtifactsAreByteIdentical) {
    const fs::path a = scratch("a.svg"), b = scratch("b.svg");
    for (const auto& p : {a, b}) {
        ASSERT_EQ(run({"--seed", "11", "-f", "svg", "-o", p.string(), "yieldmap"}).code, 0);
    }
    EXPECT_EQ(io::read_text_file(a), io::read_text_file(b));
}
