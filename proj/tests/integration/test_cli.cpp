#include <gtest/gtest.h>

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "commands.hpp"
#include "config.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace cpofdm::cli;
using json = nlohmann::json;

namespace {

const fs::path kScenarios = CPOFDM_SCENARIO_DIR;

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("cpofdm_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_file(const fs::path& path, const std::string& text) {
    std::ofstream(path) << text;
    return path;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun run(const std::string& cmd, const CommandOptions& opt) {
    std::ostringstream out, err;
    const int code = run_command(cmd, opt, out, err);
    return {code, out.str(), err.str()};
}

CommandOptions options(const fs::path& config, const fs::path& out) {
    CommandOptions o;
    o.config = config;
    o.out = out;
    return o;
}

// One MICF design (no search) for the two-transmitter scene, shared by the tests.
const fs::path& set_b_waveform() {
    static const fs::path path = [] {
        const fs::path dir = scratch("shared_design");
        const auto cfg = write_file(dir / "design.cfg",
                                    "mode = micf\nnum_subcarriers = 309\nrange_cells = 96\neta_max = 40\n"
                                    "num_tx = 2\niterations = 8\nseed = 3\n");
        const CliRun r = run("design", options(cfg, dir / "out"));
        EXPECT_EQ(r.code, 0) << r.err;
        return dir / "out" / "waveform.bin";
    }();
    return path;
}

}  // namespace

TEST(CliDesign, ParaunitaryModeIsFlat) {
    const fs::path dir = scratch("pu");
    CommandOptions o = options(kScenarios / "design_paraunitary.cfg", dir);
    const CliRun r = run("design", o);
    ASSERT_EQ(r.code, 0) << r.err;
    for (const char* f : {"waveform.bin", "waveform.csv", "metrics.json", "factors.bin"}) {
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    }
    const json m = read_json(dir / "metrics.json");
    EXPECT_EQ(m["mode"], "paraunitary");
    EXPECT_GE(m["base_pulses"]["xi_db"].get<double>(), -1e-10);
    for (const auto& x : m["waveform"]["xi_db_per_tx"]) EXPECT_GE(x.get<double>(), -1e-10);
    EXPECT_LT(m["waveform"]["flat_unitary_deviation"].get<double>(), 1e-15);
}

TEST(CliDesign, MissingConfigLeavesNoOutput) {
    const fs::path dir = fs::temp_directory_path() / "cpofdm_cli_missing";
    fs::remove_all(dir);
    CliRun r = run("design", options(dir / "nope.cfg", dir / "out"));
    EXPECT_EQ(r.code, kExitConfig);
    EXPECT_NE(r.err.find("config file not found"), std::string::npos);
    EXPECT_FALSE(fs::exists(dir / "out"));
    CommandOptions none;
    none.out = dir / "out";
    r = run("design", none);
    EXPECT_EQ(r.code, kExitConfig);
    EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(CliDesign, ConfigErrorsExitTwo) {
    const fs::path dir = scratch("bad_design");
    auto expect_config_error = [&](const std::string& text, const std::string& needle) {
        const auto cfg = write_file(dir / "d.cfg", text);
        const CliRun r = run("design", options(cfg, dir / "out"));
        EXPECT_EQ(r.code, kExitConfig) << text;
        EXPECT_NE(r.err.find(needle), std::string::npos) << r.err;
        EXPECT_FALSE(fs::exists(dir / "out"));
    };
    expect_config_error("num_subcarriers = 64\nrange_cell = 8\n", "unknown key 'range_cell'");
    expect_config_error("mode = fancy\n", "mode must be");
    expect_config_error("num_tx = 2\nnum_pulses = 3\n", "num_pulses=3");
    expect_config_error("num_tx = 5\n", "num_tx in [1, 4]");
    expect_config_error("placement = none\nnum_pulses = 40\n", "N_t=33");
    expect_config_error("g_f = 1.5\n", "G_f");
    expect_config_error("mode = paraunitary\nsearch_trials = 4\n", "search_trials");
}

TEST(CliDesign, RerunIsByteIdentical) {
    const fs::path dir = scratch("rerun");
    const auto cfg = write_file(dir / "d.cfg",
                                "num_subcarriers = 64\nrange_cells = 8\neta_max = 4\nnum_tx = 2\n"
                                "iterations = 4\nsearch_trials = 6\nseed = 11\n");
    ASSERT_EQ(run("design", options(cfg, dir / "a")).code, 0);
    ASSERT_EQ(run("design", options(cfg, dir / "b")).code, 0);
    for (const char* f : {"waveform.bin", "waveform.csv", "metrics.json"}) {
        EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
    }
    CommandOptions o = options(cfg, dir / "c");
    o.seed = 12;
    ASSERT_EQ(run("design", o).code, 0);
    EXPECT_NE(slurp(dir / "a" / "waveform.bin"), slurp(dir / "c" / "waveform.bin"));
    EXPECT_EQ(read_json(dir / "c" / "metrics.json")["search"]["trials"], 6);
}

TEST(CliVerify, DefaultChecksPass) {
    const fs::path dir = scratch("verify");
    CommandOptions o;
    o.out = dir;
    o.trials = 2000;
    o.waveform = set_b_waveform();
    const CliRun r = run("verify", o);
    ASSERT_EQ(r.code, 0) << r.err << r.out;
    const json v = read_json(dir / "verify.json");
    EXPECT_TRUE(v["passed"].get<bool>());
    EXPECT_EQ(v["checks"].size(), 10u);
}

TEST(CliVerify, BrokenWaveformExitsThree) {
    const fs::path dir = scratch("verify_bad");
    std::ostringstream bin;
    {
        std::ifstream in(set_b_waveform(), std::ios::binary);
        bin << in.rdbuf();
    }
    std::string bytes = bin.str();
    // Nudge S_0 of pulse (0, 0): leaks into the zero head and tail.
    double v = 0.0;
    std::memcpy(&v, bytes.data() + 60, 8);
    v += 0.01;
    std::memcpy(bytes.data() + 60, &v, 8);
    write_file(dir / "bad.bin", bytes);
    CommandOptions o;
    o.out = dir / "out";
    o.trials = 10;
    o.waveform = dir / "bad.bin";
    const CliRun r = run("verify", o);
    EXPECT_EQ(r.code, kExitRuntime);
    const json v2 = read_json(dir / "out" / "verify.json");
    EXPECT_FALSE(v2["passed"].get<bool>());
}

TEST(CliSimulate, NoiselessSetBExactAndFast) {
    const fs::path dir = scratch("sim0");
    CommandOptions o = options(kScenarios / "scene_set_b.cfg", dir);
    o.waveform = set_b_waveform();
    o.export_frames = true;
    const auto t0 = std::chrono::steady_clock::now();
    const CliRun r = run("simulate", o);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_LT(secs, 10.0);
    const json s = read_json(dir / "summary.json");
    EXPECT_LT(s["mse"].get<double>(), 1e-18);
    EXPECT_LT(s["max_relative_error_first_run"].get<double>(), 1e-9);
    EXPECT_EQ(s["separation"], "fast");
    EXPECT_EQ(s["pairs"].size(), 4u);
    EXPECT_EQ(s["scene"]["target_cells"].size(), 10u);
    EXPECT_TRUE(fs::exists(dir / "estimate.csv"));
    EXPECT_TRUE(fs::exists(dir / "frames.csv"));
}

TEST(CliSimulate, TwelveDbMatchesTheory) {
    const fs::path dir = scratch("sim12");
    CommandOptions o = options(kScenarios / "scene_set_b_12db.cfg", dir);
    o.waveform = set_b_waveform();
    ASSERT_EQ(run("simulate", o).code, 0);
    const json s = read_json(dir / "summary.json");
    for (const auto& p : s["pairs"]) {
        EXPECT_NEAR(p["empirical_snr_db"].get<double>(), p["theory_snr_db"].get<double>(), 0.5) << p.dump();
        EXPECT_LE(p["theory_snr_db"].get<double>(), p["max_snr_db"].get<double>() + 1e-12);
    }
}

TEST(CliSimulate, DimensionMismatchFails) {
    const fs::path dir = scratch("sim_mismatch");
    const auto cfg = write_file(dir / "scene.cfg",
                                "eta = 1 0 ; 0 2\neta_max = 4\nrange_cells = 8\ncarrier_hz = 9e9\n"
                                "bandwidth_hz = 150e6\ntarget_cells = 1 2\n");
    CommandOptions o = options(cfg, dir / "out");
    o.waveform = set_b_waveform();
    const CliRun r = run("simulate", o);
    EXPECT_NE(r.code, 0);
    EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(CliSimulate, MissingWaveformIsConfigError) {
    const fs::path dir = scratch("sim_nowf");
    const auto cfg = write_file(dir / "scene.cfg",
                                "eta = 1 0\neta_max = 4\nrange_cells = 8\ncarrier_hz = 9e9\n"
                                "bandwidth_hz = 150e6\ntarget_cells = 1\nwaveform = missing.bin\n");
    const CliRun r = run("simulate", options(cfg, dir / "out"));
    EXPECT_EQ(r.code, kExitConfig);
    EXPECT_NE(r.err.find("missing.bin"), std::string::npos);
}

TEST(CliCompare, OrderingAndSharedSeeds) {
    for (const char* scene : {"scene_set_b.cfg", "scene_set_b_12db.cfg"}) {
        const fs::path dir = scratch(std::string("cmp_") + scene);
        CommandOptions o = options(kScenarios / scene, dir);
        o.waveform = set_b_waveform();
        ASSERT_EQ(run("compare", o).code, 0);
        const json s = read_json(dir / "summary.json");
        const auto& m = s["methods"];
        EXPECT_EQ(m["ofdm"]["noise_seeds"], m["p4"]["noise_seeds"]);
        EXPECT_EQ(m["ofdm"]["noise_seeds"], m["fd_lfm"]["noise_seeds"]);
        const double ofdm = m["ofdm"]["mse"].get<double>();
        EXPECT_LT(ofdm, m["p4"]["mse"].get<double>());
        EXPECT_LT(ofdm, m["fd_lfm"]["mse"].get<double>());
        if (std::string(scene) == "scene_set_b.cfg") {
            EXPECT_LT(ofdm, 1e-18);
            EXPECT_GT(m["p4"]["mse"].get<double>(), 1e-6);
            EXPECT_GT(m["fd_lfm"]["mse"].get<double>(), 1e-6);
        }
        const std::string csv = slurp(dir / "compare.csv");
        EXPECT_EQ(csv.rfind("beta,alpha,m,true_re,true_im,ofdm_re,ofdm_im,p4_re,p4_im,fdlfm_re,fdlfm_im\n", 0), 0u);
        EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 4 * 96);
    }
}

TEST(CliCompare, CodeFileIngestion) {
    const fs::path dir = scratch("cmp_codes");
    write_file(dir / "codes.csv", "# two codes\n0,1,2,3\n3,2,1,0\n");
    const auto cfg = write_file(dir / "scene.cfg",
                                "eta = 17 0 ; 6 32\neta_max = 40\nrange_cells = 96\ncarrier_hz = 9e9\n"
                                "bandwidth_hz = 150e6\nrandom_targets = 4\nbaseline = p4\ncode_file = codes.csv\n");
    CommandOptions o = options(cfg, dir / "out");
    o.waveform = set_b_waveform();
    ASSERT_EQ(run("compare", o).code, 0);
    const json s = read_json(dir / "out" / "summary.json");
    EXPECT_EQ(s["methods"]["p4"]["code_length"], 4);
    EXPECT_FALSE(s["methods"].contains("fd_lfm"));
}

TEST(CliMonteCarlo, TrialsZeroIsUsageError) {
    const fs::path dir = scratch("mc0");
    CommandOptions o = options(kScenarios / "montecarlo_table.cfg", dir / "out");
    o.trials = 0;
    EXPECT_EQ(run("montecarlo", o).code, kExitConfig);
    const auto cfg = write_file(dir / "mc.cfg", "trials = 0\n");
    EXPECT_EQ(run("montecarlo", options(cfg, dir / "out")).code, kExitConfig);
    EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(CliMonteCarlo, SweepFilesAndDeterminism) {
    const fs::path dir = scratch("mc");
    const auto cfg = write_file(dir / "mc.cfg",
                                "num_subcarriers = 64\nrange_cells = 8\neta_max = 4\ntrials = 6\n"
                                "sweep_num_pulses = 2 4\n");
    ASSERT_EQ(run("montecarlo", options(cfg, dir / "a")).code, 0);
    CommandOptions b = options(cfg, dir / "b");
    b.threads = 2;
    ASSERT_EQ(run("montecarlo", b).code, 0);
    for (const char* f : {"cdf_num_pulses_2.csv", "cdf_num_pulses_4.csv", "counts.csv", "summary.json"}) {
        ASSERT_TRUE(fs::exists(dir / "a" / f)) << f;
        EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
    }
    const json s = read_json(dir / "a" / "summary.json");
    EXPECT_EQ(s["settings"].size(), 2u);
    EXPECT_EQ(s["trials"], 6);
}

TEST(CliConfig, SceneParsing) {
    std::istringstream text(
        "eta = 17 0 ; 6 32\neta_max = 40\nrange_cells = 96\ncarrier_hz = 9e9\nbandwidth_hz = 150e6\n"
        "random_targets = 10\nsnr_db = 12\nsigma_d2 = 2\nseed = 5\nrepeats = 3\n");
    const auto doc = cpofdm::kv::Document::parse(text, "scene.cfg");
    const SceneSpec spec = parse_scene(doc, ".", std::nullopt);
    EXPECT_EQ(spec.scene.num_tx, 2u);
    EXPECT_EQ(spec.scene.num_rx, 2u);
    EXPECT_EQ(spec.scene.target_cells.size(), 10u);
    EXPECT_NEAR(spec.scene.sigma_n2, 2.0 / std::pow(10.0, 1.2), 1e-15);
    EXPECT_NE(spec.noise_seed(0), spec.noise_seed(1));
    EXPECT_NE(spec.rcs_seed(), spec.noise_seed(0));
    const SceneSpec other = parse_scene(doc, ".", 6);
    EXPECT_EQ(other.seed, 6u);
    EXPECT_NE(other.scene.target_cells, spec.scene.target_cells);
}

TEST(CliConfig, SceneErrors) {
    auto expect_error = [](const std::string& body, const std::string& needle) {
        std::istringstream text("range_cells = 96\ncarrier_hz = 9e9\nbandwidth_hz = 150e6\n" + body);
        const auto doc = cpofdm::kv::Document::parse(text, "scene.cfg");
        try {
            parse_scene(doc, ".", std::nullopt);
            ADD_FAILURE() << body;
        } catch (const ConfigError& e) {
            EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
        }
    };
    expect_error("eta = 17 0 ; 6 50\neta_max = 40\ntarget_cells = 1\n", "exceeds eta_max=40");
    expect_error("eta = 1 0\neta_max = 4\ntarget_cells = 96\n", "target cell 96");
    expect_error("eta = 1 0\neta_max = 4\ntarget_cells = 1\nrepeats = 0\n", "repeats");
    expect_error("eta = 1 0\neta_max = 4\ntarget_cells = 1\ntx_positions = 0 0 0\n", "not both");
    expect_error("eta = 1 0\neta_max = 4\ntarget_cells = 1\nbaseline = radar\n", "baseline");
}

TEST(CliConfig, GeometryScenario) {
    const auto doc = cpofdm::kv::Document::load(kScenarios / "scene_geometry.cfg");
    const SceneSpec spec = parse_scene(doc, kScenarios, std::nullopt);
    ASSERT_TRUE(spec.geometry.has_value());
    EXPECT_EQ(spec.scene.eta, spec.geometry->eta);
    EXPECT_NO_THROW(spec.scene.validate());
}

TEST(CliBinary, ExitCodes) {
    const std::string exe = CPOFDM_CLI_PATH;
    auto status = [](const std::string& cmd) {
        const int s = std::system((cmd + " > /dev/null 2>&1").c_str());
        return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
    };
    EXPECT_EQ(status(exe + " --help"), 0);
    EXPECT_EQ(status(exe), 2);
    EXPECT_EQ(status(exe + " design"), 2);
    EXPECT_EQ(status(exe + " design --config /nonexistent.cfg"), 2);
    EXPECT_EQ(status(exe + " montecarlo --config " + (kScenarios / "montecarlo_table.cfg").string() + " --trials 0"), 2);
    EXPECT_EQ(status(exe + " frobnicate"), 2);
}
