// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>
#include <sys/wait.h>

#include "heightscope/harness.hpp"

using namespace heightscope;
namespace fs = std::filesystem;

namespace {

// Small and fast: 2 SNRs, 3 trials, thresholds given so no calibration runs.
ScenarioConfig small_config() {
  ScenarioConfig c;
  c.snr_db = {0.0, 10.0};
  c.trials = 3;
  c.methods = {Method::GroupSparse, Method::StepByStep, Method::Music, Method::Burg};
  c.trajectory.end = 144.0;  // two intervals
  c.gamma.values = {{"gs", 0.02}, {"sbys", 0.02}};
  return c;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, sep);) out.push_back(item);
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("heightscope_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST(Config, MinimalGetsDefaults) {
  const ScenarioConfig c = parse_config_text("layout: roof_3x4\nseed: 7\n");
  EXPECT_EQ(c.layout, "roof_3x4");
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.trajectory.start, 160.0);
  EXPECT_EQ(c.trajectory.end, 80.0);
  EXPECT_EQ(c.trajectory.interval, 8.0);
  EXPECT_EQ(c.scoring.dtw, 0.05);
  EXPECT_EQ(c.solver.sparsity, 2);
  EXPECT_EQ(c.trials, 200);
  EXPECT_EQ(c.rho_grid.size(), 5u);
}

TEST(Config, UnknownPresetNamesKey) {
  try {
    parse_config_text("seed: 1\nlayout: bumper_9x9\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("layout"), std::string::npos);
    EXPECT_EQ(e.line(), 2);
  }
}

TEST(Config, UnknownKeysCarryLines) {
  try {
    parse_config_text("seed: 1\nbogus: 3\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
    EXPECT_EQ(e.line(), 2);
  }
  try {
    parse_config_text("layout: bumper_6x8\nsolver:\n  sparsity: 2\n  spars: 2\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("solver.spars"), std::string::npos);
    EXPECT_EQ(e.line(), 4);
  }
}

TEST(Config, InvalidValues) {
  EXPECT_THROW(parse_config_text("trials: 0\n"), ConfigError);
  EXPECT_THROW(parse_config_text("snr_db: []\n"), ConfigError);
  EXPECT_THROW(parse_config_text("trials: many\n"), ConfigError);
  EXPECT_THROW(parse_config_text("methods: [gs, fft]\n"), ConfigError);
  EXPECT_THROW(parse_config_text("rho_true: -1.5\n"), ConfigError);
  EXPECT_THROW(parse_config_text("layout: [\n"), ConfigError);
  EXPECT_THROW(parse_config_text("trajectory:\n  interval: 7\n"), ConfigError);
  EXPECT_THROW(parse_config_text(""), ConfigError);
}

#ifdef HEIGHTSCOPE_CONFIG_DIR
TEST(Config, ShippedExamplesParse) {
  int n = 0;
  for (const auto& entry : fs::directory_iterator(HEIGHTSCOPE_CONFIG_DIR)) {
    if (entry.path().extension() != ".yaml") continue;
    EXPECT_NO_THROW(validate_config(parse_config(entry.path()))) << entry.path();
    ++n;
  }
  EXPECT_GE(n, 1);
}
#endif

TEST(Config, RoundTrip) {
  ScenarioConfig c;
  c.layout = "cross_12x16";
  c.second_aperture = "roof_3x4";
  c.rho_true = Complex{-0.55, 0.1};
  c.rho_grid = {Complex{-0.2, 0.0}, Complex{-0.8, 0.05}};
  c.snr_db = {-7.5, 3.0};
  c.trials = 17;
  c.methods = {Method::Burg, Method::GroupSparse};
  c.azimuth_stage = AzimuthStage::Multipath;
  c.scene.targets = 2;
  c.scene.mode = SceneMode::TwoDimensional;
  c.scene.on_grid = false;
  c.solver.labels = LabelOption::A;
  c.solver.pooling = Pooling::Max;
  c.solver.residual_fraction = 0.1;
  c.scoring.far_mode = FarMode::PerTrial;
  c.scoring.false_alarms = FalseAlarmRule::Outside;
  c.baseline.hankel_rows = 30;
  c.gamma.values = {{"gs", 0.0123456789012345}};
  c.gamma.sidecar = "g.yaml";
  c.grids.theta_max_deg = 1.5;
  c.seed = 123456789012345ULL;
  c.wavelength = 0.0038961;
  const std::string text = serialize_config(c);
  EXPECT_EQ(parse_config_text(text), c);
  EXPECT_EQ(serialize_config(parse_config_text(text)), text);
  EXPECT_EQ(parse_config_text(serialize_config(ScenarioConfig{})), ScenarioConfig{});
}

TEST(Report, CsvFormat) {
  EXPECT_EQ(csv_header(), "snr_db,method,pd,far,de,trials,wall_time_s");
  const ResultRow row{-5.0, "gs", 1.0, 0.0, 1.0, 200, 0.0};
  EXPECT_EQ(csv_line(row), "-5,gs,1.00000,0.00000,1.00000,200,0.00000");
  const std::string csv = to_csv({row});
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
  EXPECT_EQ(csv_line({0.25, "music", 0.123456, 1.0 / 3.0, 0.0, 7, 1.5}),
            "0.25,music,0.12346,0.33333,0.00000,7,1.50000");
}

TEST(Report, EmitFailsOnUnwritablePath) {
  const ResultRow row{0.0, "gs", 1.0, 0.0, 1.0, 1, 0.0};
  EXPECT_THROW(emit({row}, OutputFormat::Csv, "/proc/heightscope/none", ScenarioConfig{}, {}),
               std::runtime_error);
  EXPECT_THROW(format_from_name("xml"), std::exception);
}

TEST(Report, GammaSidecarRoundTrip) {
  const fs::path dir = scratch("sidecar");
  const GammaTable g{{"gs", 0.012345678901234567}, {"sbys", 0.5}};
  write_gamma_sidecar(dir / "g.yaml", ScenarioConfig{}, g);
  EXPECT_EQ(read_gamma_sidecar(dir / "g.yaml"), g);
  ScenarioConfig c;
  c.gamma.sidecar = "g.yaml";
  c.gamma.values = {{"sbys", 0.7}};
  SweepOptions o;
  o.base_dir = dir;
  const GammaTable r = resolve_gamma(c, o);
  EXPECT_EQ(r.at("gs"), g.at("gs"));
  EXPECT_EQ(r.at("sbys"), 0.7);
}

TEST(Sweep, Percentile) {
  std::vector<double> v;
  for (int i = 1; i <= 101; ++i) v.push_back(i);
  EXPECT_DOUBLE_EQ(percentile(v, 99.0), 100.0);
  EXPECT_DOUBLE_EQ(percentile(v, 50.0), 51.0);
  EXPECT_DOUBLE_EQ(percentile({3.0, 1.0}, 50.0), 2.0);
  EXPECT_THROW(percentile({}, 50.0), DomainError);
}

TEST(Sweep, ParallelForCoversAndRethrows) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_for(100, 3,
                            [](std::size_t i) {
                              if (i == 57) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

TEST(Sweep, OneRow) {
  ScenarioConfig c = small_config();
  c.snr_db = {5.0};
  c.trials = 1;
  c.methods = {Method::GroupSparse};
  const auto rows = run_sweep(c);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].method, "gs");
  EXPECT_EQ(rows[0].trials, 1u);
  EXPECT_EQ(rows[0].wall_time_s, 0.0);
}

TEST(Sweep, RowsInRangeAndOrdered) {
  const auto rows = run_sweep(small_config());
  ASSERT_EQ(rows.size(), 8u);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].snr_db, i < 4 ? 0.0 : 10.0);
    EXPECT_GE(rows[i].pd, 0.0);
    EXPECT_LE(rows[i].pd, 1.0);
    EXPECT_GE(rows[i].far, 0.0);
    EXPECT_LE(rows[i].far, 1.0);
    EXPECT_NEAR(rows[i].de, rows[i].pd * (1.0 - rows[i].far), 1e-12);
  }
  EXPECT_EQ(rows[0].method, "gs");
  EXPECT_EQ(rows[3].method, "burg");
}

TEST(Sweep, DeterministicAcrossJobs) {
  const ScenarioConfig c = small_config();
  SweepOptions one, three;
  one.jobs = 1;
  three.jobs = 3;
  EXPECT_EQ(to_csv(run_sweep(c, one)), to_csv(run_sweep(c, three)));
}

TEST(Sweep, SeedMatters) {
  ScenarioConfig c = small_config();
  c.snr_db = {-10.0};
  c.trials = 10;
  c.methods = {Method::Music};
  const auto a = to_csv(run_sweep(c));
  c.seed = 2;
  EXPECT_NE(a, to_csv(run_sweep(c)));
}

TEST(Sweep, CancelStopsEarly) {
  const std::atomic<bool> stop{true};
  SweepOptions o;
  o.cancel = &stop;
  EXPECT_TRUE(run_sweep(small_config(), o).empty());
}

TEST(Sweep, CalibrationIsDeterministic) {
  ScenarioConfig c = small_config();
  c.gamma = GammaConfig{};
  c.gamma.calibration_trials = 6;
  const GammaTable a = calibrate_gamma(c, 1);
  EXPECT_EQ(a, calibrate_gamma(c, 2));
  ASSERT_TRUE(a.count("gs") && a.count("sbys"));
  EXPECT_GT(a.at("gs"), 0.0);
}

TEST(Report, JsonMatchesCsv) {
  const ScenarioConfig c = small_config();
  const auto rows = run_sweep(c);
  const auto j = nlohmann::json::parse(to_json(rows, c, c.gamma.values));
  EXPECT_EQ(parse_config_text(j["config"].get<std::string>()), c);
  const auto lines = split(to_csv(rows), '\n');
  ASSERT_EQ(lines.size(), rows.size() + 1);
  ASSERT_EQ(j["rows"].size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto f = split(lines[i + 1], ',');
    const auto& o = j["rows"][i];
    EXPECT_EQ(std::stod(f[0]), o["snr_db"].get<double>());
    EXPECT_EQ(f[1], o["method"].get<std::string>());
    EXPECT_EQ(std::stod(f[2]), o["pd"].get<double>());
    EXPECT_EQ(std::stod(f[3]), o["far"].get<double>());
    EXPECT_EQ(std::stod(f[4]), o["de"].get<double>());
    EXPECT_EQ(std::stoul(f[5]), o["trials"].get<unsigned long>());
  }
}

#ifdef HEIGHTSCOPE_CLI_PATH
namespace {

int cli(const std::string& args) {
  const std::string cmd = std::string(HEIGHTSCOPE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("cli");
  std::ofstream(dir / "ok.yaml") << "layout: bumper_6x8\ntrials: 2\nsnr_db: [5]\nmethods: [gs, music]\n"
                                    "trajectory:\n  end: 144\ngamma:\n  values:\n    gs: 0.02\n";
  std::ofstream(dir / "bad.yaml") << "layout: bumper_6x8\nbogus: 1\n";
  EXPECT_EQ(cli("presets"), 0);
  EXPECT_EQ(cli("run --config " + (dir / "ok.yaml").string() + " --out " + (dir / "a").string()), 0);
  EXPECT_EQ(cli("run --config " + (dir / "ok.yaml").string() + " --jobs 2 --out " +
                (dir / "b").string()),
            0);
  EXPECT_EQ(slurp(dir / "a" / "results.csv"), slurp(dir / "b" / "results.csv"));
  EXPECT_EQ(split(slurp(dir / "a" / "results.csv"), '\n').size(), 3u);
  EXPECT_EQ(cli("run --config " + (dir / "ok.yaml").string() + " --format json --out " +
                (dir / "j").string()),
            0);
  EXPECT_TRUE(fs::exists(dir / "j" / "results.json"));
  EXPECT_EQ(cli("run --config " + (dir / "bad.yaml").string()), 2);
  EXPECT_EQ(cli("run --config " + (dir / "missing.yaml").string()), 2);
  EXPECT_EQ(cli("run --bogus"), 2);
  EXPECT_EQ(cli("run --config " + (dir / "ok.yaml").string() + " --out /proc/heightscope"), 3);
}

TEST(Cli, CalibrateWritesSidecar) {
  const fs::path dir = scratch("cli_gamma");
  std::ofstream(dir / "c.yaml") << "layout: roof_3x4\nmethods: [gs]\ntrajectory:\n  end: 144\n"
                                   "gamma:\n  calibration_trials: 4\n";
  EXPECT_EQ(cli("calibrate-gamma --config " + (dir / "c.yaml").string() + " --out " +
                (dir / "g.yaml").string()),
            0);
  const GammaTable g = read_gamma_sidecar(dir / "g.yaml");
  ASSERT_EQ(g.count("gs"), 1u);
  std::ofstream(dir / "r.yaml") << "layout: roof_3x4\nmethods: [gs]\ntrials: 2\nsnr_db: [0]\n"
                                   "trajectory:\n  end: 144\ngamma:\n  sidecar: g.yaml\n";
  EXPECT_EQ(cli("run --config " + (dir / "r.yaml").string() + " --out " + (dir / "o").string()), 0);
}
#endif
