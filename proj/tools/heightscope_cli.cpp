// SPDX-License-Identifier: Apache-2.0
// heightscope: Monte Carlo sweeps of sequential azimuth/height estimation.

#include <atomic>
#include <csignal>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include <CLI11.hpp>

#include "heightscope/harness.hpp"

namespace {

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

int default_jobs() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace heightscope;

  CLI::App app{"Group-sparse height estimation sweeps for automotive MIMO radar"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  int jobs = default_jobs();
  std::string out_dir;
  std::string format = "csv";
  bool timings = false;

  auto* run = app.add_subcommand("run", "Run a Monte Carlo sweep");
  run->add_option("--config", config_path, "Scenario YAML")->required();
  run->add_option("--seed", seed, "Override the master seed");
  run->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "Output directory (default: config 'output')");
  run->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  run->add_flag("--timings", timings, "Record measured wall time instead of 0");

  auto* presets = app.add_subcommand("presets", "List antenna layout presets");

  std::string sidecar_path;
  auto* calibrate = app.add_subcommand("calibrate-gamma", "Calibrate detection thresholds");
  calibrate->add_option("--config", config_path, "Scenario YAML")->required();
  calibrate->add_option("--seed", seed, "Override the master seed");
  calibrate->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  calibrate->add_option("--out", sidecar_path, "Sidecar path (default: <config>.gamma.yaml)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*presets) {
      for (const auto& name : preset_names()) {
        const AntennaLayout l = preset_layout(name);
        for (const auto& a : l.apertures)
          std::printf("%-14s %2zu tx x %2zu rx = %3zu virtual channels\n", name.c_str(),
                      a.tx.size(), a.rx.size(), a.virtual_count());
      }
      return 0;
    }

    ScenarioConfig config = parse_config(config_path);
    if (seed) config.seed = *seed;
    const auto base_dir = std::filesystem::absolute(config_path).parent_path();

    if (*calibrate) {
      SweepOptions opts;
      opts.jobs = jobs;
      opts.base_dir = base_dir;
      config.gamma.values.clear();
      config.gamma.sidecar.clear();
      const GammaTable gamma = calibrate_gamma(config, jobs);
      const std::filesystem::path path =
          sidecar_path.empty() ? std::filesystem::path(config_path + ".gamma.yaml")
                               : std::filesystem::path(sidecar_path);
      write_gamma_sidecar(path, config, gamma);
      for (const auto& [k, v] : gamma) std::printf("%s %.6g\n", k.c_str(), v);
      std::printf("wrote %s\n", path.string().c_str());
      return 0;
    }

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);

    SweepOptions opts;
    opts.jobs = jobs;
    opts.record_time = timings;
    opts.base_dir = base_dir;
    opts.cancel = &g_interrupted;
    config.gamma.values = resolve_gamma(config, opts);

    const std::filesystem::path dir = out_dir.empty() ? config.output : out_dir;
    std::filesystem::create_directories(dir);
    const OutputFormat fmt = format_from_name(format);

    std::ofstream csv;
    if (fmt == OutputFormat::Csv) {
      csv.open(dir / "results.csv", std::ios::binary);
      if (!csv) throw std::runtime_error("cannot write " + (dir / "results.csv").string());
      csv << csv_header() << "\n" << std::flush;
      opts.on_row = [&](const ResultRow& row) { csv << csv_line(row) << "\n" << std::flush; };
    }
    const auto rows = run_sweep(config, opts);
    if (fmt == OutputFormat::Json && !rows.empty())
      emit(rows, fmt, dir, config, config.gamma.values);
    if (g_interrupted) {
      std::fprintf(stderr, "interrupted; %zu rows written\n", rows.size());
      return kRuntimeError;
    }
    std::fprintf(stderr, "wrote %zu rows to %s\n", rows.size(), dir.string().c_str());
    return 0;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kRuntimeError;
  }
}
