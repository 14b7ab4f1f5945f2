// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "heightscope/pipeline.hpp"
#include "heightscope/synthesis.hpp"

namespace heightscope {

enum class Method { GroupSparse, StepByStep, Music, Burg };
std::string method_name(Method m);  // gs, sbys, music, burg
Method method_from_name(std::string_view name);
bool is_sparse(Method m);

// skip uses the true target azimuths for the height stage.
enum class AzimuthStage { Skip, LowAngle, SpatialFrequency, Multipath };

struct TrajectoryConfig {
  double start = 160.0;
  double end = 80.0;
  double interval = 8.0;
  double step = 1.0;
  friend bool operator==(const TrajectoryConfig&, const TrajectoryConfig&) = default;
};

struct GridConfig {
  double azimuth_min_deg = -10.0;
  double azimuth_max_deg = 10.0;
  double azimuth_step_deg = 0.2;
  double height_min = 0.0;
  double height_max = 1.5;
  double height_step = 0.02;
  int coarse_heights = 5;
  double theta_max_deg = 0.0;
  friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

struct SceneConfig {
  int targets = 1;
  SceneMode mode = SceneMode::SameAzimuth;
  double azimuth_deg = 0.0;
  double h_min = 0.1;
  double h_max = 1.35;
  bool on_grid = true;
  friend bool operator==(const SceneConfig&, const SceneConfig&) = default;
};

struct SolverConfig {
  LabelOption labels = LabelOption::B;
  int sparsity = 2;
  int azimuth_sparsity = 2;
  double residual_fraction = 0.0;
  double rank_tolerance = 1e-10;
  Pooling pooling = Pooling::Mean;
  bool aperture_weighting = true;
  bool inverse_distance_weighting = false;
  friend bool operator==(const SolverConfig&, const SolverConfig&) = default;
};

struct ScoringConfig {
  double dtw = 0.05;
  double azimuth_window_deg = 0.2;
  FalseAlarmRule false_alarms = FalseAlarmRule::Above;
  FarMode far_mode = FarMode::Pooled;
  friend bool operator==(const ScoringConfig&, const ScoringConfig&) = default;
};

struct BaselineConfig {
  double antenna_height = 1.1;
  bool snr_boost = true;  // add 10 log10(M) dB, M = channels of the first aperture
  int burg_order = 4;
  int music_subspace = 2;
  int hankel_rows = 0;  // 0: a third of the samples
  int frequency_bins = 2048;
  int resample = 0;  // 0: one sample per trajectory point
  friend bool operator==(const BaselineConfig&, const BaselineConfig&) = default;
};

struct GammaConfig {
  double percentile = 99.0;
  int calibration_trials = 200;
  std::string sidecar;                  // read thresholds from this file if set
  std::map<std::string, double> values;  // explicit thresholds win over the sidecar
  friend bool operator==(const GammaConfig&, const GammaConfig&) = default;
};

struct ScenarioConfig {
  std::string layout = "bumper_6x8";
  std::string second_aperture;  // empty: none
  double wavelength = kDefaultWavelength;
  TrajectoryConfig trajectory;
  GridConfig grids;
  std::vector<Complex> rho_grid = default_rho_grid();
  Complex rho_true{-0.6, 0.0};
  std::vector<double> snr_db{-10.0, -5.0, 0.0, 5.0};
  int trials = 200;
  std::vector<Method> methods{Method::GroupSparse, Method::StepByStep};
  AzimuthStage azimuth_stage = AzimuthStage::Skip;
  SceneConfig scene;
  SolverConfig solver;
  ScoringConfig scoring;
  BaselineConfig baseline;
  GammaConfig gamma;
  std::uint64_t seed = 1;
  std::string output = "results";

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

// YAML. Unknown keys and invalid values raise ConfigError with the line.
ScenarioConfig parse_config(const std::filesystem::path& path);
ScenarioConfig parse_config_text(std::string_view text);
// Every field written out; parse_config_text(serialize_config(c)) == c.
std::string serialize_config(const ScenarioConfig& config);
void validate_config(const ScenarioConfig& config);

AntennaLayout build_layout(const ScenarioConfig& config);
Trajectory build_trajectory(const ScenarioConfig& config);
HypothesisGrid build_grid(const ScenarioConfig& config);
EstimatorSettings build_settings(const ScenarioConfig& config);
ScoringRules build_rules(const ScenarioConfig& config);
SceneOptions build_scene_options(const ScenarioConfig& config);

struct ResultRow {
  double snr_db = 0.0;
  std::string method;
  double pd = 0.0;
  double far = 0.0;
  double de = 0.0;
  std::size_t trials = 0;
  double wall_time_s = 0.0;
};

// Detection thresholds keyed by "gs", "sbys" and, with an azimuth stage,
// "azimuth_gs", "azimuth_sbys".
using GammaTable = std::map<std::string, double>;

struct SweepOptions {
  int jobs = 1;
  // Measured time goes to wall_time_s; otherwise it stays 0 so output bytes
  // depend only on the configuration.
  bool record_time = false;
  std::filesystem::path base_dir;  // resolves a relative gamma sidecar
  const std::atomic<bool>* cancel = nullptr;
  std::function<void(const ResultRow&)> on_row;
};

// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception is
// rethrown after all workers stop.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn,
                  const std::atomic<bool>* cancel = nullptr);

double percentile(std::vector<double> values, double q);

// Noise-only runs of the enabled sparse methods; threshold = percentile of
// the map maxima.
GammaTable calibrate_gamma(const ScenarioConfig& config, int jobs = 1);
GammaTable resolve_gamma(const ScenarioConfig& config, const SweepOptions& options);

// One trial of every enabled method on one scene.
std::map<Method, TrialResult> run_trial(const ScenarioConfig& config,
                                        const SequentialEstimator& estimator,
                                        const GammaTable& gamma, std::size_t snr_index,
                                        std::size_t trial);

std::vector<ResultRow> run_sweep(const ScenarioConfig& config, const SweepOptions& options = {});

enum class OutputFormat { Csv, Json };
OutputFormat format_from_name(std::string_view name);

std::string csv_header();
std::string csv_line(const ResultRow& row);
std::string to_csv(const std::vector<ResultRow>& rows);
std::string to_json(const std::vector<ResultRow>& rows, const ScenarioConfig& config,
                    const GammaTable& gamma);
// Writes results.csv or results.json into `dir`. Throws std::runtime_error
// when the file cannot be written.
std::filesystem::path emit(const std::vector<ResultRow>& rows, OutputFormat format,
                           const std::filesystem::path& dir, const ScenarioConfig& config,
                           const GammaTable& gamma);

void write_gamma_sidecar(const std::filesystem::path& path, const ScenarioConfig& config,
                         const GammaTable& gamma);
GammaTable read_gamma_sidecar(const std::filesystem::path& path);

}  // namespace heightscope
