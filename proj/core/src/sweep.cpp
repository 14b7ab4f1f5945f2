// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "heightscope/baselines.hpp"
#include "heightscope/harness.hpp"
#include "heightscope/steering.hpp"

namespace heightscope {

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn,
                  const std::atomic<bool>* cancel) {
  const auto stopped = [&] { return cancel && cancel->load(std::memory_order_relaxed); };
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n && !stopped(); ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto worker = [&] {
    while (!failed.load() && !stopped()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  const auto count = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  for (std::size_t k = 0; k < count; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw DomainError("percentile of an empty set");
  if (!(q >= 0.0 && q <= 100.0)) throw DomainError("percentile must lie in [0, 100]");
  std::sort(values.begin(), values.end());
  const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

constexpr std::uint64_t kTrialStream = 1;
constexpr std::uint64_t kBaselineStream = 2;
constexpr std::uint64_t kCalibrationStream = 3;

Fusion fusion_of(Method m) {
  return m == Method::GroupSparse ? Fusion::GroupSparse : Fusion::StepByStep;
}

AzimuthStrategy strategy_of(AzimuthStage s) {
  switch (s) {
    case AzimuthStage::LowAngle: return AzimuthStrategy::LowAngle;
    case AzimuthStage::SpatialFrequency: return AzimuthStrategy::SpatialFrequency;
    default: return AzimuthStrategy::Multipath;
  }
}

std::vector<double> true_azimuths(const std::vector<Scatterer>& scene) {
  std::set<double> s;
  for (const auto& t : scene) s.insert(t.azimuth);
  return {s.begin(), s.end()};
}

std::vector<Method> sparse_methods(const ScenarioConfig& c) {
  std::vector<Method> out;
  for (Method m : c.methods)
    if (is_sparse(m)) out.push_back(m);
  return out;
}

double snap(double h, const std::vector<double>& grid) {
  const auto it = std::min_element(grid.begin(), grid.end(), [&](double a, double b) {
    return std::abs(a - h) < std::abs(b - h);
  });
  return *it;
}

EnvelopeSeries baseline_envelope(const ScenarioConfig& c, const std::vector<Scatterer>& scene,
                                 const Trajectory& trajectory, double snr_db, Rng& rng) {
  const Position3 antenna{0.0, 0.0, c.baseline.antenna_height};
  const std::vector<Position3> one{antenna};
  double boost = 0.0;
  if (c.baseline.snr_boost)
    boost = 10.0 * std::log10(static_cast<double>(preset_layout(c.layout).virtual_count()));
  const double variance = noise_variance_for(snr_db + boost);
  std::vector<Complex> values;
  for (double r : trajectory.ranges) {
    Complex y = 0.0;
    for (const auto& s : scene) {
      const Position3 q = target_world_position({s.azimuth, s.height, r}, antenna);
      y += s.amplitude * multipath_steering(one, one, q, c.rho_true, c.wavelength)(0);
    }
    y *= std::polar(1.0, rng.uniform(0.0, kTwoPi));
    if (variance > 0.0) y += rng.complex_normal(variance);
    values.push_back(y);
  }
  return envelope_series(values, trajectory.ranges, c.baseline.antenna_height,
                         static_cast<std::size_t>(c.baseline.resample));
}

std::vector<Declaration> baseline_declaration(const ScenarioConfig& c, Method m,
                                              const EnvelopeSeries& env,
                                              const HypothesisGrid& grid) {
  const double f_max = envelope_frequency(grid.heights.back(), c.wavelength, env.antenna_height);
  const auto freqs = frequency_grid(f_max, static_cast<std::size_t>(c.baseline.frequency_bins));
  Spectrum spec;
  try {
    spec = m == Method::Music
               ? music_spectrum(env, c.baseline.music_subspace, c.baseline.hankel_rows, freqs)
               : burg_spectrum(env, c.baseline.burg_order, freqs);
  } catch (const DomainError&) {
    return {};  // flat envelope: nothing to declare
  }
  const double h = peak_to_height(spec.peak_frequency(), c.wavelength, env.antenna_height);
  return {{deg2rad(c.scene.azimuth_deg), snap(h, grid.heights), 1.0, -1}};
}

}  // namespace

GammaTable calibrate_gamma(const ScenarioConfig& config, int jobs) {
  validate_config(config);
  const auto methods = sparse_methods(config);
  GammaTable out;
  if (methods.empty()) return out;
  const SequentialEstimator estimator(build_layout(config), build_trajectory(config),
                                      build_settings(config));
  const SceneOptions scene = build_scene_options(config);
  const auto n = static_cast<std::size_t>(config.gamma.calibration_trials);
  std::vector<std::vector<double>> height_max(methods.size(), std::vector<double>(n));
  std::vector<std::vector<double>> azimuth_max(methods.size(), std::vector<double>(n));
  const bool staged = config.azimuth_stage != AzimuthStage::Skip;

  parallel_for(n, jobs, [&](std::size_t t) {
    Rng rng = Rng::stream(config.seed, {kCalibrationStream, t});
    const double phi = scene.mode == SceneMode::SameAzimuth
                           ? scene.azimuth
                           : scene.azimuth_bins[rng.index(scene.azimuth_bins.size())];
    const std::vector<double> az{phi};
    const SnapshotGrid snaps =
        synthesize_trajectory({}, estimator.layout(), estimator.trajectory(), config.rho_true,
                              config.wavelength, 0.0, rng);
    for (std::size_t k = 0; k < methods.size(); ++k) {
      const Fusion f = fusion_of(methods[k]);
      height_max[k][t] = estimator.estimate_height(snaps, az, f).max_value();
      if (staged)
        azimuth_max[k][t] =
            estimator.azimuth_map_max(snaps, strategy_of(config.azimuth_stage), f);
    }
  });

  for (std::size_t k = 0; k < methods.size(); ++k) {
    out[method_name(methods[k])] = percentile(height_max[k], config.gamma.percentile);
    if (staged)
      out["azimuth_" + method_name(methods[k])] =
          percentile(azimuth_max[k], config.gamma.percentile);
  }
  return out;
}

GammaTable resolve_gamma(const ScenarioConfig& config, const SweepOptions& options) {
  std::vector<std::string> needed;
  for (Method m : sparse_methods(config)) {
    needed.push_back(method_name(m));
    if (config.azimuth_stage != AzimuthStage::Skip) needed.push_back("azimuth_" + method_name(m));
  }
  GammaTable table = config.gamma.values;
  const auto complete = [&] {
    return std::all_of(needed.begin(), needed.end(),
                       [&](const std::string& k) { return table.count(k) > 0; });
  };
  if (!complete() && !config.gamma.sidecar.empty()) {
    std::filesystem::path p = config.gamma.sidecar;
    if (p.is_relative() && !options.base_dir.empty()) p = options.base_dir / p;
    for (const auto& [k, v] : read_gamma_sidecar(p)) table.try_emplace(k, v);
  }
  if (!complete())
    for (const auto& [k, v] : calibrate_gamma(config, options.jobs)) table.try_emplace(k, v);
  return table;
}

namespace {

std::map<Method, TrialResult> trial_impl(const ScenarioConfig& config,
                                         const SequentialEstimator& estimator,
                                         const GammaTable& gamma, std::size_t s, std::size_t t,
                                         std::map<Method, double>* seconds) {
  using clock = std::chrono::steady_clock;
  Rng rng = Rng::stream(config.seed, {kTrialStream, s, t});
  const std::vector<Scatterer> scene = random_scene(build_scene_options(config), rng);
  const double snr = config.snr_db.at(s);
  const ScoringRules rules = build_rules(config);
  const auto methods = config.methods;

  SnapshotGrid snaps;
  if (!sparse_methods(config).empty())
    snaps = synthesize_trajectory(scene, estimator.layout(), estimator.trajectory(),
                                  config.rho_true, config.wavelength, snr, rng);
  EnvelopeSeries envelope;
  const bool baseline = std::any_of(methods.begin(), methods.end(),
                                    [](Method m) { return !is_sparse(m); });
  if (baseline) {
    Rng brng = Rng::stream(config.seed, {kBaselineStream, s, t});
    envelope = baseline_envelope(config, scene, estimator.trajectory(), snr, brng);
  }

  std::map<Method, TrialResult> out;
  for (Method m : methods) {
    const auto start = clock::now();
    std::vector<Declaration> decl;
    if (is_sparse(m)) {
      const Fusion f = fusion_of(m);
      const HeightEstimate est =
          config.azimuth_stage == AzimuthStage::Skip
              ? estimator.estimate_height(snaps, true_azimuths(scene), f)
              : estimator.estimate(snaps, strategy_of(config.azimuth_stage), f,
                                   gamma.at("azimuth_" + method_name(m)));
      decl = declarations_from(est, gamma.at(method_name(m)));
    } else {
      decl = baseline_declaration(config, m, envelope, estimator.settings().grid);
    }
    out.emplace(m, score_trial(std::move(decl), scene, rules));
    if (seconds) (*seconds)[m] = std::chrono::duration<double>(clock::now() - start).count();
  }
  return out;
}

}  // namespace

std::map<Method, TrialResult> run_trial(const ScenarioConfig& config,
                                        const SequentialEstimator& estimator,
                                        const GammaTable& gamma, std::size_t snr_index,
                                        std::size_t trial) {
  return trial_impl(config, estimator, gamma, snr_index, trial, nullptr);
}

std::vector<ResultRow> run_sweep(const ScenarioConfig& config, const SweepOptions& options) {
  validate_config(config);
  const SequentialEstimator estimator(build_layout(config), build_trajectory(config),
                                      build_settings(config));
  const GammaTable gamma = resolve_gamma(config, options);
  const auto n = static_cast<std::size_t>(config.trials);
  std::vector<ResultRow> rows;

  for (std::size_t s = 0; s < config.snr_db.size(); ++s) {
    std::vector<std::map<Method, TrialResult>> results(n);
    std::vector<std::map<Method, double>> seconds(n);
    std::vector<char> done(n, 0);
    parallel_for(
        n, options.jobs,
        [&](std::size_t t) {
          results[t] = trial_impl(config, estimator, gamma, s, t, &seconds[t]);
          done[t] = 1;
        },
        options.cancel);
    if (std::find(done.begin(), done.end(), 0) != done.end()) break;  // interrupted

    for (Method m : config.methods) {
      std::vector<TrialResult> per;
      double wall = 0.0;
      for (std::size_t t = 0; t < n; ++t) {
        per.push_back(std::move(results[t].at(m)));
        wall += seconds[t].at(m);
      }
      const Metrics metrics = aggregate_metrics(per, config.scoring.far_mode);
      ResultRow row{config.snr_db[s], method_name(m), metrics.pd, metrics.far, metrics.de,
                    metrics.trials, options.record_time ? wall : 0.0};
      rows.push_back(row);
      if (options.on_row) options.on_row(row);
    }
  }
  return rows;
}

}  // namespace heightscope
