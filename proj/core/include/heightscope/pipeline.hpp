// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <tuple>
#include <vector>

#include "heightscope/dictionary.hpp"
#include "heightscope/geometry.hpp"
#include "heightscope/solver.hpp"
#include "heightscope/synthesis.hpp"

namespace heightscope {

enum class Fusion { StepByStep, GroupSparse };

// i: level sub-array at elevation 0; ii: level sub-array over (u, v);
// iii: all channels with the multipath model over coarse heights.
enum class AzimuthStrategy { LowAngle, SpatialFrequency, Multipath };

struct HypothesisGrid {
  std::vector<double> azimuths;  // rad
  std::vector<double> heights;
  std::vector<double> coarse_heights;
  std::vector<Complex> rhos;
  double theta_max = 0.0;  // case ii admissible square is cos(theta_max)
};

// -0.1, -0.3, ..., -0.9: phase fixed at 180 degrees, attenuation steps of 0.2.
std::vector<Complex> default_rho_grid();

struct EstimatorSettings {
  double wavelength = kDefaultWavelength;
  HypothesisGrid grid;
  LabelOption labels = LabelOption::B;
  Pooling pooling = Pooling::Mean;
  int sparsity = 2;
  double residual_fraction = 0.0;
  int azimuth_sparsity = 2;
  SolverOptions solver;
  // Scales each normalized measurement by sqrt(M_l / max M) so that an
  // aperture's weight follows its channel count.
  bool aperture_weighting = true;
  // Scales each normalized measurement by r_min / r.
  bool inverse_distance_weighting = false;

  StopRule height_stop() const;
};

struct Declaration {
  double azimuth = 0.0;
  double height = 0.0;
  double magnitude = 0.0;
  int interval = -1;  // -1: pooled over all intervals
};

// Height maps of one trial keyed by azimuth, pooled over intervals.
struct HeightEstimate {
  std::vector<double> azimuths;
  std::vector<HypothesisMap> maps;  // one per azimuth, over the height grid

  double max_value() const;
};

class SequentialEstimator {
 public:
  SequentialEstimator(AntennaLayout layout, Trajectory trajectory, EstimatorSettings settings);

  const AntennaLayout& layout() const { return layout_; }
  const Trajectory& trajectory() const { return trajectory_; }
  const EstimatorSettings& settings() const { return settings_; }

  // Normalized, weighted measurement vector of one snapshot.
  CVector prepared(const Snapshot& s) const;

  // DoA map of one interval, one value per azimuth grid bin.
  HypothesisMap azimuth_map(const SnapshotGrid& snaps, std::size_t interval,
                            AzimuthStrategy strategy, Fusion fusion) const;
  std::vector<double> estimate_azimuth(const SnapshotGrid& snaps, std::size_t interval,
                                       AzimuthStrategy strategy, Fusion fusion,
                                       double gamma) const;

  // Per-azimuth height maps of one interval, averaged over its blocks.
  std::vector<HypothesisMap> interval_height_maps(const SnapshotGrid& snaps, std::size_t interval,
                                                  std::span<const double> azimuths,
                                                  Fusion fusion) const;

  // Height maps averaged over all intervals for fixed azimuths.
  HeightEstimate estimate_height(const SnapshotGrid& snaps, std::span<const double> azimuths,
                                 Fusion fusion) const;

  // Azimuth stage per interval, then the height stage on its detections.
  // Maps of azimuths missing from an interval count as zero there.
  HeightEstimate estimate(const SnapshotGrid& snaps, AzimuthStrategy strategy, Fusion fusion,
                          double gamma_azimuth) const;

  // Largest value of the per-interval DoA maps (threshold calibration).
  double azimuth_map_max(const SnapshotGrid& snaps, AzimuthStrategy strategy,
                         Fusion fusion) const;

 private:
  struct Plan {
    std::vector<std::unique_ptr<BompSolver>> solvers;
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> members;  // (aperture, point)
    std::vector<std::vector<Eigen::Index>> channels;  // per aperture; empty = all
    GridShape shape;
    std::vector<ColumnHypothesis> columns;
  };
  using PlanKey = std::tuple<int, int, std::size_t, std::vector<double>>;

  std::shared_ptr<const Plan> height_plan(std::size_t interval, std::span<const double> azimuths,
                                          Fusion fusion) const;
  std::shared_ptr<const Plan> azimuth_plan(std::size_t interval, AzimuthStrategy strategy,
                                           Fusion fusion) const;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> groupings(std::size_t interval,
                                                                          Fusion fusion) const;
  CVector stacked(const Plan& plan, std::size_t solve, const SnapshotGrid& snaps) const;

  AntennaLayout layout_;
  Position3 ref_;
  Trajectory trajectory_;
  EstimatorSettings settings_;
  std::vector<double> aperture_weight_;

  struct CacheEntry {
    std::shared_ptr<const Plan> plan;
    std::size_t bytes = 0;
    std::uint64_t last_use = 0;
  };
  std::shared_ptr<const Plan> cached(const PlanKey& key) const;
  void store(PlanKey key, std::shared_ptr<const Plan> plan) const;

  mutable std::mutex mutex_;
  mutable std::map<PlanKey, CacheEntry> cache_;
  mutable std::size_t cache_bytes_ = 0;
  mutable std::uint64_t cache_clock_ = 0;
};

// Declarations of every map bin above gamma.
std::vector<Declaration> declarations_from(const HeightEstimate& estimate, double gamma);

// 1-D: only heights matter and only the highest scatterer is sought.
// 2-D: each target needs a declaration within the azimuth and height windows.
enum class Protocol { HighestScatterer, AllTargets };
// Above: in 1-D only declarations above the window count as false alarms.
// Outside: any declaration outside the window(s).
enum class FalseAlarmRule { Above, Outside };

struct ScoringRules {
  double dtw = 0.05;
  double azimuth_window = deg2rad(0.2);
  Protocol protocol = Protocol::HighestScatterer;
  FalseAlarmRule false_alarms = FalseAlarmRule::Above;
};

struct TrialResult {
  std::vector<Declaration> declarations;
  std::vector<Scatterer> truth;
  std::vector<bool> target_detected;  // per truth entry; only the scored ones can be true
  int targets_scored = 0;
  int targets_detected = 0;
  bool detected = false;
  int false_alarms = 0;
};

TrialResult score_trial(std::vector<Declaration> declarations, std::vector<Scatterer> truth,
                        const ScoringRules& rules);

// Pooled: FAR = total false alarms / total declarations. PerTrial: mean of the
// per-trial ratios over trials with at least one declaration.
enum class FarMode { Pooled, PerTrial };

struct Metrics {
  double pd = 0.0;
  double far = 0.0;
  double de = 0.0;
  std::size_t trials = 0;
};

Metrics aggregate_metrics(std::span<const TrialResult> trials, FarMode mode = FarMode::Pooled);

}  // namespace heightscope
