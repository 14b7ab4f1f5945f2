// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include "heightscope/geometry.hpp"
#include "heightscope/rng.hpp"
#include "heightscope/types.hpp"

namespace heightscope {

struct Scatterer {
  double azimuth = 0.0;  // rad
  double height = 0.0;   // m
  Complex amplitude{1.0, 0.0};
};

enum class SceneMode { SameAzimuth, TwoDimensional };

struct SceneOptions {
  int n_targets = 1;
  SceneMode mode = SceneMode::SameAzimuth;
  double h_min = 0.1;
  double h_max = 1.35;
  // Heights snap to multiples of height_step when on_grid.
  bool on_grid = true;
  double height_step = 0.02;
  // SameAzimuth: every target sits at this azimuth.
  double azimuth = 0.0;
  // TwoDimensional: azimuths drawn from these bins (on grid) or uniformly
  // between the first and last entry (off grid).
  std::vector<double> azimuth_bins;
};

std::vector<Scatterer> random_scene(const SceneOptions& options, Rng& rng);

// Index of the highest scatterer; ties go to the first listed.
std::size_t highest_scatterer(std::span<const Scatterer> scene);

struct Trajectory {
  std::vector<double> ranges;                     // strictly decreasing
  std::vector<std::vector<std::size_t>> intervals;  // indices into ranges

  std::size_t points_per_interval() const { return intervals.empty() ? 0 : intervals[0].size(); }
};

Trajectory make_trajectory(double start = 160.0, double end = 80.0, double interval = 8.0,
                           double step = 1.0);

struct Snapshot {
  std::string aperture_id;
  std::size_t aperture_index = 0;
  std::size_t point_index = 0;
  double range = 0.0;
  CVector y;
  double noise_variance = 0.0;
};

// Noise variance per virtual channel for a unit-power scatterer.
double noise_variance_for(double snr_db, double signal_power = 1.0);

// y = exp(j psi0) sum_k s_k a(phi_k, h_k, r, rho_true) + n. psi0 is drawn
// first, then the noise entries in channel order.
Snapshot synthesize_snapshot(std::span<const Scatterer> scene, const CoherentAperture& aperture,
                             const Position3& ref, double range, Complex rho_true,
                             double wavelength, double snr_db, Rng& rng);

// [aperture][point] snapshots along the whole trajectory, aperture-major.
using SnapshotGrid = std::vector<std::vector<Snapshot>>;

SnapshotGrid synthesize_trajectory(std::span<const Scatterer> scene, const AntennaLayout& layout,
                                   const Trajectory& trajectory, Complex rho_true,
                                   double wavelength, double snr_db, Rng& rng);

}  // namespace heightscope
