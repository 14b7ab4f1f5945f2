// SPDX-License-Identifier: Apache-2.0
#include "heightscope/synthesis.hpp"

#include <cmath>

#include "heightscope/steering.hpp"

namespace heightscope {

namespace {

double snap_height(double h, const SceneOptions& o) {
  double s = std::round(h / o.height_step) * o.height_step;
  if (s > o.h_max + 1e-12) s -= o.height_step;
  if (s < o.h_min - 1e-12) s += o.height_step;
  return s;
}

}  // namespace

std::vector<Scatterer> random_scene(const SceneOptions& o, Rng& rng) {
  if (o.n_targets != 1 && o.n_targets != 2) throw DomainError("n_targets must be 1 or 2");
  if (!(o.h_max >= o.h_min) || o.h_min < 0.0) throw DomainError("invalid height bounds");
  if (o.on_grid && !(o.height_step > 0.0)) throw DomainError("height step must be positive");
  if (o.mode == SceneMode::TwoDimensional && o.azimuth_bins.empty())
    throw DomainError("two-dimensional scenes need azimuth bins");

  std::vector<Scatterer> scene;
  for (int k = 0; k < o.n_targets; ++k) {
    Scatterer s;
    s.height = rng.uniform(o.h_min, o.h_max);
    if (o.on_grid) s.height = snap_height(s.height, o);
    if (o.mode == SceneMode::SameAzimuth) {
      s.azimuth = o.azimuth;
    } else if (o.on_grid) {
      s.azimuth = o.azimuth_bins[rng.index(o.azimuth_bins.size())];
    } else {
      s.azimuth = rng.uniform(o.azimuth_bins.front(), o.azimuth_bins.back());
    }
    s.amplitude = std::polar(1.0, rng.uniform(0.0, kTwoPi));
    scene.push_back(s);
  }
  return scene;
}

std::size_t highest_scatterer(std::span<const Scatterer> scene) {
  if (scene.empty()) throw DomainError("empty scene");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scene.size(); ++i)
    if (scene[i].height > scene[best].height) best = i;
  return best;
}

namespace {

// Exact-count check for real-valued spans.
long whole_multiple(double span, double unit, const char* what) {
  const double q = span / unit;
  const double n = std::round(q);
  if (n < 1.0 || std::abs(q - n) > 1e-9 * std::max(1.0, n))
    throw DomainError(std::string(what) + " does not divide the span");
  return static_cast<long>(n);
}

}  // namespace

Trajectory make_trajectory(double start, double end, double interval, double step) {
  if (!(start > end) || !(end > 0.0)) throw DomainError("need start > end > 0");
  if (!(interval > 0.0) || !(step > 0.0)) throw DomainError("interval and step must be positive");
  const long n_intervals = whole_multiple(start - end, interval, "interval");
  const long per = whole_multiple(interval, step, "step");
  Trajectory t;
  for (long j = 0; j < n_intervals; ++j) {
    std::vector<std::size_t> idx;
    for (long i = 0; i < per; ++i) {
      idx.push_back(t.ranges.size());
      t.ranges.push_back(start - static_cast<double>(j * per + i) * step);
    }
    t.intervals.push_back(std::move(idx));
  }
  return t;
}

double noise_variance_for(double snr_db, double signal_power) {
  if (std::isnan(snr_db)) throw DomainError("SNR must not be NaN");
  return signal_power / std::pow(10.0, snr_db / 10.0);
}

Snapshot synthesize_snapshot(std::span<const Scatterer> scene, const CoherentAperture& aperture,
                             const Position3& ref, double range, Complex rho_true,
                             double wavelength, double snr_db, Rng& rng) {
  Snapshot s;
  s.aperture_id = aperture.id;
  s.range = range;
  s.noise_variance = noise_variance_for(snr_db);
  s.y = CVector::Zero(static_cast<Eigen::Index>(aperture.virtual_count()));
  for (const auto& sc : scene)
    s.y += sc.amplitude *
           multipath_steering(aperture, ref, {sc.azimuth, sc.height, range}, rho_true, wavelength);
  const Complex psi0 = std::polar(1.0, rng.uniform(0.0, kTwoPi));
  s.y *= psi0;
  if (s.noise_variance > 0.0)
    for (Eigen::Index i = 0; i < s.y.size(); ++i) s.y(i) += rng.complex_normal(s.noise_variance);
  return s;
}

SnapshotGrid synthesize_trajectory(std::span<const Scatterer> scene, const AntennaLayout& layout,
                                   const Trajectory& trajectory, Complex rho_true,
                                   double wavelength, double snr_db, Rng& rng) {
  const Position3 ref = layout.reference();
  SnapshotGrid grid(layout.apertures.size());
  for (std::size_t a = 0; a < layout.apertures.size(); ++a)
    for (std::size_t p = 0; p < trajectory.ranges.size(); ++p) {
      Snapshot s = synthesize_snapshot(scene, layout.apertures[a], ref, trajectory.ranges[p],
                                       rho_true, wavelength, snr_db, rng);
      s.aperture_index = a;
      s.point_index = p;
      grid[a].push_back(std::move(s));
    }
  return grid;
}

}  // namespace heightscope
