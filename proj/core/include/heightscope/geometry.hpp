// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "heightscope/types.hpp"

namespace heightscope {

// World frame: z = 0 is the ground plane, +x is vehicle boresight.
struct Position3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Position3&, const Position3&) = default;
  friend Position3 operator+(const Position3& a, const Position3& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend Position3 operator-(const Position3& a, const Position3& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend Position3 operator*(double s, const Position3& p) { return {s * p.x, s * p.y, s * p.z}; }
  double dot(const Position3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const;
};

double distance(const Position3& a, const Position3& b);
Position3 centroid(const std::vector<Position3>& points);

// Axis-aligned box in the (y, z) plane, any x.
struct FootprintBox {
  double y_min = 0.0;
  double y_max = 0.0;
  double z_min = 0.0;
  double z_max = 0.0;

  bool contains(const Position3& p, double tol = 1e-12) const;
  double width() const { return y_max - y_min; }
  double height() const { return z_max - z_min; }
};

struct CoherentAperture {
  std::string id;
  std::vector<Position3> tx;
  std::vector<Position3> rx;
  std::optional<FootprintBox> footprint;

  std::size_t virtual_count() const { return tx.size() * rx.size(); }

  // Tx-major, entry t*|rx| + q = tx[t] + rx[q] - (centroid(tx) + centroid(rx)) / 2.
  std::vector<Position3> virtual_positions() const;

  // Throws DomainError on empty lists, duplicate positions, non-finite or
  // non-positive heights.
  void validate() const;

  // True when all Tx share one height and all Rx share one height, so every
  // virtual channel sits at the same height.
  bool is_level(double tol = 1e-12) const;
};

struct AntennaLayout {
  std::string name;
  std::vector<CoherentAperture> apertures;

  std::size_t virtual_count() const;
  // Centroid of all physical antennas of all apertures.
  Position3 reference() const;
  void validate() const;
};

struct TargetSpec {
  double azimuth = 0.0;      // rad
  double height = 0.0;       // m above ground
  double slant_range = 0.0;  // m from the layout reference point
};

// Elevation of the line of sight from ref to the target.
double elevation(const TargetSpec& t, const Position3& ref);

Position3 target_world_position(const TargetSpec& t, const Position3& ref);
TargetSpec target_spec_from_position(const Position3& q, const Position3& ref);

Position3 mirror_point(const Position3& p);

// Largest constant-height sub-array of an aperture: one Tx height group and
// one Rx height group maximizing |tx|*|rx|. Ties go to the lower Tx height.
CoherentAperture level_subarray(const CoherentAperture& aperture);

std::vector<std::string> preset_names();
AntennaLayout preset_layout(std::string_view name);

// Concatenates the apertures of several layouts into one incoherent layout.
AntennaLayout combine_layouts(const std::vector<AntennaLayout>& parts);

}  // namespace heightscope
