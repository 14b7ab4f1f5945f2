// SPDX-License-Identifier: Apache-2.0
#include "heightscope/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace heightscope {

double Position3::norm() const { return std::sqrt(x * x + y * y + z * z); }

double distance(const Position3& a, const Position3& b) { return (a - b).norm(); }

Position3 centroid(const std::vector<Position3>& points) {
  if (points.empty()) throw DomainError("centroid of an empty point set");
  Position3 c;
  for (const auto& p : points) c = c + p;
  return (1.0 / static_cast<double>(points.size())) * c;
}

bool FootprintBox::contains(const Position3& p, double tol) const {
  return p.y >= y_min - tol && p.y <= y_max + tol && p.z >= z_min - tol && p.z <= z_max + tol;
}

std::vector<Position3> CoherentAperture::virtual_positions() const {
  const Position3 shift = 0.5 * (centroid(tx) + centroid(rx));
  std::vector<Position3> out;
  out.reserve(virtual_count());
  for (const auto& t : tx)
    for (const auto& r : rx) out.push_back(t + r - shift);
  return out;
}

namespace {

bool finite(const Position3& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

void check_list(const std::vector<Position3>& list, const std::string& what) {
  if (list.empty()) throw DomainError(what + " list is empty");
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (!finite(list[i])) throw DomainError(what + " position is not finite");
    if (!(list[i].z > 0.0)) throw DomainError(what + " antenna must be above the ground plane");
    for (std::size_t j = 0; j < i; ++j)
      if (list[i] == list[j]) throw DomainError(what + " positions are not distinct");
  }
}

bool level(const std::vector<Position3>& list, double tol) {
  return std::all_of(list.begin(), list.end(),
                     [&](const Position3& p) { return std::abs(p.z - list.front().z) <= tol; });
}

}  // namespace

void CoherentAperture::validate() const {
  check_list(tx, "tx");
  check_list(rx, "rx");
}

bool CoherentAperture::is_level(double tol) const { return level(tx, tol) && level(rx, tol); }

std::size_t AntennaLayout::virtual_count() const {
  std::size_t n = 0;
  for (const auto& a : apertures) n += a.virtual_count();
  return n;
}

Position3 AntennaLayout::reference() const {
  std::vector<Position3> all;
  for (const auto& a : apertures) {
    all.insert(all.end(), a.tx.begin(), a.tx.end());
    all.insert(all.end(), a.rx.begin(), a.rx.end());
  }
  return centroid(all);
}

void AntennaLayout::validate() const {
  if (apertures.empty()) throw DomainError("layout has no apertures");
  for (const auto& a : apertures) a.validate();
}

double elevation(const TargetSpec& t, const Position3& ref) {
  return std::asin((t.height - ref.z) / t.slant_range);
}

Position3 target_world_position(const TargetSpec& t, const Position3& ref) {
  if (!(t.slant_range > 0.0)) throw DomainError("slant range must be positive");
  if (!(t.height >= 0.0)) throw DomainError("target height must be non-negative");
  const double dz = t.height - ref.z;
  if (std::abs(dz) > t.slant_range)
    throw DomainError("height difference exceeds slant range; placement unsolvable");
  const double d = std::sqrt((t.slant_range - dz) * (t.slant_range + dz));
  return {ref.x + d * std::cos(t.azimuth), ref.y + d * std::sin(t.azimuth), t.height};
}

TargetSpec target_spec_from_position(const Position3& q, const Position3& ref) {
  const Position3 d = q - ref;
  return {std::atan2(d.y, d.x), q.z, d.norm()};
}

Position3 mirror_point(const Position3& p) { return {p.x, p.y, -p.z}; }

namespace {

std::map<double, std::vector<Position3>> by_height(const std::vector<Position3>& list) {
  std::map<double, std::vector<Position3>> groups;
  for (const auto& p : list) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& kv) { return std::abs(kv.first - p.z) <= 1e-12; });
    if (it == groups.end())
      groups[p.z].push_back(p);
    else
      it->second.push_back(p);
  }
  return groups;
}

}  // namespace

CoherentAperture level_subarray(const CoherentAperture& aperture) {
  const auto tx_groups = by_height(aperture.tx);
  const auto rx_groups = by_height(aperture.rx);
  const std::vector<Position3>* best_tx = nullptr;
  const std::vector<Position3>* best_rx = nullptr;
  std::size_t best = 0;
  for (const auto& [zt, t] : tx_groups)
    for (const auto& [zr, r] : rx_groups)
      if (t.size() * r.size() > best) {
        best = t.size() * r.size();
        best_tx = &t;
        best_rx = &r;
      }
  CoherentAperture sub;
  sub.id = aperture.id + "/level";
  sub.tx = *best_tx;
  sub.rx = *best_rx;
  return sub;
}

namespace {

// n points evenly covering [lo, hi], endpoints included.
std::vector<double> span_points(double lo, double hi, int n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = 0.5 * (lo + hi);
    return v;
  }
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

// n points at segment midpoints of [lo, hi], endpoints excluded.
std::vector<double> mid_points(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * (i + 0.5) / n;
  return v;
}

// Tx on a vertical arm, Rx on a horizontal arm, both centered at (0, zc).
// The virtual array is an n_tx x n_rx grid spanning `span` on both axes.
CoherentAperture cross(const std::string& id, double zc, double span, int n_tx, int n_rx) {
  CoherentAperture a;
  a.id = id;
  for (double z : span_points(zc - span / 2, zc + span / 2, n_tx)) a.tx.push_back({0.0, 0.0, z});
  for (double y : span_points(-span / 2, span / 2, n_rx)) a.rx.push_back({0.0, y, zc});
  a.footprint = FootprintBox{-span / 2, span / 2, zc - span / 2, zc + span / 2};
  return a;
}

// Square of side `side` centered at (0, zc). Tx split between the left and
// bottom edges, Rx between the right and top edges. Virtual positions are
// pairwise sums, so they cover a square twice the physical side.
CoherentAperture square(const std::string& id, double zc, double side, int n_tx, int n_rx) {
  const double a = side / 2;
  CoherentAperture ap;
  ap.id = id;
  const int tx_left = n_tx / 2, tx_bottom = n_tx - tx_left;
  const int rx_right = n_rx / 2, rx_top = n_rx - rx_right;
  for (double z : mid_points(zc - a, zc + a, tx_left)) ap.tx.push_back({0.0, -a, z});
  for (double y : mid_points(-a, a, tx_bottom)) ap.tx.push_back({0.0, y, zc - a});
  for (double z : mid_points(zc - a, zc + a, rx_right)) ap.rx.push_back({0.0, a, z});
  for (double y : mid_points(-a, a, rx_top)) ap.rx.push_back({0.0, y, zc + a});
  ap.footprint = FootprintBox{-side, side, zc - side, zc + side};
  return ap;
}

constexpr double kBumperHeight = 0.55;
constexpr double kRoofHeight = 1.1;
constexpr double kCompactFootprint = 0.11;

}  // namespace

std::vector<std::string> preset_names() {
  return {"bumper_6x8", "roof_3x4", "cross_6x8", "cross_12x16", "square_6x8", "square_12x16"};
}

AntennaLayout preset_layout(std::string_view name) {
  AntennaLayout layout;
  layout.name = std::string(name);
  if (name == "bumper_6x8") {
    layout.apertures.push_back(cross("bumper", kBumperHeight, 0.10, 6, 8));
  } else if (name == "roof_3x4") {
    layout.apertures.push_back(cross("roof", kRoofHeight, 0.05, 3, 4));
  } else if (name == "cross_6x8") {
    layout.apertures.push_back(cross("cross", kBumperHeight, kCompactFootprint, 6, 8));
  } else if (name == "cross_12x16") {
    layout.apertures.push_back(cross("cross", kBumperHeight, kCompactFootprint, 12, 16));
  } else if (name == "square_6x8") {
    layout.apertures.push_back(square("square", kBumperHeight, kCompactFootprint / 2, 6, 8));
  } else if (name == "square_12x16") {
    layout.apertures.push_back(square("square", kBumperHeight, kCompactFootprint / 2, 12, 16));
  } else {
    throw DomainError("unknown preset '" + std::string(name) + "'");
  }
  layout.validate();
  return layout;
}

AntennaLayout combine_layouts(const std::vector<AntennaLayout>& parts) {
  AntennaLayout out;
  for (const auto& p : parts) {
    if (!out.name.empty()) out.name += "+";
    out.name += p.name;
    out.apertures.insert(out.apertures.end(), p.apertures.begin(), p.apertures.end());
  }
  out.validate();
  return out;
}

}  // namespace heightscope
