// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "heightscope/geometry.hpp"

using namespace heightscope;

namespace {

double extent(const std::vector<Position3>& ps, double Position3::*axis) {
  double lo = ps.front().*axis, hi = lo;
  for (const auto& p : ps) {
    lo = std::min(lo, p.*axis);
    hi = std::max(hi, p.*axis);
  }
  return hi - lo;
}

double mean_z(const std::vector<Position3>& ps) {
  double s = 0.0;
  for (const auto& p : ps) s += p.z;
  return s / static_cast<double>(ps.size());
}

}  // namespace

TEST(Placement, LevelBoresight) {
  const Position3 q = target_world_position({0.0, 1.0, 100.0}, {0, 0, 1});
  EXPECT_NEAR(q.x, 100.0, 1e-12);
  EXPECT_NEAR(q.y, 0.0, 1e-12);
  EXPECT_NEAR(q.z, 1.0, 1e-12);
}

TEST(Placement, PureLateral) {
  const Position3 q = target_world_position({kPi / 2, 1.0, 50.0}, {0, 0, 1});
  EXPECT_NEAR(q.x, 0.0, 1e-12);
  EXPECT_NEAR(q.y, 50.0, 1e-12);
  EXPECT_NEAR(q.z, 1.0, 1e-12);
}

TEST(Placement, BelowReference) {
  const Position3 ref{0, 0, 0.55};
  const Position3 q = target_world_position({0.0, 0.5, 100.0}, ref);
  const double d = std::sqrt(100.0 * 100.0 - 0.05 * 0.05);
  EXPECT_NEAR(q.x, d, 1e-12);
  EXPECT_NEAR(q.x, 99.9999875, 1e-9);
  EXPECT_EQ(q.y, 0.0);
  EXPECT_EQ(q.z, 0.5);
  EXPECT_NEAR(distance(q, ref), 100.0, 1e-9);
}

TEST(Placement, UnsolvableThrows) {
  EXPECT_THROW(target_world_position({0.0, 5.0, 1.0}, {0, 0, 0.5}), DomainError);
}

TEST(Placement, RoundTripIdentity) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> az(-1.2, 1.2), h(0.0, 2.0), r(5.0, 200.0);
  const Position3 ref{0.3, -0.1, 0.55};
  for (int i = 0; i < 1000; ++i) {
    const TargetSpec t{az(gen), h(gen), r(gen)};
    const TargetSpec back = target_spec_from_position(target_world_position(t, ref), ref);
    EXPECT_NEAR(back.azimuth, t.azimuth, 1e-9);
    EXPECT_NEAR(back.height, t.height, 1e-9);
    EXPECT_NEAR(back.slant_range, t.slant_range, 1e-9);
  }
}

TEST(Mirror, Examples) {
  EXPECT_EQ(mirror_point({1, 2, 0.5}), (Position3{1, 2, -0.5}));
  const Position3 m0 = mirror_point({0, 0, 0});
  EXPECT_EQ(m0.x, 0.0);
  EXPECT_EQ(m0.y, 0.0);
  EXPECT_EQ(m0.z, 0.0);
}

TEST(Mirror, InvolutionKeepsHorizontal) {
  std::mt19937_64 gen(3);
  std::normal_distribution<double> n(0.0, 10.0);
  for (int i = 0; i < 100; ++i) {
    const Position3 p{n(gen), n(gen), n(gen)};
    const Position3 m = mirror_point(p);
    EXPECT_EQ(m.x, p.x);
    EXPECT_EQ(m.y, p.y);
    EXPECT_EQ(mirror_point(m), p);
  }
}

TEST(Presets, Bumper) {
  const AntennaLayout l = preset_layout("bumper_6x8");
  ASSERT_EQ(l.apertures.size(), 1u);
  const auto& a = l.apertures[0];
  EXPECT_EQ(a.tx.size(), 6u);
  EXPECT_EQ(a.rx.size(), 8u);
  EXPECT_EQ(l.virtual_count(), 48u);
  const auto v = a.virtual_positions();
  EXPECT_NEAR(extent(v, &Position3::z), 0.10, 1e-12);
  EXPECT_NEAR(extent(v, &Position3::y), 0.10, 1e-12);
  EXPECT_NEAR(mean_z(v), 0.55, 1e-12);
  EXPECT_NEAR(l.reference().z, 0.55, 0.05);
}

TEST(Presets, Roof) {
  const AntennaLayout l = preset_layout("roof_3x4");
  EXPECT_EQ(l.virtual_count(), 12u);
  const auto v = l.apertures[0].virtual_positions();
  EXPECT_NEAR(mean_z(v), 1.1, 1e-12);
  EXPECT_NEAR(extent(v, &Position3::z), 0.05, 1e-12);
}

TEST(Presets, CompactCounts) {
  EXPECT_EQ(preset_layout("cross_6x8").virtual_count(), 48u);
  EXPECT_EQ(preset_layout("cross_12x16").virtual_count(), 192u);
  EXPECT_EQ(preset_layout("square_6x8").virtual_count(), 48u);
  EXPECT_EQ(preset_layout("square_12x16").virtual_count(), 192u);
}

TEST(Presets, InsideFootprint) {
  for (const auto& name : preset_names()) {
    const AntennaLayout l = preset_layout(name);
    for (const auto& a : l.apertures) {
      ASSERT_TRUE(a.footprint.has_value()) << name;
      const FootprintBox& box = *a.footprint;
      if (name.rfind("cross", 0) == 0 || name.rfind("square", 0) == 0) {
        EXPECT_LE(box.width(), 0.11 + 1e-12) << name;
        EXPECT_LE(box.height(), 0.11 + 1e-12) << name;
      }
      for (const auto& p : a.tx) EXPECT_TRUE(box.contains(p)) << name;
      for (const auto& p : a.rx) EXPECT_TRUE(box.contains(p)) << name;
      for (const auto& p : a.virtual_positions()) {
        EXPECT_TRUE(box.contains(p)) << name;
      }
    }
  }
}

TEST(Presets, UnknownThrows) { EXPECT_THROW(preset_layout("bumper_7x9"), DomainError); }

TEST(Presets, CombineKeepsApertures) {
  const AntennaLayout l =
      combine_layouts({preset_layout("bumper_6x8"), preset_layout("roof_3x4")});
  EXPECT_EQ(l.apertures.size(), 2u);
  EXPECT_EQ(l.virtual_count(), 60u);
}

TEST(Aperture, ValidateRejects) {
  CoherentAperture a{"a", {{0, 0, 1}}, {{0, 0, 1}, {0, 0, 1}}, std::nullopt};
  EXPECT_THROW(a.validate(), DomainError);
  a.rx = {{0, 0, 0}};
  EXPECT_THROW(a.validate(), DomainError);
  a.rx = {};
  EXPECT_THROW(a.validate(), DomainError);
  a.rx = {{0, 0.1, 1}};
  EXPECT_NO_THROW(a.validate());
}

TEST(Aperture, VirtualPositionsTxMajor) {
  const CoherentAperture a{"a", {{0, 0, 1}, {0, 0, 2}}, {{0, 1, 1}, {0, 2, 1}, {0, 3, 1}},
                           std::nullopt};
  const auto v = a.virtual_positions();
  ASSERT_EQ(v.size(), 6u);
  const Position3 half = 0.5 * (centroid(a.tx) + centroid(a.rx));
  for (std::size_t t = 0; t < 2; ++t)
    for (std::size_t q = 0; q < 3; ++q) EXPECT_EQ(v[t * 3 + q], a.tx[t] + a.rx[q] - half);
}

TEST(Aperture, LevelSubarray) {
  const CoherentAperture bumper = preset_layout("bumper_6x8").apertures[0];
  EXPECT_FALSE(bumper.is_level());
  const CoherentAperture level = level_subarray(bumper);
  EXPECT_TRUE(level.is_level());
  EXPECT_EQ(level.virtual_count(), 8u);
}
