// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "heightscope/dictionary.hpp"
#include "heightscope/solver.hpp"
#include "heightscope/steering.hpp"

using namespace heightscope;

namespace {

constexpr double kLambda = 0.0039;

CoherentAperture bumper() { return preset_layout("bumper_6x8").apertures[0]; }

Position3 bumper_ref() { return preset_layout("bumper_6x8").reference(); }

double coherence(const CMatrix& a, Eigen::Index i, Eigen::Index j) {
  return std::abs(a.col(i).dot(a.col(j))) / (a.col(i).norm() * a.col(j).norm());
}

}  // namespace

TEST(Labels, Examples) {
  EXPECT_EQ(height_labels(LabelOption::A, 2, 1, 2), (std::vector<int>{1, 2, 1, 2}));
  EXPECT_EQ(height_labels(LabelOption::B, 2, 1, 2), (std::vector<int>{1, 2, 3, 4}));
  EXPECT_EQ(height_labels(LabelOption::A, 7, 3, 1), height_labels(LabelOption::B, 7, 3, 1));
  EXPECT_THROW(height_labels(LabelOption::A, 0, 1, 1), DomainError);
}

TEST(Labels, FusedStructure) {
  const GridShape s{2, 1, 1};
  EXPECT_EQ(fused_labels(LabelOption::A, s, 2), (std::vector<int>{1, 2, 1, 2}));
  const GridShape t{3, 2, 2};
  EXPECT_EQ(fused_labels(LabelOption::B, t, 1), height_labels(LabelOption::B, 3, 2, 2));
  // Group sizes: a -> I*nrho, b -> I.
  const auto a = fused_labels(LabelOption::A, t, 4);
  const auto b = fused_labels(LabelOption::B, t, 4);
  for (int g = 1; g <= 6; ++g) EXPECT_EQ(std::count(a.begin(), a.end(), g), 8);
  for (int g = 1; g <= 12; ++g) EXPECT_EQ(std::count(b.begin(), b.end(), g), 4);
}

TEST(CaseI, ShapeAndBroadside) {
  const CoherentAperture row = level_subarray(bumper());
  const auto grid = uniform_grid(deg2rad(-9), deg2rad(9), deg2rad(0.1));
  ASSERT_EQ(grid.size(), 181u);
  const Position3 ref = bumper_ref();
  const Dictionary d = azimuth_dictionary_case_i(grid, row, ref, 100.0, kLambda);
  EXPECT_EQ(d.rows(), 8);
  EXPECT_EQ(d.cols(), 181);
  EXPECT_EQ(d.group_count(), 181);
  const CVector broadside = d.matrix.col(90);
  const Position3 q = ref + Position3{100.0, 0, 0};
  for (std::size_t t = 0; t < row.tx.size(); ++t)
    for (std::size_t r = 0; r < row.rx.size(); ++r) {
      const Position3 a = row.tx[t] - q, b = row.rx[r] - q;
      const double dt = std::sqrt(a.x * a.x + a.y * a.y + a.z * a.z);
      const double dr = std::sqrt(b.x * b.x + b.y * b.y + b.z * b.z);
      const Complex e = std::polar(1.0, kTwoPi / kLambda * dt) * std::polar(1.0, kTwoPi / kLambda * dr);
      EXPECT_NEAR(std::abs(broadside(static_cast<Eigen::Index>(t * row.rx.size() + r)) - e), 0.0,
                  1e-9);
    }
}

TEST(CaseI, AdjacentColumnsMoreCoherent) {
  const CoherentAperture row = level_subarray(bumper());
  const auto grid = uniform_grid(deg2rad(-9), deg2rad(9), deg2rad(0.1));
  const Dictionary d = azimuth_dictionary_case_i(grid, row, bumper_ref(), 100.0, kLambda);
  EXPECT_GT(coherence(d.matrix, 90, 91), coherence(d.matrix, 90, 100));
}

TEST(CaseI, RejectsNonLevel) {
  const auto grid = uniform_grid(-0.1, 0.1, 0.01);
  EXPECT_THROW(azimuth_dictionary_case_i(grid, bumper(), bumper_ref(), 100.0, kLambda),
               DomainError);
}

TEST(CaseII, BoresightMatchesCaseI) {
  const CoherentAperture row = level_subarray(bumper());
  const Position3 ref = bumper_ref();
  const std::vector<UV> uv{{1.0, 0.0}};
  const std::vector<double> phi{0.0};
  const Dictionary a = azimuth_dictionary_case_ii(uv, 0.0, row, ref, 100.0, kLambda);
  const Dictionary b = azimuth_dictionary_case_i(phi, row, ref, 100.0, kLambda);
  EXPECT_LE((a.matrix - b.matrix).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(CaseII, PlanarGridAndBounds) {
  const CoherentAperture row = level_subarray(bumper());
  const auto v = uniform_grid(-0.1, 0.1, 0.01);
  const auto uv = planar_uv_grid(v);
  const Dictionary d = azimuth_dictionary_case_ii(uv, 0.0, row, bumper_ref(), 100.0, kLambda);
  EXPECT_EQ(d.cols(), static_cast<Eigen::Index>(v.size()));
  for (std::size_t j = 0; j < uv.size(); ++j)
    EXPECT_NEAR(uv[j].u * uv[j].u + uv[j].v * uv[j].v, 1.0, 1e-12);
  const std::vector<UV> bad{{1.0, 0.2}};
  EXPECT_THROW(azimuth_dictionary_case_ii(bad, deg2rad(30), row, bumper_ref(), 100.0, kLambda),
               DomainError);
}

TEST(CaseIII, Counting) {
  const auto ap = preset_layout("roof_3x4").apertures[0];
  const auto phi = uniform_grid(deg2rad(-9), deg2rad(9), deg2rad(0.1));
  const std::vector<double> h{0.1, 0.4, 0.7, 1.0, 1.3};
  std::vector<Complex> rho;
  for (double a : {0.1, 0.3, 0.5, 0.7, 0.9}) rho.push_back(-a);
  const Dictionary d = azimuth_dictionary_case_iii(phi, h, rho, ap, {0, 0, 1.1}, 100.0, kLambda);
  EXPECT_EQ(d.cols(), 4525);
  EXPECT_EQ(d.group_count(), 905);
  EXPECT_NO_THROW(d.validate());
}

TEST(CaseIII, DegenerateEqualsCaseIWithGroundReference) {
  // The two forms meet only when the range origin sits on the ground.
  const CoherentAperture row = level_subarray(bumper());
  const Position3 ref{0, 0, 0};
  const auto phi = uniform_grid(-0.05, 0.05, 0.01);
  const std::vector<double> h{0.0};
  const std::vector<Complex> rho{0.0};
  const Dictionary a = azimuth_dictionary_case_iii(phi, h, rho, row, ref, 100.0, kLambda);
  const Dictionary b = azimuth_dictionary_case_i(phi, row, ref, 100.0, kLambda);
  ASSERT_EQ(a.cols(), b.cols());
  EXPECT_LE((a.matrix - b.matrix).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(CaseIII, OnTargetGroupHasMaxEnergy) {
  const auto ap = bumper();
  const Position3 ref = bumper_ref();
  const auto phi = uniform_grid(deg2rad(-2), deg2rad(2), deg2rad(0.2));
  const std::vector<double> h{0.15, 0.45, 0.75, 1.05, 1.35};
  const std::vector<Complex> rho{-0.3, -0.6, -0.9};
  const Dictionary d = normalize(azimuth_dictionary_case_iii(phi, h, rho, ap, ref, 120.0, kLambda));
  const CVector y = multipath_steering(ap, ref, {phi[13], h[3], 120.0}, rho[1], kLambda);
  const auto e = group_energies(d.matrix, d.labels, y);
  const auto best = std::max_element(e.begin(), e.end()) - e.begin();
  EXPECT_EQ(d.columns[static_cast<std::size_t>(
                std::find(d.labels.begin(), d.labels.end(), best + 1) - d.labels.begin())]
                .azimuth,
            phi[13]);
}

TEST(HeightDictionary, OrderingLaw) {
  const auto ap = bumper();
  const std::vector<double> phi{0.01};
  const std::vector<double> h{0.3, 0.5};
  const std::vector<Complex> rho{-0.2, -0.8};
  const Dictionary d = height_dictionary(phi, h, rho, ap, bumper_ref(), 100.0, kLambda);
  ASSERT_EQ(d.cols(), 4);
  EXPECT_EQ(d.rows(), 48);
  const double hs[] = {0.3, 0.5, 0.3, 0.5};
  const Complex rs[] = {-0.2, -0.2, -0.8, -0.8};
  for (int c = 0; c < 4; ++c) {
    EXPECT_EQ(d.columns[c].height, hs[c]);
    EXPECT_EQ(d.columns[c].rho, rs[c]);
    EXPECT_EQ(d.columns[c].azimuth, 0.01);
  }
  EXPECT_EQ(d.labels, (std::vector<int>{1, 2, 3, 4}));
}

TEST(HeightDictionary, StrideRecoversRhoBlocks) {
  const auto ap = bumper();
  const std::vector<double> phi{-0.01, 0.0, 0.02};
  const auto h = uniform_grid(0.0, 0.2, 0.02);
  const std::vector<Complex> rho{-0.1, -0.5, -0.9};
  const Dictionary d = height_dictionary(phi, h, rho, ap, bumper_ref(), 90.0, kLambda);
  const int stride = d.shape.stride();
  ASSERT_EQ(stride, static_cast<int>(h.size() * phi.size()));
  for (int k = 0; k < 3; ++k)
    for (int c = 0; c < stride; ++c) {
      const auto& col = d.columns[static_cast<std::size_t>(k * stride + c)];
      EXPECT_EQ(col.rho, rho[static_cast<std::size_t>(k)]);
      EXPECT_EQ(col.azimuth, phi[static_cast<std::size_t>(c / static_cast<int>(h.size()))]);
      EXPECT_EQ(col.height, h[static_cast<std::size_t>(c % static_cast<int>(h.size()))]);
    }
}

TEST(HeightDictionary, RhoZeroColumnsAreDirect) {
  const auto ap = bumper();
  const Position3 ref = bumper_ref();
  const std::vector<double> phi{0.03};
  const std::vector<double> h{0.2, 0.9};
  const std::vector<Complex> rho{0.0};
  const Dictionary d = height_dictionary(phi, h, rho, ap, ref, 100.0, kLambda);
  for (int c = 0; c < 2; ++c) {
    const Position3 q = target_world_position({0.03, h[static_cast<std::size_t>(c)], 100.0}, ref);
    EXPECT_EQ(d.matrix.col(c), virtual_steering(ap.tx, ap.rx, q, kLambda));
  }
}

TEST(Normalize, Columns) {
  Dictionary d;
  d.matrix = CMatrix::Zero(2, 2);
  d.matrix(0, 0) = 1.0;
  d.matrix(0, 1) = 3.0;
  d.matrix(1, 1) = 4.0;
  d.columns.resize(2);
  d.labels = {1, 2};
  d.scales = {1.0, 1.0};
  const Dictionary n = normalize(d);
  EXPECT_EQ(n.matrix.col(0), d.matrix.col(0));
  EXPECT_DOUBLE_EQ(n.scales[0], 1.0);
  EXPECT_DOUBLE_EQ(n.scales[1], 5.0);
  EXPECT_NEAR(n.matrix(0, 1).real(), 0.6, 1e-15);
  d.matrix.col(1).setZero();
  EXPECT_THROW(normalize(d), DomainError);
  EXPECT_THROW(normalize(CVector(CVector::Zero(3))), DomainError);
}

TEST(Normalize, SelectionInvariantForEqualGroups) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> n;
  Dictionary d;
  d.matrix.resize(10, 8);
  for (Eigen::Index i = 0; i < d.matrix.size(); ++i) d.matrix(i) = {n(gen), n(gen)};
  d.labels = {1, 1, 2, 2, 3, 3, 4, 4};
  d.columns.resize(8);
  d.scales.assign(8, 1.0);
  d = normalize(d);
  Dictionary scaled = d;
  for (int c = 0; c < 8; ++c) scaled.matrix.col(c) *= 1.0 + c;
  CVector y(10);
  for (Eigen::Index i = 0; i < 10; ++i) y(i) = {n(gen), n(gen)};
  const BompSolver a(single_block(std::make_shared<Dictionary>(d)));
  const BompSolver b(single_block(std::make_shared<Dictionary>(scaled)));
  EXPECT_EQ(a.solve(y, StopRule::sparsity(2)).selected_groups,
            b.solve(y, StopRule::sparsity(2)).selected_groups);
}

TEST(Fusion, SingleSystemKeepsLabels) {
  const auto ap = bumper();
  const std::vector<double> phi{0.0};
  const auto h = uniform_grid(0.1, 0.3, 0.1);
  const std::vector<Complex> rho{-0.5, -0.7};
  auto d = std::make_shared<Dictionary>(
      height_dictionary(phi, h, rho, ap, bumper_ref(), 100.0, kLambda, LabelOption::A));
  const std::vector<MeasurementSystem> one{{CVector::Ones(48), d}};
  const FusedSystem f = assemble_range_fusion(one, LabelOption::A);
  EXPECT_EQ(f.system.labels, d->labels);
  EXPECT_EQ(f.system.rows(), 48);
}

TEST(Fusion, TwoPointsBlockDiagonal) {
  const auto ap = bumper();
  const std::vector<double> phi{0.0};
  const std::vector<double> h{0.3, 0.5};
  const std::vector<Complex> rho{-0.5};
  auto d1 = std::make_shared<Dictionary>(height_dictionary(phi, h, rho, ap, bumper_ref(), 100.0, kLambda));
  auto d2 = std::make_shared<Dictionary>(height_dictionary(phi, h, rho, ap, bumper_ref(), 99.0, kLambda));
  const std::vector<MeasurementSystem> two{{CVector::Ones(48), d1}, {CVector::Zero(48), d2}};
  const FusedSystem f = assemble_range_fusion(two, LabelOption::A);
  EXPECT_EQ(f.system.labels, (std::vector<int>{1, 2, 1, 2}));
  const CMatrix a = f.system.to_dense();
  ASSERT_EQ(a.rows(), 96);
  ASSERT_EQ(a.cols(), 4);
  EXPECT_EQ(a.block(0, 2, 48, 2).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(a.block(48, 0, 48, 2).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(a.block(0, 0, 48, 2), d1->matrix);
  EXPECT_EQ(f.y.head(48), CVector::Ones(48));
}

TEST(Fusion, MismatchedHypothesesThrow) {
  const auto ap = bumper();
  const std::vector<double> phi{0.0};
  const std::vector<double> h1{0.3, 0.5}, h2{0.3, 0.52};
  const std::vector<Complex> rho{-0.5};
  auto d1 = std::make_shared<Dictionary>(height_dictionary(phi, h1, rho, ap, bumper_ref(), 100.0, kLambda));
  auto d2 = std::make_shared<Dictionary>(height_dictionary(phi, h2, rho, ap, bumper_ref(), 99.0, kLambda));
  const std::vector<MeasurementSystem> two{{CVector::Ones(48), d1}, {CVector::Ones(48), d2}};
  EXPECT_THROW(assemble_range_fusion(two, LabelOption::B), ConsistencyError);
}

TEST(Fusion, TrueGroupEnergyGrowsWithPoints) {
  const auto ap = bumper();
  const Position3 ref = bumper_ref();
  const std::vector<double> phi{0.0};
  const auto h = uniform_grid(0.0, 1.5, 0.02);
  const std::vector<Complex> rho{-0.5};
  std::vector<MeasurementSystem> systems;
  for (double r : {100.0, 99.0}) {
    auto d = std::make_shared<Dictionary>(
        normalize(height_dictionary(phi, h, rho, ap, ref, r, kLambda)));
    const CVector y = normalize(multipath_steering(ap, ref, {0.0, h[30], r}, rho[0], kLambda)).y;
    systems.push_back({y, d});
  }
  const FusedSystem one = assemble_range_fusion(std::span(systems).first(1), LabelOption::B);
  const FusedSystem two = assemble_range_fusion(systems, LabelOption::B);
  const BompSolver s1(one.system), s2(two.system);
  EXPECT_GT(s2.projection_energies(two.y)[30], s1.projection_energies(one.y)[30]);
}
