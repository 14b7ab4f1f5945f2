// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <span>
#include <vector>

#include "heightscope/geometry.hpp"
#include "heightscope/types.hpp"

namespace heightscope {

// Grouping of height-dictionary columns. A: one group per (height, azimuth)
// pooled over rho. B: every (height, azimuth, rho) column is its own group.
enum class LabelOption { A, B };

// Hypothesis carried by one dictionary column.
struct ColumnHypothesis {
  double azimuth = 0.0;  // rad
  double height = 0.0;   // m; 0 for single-path azimuth columns
  Complex rho{0.0, 0.0};
  double u = 0.0;  // spatial frequencies, only set for (u, v) columns
  double v = 0.0;

  bool same_as(const ColumnHypothesis& o, double tol = 1e-12) const;
};

// Column layout of a dictionary built as rho-major blocks of azimuth-major
// blocks of heights: index = (k_rho * naz + k_az) * nh + k_h.
struct GridShape {
  int nh = 1;
  int naz = 1;
  int nrho = 1;

  int columns() const { return nh * naz * nrho; }
  int stride() const { return nh * naz; }
  friend bool operator==(const GridShape&, const GridShape&) = default;
};

struct Dictionary {
  CMatrix matrix;
  std::vector<ColumnHypothesis> columns;
  std::vector<int> labels;    // 1-based group per column
  std::vector<double> scales; // column norms divided out by normalization; 1 if never normalized
  GridShape shape;

  Eigen::Index rows() const { return matrix.rows(); }
  Eigen::Index cols() const { return matrix.cols(); }
  int group_count() const;
  // Throws DomainError if labels do not partition the columns into 1..G.
  void validate() const;
};

std::vector<double> uniform_grid(double lo, double hi, double step);
// Throws DomainError unless strictly increasing and nonempty.
void check_grid(std::span<const double> grid, const char* what);

struct UV {
  double u = 1.0;
  double v = 0.0;
};

// Single-path columns at elevation 0, one group per azimuth. Requires a level
// aperture (every virtual channel at one height).
Dictionary azimuth_dictionary_case_i(std::span<const double> azimuths,
                                     const CoherentAperture& aperture, const Position3& ref,
                                     double r, double wavelength);

// Columns parametrized by (u, v) with the vertical phase term dropped. Every
// point must satisfy max(|u|, |v|) <= cos(theta_max).
Dictionary azimuth_dictionary_case_ii(std::span<const UV> uv, double theta_max,
                                      const CoherentAperture& aperture, const Position3& ref,
                                      double r, double wavelength);

// v-only grid for apertures whose antennas share one x: u is implied by v.
std::vector<UV> planar_uv_grid(std::span<const double> v_grid);

// Multipath columns over azimuth x coarse height x rho; groups pool rho.
Dictionary azimuth_dictionary_case_iii(std::span<const double> azimuths,
                                       std::span<const double> coarse_heights,
                                       std::span<const Complex> rhos,
                                       const CoherentAperture& aperture, const Position3& ref,
                                       double r, double wavelength);

std::vector<int> height_labels(LabelOption option, int nh, int naz, int nrho);

Dictionary height_dictionary(std::span<const double> azimuths, std::span<const double> heights,
                             std::span<const Complex> rhos, const CoherentAperture& aperture,
                             const Position3& ref, double r, double wavelength,
                             LabelOption option = LabelOption::B);

// Unit 2-norm columns; scales hold the removed norms.
Dictionary normalize(Dictionary d);

struct NormalizedSignal {
  CVector y;
  double scale = 1.0;
};
NormalizedSignal normalize(const CVector& y);

// Block-diagonal operator over shared dictionaries with one global group
// partition. Blocks are never materialized densely except by to_dense().
struct BlockSystem {
  std::vector<std::shared_ptr<const Dictionary>> blocks;
  std::vector<int> labels;

  Eigen::Index rows() const;
  Eigen::Index cols() const;
  int group_count() const;
  std::vector<Eigen::Index> row_offsets() const;
  std::vector<Eigen::Index> col_offsets() const;
  CMatrix to_dense() const;
  CVector apply(const CVector& x) const;
};

// One dense block with its own labels.
BlockSystem single_block(std::shared_ptr<const Dictionary> d);

struct FusedSystem {
  CVector y;
  BlockSystem system;
};

struct MeasurementSystem {
  CVector y;
  std::shared_ptr<const Dictionary> dictionary;
};

// Stacks y and places the dictionaries block-diagonally. Option A ties each
// (height, azimuth) across all points and rho; option B ties each column
// across points only. Throws ConsistencyError if column hypotheses differ.
FusedSystem assemble_range_fusion(std::span<const MeasurementSystem> systems,
                                  LabelOption option);

// Global labels for I blocks that share `shape`.
std::vector<int> fused_labels(LabelOption option, const GridShape& shape, int blocks);

}  // namespace heightscope
