// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "heightscope/dictionary.hpp"
#include "heightscope/types.hpp"

namespace heightscope {

// Stop after max_groups selections or once ||r|| <= residual_fraction ||y||.
// A zero field disables that rule; at least one must be active.
struct StopRule {
  int max_groups = 2;
  double residual_fraction = 0.0;

  static StopRule sparsity(int k) { return {k, 0.0}; }
  static StopRule residual(double eps) { return {0, eps}; }
  void validate() const;
};

struct SolverOptions {
  // Relative pivot threshold of the least-squares refit; directions weaker
  // than this are truncated.
  double rank_tolerance = 1e-10;
  // A candidate group that raises the rank of the selected set by nothing at
  // this relative threshold is degenerate and skipped.
  double degeneracy_tolerance = 1e-10;
};

struct Reconstruction {
  CVector coefficients;
  std::vector<int> selected_groups;  // labels, in selection order
  double residual_norm = 0.0;
  std::vector<double> residual_history;  // ||r|| before the first and after every selection
  bool degenerate = false;
  std::vector<int> skipped_groups;  // degenerate candidates
};

struct GroupSparseProblem {
  CVector y;
  BlockSystem system;
  StopRule stop;
};

// sum over groups of the 2-norm of x restricted to the group.
double group_norm(const CVector& x, std::span<const int> labels);

// ||A_g^H r||^2 per group g = 1..G, returned at index g-1.
std::vector<double> group_energies(const CMatrix& a, std::span<const int> labels,
                                   const CVector& residual);

// Block OMP over a block-diagonal system. Construction precomputes an
// orthonormal basis per (block, group); selection maximizes the energy of the
// residual projected onto each group's span, summed over blocks. solve() is
// const and may run concurrently on one instance.
class BompSolver {
 public:
  explicit BompSolver(BlockSystem system, SolverOptions options = {});

  Reconstruction solve(const CVector& y, const StopRule& stop) const;

  // Projection energy per group (index g-1) of a stacked residual.
  std::vector<double> projection_energies(const CVector& residual) const;

  const BlockSystem& system() const { return system_; }
  const SolverOptions& options() const { return options_; }

 private:
  struct BlockPlan {
    CMatrix basis;                                 // orthonormal, all groups side by side
    std::vector<int> basis_group;                  // 0-based group of each basis column
    std::vector<std::vector<Eigen::Index>> group_columns;  // local columns per group
  };

  BlockSystem system_;
  SolverOptions options_;
  int groups_ = 0;
  std::vector<Eigen::Index> row_offsets_;
  std::vector<Eigen::Index> col_offsets_;
  std::vector<BlockPlan> plans_;
};

Reconstruction bomp(const GroupSparseProblem& problem, SolverOptions options = {});

enum class Pooling { Mean, Max };

struct HypothesisMap {
  std::vector<double> values;
  std::vector<ColumnHypothesis> bins;  // may be empty when only values matter
  double threshold = 0.0;
};

// Sum over measurements of |x_i| per bin.
HypothesisMap doa_map(std::span<const CVector> coefficients,
                      std::span<const ColumnHypothesis> bins = {});

// Per azimuth bin, mean or max over rho of |x| at stride nh*naz. `columns`
// (optional) supplies bin metadata in height_dictionary order.
std::vector<HypothesisMap> height_map(const CVector& x, const GridShape& shape, Pooling pooling,
                                      std::span<const ColumnHypothesis> columns = {});

// Pools a per-column map of a product dictionary into one value per azimuth,
// over its heights and rho values.
HypothesisMap azimuth_pool(const HypothesisMap& columns_map, const GridShape& shape,
                           Pooling pooling);

struct MapDeclaration {
  std::size_t bin = 0;
  double value = 0.0;
  ColumnHypothesis hypothesis;
};

// Bins with value strictly above gamma.
std::vector<MapDeclaration> declare(const HypothesisMap& map, double gamma);

}  // namespace heightscope
