// SPDX-License-Identifier: Apache-2.0
#include "heightscope/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace heightscope {

void StopRule::validate() const {
  const bool by_count = max_groups >= 1;
  const bool by_residual = residual_fraction > 0.0 && residual_fraction < 1.0;
  if (max_groups < 0 || residual_fraction < 0.0 || residual_fraction >= 1.0 ||
      (!by_count && !by_residual))
    throw DomainError("stop rule needs K >= 1 or a residual fraction in (0, 1)");
}

double group_norm(const CVector& x, std::span<const int> labels) {
  if (static_cast<std::size_t>(x.size()) != labels.size())
    throw DomainError("coefficient and label lengths differ");
  std::map<int, double> sq;
  for (std::size_t i = 0; i < labels.size(); ++i)
    sq[labels[i]] += std::norm(x(static_cast<Eigen::Index>(i)));
  double total = 0.0;
  for (const auto& [g, s] : sq) total += std::sqrt(s);
  return total;
}

std::vector<double> group_energies(const CMatrix& a, std::span<const int> labels,
                                   const CVector& residual) {
  if (static_cast<std::size_t>(a.cols()) != labels.size())
    throw DomainError("label length differs from column count");
  if (a.rows() != residual.size()) throw DomainError("residual length differs from row count");
  const int groups = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end());
  std::vector<double> e(static_cast<std::size_t>(groups), 0.0);
  const CVector c = a.adjoint() * residual;
  for (std::size_t i = 0; i < labels.size(); ++i)
    e[static_cast<std::size_t>(labels[i] - 1)] += std::norm(c(static_cast<Eigen::Index>(i)));
  return e;
}

BompSolver::BompSolver(BlockSystem system, SolverOptions options)
    : system_(std::move(system)), options_(options) {
  if (system_.blocks.empty()) throw DomainError("system has no blocks");
  if (static_cast<Eigen::Index>(system_.labels.size()) != system_.cols())
    throw DomainError("label length differs from column count");
  groups_ = system_.group_count();
  for (int l : system_.labels)
    if (l < 1) throw DomainError("labels must be positive");
  row_offsets_ = system_.row_offsets();
  col_offsets_ = system_.col_offsets();

  plans_.resize(system_.blocks.size());
  for (std::size_t b = 0; b < system_.blocks.size(); ++b) {
    const CMatrix& a = system_.blocks[b]->matrix;
    BlockPlan& plan = plans_[b];
    plan.group_columns.assign(static_cast<std::size_t>(groups_), {});
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      const int g = system_.labels[static_cast<std::size_t>(col_offsets_[b] + c)] - 1;
      plan.group_columns[static_cast<std::size_t>(g)].push_back(c);
    }
    std::vector<CVector> basis;
    for (int g = 0; g < groups_; ++g) {
      const auto& cols = plan.group_columns[static_cast<std::size_t>(g)];
      if (cols.empty()) continue;
      if (cols.size() == 1) {
        const double n = a.col(cols[0]).norm();
        if (n > 0.0) {
          basis.push_back(a.col(cols[0]) / n);
          plan.basis_group.push_back(g);
        }
        continue;
      }
      CMatrix sub(a.rows(), static_cast<Eigen::Index>(cols.size()));
      for (std::size_t k = 0; k < cols.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(cols[k]);
      Eigen::JacobiSVD<CMatrix> svd(sub, Eigen::ComputeThinU);
      const auto& s = svd.singularValues();
      for (Eigen::Index k = 0; k < s.size(); ++k)
        if (s(0) > 0.0 && s(k) > options_.rank_tolerance * s(0)) {
          basis.push_back(svd.matrixU().col(k));
          plan.basis_group.push_back(g);
        }
    }
    plan.basis.resize(a.rows(), static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) plan.basis.col(static_cast<Eigen::Index>(k)) = basis[k];
  }
}

std::vector<double> BompSolver::projection_energies(const CVector& residual) const {
  if (residual.size() != system_.rows()) throw DomainError("residual length differs from row count");
  std::vector<double> e(static_cast<std::size_t>(groups_), 0.0);
  for (std::size_t b = 0; b < plans_.size(); ++b) {
    const BlockPlan& plan = plans_[b];
    if (plan.basis.cols() == 0) continue;
    const CVector c =
        plan.basis.adjoint() * residual.segment(row_offsets_[b], plan.basis.rows());
    for (Eigen::Index k = 0; k < c.size(); ++k)
      e[static_cast<std::size_t>(plan.basis_group[static_cast<std::size_t>(k)])] += std::norm(c(k));
  }
  return e;
}

namespace {

CMatrix gather(const CMatrix& a, const std::vector<Eigen::Index>& cols) {
  CMatrix out(a.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = a.col(cols[k]);
  return out;
}

Eigen::Index rank_of(const CMatrix& m, double tol) {
  if (m.cols() == 0) return 0;
  Eigen::CompleteOrthogonalDecomposition<CMatrix> cod;
  cod.setThreshold(tol);
  cod.compute(m);
  return cod.rank();
}

}  // namespace

Reconstruction BompSolver::solve(const CVector& y, const StopRule& stop) const {
  stop.validate();
  if (y.size() != system_.rows()) throw DomainError("measurement length differs from row count");
  const std::size_t nblocks = plans_.size();

  Reconstruction out;
  out.coefficients = CVector::Zero(system_.cols());
  const double ynorm = y.norm();
  out.residual_norm = ynorm;
  out.residual_history.push_back(ynorm);
  if (!(ynorm > 0.0)) return out;

  CVector residual = y;
  std::vector<int> selected;  // 0-based
  std::vector<bool> blocked(static_cast<std::size_t>(groups_), false);
  std::vector<std::vector<Eigen::Index>> support(nblocks);
  Eigen::Index rank_total = 0;
  constexpr double kExactFit = 1e-12;

  while (true) {
    if (stop.max_groups > 0 && static_cast<int>(selected.size()) >= stop.max_groups) break;
    if (stop.residual_fraction > 0.0 && out.residual_norm <= stop.residual_fraction * ynorm) break;
    if (out.residual_norm <= kExactFit * ynorm) break;

    const std::vector<double> e = projection_energies(residual);
    int chosen = -1;
    std::vector<std::vector<Eigen::Index>> trial;
    Eigen::Index trial_rank = 0;
    while (true) {
      int best = -1;
      double best_e = -1.0;
      for (int g = 0; g < groups_; ++g)
        if (!blocked[static_cast<std::size_t>(g)] && e[static_cast<std::size_t>(g)] > best_e) {
          best = g;
          best_e = e[static_cast<std::size_t>(g)];
        }
      if (best < 0) break;
      blocked[static_cast<std::size_t>(best)] = true;
      trial = support;
      trial_rank = 0;
      for (std::size_t b = 0; b < nblocks; ++b) {
        const auto& add = plans_[b].group_columns[static_cast<std::size_t>(best)];
        trial[b].insert(trial[b].end(), add.begin(), add.end());
        trial_rank += rank_of(gather(system_.blocks[b]->matrix, trial[b]),
                              options_.degeneracy_tolerance);
      }
      if (trial_rank > rank_total) {
        chosen = best;
        break;
      }
      out.degenerate = true;
      out.skipped_groups.push_back(best + 1);
    }
    if (chosen < 0) break;

    selected.push_back(chosen);
    support = std::move(trial);
    rank_total = trial_rank;

    double rsq = 0.0;
    for (std::size_t b = 0; b < nblocks; ++b) {
      const CMatrix& a = system_.blocks[b]->matrix;
      const auto yb = y.segment(row_offsets_[b], a.rows());
      if (support[b].empty()) {
        residual.segment(row_offsets_[b], a.rows()) = yb;
        rsq += yb.squaredNorm();
        continue;
      }
      const CMatrix sub = gather(a, support[b]);
      Eigen::CompleteOrthogonalDecomposition<CMatrix> cod;
      cod.setThreshold(options_.rank_tolerance);
      cod.compute(sub);
      const CVector xb = cod.solve(yb);
      const CVector rb = yb - sub * xb;
      residual.segment(row_offsets_[b], a.rows()) = rb;
      rsq += rb.squaredNorm();
      for (std::size_t k = 0; k < support[b].size(); ++k)
        out.coefficients(col_offsets_[b] + support[b][k]) = xb(static_cast<Eigen::Index>(k));
    }
    out.residual_norm = std::sqrt(rsq);
    out.residual_history.push_back(out.residual_norm);
  }

  for (int g : selected) out.selected_groups.push_back(g + 1);
  return out;
}

Reconstruction bomp(const GroupSparseProblem& problem, SolverOptions options) {
  return BompSolver(problem.system, options).solve(problem.y, problem.stop);
}

HypothesisMap doa_map(std::span<const CVector> coefficients,
                      std::span<const ColumnHypothesis> bins) {
  if (coefficients.empty()) throw DomainError("no reconstructions to pool");
  const Eigen::Index n = coefficients.front().size();
  if (!bins.empty() && static_cast<Eigen::Index>(bins.size()) != n)
    throw ConsistencyError("bin metadata length differs from coefficient length");
  HypothesisMap map;
  map.values.assign(static_cast<std::size_t>(n), 0.0);
  for (const auto& x : coefficients) {
    if (x.size() != n) throw ConsistencyError("reconstructions cover different grids");
    for (Eigen::Index i = 0; i < n; ++i) map.values[static_cast<std::size_t>(i)] += std::abs(x(i));
  }
  map.bins.assign(bins.begin(), bins.end());
  return map;
}

std::vector<HypothesisMap> height_map(const CVector& x, const GridShape& shape, Pooling pooling,
                                      std::span<const ColumnHypothesis> columns) {
  if (x.size() != shape.columns())
    throw DomainError("coefficient length differs from nh*naz*nrho");
  if (!columns.empty() && static_cast<int>(columns.size()) != shape.columns())
    throw DomainError("column metadata length differs from nh*naz*nrho");
  const int stride = shape.stride();
  std::vector<HypothesisMap> maps(static_cast<std::size_t>(shape.naz));
  for (int a = 0; a < shape.naz; ++a) {
    HypothesisMap& m = maps[static_cast<std::size_t>(a)];
    m.values.assign(static_cast<std::size_t>(shape.nh), 0.0);
    for (int h = 0; h < shape.nh; ++h) {
      const int i = a * shape.nh + h;
      double acc = 0.0;
      for (int k = 0; k < shape.nrho; ++k) {
        const double v = std::abs(x(i + k * stride));
        acc = pooling == Pooling::Mean ? acc + v : std::max(acc, v);
      }
      m.values[static_cast<std::size_t>(h)] = pooling == Pooling::Mean ? acc / shape.nrho : acc;
      if (!columns.empty()) {
        ColumnHypothesis hyp = columns[static_cast<std::size_t>(i)];
        hyp.rho = 0.0;
        m.bins.push_back(hyp);
      }
    }
  }
  return maps;
}

HypothesisMap azimuth_pool(const HypothesisMap& columns_map, const GridShape& shape,
                           Pooling pooling) {
  if (static_cast<int>(columns_map.values.size()) != shape.columns())
    throw DomainError("map length differs from grid shape");
  HypothesisMap out;
  out.values.assign(static_cast<std::size_t>(shape.naz), 0.0);
  const int per = shape.nh * shape.nrho;
  for (int k = 0; k < shape.nrho; ++k)
    for (int a = 0; a < shape.naz; ++a)
      for (int h = 0; h < shape.nh; ++h) {
        const double v =
            columns_map.values[static_cast<std::size_t>((k * shape.naz + a) * shape.nh + h)];
        double& acc = out.values[static_cast<std::size_t>(a)];
        acc = pooling == Pooling::Mean ? acc + v / per : std::max(acc, v);
      }
  if (!columns_map.bins.empty())
    for (int a = 0; a < shape.naz; ++a) {
      ColumnHypothesis hyp = columns_map.bins[static_cast<std::size_t>(a * shape.nh)];
      hyp.height = 0.0;
      hyp.rho = 0.0;
      out.bins.push_back(hyp);
    }
  out.threshold = columns_map.threshold;
  return out;
}

std::vector<MapDeclaration> declare(const HypothesisMap& map, double gamma) {
  if (!(gamma >= 0.0)) throw DomainError("threshold must be non-negative");
  std::vector<MapDeclaration> out;
  for (std::size_t i = 0; i < map.values.size(); ++i)
    if (map.values[i] > gamma)
      out.push_back({i, map.values[i], map.bins.empty() ? ColumnHypothesis{} : map.bins[i]});
  return out;
}

}  // namespace heightscope
