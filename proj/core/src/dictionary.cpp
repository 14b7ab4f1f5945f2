// SPDX-License-Identifier: Apache-2.0
#include "heightscope/dictionary.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "heightscope/steering.hpp"

namespace heightscope {

bool ColumnHypothesis::same_as(const ColumnHypothesis& o, double tol) const {
  return std::abs(azimuth - o.azimuth) <= tol && std::abs(height - o.height) <= tol &&
         std::abs(rho - o.rho) <= tol && std::abs(u - o.u) <= tol && std::abs(v - o.v) <= tol;
}

namespace {

void check_labels(const std::vector<int>& labels, std::size_t cols) {
  if (labels.size() != cols) throw DomainError("label vector length differs from column count");
  std::set<int> seen(labels.begin(), labels.end());
  if (seen.empty()) return;
  if (*seen.begin() != 1 || *seen.rbegin() != static_cast<int>(seen.size()))
    throw DomainError("labels must cover 1..G without gaps");
}

}  // namespace

int Dictionary::group_count() const {
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end());
}

void Dictionary::validate() const {
  check_labels(labels, static_cast<std::size_t>(cols()));
  if (columns.size() != static_cast<std::size_t>(cols()) ||
      scales.size() != static_cast<std::size_t>(cols()))
    throw DomainError("dictionary metadata length differs from column count");
}

std::vector<double> uniform_grid(double lo, double hi, double step) {
  if (!(step > 0.0) || !(hi >= lo)) throw DomainError("invalid grid bounds");
  const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> g(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] = lo + step * static_cast<double>(i);
  return g;
}

void check_grid(std::span<const double> grid, const char* what) {
  if (grid.empty()) throw DomainError(std::string(what) + " grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw DomainError(std::string(what) + " grid is not strictly increasing");
}

namespace {

Dictionary empty_dictionary(Eigen::Index rows, Eigen::Index cols) {
  Dictionary d;
  d.matrix.resize(rows, cols);
  d.columns.resize(static_cast<std::size_t>(cols));
  d.labels.resize(static_cast<std::size_t>(cols));
  d.scales.assign(static_cast<std::size_t>(cols), 1.0);
  return d;
}

void check_level(const CoherentAperture& aperture) {
  if (!aperture.is_level())
    throw DomainError("aperture antennas are not at a common height");
}

}  // namespace

Dictionary azimuth_dictionary_case_i(std::span<const double> azimuths,
                                     const CoherentAperture& aperture, const Position3& ref,
                                     double r, double wavelength) {
  check_grid(azimuths, "azimuth");
  check_level(aperture);
  const auto n = static_cast<Eigen::Index>(azimuths.size());
  Dictionary d = empty_dictionary(static_cast<Eigen::Index>(aperture.virtual_count()), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double phi = azimuths[static_cast<std::size_t>(j)];
    d.matrix.col(j) = virtual_steering(aperture.tx, aperture.rx, ref, phi, 0.0, r, wavelength);
    d.columns[static_cast<std::size_t>(j)].azimuth = phi;
    d.labels[static_cast<std::size_t>(j)] = static_cast<int>(j) + 1;
  }
  d.shape = {1, static_cast<int>(n), 1};
  return d;
}

namespace {

CVector leg_uv(std::span<const Position3> antennas, const Position3& ref, const UV& uv,
               double r, double wavenumber) {
  const SpatialFrequencies n{uv.u, uv.v, 0.0};
  CVector a(static_cast<Eigen::Index>(antennas.size()));
  for (std::size_t i = 0; i < antennas.size(); ++i) {
    Position3 p = antennas[i] - ref;
    // The vertical phase term is dropped: only the horizontal projection of
    // the direction enters, the full p.p stays.
    a(static_cast<Eigen::Index>(i)) = std::polar(1.0, wavenumber * expanded_distance(p, n, r));
  }
  return a;
}

}  // namespace

Dictionary azimuth_dictionary_case_ii(std::span<const UV> uv, double theta_max,
                                      const CoherentAperture& aperture, const Position3& ref,
                                      double r, double wavelength) {
  if (uv.empty()) throw DomainError("(u, v) grid is empty");
  if (!(wavelength > 0.0)) throw DomainError("wavelength must be positive");
  check_level(aperture);
  const double bound = std::cos(theta_max) + 1e-12;
  for (const auto& p : uv)
    if (std::abs(p.u) > bound || std::abs(p.v) > bound)
      throw DomainError("(u, v) grid point outside the admissible square");
  const double k = kTwoPi / wavelength;
  const auto n = static_cast<Eigen::Index>(uv.size());
  Dictionary d = empty_dictionary(static_cast<Eigen::Index>(aperture.virtual_count()), n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const UV& p = uv[static_cast<std::size_t>(j)];
    const CVector t = leg_uv(aperture.tx, ref, p, r, k);
    const CVector q = leg_uv(aperture.rx, ref, p, r, k);
    for (Eigen::Index a = 0; a < t.size(); ++a)
      d.matrix.col(j).segment(a * q.size(), q.size()) = t(a) * q;
    auto& h = d.columns[static_cast<std::size_t>(j)];
    h.u = p.u;
    h.v = p.v;
    h.azimuth = std::atan2(p.v, p.u);
    d.labels[static_cast<std::size_t>(j)] = static_cast<int>(j) + 1;
  }
  d.shape = {1, static_cast<int>(n), 1};
  return d;
}

std::vector<UV> planar_uv_grid(std::span<const double> v_grid) {
  check_grid(v_grid, "v");
  std::vector<UV> out;
  out.reserve(v_grid.size());
  for (double v : v_grid) {
    if (std::abs(v) > 1.0) throw DomainError("|v| must not exceed 1");
    out.push_back({std::sqrt(1.0 - v * v), v});
  }
  return out;
}

namespace {

// Columns (k_rho * naz + k_az) * nh + k_h over the product grid.
Dictionary product_dictionary(std::span<const double> azimuths, std::span<const double> heights,
                              std::span<const Complex> rhos, const CoherentAperture& aperture,
                              const Position3& ref, double r, double wavelength) {
  if (rhos.empty()) throw DomainError("rho grid is empty");
  for (const auto& rho : rhos)
    if (std::abs(rho) > 1.0) throw DomainError("|rho| must not exceed 1");
  const GridShape shape{static_cast<int>(heights.size()), static_cast<int>(azimuths.size()),
                        static_cast<int>(rhos.size())};
  Dictionary d = empty_dictionary(static_cast<Eigen::Index>(aperture.virtual_count()),
                                  shape.columns());
  d.shape = shape;
  Eigen::Index col = 0;
  for (int kr = 0; kr < shape.nrho; ++kr)
    for (int ka = 0; ka < shape.naz; ++ka)
      for (int kh = 0; kh < shape.nh; ++kh, ++col) {
        const TargetSpec t{azimuths[ka], heights[kh], r};
        d.matrix.col(col) = multipath_steering(aperture, ref, t, rhos[kr], wavelength);
        d.columns[static_cast<std::size_t>(col)] = {azimuths[ka], heights[kh], rhos[kr]};
      }
  return d;
}

}  // namespace

Dictionary azimuth_dictionary_case_iii(std::span<const double> azimuths,
                                       std::span<const double> coarse_heights,
                                       std::span<const Complex> rhos,
                                       const CoherentAperture& aperture, const Position3& ref,
                                       double r, double wavelength) {
  check_grid(azimuths, "azimuth");
  check_grid(coarse_heights, "coarse height");
  Dictionary d =
      product_dictionary(azimuths, coarse_heights, rhos, aperture, ref, r, wavelength);
  d.labels = height_labels(LabelOption::A, d.shape.nh, d.shape.naz, d.shape.nrho);
  return d;
}

std::vector<int> height_labels(LabelOption option, int nh, int naz, int nrho) {
  if (nh < 1 || naz < 1 || nrho < 1) throw DomainError("label counts must be positive");
  const int stride = nh * naz;
  std::vector<int> labels(static_cast<std::size_t>(stride * nrho));
  for (int c = 0; c < stride * nrho; ++c)
    labels[static_cast<std::size_t>(c)] = option == LabelOption::A ? c % stride + 1 : c + 1;
  return labels;
}

Dictionary height_dictionary(std::span<const double> azimuths, std::span<const double> heights,
                             std::span<const Complex> rhos, const CoherentAperture& aperture,
                             const Position3& ref, double r, double wavelength,
                             LabelOption option) {
  if (azimuths.empty()) throw DomainError("no detected azimuths");
  check_grid(heights, "height");
  Dictionary d = product_dictionary(azimuths, heights, rhos, aperture, ref, r, wavelength);
  d.labels = height_labels(option, d.shape.nh, d.shape.naz, d.shape.nrho);
  return d;
}

Dictionary normalize(Dictionary d) {
  for (Eigen::Index j = 0; j < d.cols(); ++j) {
    const double n = d.matrix.col(j).norm();
    if (!(n > 0.0)) throw DomainError("cannot normalize a zero column");
    d.matrix.col(j) /= n;
    d.scales[static_cast<std::size_t>(j)] *= n;
  }
  return d;
}

NormalizedSignal normalize(const CVector& y) {
  const double n = y.norm();
  if (!(n > 0.0)) throw DomainError("cannot normalize a zero signal");
  return {y / n, n};
}

Eigen::Index BlockSystem::rows() const {
  Eigen::Index n = 0;
  for (const auto& b : blocks) n += b->rows();
  return n;
}

Eigen::Index BlockSystem::cols() const {
  Eigen::Index n = 0;
  for (const auto& b : blocks) n += b->cols();
  return n;
}

int BlockSystem::group_count() const {
  return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end());
}

std::vector<Eigen::Index> BlockSystem::row_offsets() const {
  std::vector<Eigen::Index> off{0};
  for (const auto& b : blocks) off.push_back(off.back() + b->rows());
  return off;
}

std::vector<Eigen::Index> BlockSystem::col_offsets() const {
  std::vector<Eigen::Index> off{0};
  for (const auto& b : blocks) off.push_back(off.back() + b->cols());
  return off;
}

CMatrix BlockSystem::to_dense() const {
  CMatrix a = CMatrix::Zero(rows(), cols());
  const auto ro = row_offsets(), co = col_offsets();
  for (std::size_t b = 0; b < blocks.size(); ++b)
    a.block(ro[b], co[b], blocks[b]->rows(), blocks[b]->cols()) = blocks[b]->matrix;
  return a;
}

CVector BlockSystem::apply(const CVector& x) const {
  if (x.size() != cols()) throw DomainError("coefficient length differs from column count");
  CVector y(rows());
  const auto ro = row_offsets(), co = col_offsets();
  for (std::size_t b = 0; b < blocks.size(); ++b)
    y.segment(ro[b], blocks[b]->rows()) = blocks[b]->matrix * x.segment(co[b], blocks[b]->cols());
  return y;
}

BlockSystem single_block(std::shared_ptr<const Dictionary> d) {
  BlockSystem s;
  s.labels = d->labels;
  s.blocks.push_back(std::move(d));
  check_labels(s.labels, static_cast<std::size_t>(s.cols()));
  return s;
}

std::vector<int> fused_labels(LabelOption option, const GridShape& shape, int blocks) {
  const auto one = height_labels(option, shape.nh, shape.naz, shape.nrho);
  std::vector<int> out;
  out.reserve(one.size() * static_cast<std::size_t>(blocks));
  for (int b = 0; b < blocks; ++b) out.insert(out.end(), one.begin(), one.end());
  return out;
}

FusedSystem assemble_range_fusion(std::span<const MeasurementSystem> systems,
                                  LabelOption option) {
  if (systems.empty()) throw DomainError("no systems to fuse");
  const Dictionary& first = *systems.front().dictionary;
  FusedSystem out;
  Eigen::Index rows = 0;
  for (const auto& s : systems) {
    const Dictionary& d = *s.dictionary;
    if (s.y.size() != d.rows()) throw DomainError("measurement length differs from row count");
    if (!(d.shape == first.shape) || d.columns.size() != first.columns.size())
      throw ConsistencyError("fused systems have different hypothesis grids");
    for (std::size_t c = 0; c < d.columns.size(); ++c)
      if (!d.columns[c].same_as(first.columns[c]))
        throw ConsistencyError("fused systems have different column hypotheses");
    rows += s.y.size();
  }
  out.y.resize(rows);
  Eigen::Index at = 0;
  for (const auto& s : systems) {
    out.y.segment(at, s.y.size()) = s.y;
    at += s.y.size();
    out.system.blocks.push_back(s.dictionary);
  }
  out.system.labels = fused_labels(option, first.shape, static_cast<int>(systems.size()));
  return out;
}

}  // namespace heightscope
