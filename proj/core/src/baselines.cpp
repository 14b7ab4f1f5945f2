// SPDX-License-Identifier: Apache-2.0
#include "heightscope/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace heightscope {

EnvelopeSeries envelope_series(std::span<const Complex> values, std::span<const double> ranges,
                               double antenna_height, std::size_t resample_n) {
  if (values.size() != ranges.size()) throw DomainError("values and ranges differ in length");
  if (values.size() < 4) throw DomainError("envelope needs at least 4 trajectory points");
  if (resample_n == 0) resample_n = values.size();
  if (resample_n < 4) throw DomainError("envelope needs at least 4 samples");

  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(ranges[i] > 0.0)) throw DomainError("ranges must be positive");
    pts.emplace_back(1.0 / ranges[i], std::norm(values[i]));
  }
  std::sort(pts.begin(), pts.end());
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (!(pts[i].first > pts[i - 1].first)) throw DomainError("ranges must be distinct");

  EnvelopeSeries s;
  s.antenna_height = antenna_height;
  const double lo = pts.front().first, hi = pts.back().first;
  std::size_t seg = 0;
  for (std::size_t k = 0; k < resample_n; ++k) {
    const double u = k + 1 == resample_n ? hi : lo + (hi - lo) * k / (resample_n - 1);
    while (seg + 2 < pts.size() && pts[seg + 1].first < u) ++seg;
    const auto& [u0, p0] = pts[seg];
    const auto& [u1, p1] = pts[seg + 1];
    const double t = (u - u0) / (u1 - u0);
    s.inverse_range.push_back(u);
    s.samples.push_back(p0 + t * (p1 - p0));
  }
  return s;
}

double Spectrum::peak_frequency() const {
  if (power.empty()) throw DomainError("empty spectrum");
  const auto it = std::max_element(power.begin(), power.end());
  return frequencies[static_cast<std::size_t>(it - power.begin())];
}

std::vector<double> frequency_grid(double f_max, std::size_t n) {
  if (!(f_max > 0.0) || n < 2) throw DomainError("invalid frequency grid");
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) f[i] = f_max * static_cast<double>(i) / static_cast<double>(n - 1);
  return f;
}

namespace {

std::vector<double> demeaned(const EnvelopeSeries& s) {
  if (s.samples.size() != s.inverse_range.size() || s.samples.size() < 4)
    throw DomainError("malformed envelope series");
  const double mean =
      std::accumulate(s.samples.begin(), s.samples.end(), 0.0) / static_cast<double>(s.samples.size());
  std::vector<double> x(s.samples);
  for (double& v : x) v -= mean;
  return x;
}

}  // namespace

ArModel burg_fit(std::span<const double> x, int order) {
  const auto n = static_cast<int>(x.size());
  if (order < 1 || 2 * order >= n) throw DomainError("Burg order must satisfy 1 <= p < N/2");
  std::vector<double> f(x.begin(), x.end()), b(x.begin(), x.end());
  ArModel m;
  m.noise_variance = std::inner_product(x.begin(), x.end(), x.begin(), 0.0) / n;
  std::vector<double>& a = m.coefficients;
  for (int p = 0; p < order; ++p) {
    double num = 0.0, den = 0.0;
    for (int i = p + 1; i < n; ++i) {
      num += f[i] * b[i - 1];
      den += f[i] * f[i] + b[i - 1] * b[i - 1];
    }
    double k = den > 0.0 ? -2.0 * num / den : 0.0;
    if (std::abs(k) >= 1.0) {
      k = std::copysign(1.0 - 1e-12, k);
      m.degenerate = true;
    }
    std::vector<double> next(a.size() + 1);
    for (std::size_t i = 0; i < a.size(); ++i) next[i] = a[i] + k * a[a.size() - 1 - i];
    next[a.size()] = k;
    a = std::move(next);
    for (int i = n - 1; i > p; --i) {
      const double fi = f[i];
      f[i] = fi + k * b[i - 1];
      b[i] = b[i - 1] + k * fi;
    }
    m.noise_variance *= 1.0 - k * k;
  }
  return m;
}

Spectrum burg_spectrum(const EnvelopeSeries& series, int order,
                       std::span<const double> frequencies) {
  const std::vector<double> x = demeaned(series);
  const ArModel m = burg_fit(x, order);
  const double dt = series.spacing();
  Spectrum s;
  s.degenerate = m.degenerate;
  s.frequencies.assign(frequencies.begin(), frequencies.end());
  for (double f : frequencies) {
    Complex den = 1.0;
    for (std::size_t k = 0; k < m.coefficients.size(); ++k)
      den += m.coefficients[k] * std::polar(1.0, -kTwoPi * f * dt * static_cast<double>(k + 1));
    s.power.push_back(m.noise_variance / std::norm(den));
  }
  return s;
}

int default_hankel_rows(std::size_t samples) { return static_cast<int>(samples / 3); }

Spectrum music_spectrum(const EnvelopeSeries& series, int subspace_dim, int hankel_rows,
                        std::span<const double> frequencies) {
  const std::vector<double> x = demeaned(series);
  const int n = static_cast<int>(x.size());
  if (hankel_rows == 0) hankel_rows = default_hankel_rows(x.size());
  if (subspace_dim < 1) throw DomainError("subspace dimension must be positive");
  if (hankel_rows <= subspace_dim) throw DomainError("hankel_rows must exceed subspace_dim");
  if (hankel_rows > n) throw DomainError("hankel_rows exceeds the sample count");

  const int snaps = n - hankel_rows + 1;
  Eigen::MatrixXd h(snaps, hankel_rows);
  for (int i = 0; i < snaps; ++i)
    for (int j = 0; j < hankel_rows; ++j) h(i, j) = x[static_cast<std::size_t>(i + j)];
  const Eigen::MatrixXd r = h.transpose() * h / snaps;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r);
  const Eigen::VectorXd& lambda = eig.eigenvalues();  // ascending
  const double top = lambda(hankel_rows - 1);
  int rank = 0;
  for (int i = 0; i < hankel_rows; ++i)
    if (lambda(i) > 1e-10 * top) ++rank;
  if (!(top > 0.0) || rank < subspace_dim)
    throw DomainError("covariance rank is below the signal subspace dimension");

  const Eigen::MatrixXd noise = eig.eigenvectors().leftCols(hankel_rows - subspace_dim);
  const double dt = series.spacing();
  Spectrum s;
  s.frequencies.assign(frequencies.begin(), frequencies.end());
  CVector a(hankel_rows);
  for (double f : frequencies) {
    for (int l = 0; l < hankel_rows; ++l) a(l) = std::polar(1.0, kTwoPi * f * dt * l);
    const double proj = (noise.transpose().cast<Complex>() * a).squaredNorm();
    s.power.push_back(1.0 / std::max(proj, 1e-300));
  }
  return s;
}

double peak_to_height(double frequency, double wavelength, double antenna_height) {
  if (!(frequency >= 0.0)) throw DomainError("frequency must be non-negative");
  if (!(antenna_height > 0.0)) throw DomainError("antenna height must be positive");
  if (!(wavelength > 0.0)) throw DomainError("wavelength must be positive");
  return frequency * wavelength / (2.0 * antenna_height);
}

double envelope_frequency(double target_height, double wavelength, double antenna_height) {
  if (!(wavelength > 0.0)) throw DomainError("wavelength must be positive");
  return 2.0 * antenna_height * target_height / wavelength;
}

double interference_cycles(double antenna_height, double target_height, double wavelength,
                           double r_far, double r_near) {
  const auto path_difference = [&](double r) {
    const double dz = target_height - antenna_height;
    const double d2 = r * r - dz * dz;  // horizontal distance squared
    const double up = target_height + antenna_height;
    return std::sqrt(d2 + up * up) - r;
  };
  // Monostatic round trip: the interference pattern of |1 + rho e^{jk dL}|^4
  // has fundamental phase k dL.
  return (path_difference(r_near) - path_difference(r_far)) / wavelength;
}

}  // namespace heightscope
