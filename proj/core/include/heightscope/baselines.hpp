// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "heightscope/types.hpp"

namespace heightscope {

// Received power along the trajectory on a uniform inverse-range grid.
struct EnvelopeSeries {
  std::vector<double> samples;
  std::vector<double> inverse_range;  // 1/m, strictly increasing, uniform
  double antenna_height = 0.0;

  double spacing() const { return inverse_range[1] - inverse_range[0]; }
};

// |y|^2 per point, linearly interpolated onto resample_n uniform 1/R samples.
// resample_n = 0 keeps the number of input points.
EnvelopeSeries envelope_series(std::span<const Complex> values, std::span<const double> ranges,
                               double antenna_height, std::size_t resample_n = 0);

struct Spectrum {
  std::vector<double> frequencies;  // cycles per unit of 1/R
  std::vector<double> power;
  bool degenerate = false;

  double peak_frequency() const;
};

// n frequencies evenly covering [0, f_max].
std::vector<double> frequency_grid(double f_max, std::size_t n);

struct ArModel {
  std::vector<double> coefficients;  // a_1..a_p of 1 + sum a_k z^-k
  double noise_variance = 0.0;
  bool degenerate = false;
};

// Burg recursion on x as given (no mean removal).
ArModel burg_fit(std::span<const double> x, int order);

// Mean-removed Burg AR spectrum.
Spectrum burg_spectrum(const EnvelopeSeries& series, int order,
                       std::span<const double> frequencies);

// Mean-removed MUSIC pseudospectrum from the covariance of a Hankel data
// matrix with hankel_rows columns (0 picks a third of the samples).
Spectrum music_spectrum(const EnvelopeSeries& series, int subspace_dim, int hankel_rows,
                        std::span<const double> frequencies);

int default_hankel_rows(std::size_t samples);

// Height of a single scatterer from its envelope frequency, from the path
// difference 2 h_a h_t / R between direct and ground-reflected rays.
double peak_to_height(double frequency, double wavelength, double antenna_height);
double envelope_frequency(double target_height, double wavelength, double antenna_height);

// Interference cycles between slant ranges r_far and r_near for a monostatic
// antenna, from exact direct and mirrored path lengths.
double interference_cycles(double antenna_height, double target_height, double wavelength,
                           double r_far, double r_near);

}  // namespace heightscope
