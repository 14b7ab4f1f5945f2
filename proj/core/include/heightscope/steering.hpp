// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "heightscope/geometry.hpp"
#include "heightscope/types.hpp"

namespace heightscope {

struct SpatialFrequencies {
  double u = 1.0;  // cos(theta) cos(phi)
  double v = 0.0;  // cos(theta) sin(phi)
  double w = 0.0;  // sin(theta)

  Position3 direction() const { return {u, v, w}; }
};

SpatialFrequencies spatial_frequencies(double azimuth, double elevation);

// Point at slant range r from ref along (azimuth, elevation).
Position3 direction_target(const Position3& ref, double azimuth, double elevation, double r);

// exp(j 2 pi / lambda * |target - p|).
Complex path_phase(const Position3& p, const Position3& target, double wavelength);

// r sqrt(1 - 2 n.p / r + p.p / r^2) for an antenna p given relative to the
// range origin: the same distance as |r n - p|, written in the expanded form.
double expanded_distance(const Position3& p, const SpatialFrequencies& n, double r);

CVector rx_steering(std::span<const Position3> positions, const Position3& target,
                    double wavelength);
CVector rx_steering(std::span<const Position3> positions, const Position3& ref, double azimuth,
                    double elevation, double r, double wavelength);

// Tx-major Kronecker product: entry t*|rx| + q = tx phase t times rx phase q.
CVector virtual_steering(std::span<const Position3> tx, std::span<const Position3> rx,
                         const Position3& target, double wavelength);
CVector virtual_steering(std::span<const Position3> tx, std::span<const Position3> rx,
                         const Position3& ref, double azimuth, double elevation, double r,
                         double wavelength);

// The four Tx -> target -> Rx path families. rd reflects the Tx leg, dr the Rx
// leg, rr both. Reflected legs use the mirrored antenna.
struct MultipathComponents {
  CVector dd;
  CVector rd;
  CVector dr;
  CVector rr;

  // dd + rho (rd + dr) + rho^2 rr.
  CVector combine(Complex rho) const;
};

MultipathComponents multipath_components(std::span<const Position3> tx,
                                         std::span<const Position3> rx, const Position3& target,
                                         double wavelength);

// Same value as multipath_components(...).combine(rho), evaluated through the
// per-pair factorization (a_t + rho a_t') (a_r + rho a_r').
CVector multipath_steering(std::span<const Position3> tx, std::span<const Position3> rx,
                           const Position3& target, Complex rho, double wavelength);
CVector multipath_steering(const CoherentAperture& aperture, const Position3& ref,
                           const TargetSpec& target, Complex rho, double wavelength);

}  // namespace heightscope
