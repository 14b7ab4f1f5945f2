// SPDX-License-Identifier: Apache-2.0
#include "heightscope/steering.hpp"

#include <cmath>

namespace heightscope {

namespace {

void check_wavelength(double wavelength) {
  if (!(wavelength > 0.0)) throw DomainError("wavelength must be positive");
}

void check_rho(Complex rho) {
  if (std::abs(rho) > 1.0) throw DomainError("|rho| must not exceed 1");
}

Complex phase_of(double d, double wavenumber) { return std::polar(1.0, wavenumber * d); }

}  // namespace

SpatialFrequencies spatial_frequencies(double azimuth, double elevation) {
  if (!(std::abs(elevation) < kPi / 2)) throw DomainError("|elevation| must be below pi/2");
  const double c = std::cos(elevation);
  return {c * std::cos(azimuth), c * std::sin(azimuth), std::sin(elevation)};
}

Position3 direction_target(const Position3& ref, double azimuth, double elevation, double r) {
  if (!(r > 0.0)) throw DomainError("range must be positive");
  return ref + r * spatial_frequencies(azimuth, elevation).direction();
}

Complex path_phase(const Position3& p, const Position3& target, double wavelength) {
  check_wavelength(wavelength);
  const double d = distance(p, target);
  if (!(d > 0.0)) throw DomainError("antenna and target coincide");
  return phase_of(d, kTwoPi / wavelength);
}

double expanded_distance(const Position3& p, const SpatialFrequencies& n, double r) {
  if (!(r > 0.0)) throw DomainError("range must be positive");
  const double q = 1.0 - 2.0 * n.direction().dot(p) / r + p.dot(p) / (r * r);
  return r * std::sqrt(q);
}

CVector rx_steering(std::span<const Position3> positions, const Position3& target,
                    double wavelength) {
  if (positions.empty()) throw DomainError("no antenna positions");
  CVector a(static_cast<Eigen::Index>(positions.size()));
  for (std::size_t i = 0; i < positions.size(); ++i)
    a(static_cast<Eigen::Index>(i)) = path_phase(positions[i], target, wavelength);
  return a;
}

CVector rx_steering(std::span<const Position3> positions, const Position3& ref, double azimuth,
                    double elevation, double r, double wavelength) {
  return rx_steering(positions, direction_target(ref, azimuth, elevation, r), wavelength);
}

namespace {

CVector kron(const CVector& a, const CVector& b) {
  CVector out(a.size() * b.size());
  for (Eigen::Index t = 0; t < a.size(); ++t) out.segment(t * b.size(), b.size()) = a(t) * b;
  return out;
}

CVector leg(std::span<const Position3> antennas, const Position3& target, double wavenumber,
            bool reflected) {
  CVector a(static_cast<Eigen::Index>(antennas.size()));
  for (std::size_t i = 0; i < antennas.size(); ++i) {
    const Position3 p = reflected ? mirror_point(antennas[i]) : antennas[i];
    const double d = distance(p, target);
    if (!(d > 0.0)) throw DomainError("antenna and target coincide");
    a(static_cast<Eigen::Index>(i)) = phase_of(d, wavenumber);
  }
  return a;
}

void check_pair(std::span<const Position3> tx, std::span<const Position3> rx) {
  if (tx.empty() || rx.empty()) throw DomainError("tx and rx lists must be nonempty");
}

}  // namespace

CVector virtual_steering(std::span<const Position3> tx, std::span<const Position3> rx,
                         const Position3& target, double wavelength) {
  check_pair(tx, rx);
  return kron(rx_steering(tx, target, wavelength), rx_steering(rx, target, wavelength));
}

CVector virtual_steering(std::span<const Position3> tx, std::span<const Position3> rx,
                         const Position3& ref, double azimuth, double elevation, double r,
                         double wavelength) {
  return virtual_steering(tx, rx, direction_target(ref, azimuth, elevation, r), wavelength);
}

CVector MultipathComponents::combine(Complex rho) const {
  return dd + rho * (rd + dr) + (rho * rho) * rr;
}

MultipathComponents multipath_components(std::span<const Position3> tx,
                                         std::span<const Position3> rx, const Position3& target,
                                         double wavelength) {
  check_wavelength(wavelength);
  check_pair(tx, rx);
  if (!(target.z >= 0.0)) throw DomainError("target height must be non-negative");
  const double k = kTwoPi / wavelength;
  const CVector t = leg(tx, target, k, false), tm = leg(tx, target, k, true);
  const CVector r = leg(rx, target, k, false), rm = leg(rx, target, k, true);
  return {kron(t, r), kron(tm, r), kron(t, rm), kron(tm, rm)};
}

CVector multipath_steering(std::span<const Position3> tx, std::span<const Position3> rx,
                           const Position3& target, Complex rho, double wavelength) {
  check_wavelength(wavelength);
  check_pair(tx, rx);
  check_rho(rho);
  if (!(target.z >= 0.0)) throw DomainError("target height must be non-negative");
  const double k = kTwoPi / wavelength;
  const CVector t = leg(tx, target, k, false) + rho * leg(tx, target, k, true);
  const CVector r = leg(rx, target, k, false) + rho * leg(rx, target, k, true);
  return kron(t, r);
}

CVector multipath_steering(const CoherentAperture& aperture, const Position3& ref,
                           const TargetSpec& target, Complex rho, double wavelength) {
  return multipath_steering(aperture.tx, aperture.rx, target_world_position(target, ref), rho,
                            wavelength);
}

}  // namespace heightscope
