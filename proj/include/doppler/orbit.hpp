#pragma once

// Classical orbital elements and their conversion to and from inertial
// position/velocity. Elliptic orbits only.

#include "doppler/model.hpp"

#include <utility>

namespace doppler {

// Spherical, uniformly rotating Earth (SI units).
inline constexpr double kEarthMu = 3.986004418e14;          // m^3/s^2
inline constexpr double kEarthRadius = 6378137.0;           // m
inline constexpr double kEarthRotationRate = 7.2921159e-5;  // rad/s

// Angles in radians, normalised to [0, 2pi).
//
// Singular conventions used by cartesian_to_elements:
//   equatorial (i = 0 or pi): raan = 0, argp measured from the x axis;
//   circular (e = 0): argp = 0, nu measured from the ascending node
//   (from the x axis when also equatorial).
struct OrbitalElements {
    double a = 0.0;     // semi-major axis
    double e = 0.0;
    double i = 0.0;
    double raan = 0.0;
    double argp = 0.0;
    double nu = 0.0;

    void validate() const; // InvalidArgument, HyperbolicUnsupported
};

[[nodiscard]] double deg2rad(double deg);
[[nodiscard]] double rad2deg(double rad);
[[nodiscard]] double wrap_two_pi(double angle);
// Signed difference a - b wrapped to (-pi, pi].
[[nodiscard]] double angle_difference(double a, double b);

[[nodiscard]] std::pair<Vec3, Vec3> elements_to_cartesian(const OrbitalElements& el, double mu);
// Throws DegenerateOrbit (zero angular momentum) or HyperbolicUnsupported.
[[nodiscard]] OrbitalElements cartesian_to_elements(const Vec3& r, const Vec3& v, double mu);

} // namespace doppler
