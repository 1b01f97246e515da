#include "doppler/orbit.hpp"

#include "doppler/errors.hpp"

#include <cmath>
#include <numbers>

namespace doppler {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Below this, e or sin(i) is treated as exactly zero.
constexpr double kSingularTol = 1e-11;

void check_mu(double mu) {
    if (!(mu > 0.0) || !std::isfinite(mu)) {
        throw Error(ErrorCode::InvalidArgument, "gravitational parameter must be positive");
    }
}

double clamp_unit(double x) { return std::max(-1.0, std::min(1.0, x)); }

} // namespace

void OrbitalElements::validate() const {
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw Error(ErrorCode::InvalidArgument, "semi-major axis must be positive");
    }
    if (!(e >= 0.0) || !std::isfinite(e)) {
        throw Error(ErrorCode::InvalidArgument, "eccentricity must be non-negative");
    }
    if (e >= 1.0) throw Error(ErrorCode::HyperbolicUnsupported, "eccentricity >= 1");
    if (!std::isfinite(i) || !std::isfinite(raan) || !std::isfinite(argp) || !std::isfinite(nu)) {
        throw Error(ErrorCode::InvalidArgument, "angles must be finite");
    }
}

double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

double wrap_two_pi(double angle) {
    double w = std::fmod(angle, kTwoPi);
    if (w < 0.0) w += kTwoPi;
    return w >= kTwoPi ? 0.0 : w;
}

double angle_difference(double a, double b) {
    double d = std::remainder(a - b, kTwoPi);
    if (d <= -std::numbers::pi) d += kTwoPi;
    return d;
}

std::pair<Vec3, Vec3> elements_to_cartesian(const OrbitalElements& el, double mu) {
    el.validate();
    check_mu(mu);
    const double p = el.a * (1.0 - el.e * el.e);
    const double cnu = std::cos(el.nu);
    const double snu = std::sin(el.nu);
    const double radius = p / (1.0 + el.e * cnu);
    const double k = std::sqrt(mu / p);

    const Vec3 r_pf(radius * cnu, radius * snu, 0.0);
    const Vec3 v_pf(-k * snu, k * (el.e + cnu), 0.0);

    const double cO = std::cos(el.raan), sO = std::sin(el.raan);
    const double cw = std::cos(el.argp), sw = std::sin(el.argp);
    const double ci = std::cos(el.i), si = std::sin(el.i);
    Eigen::Matrix3d rot;
    rot << cO * cw - sO * sw * ci, -cO * sw - sO * cw * ci, sO * si,
           sO * cw + cO * sw * ci, -sO * sw + cO * cw * ci, -cO * si,
           sw * si, cw * si, ci;
    return {rot * r_pf, rot * v_pf};
}

OrbitalElements cartesian_to_elements(const Vec3& r, const Vec3& v, double mu) {
    check_mu(mu);
    const double rn = r.norm();
    const Vec3 h = r.cross(v);
    const double hn = h.norm();
    if (!(rn > 0.0) || !(hn > kSingularTol * rn * std::max(v.norm(), 1e-300))) {
        throw Error(ErrorCode::DegenerateOrbit, "zero angular momentum");
    }
    const double energy = 0.5 * v.squaredNorm() - mu / rn;
    if (!(energy < 0.0)) throw Error(ErrorCode::HyperbolicUnsupported, "orbit is not bound");

    const Vec3 e_vec = v.cross(h) / mu - r / rn;
    const Vec3 node = Vec3::UnitZ().cross(h);
    const double en = e_vec.norm();
    const double nn = node.norm();

    OrbitalElements el;
    el.a = -mu / (2.0 * energy);
    el.e = en;
    el.i = std::acos(clamp_unit(h.z() / hn));

    const bool equatorial = nn <= kSingularTol * hn;
    const bool circular = en <= kSingularTol;

    // True longitude and argument of latitude serve as fallbacks.
    const double true_longitude = std::atan2(r.y(), r.x()) * (h.z() >= 0.0 ? 1.0 : -1.0);

    if (!equatorial) {
        el.raan = std::atan2(node.y(), node.x());
    }
    if (!circular) {
        if (equatorial) {
            el.argp = std::atan2(e_vec.y(), e_vec.x()) * (h.z() >= 0.0 ? 1.0 : -1.0);
        } else {
            el.argp = std::atan2(node.cross(e_vec).dot(h) / hn, node.dot(e_vec));
        }
        el.nu = std::atan2(e_vec.cross(r).dot(h) / hn, e_vec.dot(r));
    } else if (!equatorial) {
        el.nu = std::atan2(node.cross(r).dot(h) / hn, node.dot(r));
    } else {
        el.nu = true_longitude;
    }
    el.raan = wrap_two_pi(el.raan);
    el.argp = wrap_two_pi(el.argp);
    el.nu = wrap_two_pi(el.nu);
    return el;
}

} // namespace doppler
