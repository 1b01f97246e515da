#pragma once

// Doppler forward model and the squared Doppler polynomial family
//
//   c^2 (f - f_i)^2 |r_i - r|^2 - f^2 [(r_i - r).(v_i - v)]^2 = 0,   i = 1..N
//
// in unknowns x = (r, v, f) (or (r, v) when f is known) and parameters
// p = (receiver positions, receiver velocities, measured frequencies, c).
//
// Parameter layout (length 7N+1), coordinate-major as in the reference
// Macaulay2 construction:
//   p[k*N + i]        position coordinate k of receiver i
//   p[3N + k*N + i]   velocity coordinate k of receiver i
//   p[6N + i]         measured frequency of receiver i
//   p[7N]             propagation speed c
//
// All N frequency measurements are taken to refer to one common epoch;
// signal time of flight is not modelled.
//
// Offset form (unknown f only). Writing f = F (1 + eps phi) and
// f_i = F (1 + eps phi_i) with eps = V / c for a velocity unit V, the
// constraint divided by F^2 eps^2 reads
//
//   c~^2 (phi - phi_i)^2 |r_i - r|^2 - (1 + lambda phi)^2 [(r_i - r).(v_i - v)]^2
//
// with c~ = c eps (= 1 in units of V) and lambda = eps. The unknown is phi and
// lambda is one extra parameter at index 7N+1. At lambda = 1 and phi = f - 1 it
// is the plain family, so start solutions carry over; at lambda = eps it stays
// well conditioned when v / c is tiny, where the plain form degenerates.

#include "doppler/linalg.hpp"
#include "doppler/system.hpp"

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace doppler {

using Vec3 = Eigen::Vector3d;

inline constexpr double kSpeedOfLight = 299792458.0; // m/s

struct TransmitterState {
    Vec3 r = Vec3::Zero();
    Vec3 v = Vec3::Zero();
    double f = 0.0;

    friend bool operator==(const TransmitterState&, const TransmitterState&) = default;
};

struct Receiver {
    Vec3 r = Vec3::Zero();
    Vec3 v = Vec3::Zero();
    double f = 0.0; // measured frequency

    friend bool operator==(const Receiver&, const Receiver&) = default;
};

// One of the four family variants. n_obs is implied: 6 receivers when the
// transmit frequency is known, 7 otherwise.
struct Family {
    bool known_frequency = false;
    bool stationary = false;

    [[nodiscard]] int n_obs() const noexcept { return known_frequency ? 6 : 7; }
    [[nodiscard]] int num_unknowns() const noexcept { return known_frequency ? 6 : 7; }
    [[nodiscard]] int num_parameters() const noexcept { return 7 * n_obs() + 1; }
    [[nodiscard]] std::string name() const;

    friend bool operator==(const Family&, const Family&) = default;
};

class DopplerSystem final : public ParametricSystem {
public:
    // fixed_frequency is the constant substituted for f in known-frequency mode
    // (ignored otherwise). offset_form requires an unknown frequency.
    explicit DopplerSystem(Family family, double fixed_frequency = 1.0, bool offset_form = false);

    [[nodiscard]] const Family& family() const noexcept { return family_; }
    [[nodiscard]] int n_obs() const noexcept { return n_obs_; }
    [[nodiscard]] double fixed_frequency() const noexcept { return fixed_frequency_; }
    [[nodiscard]] bool offset_form() const noexcept { return offset_form_; }

    [[nodiscard]] int position_index(int receiver, int axis) const noexcept {
        return axis * n_obs_ + receiver;
    }
    [[nodiscard]] int velocity_index(int receiver, int axis) const noexcept {
        return 3 * n_obs_ + axis * n_obs_ + receiver;
    }
    [[nodiscard]] int frequency_index(int receiver) const noexcept { return 6 * n_obs_ + receiver; }
    [[nodiscard]] int speed_index() const noexcept { return 7 * n_obs_; }
    [[nodiscard]] int lambda_index() const noexcept { return 7 * n_obs_ + 1; }

    [[nodiscard]] int num_unknowns() const override { return family_.num_unknowns(); }
    [[nodiscard]] int num_parameters() const override {
        return family_.num_parameters() + (offset_form_ ? 1 : 0);
    }

    [[nodiscard]] ComplexVec evaluate(const ParamVec& p, const ComplexVec& x) const override;
    [[nodiscard]] ComplexMat jacobian_unknowns(const ParamVec& p,
                                               const ComplexVec& x) const override;
    [[nodiscard]] ParamMat jacobian_parameters(const ParamVec& p, const ComplexVec& x) const;
    [[nodiscard]] ComplexVec parameter_derivative(const ParamVec& p, const ComplexVec& x,
                                                  const ParamVec& dp) const override;
    [[nodiscard]] double relative_residual(const ParamVec& p, const ComplexVec& x) const override;
    void evaluate_with_jacobian(const ParamVec& p, const ComplexVec& x, ComplexVec& value,
                                ComplexMat& jac) const override;
    void tangent_system(const ParamVec& p, const ComplexVec& x, const ParamVec& dp,
                        ComplexMat& jac, ComplexVec& rhs) const override;

    // rho_i c (f - f_i)/f - (r_i - r).(v_i - v) per receiver, principal square root.
    // In offset form the ratio (f - f_i)/f becomes (phi - phi_i)/(1 + lambda phi).
    [[nodiscard]] ComplexVec unsquared_residuals(const ParamVec& p, const ComplexVec& x) const;
    // The same for a receiver outside the parameter vector, given in the
    // system's units (its f field holds phi_i in offset form).
    [[nodiscard]] cplx unsquared_residual_at(const ParamVec& p, const ComplexVec& x,
                                             const Receiver& rx) const;
    // Its gradient with respect to the unknowns, and its derivative with
    // respect to the receiver's own frequency.
    [[nodiscard]] ComplexVec unsquared_gradient_at(const ParamVec& p, const ComplexVec& x,
                                                   const Receiver& rx) const;
    [[nodiscard]] cplx unsquared_frequency_derivative_at(const ParamVec& p, const ComplexVec& x,
                                                         const Receiver& rx) const;

    // f, or phi in offset form.
    [[nodiscard]] cplx frequency_of(const ComplexVec& x) const {
        return family_.known_frequency ? cplx(fixed_frequency_) : x(6);
    }
    // The factor multiplying the range-rate term: f, or 1 + lambda phi. Its
    // sign is the sign of the physical transmit frequency.
    [[nodiscard]] cplx frequency_weight(const ParamVec& p, const ComplexVec& x) const {
        return offset_form_ ? 1.0 + p(lambda_index()) * x(6) : frequency_of(x);
    }

    // Throws DimensionMismatch unless p and x have the family's sizes.
    void check_dimensions(const ParamVec& p, const ComplexVec& x) const;

private:
    Family family_;
    int n_obs_;
    double fixed_frequency_;
    bool offset_form_;
};

// Parameter vector for a receiver set; receivers.size() must equal n_obs.
[[nodiscard]] ParamVec make_parameters(const DopplerSystem& sys,
                                       const std::vector<Receiver>& receivers, double c);
[[nodiscard]] std::vector<Receiver> receivers_from_parameters(const DopplerSystem& sys,
                                                              const ParamVec& p);

[[nodiscard]] ComplexVec to_unknowns(const TransmitterState& tx, const Family& family);
// Real part of a candidate; f taken from the system in known-frequency mode.
[[nodiscard]] TransmitterState to_state(const ComplexVec& x, const DopplerSystem& sys);

[[nodiscard]] double range(const TransmitterState& tx, const Vec3& rx_r);
[[nodiscard]] double range_rate(const TransmitterState& tx, const Vec3& rx_r, const Vec3& rx_v);

// f_i = (1 - rho_dot / c) f. Throws CoincidentPoints when the range vanishes.
[[nodiscard]] double predict_frequency(const TransmitterState& tx, const Vec3& rx_r,
                                       const Vec3& rx_v, double c);

// rho c (f - f_i)/f - (r_i - r).(v_i - v). Zero iff the sign-sensitive
// Doppler relation holds. Throws CoincidentPoints / ZeroFrequency.
[[nodiscard]] double unsquared_residual(const TransmitterState& tx, const Receiver& rx, double c);

// Units used to nondimensionalise a problem. Frequency is scaled
// independently of time: the squared constraint is homogeneous in (f, f_i).
struct ScaleFrame {
    double length = 1.0;
    double time = 1.0;
    double frequency = 1.0;

    [[nodiscard]] double speed() const noexcept { return length / time; }
    void validate() const; // throws InvalidScale

    friend bool operator==(const ScaleFrame&, const ScaleFrame&) = default;

    [[nodiscard]] TransmitterState scale(const TransmitterState& tx) const;
    [[nodiscard]] TransmitterState unscale(const TransmitterState& tx) const;
    [[nodiscard]] Receiver scale(const Receiver& rx) const;
    [[nodiscard]] Receiver unscale(const Receiver& rx) const;
    [[nodiscard]] ComplexVec scale(const ComplexVec& x, const Family& family) const;
    [[nodiscard]] ComplexVec unscale(const ComplexVec& x, const Family& family) const;
};

// Same family with positions / L, velocities and c / (L/T), frequencies / F.
[[nodiscard]] std::pair<DopplerSystem, ParamVec> rescale(const DopplerSystem& sys,
                                                         const ParamVec& p,
                                                         const ScaleFrame& frame);

// L = median receiver distance from the origin, T = L / c, and F = the known
// transmit frequency (so scaled f = 1) or else the median measured frequency.
[[nodiscard]] ScaleFrame default_frame(const DopplerSystem& sys, const ParamVec& p);

// Units of the offset form: positions / length, velocities / speed, and
// frequencies as offsets phi = (f / frequency - 1) / epsilon, epsilon = speed / c.
struct OffsetFrame {
    double length = 1.0;
    double speed = 1.0;
    double frequency = 1.0;
    double epsilon = 1.0;

    void validate() const; // throws InvalidScale

    // The f fields hold phi on the scaled side.
    [[nodiscard]] TransmitterState scale(const TransmitterState& tx) const;
    [[nodiscard]] TransmitterState unscale(const TransmitterState& tx) const;
    [[nodiscard]] Receiver scale(const Receiver& rx) const;
    [[nodiscard]] Receiver unscale(const Receiver& rx) const;

    friend bool operator==(const OffsetFrame&, const OffsetFrame&) = default;
};

// length = median receiver distance from the origin; frequency = the known
// transmit frequency or the median measured one; speed = the larger of the
// median receiver speed and the median |c (f_i / frequency - 1)|, i.e. the
// typical range rate, falling back to c when both vanish.
[[nodiscard]] OffsetFrame offset_frame(const std::vector<Receiver>& receivers, double c,
                                       std::optional<double> known_frequency);

// The instance in offset units. Unknown f: offset-form system with c~ = 1 and
// lambda = epsilon. Known f: the plain family with f = 1, c = 1 and measured
// frequencies 1 + phi_i, which is the same polynomial.
[[nodiscard]] std::pair<DopplerSystem, ParamVec> offset_system(const Family& family,
                                                               const std::vector<Receiver>& receivers,
                                                               const OffsetFrame& frame);

// Rewrites a plain unknown-f instance and its solutions in offset form with
// lambda = 1 and phi = f - 1 (the same polynomials).
[[nodiscard]] ParamVec lift_parameters(const DopplerSystem& plain, const ParamVec& p);
[[nodiscard]] ComplexVec lift_solution(const ComplexVec& x);

} // namespace doppler
