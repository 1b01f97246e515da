#pragma once

// Hand-rolled generators and oracles shared by the unit and acceptance tests.

#include "doppler/errors.hpp"
#include "doppler/model.hpp"
#include "doppler/monodromy.hpp"
#include "doppler/orbit.hpp"
#include "doppler/solve.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

using namespace doppler;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline cplx random_complex(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    return {g(rng), g(rng)};
}

inline ComplexVec random_complex_vec(std::mt19937_64& rng, int n) {
    ComplexVec v(n);
    for (int i = 0; i < n; ++i) v(i) = random_complex(rng);
    return v;
}

inline ComplexMat random_complex_mat(std::mt19937_64& rng, int n) {
    ComplexMat m(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) m(i, j) = random_complex(rng);
    }
    return m;
}

// Code of the doppler::Error thrown by f, or nullopt when nothing is thrown.
inline std::optional<ErrorCode> error_code(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return std::nullopt;
}

inline Vec3 random_vec3(std::mt19937_64& rng, double lo, double hi) {
    return {uniform(rng, lo, hi), uniform(rng, lo, hi), uniform(rng, lo, hi)};
}

// 2-norm condition number from singular values.
inline double svd_condition(const ComplexMat& a) {
    Eigen::MatrixXcd dense = a;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(dense);
    const auto& s = svd.singularValues();
    return s(0) / s(s.size() - 1);
}

// A random physical instance: transmitter inside a 40 m box, receivers spread
// over a 120 m box (moving ones at up to 10 m/s), acoustic speeds. The
// receiver list holds n_obs equation receivers followed by one extra.
struct Instance {
    Family family;
    TransmitterState truth;
    std::vector<Receiver> receivers;
    Receiver extra;
    double c = 1500.0;

    [[nodiscard]] SolveRequest request(bool with_extra = true) const {
        SolveRequest req;
        req.receivers = receivers;
        if (with_extra) req.extra_receiver = extra;
        req.c = c;
        if (family.known_frequency) req.known_frequency = truth.f;
        req.stationary = family.stationary;
        return req;
    }
};

inline Receiver random_receiver(std::mt19937_64& rng, const Family& family,
                                const TransmitterState& truth, double c) {
    Receiver rx;
    do {
        rx.r = random_vec3(rng, -60.0, 60.0);
    } while ((rx.r - truth.r).norm() < 5.0);
    if (!family.stationary) rx.v = random_vec3(rng, -10.0, 10.0);
    rx.f = predict_frequency(truth, rx.r, rx.v, c);
    return rx;
}

inline Instance random_instance(const Family& family, std::mt19937_64& rng) {
    Instance inst;
    inst.family = family;
    inst.truth.r = random_vec3(rng, -20.0, 20.0);
    inst.truth.v = random_vec3(rng, -4.0, 4.0);
    inst.truth.f = uniform(rng, 5e3, 2e4);
    for (int i = 0; i < family.n_obs(); ++i) {
        inst.receivers.push_back(random_receiver(rng, family, inst.truth, inst.c));
    }
    inst.extra = random_receiver(rng, family, inst.truth, inst.c);
    return inst;
}

inline double relative_error(const Vec3& est, const Vec3& truth) {
    return (est - truth).norm() / std::max(1.0, truth.norm());
}

inline const std::vector<Family>& all_families() {
    static const std::vector<Family> families = {
        Family{false, false}, Family{true, false}, Family{false, true}, Family{true, true}};
    return families;
}

inline std::filesystem::path pack_path(const Family& family) {
    return std::filesystem::path(DOPPLER_PACK_DIR) / (family.name() + ".pack");
}

// Random elliptic orbit away from the singular element conventions.
inline OrbitalElements random_orbit(std::mt19937_64& rng) {
    OrbitalElements el;
    el.a = uniform(rng, 7.0e6, 4.5e7);
    el.e = uniform(rng, 0.01, 0.9);
    el.i = uniform(rng, 0.05, std::numbers::pi - 0.05);
    el.raan = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    el.argp = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    el.nu = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    return el;
}

} // namespace testsupport
