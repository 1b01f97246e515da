#include "doppler/scenario.hpp"

#include "doppler/errors.hpp"
#include "doppler/orbit.hpp"

#include <cmath>
#include <numbers>

namespace doppler {

std::string to_string(Medium medium) {
    return medium == Medium::Acoustic ? "acoustic" : "electromagnetic";
}

Medium parse_medium(const std::string& text) {
    if (text == "acoustic") return Medium::Acoustic;
    if (text == "electromagnetic") return Medium::Electromagnetic;
    throw Error(ErrorCode::ParseError, "unknown medium '" + text + "'");
}

void Scenario::validate() const {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw Error(ErrorCode::InvalidArgument, "scenario speed c must be positive");
    }
    const int n_obs = family().n_obs();
    if (static_cast<int>(receivers.size()) < n_obs) {
        throw Error(ErrorCode::InvalidArgument,
                    "scenario needs at least " + std::to_string(n_obs) + " receivers, has " +
                        std::to_string(receivers.size()));
    }
    if (!(truth.f > 0.0) || !std::isfinite(truth.f)) {
        throw Error(ErrorCode::InvalidArgument, "transmit frequency must be positive");
    }
    if (mu && !(*mu > 0.0)) throw Error(ErrorCode::InvalidArgument, "mu must be positive");
    for (const auto& rx : receivers) {
        if (!rx.r.allFinite() || !rx.v.allFinite()) {
            throw Error(ErrorCode::InvalidArgument, "receiver " + rx.label + " is not finite");
        }
        if (stationary && !rx.v.isZero(0.0)) {
            throw Error(ErrorCode::InvalidArgument,
                        "receiver " + rx.label + " moves in a stationary scenario");
        }
        // Throws CoincidentPoints.
        (void)range_rate(truth, rx.r, rx.v);
        (void)predict_frequency(truth, rx.r, rx.v, c);
    }
}

const NoiseClass& NoiseConfig::for_class(const std::string& name) const {
    const auto it = classes.find(name);
    return it == classes.end() ? fallback : it->second;
}

NoiseConfig NoiseConfig::scaled(double factor) const {
    NoiseConfig out = *this;
    out.sigma_f *= factor;
    out.fallback.sigma_r *= factor;
    out.fallback.sigma_v *= factor;
    for (auto& [name, cls] : out.classes) {
        cls.sigma_r *= factor;
        cls.sigma_v *= factor;
    }
    return out;
}

void NoiseConfig::validate() const {
    auto ok = [](double s) { return s >= 0.0 && std::isfinite(s); };
    bool good = ok(sigma_f) && ok(fallback.sigma_r) && ok(fallback.sigma_v);
    for (const auto& [name, cls] : classes) good = good && ok(cls.sigma_r) && ok(cls.sigma_v);
    if (!good) throw Error(ErrorCode::InvalidArgument, "noise sigmas must be finite and >= 0");
}

SolveRequest Measurements::request() const {
    SolveRequest req;
    req.receivers = receivers;
    req.extra_receiver = extra_receiver;
    req.c = c;
    req.known_frequency = known_frequency;
    req.stationary = stationary;
    req.sigma_f = sigma_f;
    return req;
}

ParamVec Measurements::parameters() const {
    return make_parameters(DopplerSystem(family(), known_frequency.value_or(1.0)), receivers, c);
}

Measurements simulate_measurements(const Scenario& scenario,
                                   const std::optional<NoiseConfig>& noise, std::mt19937_64& rng) {
    scenario.validate();
    if (noise) {
        noise->validate();
        if (scenario.stationary) {
            for (const auto& rx : scenario.receivers) {
                if (noise->for_class(rx.noise_class).sigma_v > 0.0) {
                    throw Error(ErrorCode::InvalidArgument,
                                "velocity noise requested for a stationary scenario");
                }
            }
        }
    }

    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<Receiver> all;
    all.reserve(scenario.receivers.size());
    for (const auto& srx : scenario.receivers) {
        Receiver rx;
        rx.r = srx.r;
        rx.v = srx.v;
        rx.f = predict_frequency(scenario.truth, srx.r, srx.v, scenario.c);
        if (noise) {
            const NoiseClass& cls = noise->for_class(srx.noise_class);
            for (int k = 0; k < 3; ++k) rx.r(k) += cls.sigma_r * gauss(rng);
            for (int k = 0; k < 3; ++k) {
                const double dv = cls.sigma_v * gauss(rng);
                if (!scenario.stationary) rx.v(k) += dv;
            }
            rx.f += noise->sigma_f * gauss(rng);
        }
        all.push_back(rx);
    }

    Measurements m;
    m.scenario = scenario.name;
    const auto n_obs = static_cast<std::size_t>(scenario.family().n_obs());
    m.receivers.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n_obs));
    if (all.size() > n_obs) m.extra_receiver = all[n_obs];
    m.c = scenario.c;
    if (scenario.known_frequency) m.known_frequency = scenario.truth.f;
    m.stationary = scenario.stationary;
    if (noise) m.sigma_f = noise->sigma_f;
    return m;
}

Measurements simulate_measurements(const Scenario& scenario,
                                   const std::optional<NoiseConfig>& noise) {
    std::mt19937_64 rng(noise ? noise->rng_seed : 0);
    return simulate_measurements(scenario, noise, rng);
}

namespace {

// Unit vector at great-circle distance `dist` from `centre`, heading `azimuth`
// measured from the local north.
Vec3 offset_direction(const Vec3& centre, double dist, double azimuth) {
    const Vec3 up = centre.normalized();
    Vec3 east = Vec3::UnitZ().cross(up);
    if (east.norm() < 1e-12) east = Vec3::UnitX();
    east.normalize();
    const Vec3 north = up.cross(east);
    const Vec3 tangent = std::cos(azimuth) * north + std::sin(azimuth) * east;
    return std::cos(dist) * up + std::sin(dist) * tangent;
}

} // namespace

Scenario dolphin_scenario(bool known_frequency) {
    Scenario s;
    s.name = known_frequency ? "dolphin-known-f" : "dolphin";
    s.truth.r = Vec3(-5.23, 5.28, -15.00);
    s.truth.v = Vec3(1.38, 1.53, 0.22);
    s.truth.f = kDolphinFrequency;
    s.c = kSoundSpeedWater;
    s.known_frequency = known_frequency;
    s.stationary = true;
    s.medium = Medium::Acoustic;

    // Surveyed corners of a 40 x 40 x 20 m cuboid (z up, surface at z = 0),
    // each nudged by up to 1.5 m. The listing order matters: the last entry
    // is the disambiguating receiver, chosen so the nearest spurious root
    // predicts a clearly different frequency there.
    const double corners[8][3] = {
        {-20.1, 18.8, -20.6}, {19.0, 19.3, -20.5},  {-19.1, 20.6, -0.7},  {18.7, -21.3, -20.7},
        {19.3, 19.8, -0.6},   {-18.6, -19.6, -0.8}, {-20.3, -20.9, -20.6}, {18.6, -20.6, -0.6},
    };
    const int count = known_frequency ? 7 : 8;
    for (int i = 0; i < count; ++i) {
        ScenarioReceiver rx;
        rx.label = "H" + std::to_string(i + 1);
        rx.noise_class = "hydrophone";
        rx.r = Vec3(corners[i][0], corners[i][1], corners[i][2]);
        s.receivers.push_back(rx);
    }
    return s;
}

NoiseConfig dolphin_noise(std::uint64_t seed) {
    NoiseConfig n;
    n.sigma_f = 0.1;
    n.classes["hydrophone"] = NoiseClass{0.015, 0.0};
    n.rng_seed = seed;
    return n;
}

Scenario iod_scenario(bool known_frequency) {
    Scenario s;
    s.name = known_frequency ? "iod-known-f" : "iod";
    s.c = kSpeedOfLight;
    s.known_frequency = known_frequency;
    s.stationary = false;
    s.medium = Medium::Electromagnetic;
    s.mu = kEarthMu;

    OrbitalElements el;
    el.a = 12000e3;
    el.e = 0.1;
    el.i = deg2rad(20.0);
    el.raan = deg2rad(200.0);
    el.argp = deg2rad(20.0);
    el.nu = 0.0;
    const auto [r, v] = elements_to_cartesian(el, kEarthMu);
    s.truth.r = r;
    s.truth.v = v;
    s.truth.f = kIodTransmitFrequency;

    // Orbiting receiver: circular MEO, 25 degrees east of the spacecraft's
    // direction, moving roughly along with it.
    {
        const double radius = 26560e3;
        const Vec3 dir = offset_direction(r, deg2rad(25.0), deg2rad(90.0));
        const Vec3 along = (v - v.dot(dir) * dir).normalized();
        ScenarioReceiver meo;
        meo.label = "MEO";
        meo.noise_class = "orbiter";
        meo.r = radius * dir;
        meo.v = std::sqrt(kEarthMu / radius) * along;
        s.receivers.push_back(meo);
    }

    // Ground stations scattered 31-45 degrees from the sub-satellite point at
    // irregular azimuths (a symmetric ring leaves every point on the
    // Earth-centre/satellite axis equidistant from all stations), plus one
    // close to it. All see the spacecraft above 9 degrees elevation and are at
    // least 30 degrees apart.
    const Vec3 omega(0.0, 0.0, kEarthRotationRate);
    const double layout[7][2] = {{38, 10}, {44, 75}, {31, 140}, {42, 200},
                                 {34, 262}, {45, 318}, {12, 60}};
    const int stations = known_frequency ? 6 : 7;
    for (int k = 0; k < stations; ++k) {
        ScenarioReceiver st;
        st.label = "GS" + std::to_string(k + 1);
        st.noise_class = "station";
        st.r = kEarthRadius *
               offset_direction(r, deg2rad(layout[k][0]), deg2rad(layout[k][1]));
        st.v = omega.cross(st.r);
        s.receivers.push_back(st);
    }
    return s;
}

NoiseConfig iod_noise(std::uint64_t seed) {
    NoiseConfig n;
    n.sigma_f = 0.5;
    n.classes["station"] = NoiseClass{0.05, 0.001};
    n.classes["orbiter"] = NoiseClass{1.0, 0.02};
    n.rng_seed = seed;
    return n;
}

} // namespace doppler
