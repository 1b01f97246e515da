#pragma once

// Synthetic experiments: scenario geometry, measurement simulation with
// Gaussian noise, and the two built-in experiments (an acoustic source in a
// hydrophone array and a spacecraft tracked from Earth and from orbit).

#include "doppler/model.hpp"
#include "doppler/solve.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace doppler {

enum class Medium { Acoustic, Electromagnetic };

[[nodiscard]] std::string to_string(Medium medium);
[[nodiscard]] Medium parse_medium(const std::string& text); // ParseError

struct ScenarioReceiver {
    std::string label;
    std::string noise_class; // selects sigma_r / sigma_v in NoiseConfig
    Vec3 r = Vec3::Zero();
    Vec3 v = Vec3::Zero();

    friend bool operator==(const ScenarioReceiver&, const ScenarioReceiver&) = default;
};

// The first n_obs receivers enter the polynomial system; the next one, when
// present, is the extra receiver used to disambiguate candidates. Any further
// receivers are carried along but not used by the solver.
struct Scenario {
    std::string name;
    TransmitterState truth;
    std::vector<ScenarioReceiver> receivers;
    double c = 0.0;
    bool known_frequency = false;
    bool stationary = false;
    Medium medium = Medium::Acoustic;
    // Set for orbital scenarios; enables element errors in Monte Carlo.
    std::optional<double> mu;

    [[nodiscard]] Family family() const { return Family{known_frequency, stationary}; }
    void validate() const; // InvalidArgument, CoincidentPoints

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

struct NoiseClass {
    double sigma_r = 0.0;
    double sigma_v = 0.0;

    friend bool operator==(const NoiseClass&, const NoiseClass&) = default;
};

struct NoiseConfig {
    double sigma_f = 0.0;
    std::map<std::string, NoiseClass> classes;
    NoiseClass fallback; // receivers whose class is not listed
    std::uint64_t rng_seed = 0;

    [[nodiscard]] const NoiseClass& for_class(const std::string& name) const;
    [[nodiscard]] NoiseConfig scaled(double factor) const;
    void validate() const; // InvalidArgument

    friend bool operator==(const NoiseConfig&, const NoiseConfig&) = default;
};

// What the solver sees: receiver states and frequencies, all SI.
struct Measurements {
    std::string scenario;
    std::vector<Receiver> receivers;        // n_obs entries
    std::optional<Receiver> extra_receiver;
    double c = 0.0;
    std::optional<double> known_frequency;
    bool stationary = false;
    std::optional<double> sigma_f;          // declared noise level

    [[nodiscard]] Family family() const { return Family{known_frequency.has_value(), stationary}; }
    [[nodiscard]] SolveRequest request() const;
    [[nodiscard]] ParamVec parameters() const;

    friend bool operator==(const Measurements&, const Measurements&) = default;
};

// Exact frequencies from the truth; with noise, receiver positions, velocities
// and frequencies are then perturbed independently. Stationary scenarios keep
// their receivers at rest, so a class with sigma_v > 0 is rejected for them.
// Draws come from `rng` in receiver order (r, v, f), regardless of sigma.
[[nodiscard]] Measurements simulate_measurements(const Scenario& scenario,
                                                 const std::optional<NoiseConfig>& noise,
                                                 std::mt19937_64& rng);
// Convenience overload seeding the generator from noise->rng_seed (or 0).
[[nodiscard]] Measurements simulate_measurements(const Scenario& scenario,
                                                 const std::optional<NoiseConfig>& noise = {});

// Source at (-5.23, 5.28, -15.00) m moving at (1.38, 1.53, 0.22) m/s emitting
// 15 kHz, heard by stationary hydrophones on a perturbed 40 x 40 x 20 m cuboid.
[[nodiscard]] Scenario dolphin_scenario(bool known_frequency);
// Noise levels of the acoustic experiment: sigma_r = 1.5 cm, sigma_f = 0.1 Hz.
[[nodiscard]] NoiseConfig dolphin_noise(std::uint64_t seed = 0);

// Spacecraft on a = 12000 km, e = 0.1, i = 20, raan = 200, argp = 20, nu = 0
// (degrees) transmitting at 2.2 GHz; one receiver in a circular MEO orbit and
// the rest on the rotating Earth. The inertial and Earth-fixed frames coincide
// at the measurement epoch.
[[nodiscard]] Scenario iod_scenario(bool known_frequency);
// sigma_f = 0.5 Hz; stations 5 cm / 1 mm/s; orbiter 1 m / 2 cm/s.
[[nodiscard]] NoiseConfig iod_noise(std::uint64_t seed = 0);

inline constexpr double kIodTransmitFrequency = 2.2e9;
inline constexpr double kDolphinFrequency = 15000.0;
inline constexpr double kSoundSpeedWater = 1500.0;

} // namespace doppler
