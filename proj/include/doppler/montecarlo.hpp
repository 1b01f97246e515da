#pragma once

// Repeated noisy solves of one scenario with error statistics against truth.

#include "doppler/monodromy.hpp"
#include "doppler/scenario.hpp"
#include "doppler/solve.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace doppler {

struct MonteCarloConfig {
    int trials = 100;
    std::uint64_t seed = 0;
    SolveOptions solve;
    int threads = 1; // trials solved concurrently; results do not depend on it
    // A success whose position error exceeds gate_factor times the 95th
    // percentile of the preceding successes becomes a failure. The gate opens
    // after gate_min_successes successes.
    double gate_factor = 10.0;
    int gate_min_successes = 10;

    void validate() const; // InvalidArgument
};

// Element errors: a (m), e, then i, raan, argp, nu in degrees wrapped to (-180, 180].
inline constexpr std::array<const char*, 6> kElementNames = {"a", "e", "i", "raan", "argp", "nu"};

struct TrialRecord {
    int trial = 0;
    bool success = false;
    std::string failure; // empty, "NoCandidates", "GrossError", or another error code
    int candidates = 0;
    Vec3 position_error = Vec3::Zero(); // estimate - truth
    Vec3 velocity_error = Vec3::Zero();
    double frequency_error = 0.0;       // zero when f is known
    std::optional<std::array<double, 6>> element_errors;

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

struct SummaryRow {
    std::string quantity;
    double median = 0.0;
    double p95 = 0.0;

    friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

struct MonteCarloReport {
    std::string scenario;
    std::string family;
    std::uint64_t seed = 0;
    int trials = 0;
    int successes = 0;
    int failures = 0;
    std::vector<TrialRecord> records;
    // Quantiles of absolute errors over successes: position and velocity error
    // norms, |frequency error| and |element errors|.
    std::vector<SummaryRow> summary;

    [[nodiscard]] const SummaryRow* find(const std::string& quantity) const;
    [[nodiscard]] double failure_fraction() const {
        return trials > 0 ? static_cast<double>(failures) / trials : 0.0;
    }

    friend bool operator==(const MonteCarloReport&, const MonteCarloReport&) = default;
};

// Linear-interpolated quantile of the sample, q in [0, 1]; NaN when empty.
[[nodiscard]] double quantile(std::vector<double> values, double q);

// Trial k draws its noise from a generator seeded with (cfg.seed, k).
// `noise` supplies sigmas; its rng_seed is ignored. Throws PackMissing when
// the pack's family differs from the scenario's.
[[nodiscard]] MonteCarloReport run_monte_carlo(const Scenario& scenario, const NoiseConfig& noise,
                                               const StartPack& pack,
                                               const MonteCarloConfig& cfg);

// Rebuilds the summary from the records (used after parsing a report).
void summarize(MonteCarloReport& report);

} // namespace doppler
