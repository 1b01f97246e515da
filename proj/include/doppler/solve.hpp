#pragma once

// End-to-end solve of one instance from a start pack: move to offset units,
// track every start solution to the target, screen, and return SI candidates.

#include "doppler/filter.hpp"
#include "doppler/model.hpp"
#include "doppler/monodromy.hpp"
#include "doppler/tracker.hpp"

#include <optional>
#include <vector>

namespace doppler {

struct SolveRequest {
    // Exactly n_obs receivers (6 with a known frequency, 7 otherwise), SI units.
    std::vector<Receiver> receivers;
    std::optional<Receiver> extra_receiver;
    double c = 0.0;
    std::optional<double> known_frequency;
    bool stationary = false;
    // Declared measurement noise (Hz); widens the sign test tolerance.
    std::optional<double> sigma_f;

    [[nodiscard]] Family family() const {
        return Family{known_frequency.has_value(), stationary};
    }
};

struct SolveOptions {
    TrackerConfig tracker;
    double realness_tol = 1e-6;
    double unsquared_tol = 1e-6;
    // Tracking passes, each with a fresh gamma; a pass is repeated only while
    // endpoints are missing and no candidate has survived the filter.
    int max_passes = 3;
};

struct SolveStats {
    int paths_tracked = 0;   // over all passes
    int passes = 0;
    int succeeded = 0;       // successful paths in the first pass
    int distinct = 0;        // distinct endpoints over all passes (mates included)
    int expected = 0;        // full root count of the family
    int real = 0;
    int positive = 0;
    int consistent = 0;
    int candidates = 0;

    friend bool operator==(const SolveStats&, const SolveStats&) = default;
};

struct SolveResult {
    // SI units; residual scores stay in the units of `frame`.
    std::vector<Candidate> candidates;
    SolveStats stats;
    OffsetFrame frame;
};

// Throws FamilyMismatch, NoCandidates, DimensionMismatch, InvalidArgument.
[[nodiscard]] SolveResult solve(const StartPack& pack, const SolveRequest& request,
                                const SolveOptions& options = {});

} // namespace doppler
