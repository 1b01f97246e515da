#pragma once

// Reduces tracked endpoints of the squared system to physical candidates.
//
// Squaring the Doppler relation admits roots that satisfy it only up to the
// sign of the range rate. The pipeline keeps successful, real, positive
// frequency endpoints whose unsquared residual vanishes at every receiver and
// then ranks the survivors against an optional extra receiver.

#include "doppler/model.hpp"
#include "doppler/tracker.hpp"

#include <optional>
#include <string>
#include <vector>

namespace doppler {

// All quantities are in the (scaled) units of the system being filtered; in
// offset form the extra receiver's f field and noise_sigma_f are offsets.
struct FilterConfig {
    double realness_tol = 1e-6;
    double unsquared_tol = 1e-6;
    std::optional<Receiver> extra_receiver;
    bool require_positive_frequency = true;
    // Declared frequency noise; widens the unsquared tolerance to
    // max(unsquared_tol, 3 sigma_f c median(rho) / f), f the candidate's
    // frequency weight.
    std::optional<double> noise_sigma_f;
    // With declared noise the extra receiver accepts residuals up to this
    // many linearised standard deviations.
    double extra_sigmas = 4.0;
    // Candidates closer than this (relative max-norm) are merged.
    double merge_tol = 1e-8;

    void validate() const; // throws InvalidArgument
};

struct Candidate {
    TransmitterState state; // in offset form the f field holds phi until unscaled
    double squared_residual = 0.0;          // relative residual of the squared system
    double max_unsquared_residual = 0.0;    // over the equation receivers
    std::optional<double> extra_residual;   // |unsquared residual| at the extra receiver

    friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct FilterStats {
    int endpoints = 0;
    int succeeded = 0;
    int real = 0;
    int positive = 0;
    int consistent = 0;
    int candidates = 0;
};

// Throws NoCandidates when nothing survives.
[[nodiscard]] std::vector<Candidate> filter_candidates(const std::vector<PathResult>& endpoints,
                                                       const DopplerSystem& sys,
                                                       const ParamVec& params,
                                                       const FilterConfig& cfg,
                                                       FilterStats* stats = nullptr);

// Tolerance used for the unsquared test of candidate x.
[[nodiscard]] double effective_unsquared_tol(const FilterConfig& cfg, const DopplerSystem& sys,
                                             const ParamVec& params, const ComplexVec& x);

// Tolerance on the extra receiver's residual for candidate x; infinite when
// the Jacobian at x is singular.
[[nodiscard]] double extra_receiver_tol(const FilterConfig& cfg, const DopplerSystem& sys,
                                        const ParamVec& params, const ComplexVec& x);

struct ResidualRow {
    double range = 0.0;
    double range_rate = 0.0;
    double predicted_frequency = 0.0;
    double measured_frequency = 0.0;
    double unsquared = 0.0;
    std::optional<std::string> error; // e.g. CoincidentPoints; numbers are then NaN

    friend bool operator==(const ResidualRow&, const ResidualRow&) = default;
};

[[nodiscard]] std::vector<ResidualRow> residual_report(const TransmitterState& candidate,
                                                       const std::vector<Receiver>& receivers,
                                                       double c);

} // namespace doppler
