#include "doppler/solve.hpp"

#include "doppler/errors.hpp"

#include <numbers>
#include <optional>

namespace doppler {

SolveResult solve(const StartPack& pack, const SolveRequest& request, const SolveOptions& options) {
    const Family family = request.family();
    if (!(pack.family == family)) {
        throw Error(ErrorCode::FamilyMismatch,
                    "pack is for " + pack.family.name() + ", measurements need " + family.name());
    }
    if (!(request.c > 0.0)) throw Error(ErrorCode::InvalidArgument, "c must be positive");
    if (request.known_frequency && !(*request.known_frequency > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "known transmit frequency must be positive");
    }
    if (request.stationary) {
        for (const auto& rx : request.receivers) {
            if (!rx.v.isZero(0.0)) {
                throw Error(ErrorCode::InvalidArgument,
                            "stationary family given a receiver with nonzero velocity");
            }
        }
    }

    SolveResult result;
    result.frame = offset_frame(request.receivers, request.c, request.known_frequency);
    const OffsetFrame& frame = result.frame;
    const auto [sys, params] = offset_system(family, request.receivers, frame);

    // Pack instances are plain; the unknown-f solve runs in offset form.
    ParamVec start_params = pack.start_params;
    std::vector<ComplexVec> start_solutions = pack.solutions;
    if (sys.offset_form()) {
        start_params = lift_parameters(pack.system(), pack.start_params);
        for (auto& x : start_solutions) x = lift_solution(x);
    }

    FilterConfig fcfg;
    fcfg.realness_tol = options.realness_tol;
    fcfg.unsquared_tol = options.unsquared_tol;
    if (request.extra_receiver) {
        Receiver extra = frame.scale(*request.extra_receiver);
        if (family.known_frequency) extra.f += 1.0; // as in offset_system
        fcfg.extra_receiver = extra;
    }
    if (request.sigma_f) fcfg.noise_sigma_f = *request.sigma_f / (frame.frequency * frame.epsilon);

    const int expected = pack.halved ? expected_root_count(family) : pack.root_count();
    result.stats.expected = expected;

    std::vector<PathResult> endpoints;
    std::vector<ComplexVec> distinct;
    auto absorb = [&](const PathResult& r) {
        endpoints.push_back(r);
        if (find_solution(distinct, r.endpoint, 1e-6) < 0) distinct.push_back(r.endpoint);
    };

    // Further passes, each with a new gamma, run only while endpoints are
    // missing and nothing has survived the filter yet.
    FilterStats fstats;
    std::optional<Error> last_error;
    for (int pass = 0; pass < std::max(1, options.max_passes); ++pass) {
        TrackerConfig cfg = options.tracker;
        cfg.gamma *= std::polar(1.0, pass * std::numbers::pi * (3.0 - std::sqrt(5.0)));
        const auto results = track_all(sys, start_params, params, start_solutions, cfg);
        result.stats.paths_tracked += static_cast<int>(results.size());
        ++result.stats.passes;
        for (const auto& r : results) {
            if (r.status != PathStatus::Success) continue;
            if (pass == 0) ++result.stats.succeeded;
            absorb(r);
            if (pack.halved) {
                PathResult mate = r;
                mate.endpoint = velocity_mate(r.endpoint);
                absorb(mate);
            }
        }
        try {
            result.candidates = filter_candidates(endpoints, sys, params, fcfg, &fstats);
            last_error.reset();
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoCandidates) throw;
            last_error = e;
        }
        if (!result.candidates.empty() || static_cast<int>(distinct.size()) >= expected) break;
    }
    result.stats.distinct = static_cast<int>(distinct.size());
    result.stats.real = fstats.real;
    result.stats.positive = fstats.positive;
    result.stats.consistent = fstats.consistent;
    result.stats.candidates = fstats.candidates;
    if (last_error) throw *last_error;

    for (auto& cand : result.candidates) {
        if (family.known_frequency) cand.state.f = 0.0;
        cand.state = frame.unscale(cand.state);
        if (request.known_frequency) cand.state.f = *request.known_frequency;
    }
    return result;
}

} // namespace doppler
