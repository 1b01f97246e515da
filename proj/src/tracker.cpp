#include "doppler/tracker.hpp"

#include "doppler/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace doppler {

void TrackerConfig::validate() const {
    const bool ok = min_step > 0.0 && min_step <= initial_step && initial_step <= max_step &&
                    max_step < 1.0 && corrector_tol > 0.0 && path_tol > 0.0 &&
                    max_corrector_iters >= 1 && divergence_norm > 0.0 && max_steps > 0 &&
                    std::abs(std::abs(gamma) - 1.0) < 1e-12 && step_growth >= 1.0 &&
                    step_shrink > 0.0 && step_shrink < 1.0 && successes_before_growth >= 1 &&
                    threads >= 1;
    if (!ok) throw Error(ErrorCode::InvalidArgument, "invalid tracker configuration");
}

ParamVec homotopy_parameters(const ParamVec& start, const ParamVec& target, cplx gamma,
                             double t) {
    const cplx denom = (1.0 - t) * gamma + t;
    return (((1.0 - t) * gamma) * start + t * target) / denom;
}

ParamVec homotopy_parameter_velocity(const ParamVec& start, const ParamVec& target, cplx gamma,
                                     double t) {
    const cplx denom = (1.0 - t) * gamma + t;
    return (gamma / (denom * denom)) * (target - start);
}

namespace {

// Reusable buffers for one path.
struct Workspace {
    const ParamVec& start;
    const ParamVec& target;
    cplx gamma;
    ParamVec p;
    ParamVec dp;
    ComplexMat jac;
    ComplexVec rhs;

    void at(double t, bool with_velocity) {
        const cplx denom = (1.0 - t) * gamma + t;
        p.noalias() = (((1.0 - t) * gamma) / denom) * start + (t / denom) * target;
        if (with_velocity) dp.noalias() = (gamma / (denom * denom)) * (target - start);
    }
};

// Tangent dx/dt from H_x dx/dt = -H_p dp/dt.
bool tangent(const ParametricSystem& sys, Workspace& ws, double t, const ComplexVec& x,
             ComplexVec& out) {
    ws.at(t, true);
    try {
        sys.tangent_system(ws.p, x, ws.dp, ws.jac, ws.rhs);
        out = LuFactorization(ws.jac).solve(-ws.rhs);
    } catch (const Error&) {
        return false;
    }
    return all_finite(out);
}

enum class CorrectorOutcome { Converged, Failed, Singular };

CorrectorOutcome correct(const ParametricSystem& sys, const ParamVec& p, ComplexVec& x,
                         const TrackerConfig& cfg) {
    ComplexVec value;
    ComplexMat jac;
    double previous = 0.0;
    for (int k = 0; k < cfg.max_corrector_iters; ++k) {
        sys.evaluate_with_jacobian(p, x, value, jac);
        ComplexVec delta;
        try {
            delta = LuFactorization(jac).solve(-value);
        } catch (const Error&) {
            return CorrectorOutcome::Singular;
        }
        if (!all_finite(delta)) return CorrectorOutcome::Failed;
        const double step = delta.norm();
        const double scale = 1.0 + x.norm();
        if (k == 0 && step > 0.1 * scale) return CorrectorOutcome::Failed;
        if (k > 0 && step > 0.25 * previous) return CorrectorOutcome::Failed;
        x += delta;
        if (step <= cfg.path_tol * scale) return CorrectorOutcome::Converged;
        previous = step;
    }
    return CorrectorOutcome::Failed;
}

} // namespace

bool newton_polish(const ParametricSystem& sys, const ParamVec& p, ComplexVec& x,
                   int max_iters) {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    ComplexVec value;
    ComplexMat jac;
    double previous = std::numeric_limits<double>::infinity();
    for (int k = 0; k < max_iters; ++k) {
        sys.evaluate_with_jacobian(p, x, value, jac);
        ComplexVec delta;
        try {
            delta = LuFactorization(jac).solve(-value);
        } catch (const Error&) {
            return false;
        }
        if (!all_finite(delta)) return false;
        const double step = delta.norm();
        const double scale = 1.0 + x.norm();
        // Corrections that stop shrinking have hit the rounding floor of an
        // ill-conditioned root; keep the previous iterate.
        if (k > 0 && step >= previous) return previous <= 1e-8 * scale;
        x += delta;
        if (step <= 4.0 * eps * scale) return true;
        previous = step;
    }
    return previous <= 1e-8 * (1.0 + x.norm());
}

PathResult track_path(const ParametricSystem& sys, const ParamVec& start_params,
                      const ParamVec& target_params, const ComplexVec& start_solution,
                      const TrackerConfig& cfg) {
    cfg.validate();
    if (start_params.size() != sys.num_parameters() ||
        target_params.size() != sys.num_parameters() ||
        start_solution.size() != sys.num_unknowns()) {
        throw Error(ErrorCode::DimensionMismatch, "track_path input sizes do not match family");
    }
    if (!(sys.relative_residual(start_params, start_solution) <= 100.0 * cfg.corrector_tol)) {
        throw Error(ErrorCode::BadStartSolution, "start point does not solve the start system");
    }

    PathResult result;
    ComplexVec x = start_solution;
    double t = 0.0;
    double h = cfg.initial_step;
    int streak = 0;
    const cplx gamma = cfg.gamma;
    Workspace ws{start_params, target_params, gamma, {}, {}, {}, {}};

    auto fail = [&](PathStatus status) {
        result.status = status;
        result.endpoint = x;
        result.t_reached = t;
        result.final_residual =
            sys.relative_residual(homotopy_parameters(start_params, target_params, gamma, t), x);
        return result;
    };

    while (t < 1.0) {
        if (result.steps_taken + result.rejected_steps >= cfg.max_steps) {
            return fail(PathStatus::MaxSteps);
        }
        h = std::min(h, 1.0 - t);
        const double t_next = (1.0 - t - h < 1e-14) ? 1.0 : t + h;
        const double dt = t_next - t;

        ComplexVec predicted;
        bool predicted_ok = false;
        ComplexVec k1;
        if (tangent(sys, ws, t, x, k1)) {
            if (h < 10.0 * cfg.min_step) {
                predicted = x + dt * k1;
                predicted_ok = true;
            } else {
                ComplexVec k2, k3, k4;
                predicted_ok = tangent(sys, ws, t + 0.5 * dt, x + (0.5 * dt) * k1, k2) &&
                               tangent(sys, ws, t + 0.5 * dt, x + (0.5 * dt) * k2, k3) &&
                               tangent(sys, ws, t_next, x + dt * k3, k4);
                if (predicted_ok) predicted = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
        }

        CorrectorOutcome outcome = CorrectorOutcome::Failed;
        if (predicted_ok) {
            ws.at(t_next, false);
            outcome = correct(sys, ws.p, predicted, cfg);
        }

        if (outcome == CorrectorOutcome::Converged) {
            x = predicted;
            t = t_next;
            ++result.steps_taken;
            if (x.norm() > cfg.divergence_norm) return fail(PathStatus::Diverged);
            if (++streak >= cfg.successes_before_growth) {
                h = std::min(h * cfg.step_growth, cfg.max_step);
                streak = 0;
            }
        } else {
            ++result.rejected_steps;
            streak = 0;
            h *= cfg.step_shrink;
            // A collapsing step is reported as a singular path: it only
            // happens near a branch point or an ill-conditioned endpoint.
            if (h < cfg.min_step) return fail(PathStatus::SingularJacobian);
        }
    }

    if (!newton_polish(sys, target_params, x)) {
        return fail(PathStatus::SingularJacobian);
    }
    result.endpoint = x;
    result.t_reached = 1.0;
    result.final_residual = sys.relative_residual(target_params, x);
    if (!all_finite(x)) return fail(PathStatus::Diverged);
    if (x.norm() > cfg.divergence_norm) return fail(PathStatus::Diverged);
    result.status = result.final_residual <= 10.0 * cfg.corrector_tol
                        ? PathStatus::Success
                        : PathStatus::SingularJacobian;
    return result;
}

std::vector<PathResult> track_all(const ParametricSystem& sys, const ParamVec& start_params,
                                  const ParamVec& target_params,
                                  const std::vector<ComplexVec>& start_solutions,
                                  const TrackerConfig& cfg) {
    cfg.validate();
    std::vector<PathResult> results(start_solutions.size());
    auto run_one = [&](std::size_t i) {
        try {
            results[i] = track_path(sys, start_params, target_params, start_solutions[i], cfg);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::BadStartSolution) throw;
            PathResult bad;
            bad.status = PathStatus::SingularJacobian;
            bad.endpoint = start_solutions[i];
            bad.bad_start = true;
            results[i] = bad;
        }
    };

    const int threads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(results.size())));
    if (threads <= 1) {
        for (std::size_t i = 0; i < results.size(); ++i) run_one(i);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < results.size(); i = next++) {
                try {
                    run_one(i);
                } catch (...) {
                    const std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    pool.clear();
    if (failure) std::rethrow_exception(failure);
    return results;
}

ComplexVec ToySquareFamily::evaluate(const ParamVec& p, const ComplexVec& x) const {
    ComplexVec out(1);
    out(0) = x(0) * x(0) - p(0);
    return out;
}

ComplexMat ToySquareFamily::jacobian_unknowns(const ParamVec&, const ComplexVec& x) const {
    ComplexMat out(1, 1);
    out(0, 0) = 2.0 * x(0);
    return out;
}

ComplexVec ToySquareFamily::parameter_derivative(const ParamVec&, const ComplexVec&,
                                                 const ParamVec& dp) const {
    ComplexVec out(1);
    out(0) = -dp(0);
    return out;
}

} // namespace doppler
