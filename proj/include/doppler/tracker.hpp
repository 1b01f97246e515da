#pragma once

// Predictor-corrector continuation along a parameter homotopy.
//
// Parameters follow the gamma-trick arc
//
//   p(t) = ((1 - t) gamma p_start + t p_target) / ((1 - t) gamma + t),
//
// which equals p_start at t = 0 and p_target at t = 1 and, for generic
// |gamma| = 1, stays clear of the discriminant locus.

#include "doppler/linalg.hpp"
#include "doppler/system.hpp"

#include <complex>
#include <string>
#include <vector>

namespace doppler {

struct TrackerConfig {
    double initial_step = 0.05;
    double min_step = 1e-7;
    double max_step = 0.1;
    // Endpoint acceptance on the relative residual; Success needs <= 10x this.
    double corrector_tol = 1e-11;
    // Relative Newton step size accepted while following the path.
    double path_tol = 1e-8;
    int max_corrector_iters = 3;
    double divergence_norm = 1e8;
    int max_steps = 10000;
    cplx gamma = std::polar(1.0, 1.2345);
    double step_growth = 1.5;
    double step_shrink = 0.5;
    int successes_before_growth = 5;
    // Worker threads for track_all; results do not depend on it.
    int threads = 1;

    void validate() const; // throws InvalidArgument
};

enum class PathStatus { Success, Diverged, SingularJacobian, MaxSteps };

[[nodiscard]] constexpr const char* to_string(PathStatus s) noexcept {
    switch (s) {
        case PathStatus::Success: return "Success";
        case PathStatus::Diverged: return "Diverged";
        case PathStatus::SingularJacobian: return "SingularJacobian";
        case PathStatus::MaxSteps: return "MaxSteps";
    }
    return "Unknown";
}

struct PathResult {
    PathStatus status = PathStatus::SingularJacobian;
    ComplexVec endpoint;
    double final_residual = 0.0;
    int steps_taken = 0;
    int rejected_steps = 0;
    double t_reached = 0.0;
    // Set when the start point failed the residual precondition (track_all only).
    bool bad_start = false;
};

// Parameter value on the homotopy arc and its derivative in t.
[[nodiscard]] ParamVec homotopy_parameters(const ParamVec& start, const ParamVec& target,
                                           cplx gamma, double t);
[[nodiscard]] ParamVec homotopy_parameter_velocity(const ParamVec& start, const ParamVec& target,
                                                   cplx gamma, double t);

// Newton refinement at fixed parameters. Returns false if the Jacobian is
// singular or the iteration does not settle within max_iters.
bool newton_polish(const ParametricSystem& sys, const ParamVec& p, ComplexVec& x,
                   int max_iters = 10);

// Throws BadStartSolution when start_solution is not a solution at start_params
// (relative residual above 100 * corrector_tol after polishing).
[[nodiscard]] PathResult track_path(const ParametricSystem& sys, const ParamVec& start_params,
                                    const ParamVec& target_params,
                                    const ComplexVec& start_solution, const TrackerConfig& cfg);

// One result per start solution, in order. Bad start points are reported with
// bad_start set rather than thrown.
[[nodiscard]] std::vector<PathResult> track_all(const ParametricSystem& sys,
                                                const ParamVec& start_params,
                                                const ParamVec& target_params,
                                                const std::vector<ComplexVec>& start_solutions,
                                                const TrackerConfig& cfg);

// x^2 - p = 0, one unknown and one parameter.
class ToySquareFamily final : public ParametricSystem {
public:
    [[nodiscard]] int num_unknowns() const override { return 1; }
    [[nodiscard]] int num_parameters() const override { return 1; }
    [[nodiscard]] ComplexVec evaluate(const ParamVec& p, const ComplexVec& x) const override;
    [[nodiscard]] ComplexMat jacobian_unknowns(const ParamVec& p,
                                               const ComplexVec& x) const override;
    [[nodiscard]] ComplexVec parameter_derivative(const ParamVec& p, const ComplexVec& x,
                                                  const ParamVec& dp) const override;
};

} // namespace doppler
