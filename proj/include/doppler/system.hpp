#pragma once

#include "doppler/linalg.hpp"

namespace doppler {

// A square polynomial family F(x; p) = 0 in unknowns x and parameters p.
// The tracker only sees this interface, so toy families can be swapped in.
class ParametricSystem {
public:
    virtual ~ParametricSystem() = default;

    [[nodiscard]] virtual int num_unknowns() const = 0;
    [[nodiscard]] virtual int num_parameters() const = 0;

    [[nodiscard]] virtual ComplexVec evaluate(const ParamVec& p, const ComplexVec& x) const = 0;
    [[nodiscard]] virtual ComplexMat jacobian_unknowns(const ParamVec& p,
                                                       const ComplexVec& x) const = 0;

    // Directional derivative dF/dp * dp at fixed x.
    [[nodiscard]] virtual ComplexVec parameter_derivative(const ParamVec& p, const ComplexVec& x,
                                                          const ParamVec& dp) const = 0;

    // Backward-error style residual: |F_i| divided by the magnitude of the
    // terms that produced it, maximised over equations. Defaults to ||F||_inf.
    [[nodiscard]] virtual double relative_residual(const ParamVec& p, const ComplexVec& x) const {
        return evaluate(p, x).cwiseAbs().maxCoeff();
    }

    virtual void evaluate_with_jacobian(const ParamVec& p, const ComplexVec& x, ComplexVec& value,
                                        ComplexMat& jac) const {
        value = evaluate(p, x);
        jac = jacobian_unknowns(p, x);
    }

    // Jacobian in x together with dF/dp * dp, as needed for the path tangent.
    virtual void tangent_system(const ParamVec& p, const ComplexVec& x, const ParamVec& dp,
                                ComplexMat& jac, ComplexVec& rhs) const {
        jac = jacobian_unknowns(p, x);
        rhs = parameter_derivative(p, x, dp);
    }
};

} // namespace doppler
