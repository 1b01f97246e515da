#pragma once

// Dense complex linear algebra for the small square systems met during
// path tracking (at most kMaxDim unknowns).

#include <Eigen/Core>

#include <array>
#include <complex>

namespace doppler {

using cplx = std::complex<double>;

inline constexpr int kMaxDim = 8;

// Fixed-capacity storage keeps Newton iterations allocation free.
using ComplexVec = Eigen::Matrix<cplx, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using ComplexMat =
    Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

// Parameter vectors (7N+1 entries) and Jacobians against them are heap sized.
using ParamVec = Eigen::VectorXcd;
using ParamMat = Eigen::MatrixXcd;

// A pivot is treated as zero when |pivot| < kPivotTolerance * (largest row 1-norm).
inline constexpr double kPivotTolerance = 1e-14;

// LU factorisation with partial pivoting, PA = LU.
class LuFactorization {
public:
    // Throws Error(SingularMatrix) when a pivot falls below
    // pivot_tolerance * max row norm. A tolerance of zero only rejects exact zeros.
    explicit LuFactorization(const ComplexMat& a, double pivot_tolerance = kPivotTolerance);

    [[nodiscard]] ComplexVec solve(const ComplexVec& b) const;
    [[nodiscard]] ComplexMat inverse() const;
    [[nodiscard]] int dim() const noexcept { return static_cast<int>(lu_.rows()); }

private:
    ComplexMat lu_;
    std::array<int, kMaxDim> perm_{};
};

[[nodiscard]] ComplexVec solve_linear(const ComplexMat& a, const ComplexVec& b);

// 1-norm condition number ||A||_1 ||A^-1||_1, exact for the small sizes used here.
[[nodiscard]] double condition_estimate(const ComplexMat& a);

[[nodiscard]] bool all_finite(const ComplexVec& v) noexcept;

} // namespace doppler
