#include "doppler/linalg.hpp"

#include "doppler/errors.hpp"

#include <cmath>
#include <string>

namespace doppler {

LuFactorization::LuFactorization(const ComplexMat& a, double pivot_tolerance) : lu_(a) {
    const int n = static_cast<int>(a.rows());
    if (a.cols() != n) {
        throw Error(ErrorCode::DimensionMismatch, "LU needs a square matrix");
    }
    if (n > kMaxDim) {
        throw Error(ErrorCode::DimensionMismatch, "matrix larger than kMaxDim");
    }
    // Magnitudes use |re| + |im|, within sqrt(2) of the modulus and free of hypot.
    auto mag = [](cplx z) { return std::abs(z.real()) + std::abs(z.imag()); };
    double max_row = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) row += mag(a(i, j));
        max_row = std::max(max_row, row);
    }
    const double threshold = pivot_tolerance * max_row;

    for (int i = 0; i < n; ++i) perm_[i] = i;
    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = mag(lu_(k, k));
        for (int i = k + 1; i < n; ++i) {
            const double m = mag(lu_(i, k));
            if (m > best) {
                best = m;
                p = i;
            }
        }
        if (!(best > threshold) || best == 0.0) {
            throw Error(ErrorCode::SingularMatrix,
                        "pivot " + std::to_string(best) + " in column " + std::to_string(k));
        }
        if (p != k) {
            lu_.row(k).swap(lu_.row(p));
            std::swap(perm_[k], perm_[p]);
        }
        const cplx inv_pivot = 1.0 / lu_(k, k);
        for (int i = k + 1; i < n; ++i) {
            const cplx l = lu_(i, k) * inv_pivot;
            lu_(i, k) = l;
            if (l == cplx{}) continue;
            for (int j = k + 1; j < n; ++j) lu_(i, j) -= l * lu_(k, j);
        }
    }
}

ComplexVec LuFactorization::solve(const ComplexVec& b) const {
    const int n = dim();
    if (b.size() != n) {
        throw Error(ErrorCode::DimensionMismatch, "right-hand side length does not match matrix");
    }
    ComplexVec x(n);
    for (int i = 0; i < n; ++i) {
        cplx s = b(perm_[i]);
        for (int j = 0; j < i; ++j) s -= lu_(i, j) * x(j);
        x(i) = s;
    }
    for (int i = n - 1; i >= 0; --i) {
        cplx s = x(i);
        for (int j = i + 1; j < n; ++j) s -= lu_(i, j) * x(j);
        x(i) = s / lu_(i, i);
    }
    return x;
}

ComplexMat LuFactorization::inverse() const {
    const int n = dim();
    ComplexMat inv(n, n);
    ComplexVec e = ComplexVec::Zero(n);
    for (int j = 0; j < n; ++j) {
        e.setZero();
        e(j) = 1.0;
        inv.col(j) = solve(e);
    }
    return inv;
}

ComplexVec solve_linear(const ComplexMat& a, const ComplexVec& b) {
    if (a.rows() != b.size()) {
        throw Error(ErrorCode::DimensionMismatch, "matrix rows do not match right-hand side");
    }
    return LuFactorization(a).solve(b);
}

namespace {

double norm_1(const ComplexMat& a) {
    double best = 0.0;
    for (int j = 0; j < a.cols(); ++j) best = std::max(best, a.col(j).cwiseAbs().sum());
    return best;
}

} // namespace

double condition_estimate(const ComplexMat& a) {
    const LuFactorization lu(a, 0.0);
    const double kappa = norm_1(a) * norm_1(lu.inverse());
    if (!std::isfinite(kappa)) {
        throw Error(ErrorCode::SingularMatrix, "condition number is not finite");
    }
    return kappa;
}

bool all_finite(const ComplexVec& v) noexcept {
    for (int i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v(i).real()) || !std::isfinite(v(i).imag())) return false;
    }
    return true;
}

} // namespace doppler
