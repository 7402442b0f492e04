#pragma once

#include <Eigen/Dense>

#include "isoc/errors.hpp"

namespace isoc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Relative tolerance used by PSD checks throughout (relative to trace).
inline constexpr double kPsdTolerance = 1e-10;

inline Matrix symmetrize(const Matrix& x) {
    return 0.5 * (x + x.transpose());
}

inline bool all_finite(const Matrix& x) {
    return x.allFinite();
}

// Symmetric within an absolute tolerance scaled by the largest entry.
bool is_symmetric(const Matrix& x, double rel_tol = 1e-12);

// Positive semi-definite check: smallest eigenvalue >= -tol * ||x||.
// Uses the trace as the scale (x is expected symmetric PSD, trace >= 0).
bool is_psd(const Matrix& x, double rel_tol = kPsdTolerance);

// Symmetric square root via eigendecomposition, clipping negative
// eigenvalues at zero. Used to sample from singular covariances.
Matrix psd_sqrt(const Matrix& x);

// Solves S * X = rhs for symmetric positive semi-definite S, adding
// 1e-12*trace(S) jitter on the diagonal when the smallest eigenvalue
// falls below that threshold. A zero S with zero rhs yields X = 0.
// Throws NumericalError if the solve still produces non-finite values.
Matrix spd_solve_with_jitter(const Matrix& s, const Matrix& rhs);

// Plain symmetric positive definite solve; throws NumericalError on
// non-finite results (the caller guarantees definiteness).
Matrix spd_solve(const Matrix& s, const Matrix& rhs);

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

} // namespace isoc
