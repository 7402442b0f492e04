#include "isoc/linalg.hpp"

#include <cmath>

namespace isoc {

bool is_symmetric(const Matrix& x, double rel_tol) {
    if (x.rows() != x.cols())
        return false;
    const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
    return (x - x.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

bool is_psd(const Matrix& x, double rel_tol) {
    if (x.rows() != x.cols())
        return false;
    if (x.size() == 0)
        return true;
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(x), Eigen::EigenvaluesOnly);
    const double scale = std::max(std::abs(x.trace()), x.cwiseAbs().maxCoeff());
    return es.eigenvalues().minCoeff() >= -rel_tol * std::max(scale, 1e-300);
}

Matrix psd_sqrt(const Matrix& x) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(x));
    Vector lambda = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * lambda.asDiagonal() * es.eigenvectors().transpose();
}

Matrix spd_solve_with_jitter(const Matrix& s, const Matrix& rhs) {
    Matrix sym = symmetrize(s);
    const double trace = sym.trace();
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < 1e-12 * trace || trace <= 0.0) {
        // A fully zero S only appears together with a zero rhs; the unit
        // jitter then returns an exact zero solution.
        const double jitter = trace > 0.0 ? 1e-12 * trace : 1.0;
        sym.diagonal().array() += jitter;
    }
    Matrix x = sym.ldlt().solve(rhs);
    if (!x.allFinite())
        throw NumericalError("singular innovation covariance after regularization");
    return x;
}

Matrix spd_solve(const Matrix& s, const Matrix& rhs) {
    Matrix x = symmetrize(s).ldlt().solve(rhs);
    if (!x.allFinite())
        throw NumericalError("non-finite result in symmetric solve");
    return x;
}

} // namespace isoc
