#include "isoc/lqg.hpp"

namespace isoc {

void GainSchedule::validate(const SystemModel& sys) const {
    if (static_cast<int>(L.size()) != sys.horizon || L.size() != K.size())
        throw DimensionError("gain schedule length must equal the horizon");
    for (const auto& l : L)
        if (l.rows() != sys.m() || l.cols() != sys.n() || !l.allFinite())
            throw DimensionError("control gain has wrong shape or non-finite entries");
    for (const auto& k : K)
        if (k.rows() != sys.n() || k.cols() != sys.r() || !k.allFinite())
            throw DimensionError("filter gain has wrong shape or non-finite entries");
}

std::vector<Vector> MomentTrajectory::measured_means(const Matrix& M) const {
    std::vector<Vector> out;
    out.reserve(mean.size());
    const int n = state_dim();
    for (const auto& mu : mean)
        out.push_back(M * mu.head(n));
    return out;
}

std::vector<Matrix> MomentTrajectory::measured_covs(const Matrix& M) const {
    std::vector<Matrix> out;
    out.reserve(cov.size());
    const int n = state_dim();
    for (const auto& c : cov)
        out.push_back(M * c.topLeftCorner(n, n) * M.transpose());
    return out;
}

GroundTruthMoments MomentTrajectory::measured(const Matrix& M) const {
    return GroundTruthMoments{measured_means(M), measured_covs(M)};
}

LqgControlSolution lqg_control_gains(const SystemModel& sys, const CostMatrices& cost) {
    const int N = sys.horizon;
    LqgControlSolution out;
    out.L.assign(N, Matrix());
    out.Z.assign(N + 1, Matrix());
    out.Z[N] = symmetrize(cost.QN);
    for (int t = N - 1; t >= 0; --t) {
        const Matrix& Zn = out.Z[t + 1];
        const Matrix gram = cost.R + sys.B.transpose() * Zn * sys.B;
        out.L[t] = spd_solve(gram, sys.B.transpose() * Zn * sys.A);
        out.Z[t] = symmetrize(cost.Q + sys.A.transpose() * Zn * (sys.A - sys.B * out.L[t]));
        if (!out.L[t].allFinite() || !out.Z[t].allFinite())
            throw NumericalError("non-finite values in control Riccati recursion");
    }
    return out;
}

LqgFilterSolution lqg_filter_gains(const SystemModel& sys, const NoiseOperators& noise) {
    const int N = sys.horizon;
    LqgFilterSolution out;
    out.K.assign(N, Matrix());
    out.P.assign(N + 1, Matrix());
    out.P[0] = symmetrize(sys.Omega_x0);
    for (int t = 0; t < N; ++t) {
        const Matrix& P = out.P[t];
        const Matrix innovation = sys.H * P * sys.H.transpose() + noise.Omega_omega;
        // K^T from the symmetric solve, then the Joseph-form update keeps
        // P exact and PSD for whatever gain the regularization produced.
        out.K[t] = spd_solve_with_jitter(innovation, sys.H * P * sys.A.transpose()).transpose();
        const Matrix closed = sys.A - out.K[t] * sys.H;
        out.P[t + 1] = symmetrize(closed * P * closed.transpose() +
                                  out.K[t] * noise.Omega_omega * out.K[t].transpose() +
                                  noise.Omega_xi);
        if (!out.K[t].allFinite() || !out.P[t + 1].allFinite())
            throw NumericalError("non-finite values in filter recursion");
    }
    return out;
}

GainSchedule lqg_gains(const SystemModel& sys, const CostMatrices& cost,
                       const NoiseOperators& noise) {
    GainSchedule gains;
    gains.L = lqg_control_gains(sys, cost).L;
    gains.K = lqg_filter_gains(sys, noise).K;
    return gains;
}

Matrix closed_loop_matrix(const SystemModel& sys, const Matrix& L, const Matrix& K) {
    const int n = sys.n();
    Matrix acl(2 * n, 2 * n);
    acl.topLeftCorner(n, n) = sys.A;
    acl.topRightCorner(n, n) = -sys.B * L;
    acl.bottomLeftCorner(n, n) = K * sys.H;
    acl.bottomRightCorner(n, n) = sys.A - K * sys.H - sys.B * L;
    return acl;
}

MomentTrajectory lqg_propagate_moments(const SystemModel& sys, const GainSchedule& gains,
                                       const NoiseOperators& noise) {
    gains.validate(sys);
    const int n = sys.n();
    const int N = sys.horizon;

    MomentTrajectory traj;
    traj.mean.assign(N + 1, Vector::Zero(2 * n));
    traj.cov.assign(N + 1, Matrix::Zero(2 * n, 2 * n));
    traj.mean[0] << sys.x0_mean, sys.x0_mean;
    traj.cov[0].topLeftCorner(n, n) = sys.Omega_x0;

    for (int t = 0; t < N; ++t) {
        const Matrix acl = closed_loop_matrix(sys, gains.L[t], gains.K[t]);
        traj.mean[t + 1] = acl * traj.mean[t];
        Matrix next = acl * traj.cov[t] * acl.transpose();
        next.topLeftCorner(n, n) += noise.Omega_xi;
        next.bottomRightCorner(n, n) +=
            gains.K[t] * noise.Omega_omega * gains.K[t].transpose();
        traj.cov[t + 1] = symmetrize(next);
    }
    return traj;
}

} // namespace isoc
