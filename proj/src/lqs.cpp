#include "isoc/lqs.hpp"

#include <limits>

namespace isoc {

namespace {

// Backward sweep: cost-to-go recursion for fixed filter gains.
void control_sweep(const SystemModel& sys, const CostMatrices& cost,
                   const NoiseOperators& noise, const std::vector<Matrix>& K,
                   std::vector<Matrix>& L, LqsSolverState& st) {
    const int N = sys.horizon;
    const int n = sys.n();
    st.Zx[N] = symmetrize(cost.QN);
    st.Ze[N] = Matrix::Zero(n, n);
    for (int t = N - 1; t >= 0; --t) {
        const Matrix& Zx = st.Zx[t + 1];
        const Matrix& Ze = st.Ze[t + 1];
        Matrix gram = cost.R + sys.B.transpose() * Zx * sys.B;
        for (const auto& c : noise.C)
            gram.noalias() += c.transpose() * (Zx + Ze) * c;
        L[t] = spd_solve(gram, sys.B.transpose() * Zx * sys.A);

        Matrix zx_next = cost.Q + sys.A.transpose() * Zx * (sys.A - sys.B * L[t]);
        for (const auto& d : noise.D) {
            const Matrix kd = K[t] * d;
            zx_next.noalias() += kd.transpose() * Ze * kd;
        }
        const Matrix closed = sys.A - K[t] * sys.H;
        st.Zx[t] = symmetrize(zx_next);
        st.Ze[t] = symmetrize(sys.A.transpose() * Zx * sys.B * L[t] +
                              closed.transpose() * Ze * closed);
        if (!L[t].allFinite() || !st.Zx[t].allFinite() || !st.Ze[t].allFinite())
            throw NumericalError("non-finite values in control sweep");
    }
}

// Forward sweep: second-moment recursion for fixed control gains. The
// P updates use the full quadratic forms, which stay exact for the
// regularized gain as well.
void filter_sweep(const SystemModel& sys, const NoiseOperators& noise,
                  const std::vector<Matrix>& L, std::vector<Matrix>& K,
                  LqsSolverState& st) {
    const int N = sys.horizon;
    st.Pe[0] = symmetrize(sys.Omega_x0);
    st.Pxh[0] = sys.x0_mean * sys.x0_mean.transpose();
    st.Pxhe[0].setZero();
    st.Pexh[0].setZero();
    for (int t = 0; t < N; ++t) {
        const Matrix& Pe = st.Pe[t];
        const Matrix& Pxh = st.Pxh[t];
        const Matrix second_x = Pe + Pxh + st.Pxhe[t] + st.Pexh[t]; // E[x x^T]

        Matrix state_noise = Matrix::Zero(sys.r(), sys.r());
        for (const auto& d : noise.D)
            state_noise.noalias() += d * second_x * d.transpose();
        const Matrix innovation = sys.H * Pe * sys.H.transpose() + noise.Omega_omega + state_noise;
        K[t] = spd_solve_with_jitter(innovation, sys.H * Pe * sys.A.transpose()).transpose();

        const Matrix a_kh = sys.A - K[t] * sys.H;
        const Matrix a_bl = sys.A - sys.B * L[t];
        const Matrix k_meas = symmetrize(
            K[t] * (noise.Omega_omega + state_noise) * K[t].transpose());

        Matrix control_noise = Matrix::Zero(sys.n(), sys.n());
        for (const auto& c : noise.C) {
            const Matrix cl = c * L[t];
            control_noise.noalias() += cl * Pxh * cl.transpose();
        }

        st.Pe[t + 1] = symmetrize(a_kh * Pe * a_kh.transpose() + noise.Omega_xi +
                                  noise.Omega_eta + control_noise + k_meas);
        st.Pxh[t + 1] = symmetrize(a_bl * Pxh * a_bl.transpose() +
                                   a_bl * st.Pxhe[t] * sys.H.transpose() * K[t].transpose() +
                                   K[t] * sys.H * st.Pexh[t] * a_bl.transpose() +
                                   K[t] * sys.H * Pe * sys.H.transpose() * K[t].transpose() +
                                   k_meas + noise.Omega_eta);
        st.Pxhe[t + 1] = a_bl * st.Pxhe[t] * a_kh.transpose() +
                         K[t] * sys.H * Pe * a_kh.transpose() - k_meas - noise.Omega_eta;
        st.Pexh[t + 1] = st.Pxhe[t + 1].transpose();
        if (!K[t].allFinite() || !st.Pe[t + 1].allFinite() || !st.Pxh[t + 1].allFinite() ||
            !st.Pxhe[t + 1].allFinite())
            throw NumericalError("non-finite values in filter sweep");
    }
}

} // namespace

LqsSolution lqs_gains(const SystemModel& sys, const CostMatrices& cost,
                      const NoiseOperators& noise, const LqsOptions& opts) {
    if (opts.max_iters < 1)
        throw InvalidConfig("lqs max_iters must be >= 1");
    const int N = sys.horizon;
    const int n = sys.n();

    LqsSolution out;
    LqsSolverState& st = out.state;
    st.Zx.assign(N + 1, Matrix::Zero(n, n));
    st.Ze.assign(N + 1, Matrix::Zero(n, n));
    st.Pe.assign(N + 1, Matrix::Zero(n, n));
    st.Pxh.assign(N + 1, Matrix::Zero(n, n));
    st.Pxhe.assign(N + 1, Matrix::Zero(n, n));
    st.Pexh.assign(N + 1, Matrix::Zero(n, n));

    std::vector<Matrix>& L = out.gains.L;
    std::vector<Matrix>& K = out.gains.K;
    L.assign(N, Matrix::Zero(sys.m(), n));
    K = lqg_filter_gains(sys, noise).K; // additive-noise warm start

    std::vector<Matrix> prev_l, prev_k;
    st.gain_delta = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= opts.max_iters; ++it) {
        control_sweep(sys, cost, noise, K, L, st);
        filter_sweep(sys, noise, L, K, st);
        st.iterations = it;
        if (it > 1) {
            double delta = 0.0;
            for (int t = 0; t < N; ++t) {
                delta = std::max(delta, max_abs_diff(L[t], prev_l[t]));
                delta = std::max(delta, max_abs_diff(K[t], prev_k[t]));
            }
            st.gain_delta = delta;
            if (delta < opts.tol) {
                st.converged = true;
                break;
            }
        }
        prev_l = L;
        prev_k = K;
    }
    return out;
}

MomentTrajectory lqs_propagate_moments(const SystemModel& sys, const GainSchedule& gains,
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
        const Vector mean_x = traj.mean[t].head(n);
        const Vector mean_xh = traj.mean[t].tail(n);
        const Matrix cov_x = traj.cov[t].topLeftCorner(n, n);
        const Matrix cov_xh = traj.cov[t].bottomRightCorner(n, n);

        Matrix next = acl * traj.cov[t] * acl.transpose();
        next.topLeftCorner(n, n) += noise.Omega_xi;
        next.bottomRightCorner(n, n) += noise.Omega_eta +
            gains.K[t] * noise.Omega_omega * gains.K[t].transpose();

        // Control-dependent noise excites the state through the second
        // moment of the estimate; state-dependent noise excites the
        // estimate through the filter gain.
        const Matrix second_xh = cov_xh + mean_xh * mean_xh.transpose();
        for (const auto& c : noise.C) {
            const Matrix cl = c * gains.L[t];
            next.topLeftCorner(n, n).noalias() += cl * second_xh * cl.transpose();
        }
        const Matrix second_x = cov_x + mean_x * mean_x.transpose();
        for (const auto& d : noise.D) {
            const Matrix kd = gains.K[t] * d;
            next.bottomRightCorner(n, n).noalias() += kd * second_x * kd.transpose();
        }

        traj.mean[t + 1] = acl * traj.mean[t];
        traj.cov[t + 1] = symmetrize(next);
    }
    return traj;
}

} // namespace isoc
