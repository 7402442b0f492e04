#pragma once

#include <vector>

#include "isoc/model.hpp"

namespace isoc {

// Time-indexed feedback and filter gains, t = 0..N-1.
struct GainSchedule {
    std::vector<Matrix> L; // m x n
    std::vector<Matrix> K; // n x r

    int steps() const { return static_cast<int>(L.size()); }
    void validate(const SystemModel& sys) const;
};

// Joint mean/covariance of the stacked (x, x_hat) process, t = 0..N.
// mean[t] is 2n, cov[t] is 2n x 2n with blocks
//   [ cov(x)        cov(x, x_hat) ]
//   [ cov(x_hat, x) cov(x_hat)    ]
struct MomentTrajectory {
    std::vector<Vector> mean;
    std::vector<Matrix> cov;

    int steps() const { return static_cast<int>(mean.size()) - 1; }
    int state_dim() const { return mean.empty() ? 0 : static_cast<int>(mean.front().size()) / 2; }

    // Restriction to the measured states: M E[x_t] and M cov(x_t) M^T.
    std::vector<Vector> measured_means(const Matrix& M) const;
    std::vector<Matrix> measured_covs(const Matrix& M) const;

    GroundTruthMoments measured(const Matrix& M) const;
};

struct LqgControlSolution {
    std::vector<Matrix> L; // t = 0..N-1
    std::vector<Matrix> Z; // t = 0..N (cost-to-go Riccati states)
};

struct LqgFilterSolution {
    std::vector<Matrix> K; // t = 0..N-1
    std::vector<Matrix> P; // t = 0..N (prediction-error Riccati states)
};

// Backward Riccati recursion from Z_N = Q_N:
//   L_t = (R + B^T Z_{t+1} B)^{-1} B^T Z_{t+1} A
//   Z_t = Q + A^T Z_{t+1} (A - B L_t)
// Requires R positive definite (guaranteed by assemble_cost).
LqgControlSolution lqg_control_gains(const SystemModel& sys, const CostMatrices& cost);

// Forward filter recursion from P_0 = Omega_x0:
//   K_t = A P_t H^T (H P_t H^T + Omega_omega)^{-1}
//   P_{t+1} = (A - K_t H) P_t (A - K_t H)^T + K_t Omega_omega K_t^T + Omega_xi
// The innovation solve adds diagonal jitter when near singular, so a
// fully deterministic model degrades to K = 0 instead of failing.
LqgFilterSolution lqg_filter_gains(const SystemModel& sys, const NoiseOperators& noise);

GainSchedule lqg_gains(const SystemModel& sys, const CostMatrices& cost,
                       const NoiseOperators& noise);

// Exact propagation of the stacked first and second moments through the
// closed estimation-control loop:
//   mean_{t+1} = Acl_t mean_t
//   cov_{t+1}  = Acl_t cov_t Acl_t^T + blkdiag(Omega_xi, K_t Omega_omega K_t^T)
// with Acl_t = [A, -B L_t; K_t H, A - K_t H - B L_t], starting from
// mean_0 = [x0_mean; x0_mean], cov_0 = blkdiag(Omega_x0, 0).
MomentTrajectory lqg_propagate_moments(const SystemModel& sys, const GainSchedule& gains,
                                       const NoiseOperators& noise);

// Closed-loop transition matrix shared by both propagators.
Matrix closed_loop_matrix(const SystemModel& sys, const Matrix& L, const Matrix& K);

} // namespace isoc
