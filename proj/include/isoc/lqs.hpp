#pragma once

#include <vector>

#include "isoc/lqg.hpp"

namespace isoc {

struct LqsOptions {
    int max_iters = 500;
    double tol = 1e-9; // max-abs change of (L, K) between sweeps
};

// Internals of the fixed-point iteration between control and filter
// gains under signal-dependent noise. Zx/Ze parameterize the cost-to-go
// in the state and the estimation error; the P quartet holds the
// unconditional second moments E[ee^T], E[xh xh^T], E[xh e^T], E[e xh^T]
// the filter gain needs (e = x - x_hat).
struct LqsSolverState {
    std::vector<Matrix> Zx, Ze;             // t = 0..N, Zx_N = Q_N, Ze_N = 0
    std::vector<Matrix> Pe, Pxh, Pxhe, Pexh; // t = 0..N, Pe_0 = Omega_x0
    int iterations = 0;
    double gain_delta = 0.0;
    bool converged = false;
};

struct LqsSolution {
    GainSchedule gains;
    LqsSolverState state;
};

// Alternates a backward control sweep
//   L_t = (R + B^T Zx_{t+1} B + sum_i C_i^T (Zx_{t+1} + Ze_{t+1}) C_i)^{-1}
//         B^T Zx_{t+1} A
// with a forward filter sweep
//   K_t = A Pe_t H^T (H Pe_t H^T + Omega_omega
//         + sum_i D_i (Pe + Pxh + Pxhe + Pexh)_t D_i^T)^{-1}
// until the gains move less than opts.tol or max_iters is reached. The
// warm start is the purely additive filter (C_i, D_i ignored), so the
// degenerate case C = D = 0 reproduces the LQG solution immediately.
// Non-convergence is reported through state.converged, not an error:
// the inverse search must still be able to score such points.
LqsSolution lqs_gains(const SystemModel& sys, const CostMatrices& cost,
                      const NoiseOperators& noise, const LqsOptions& opts = {});

// Moment propagation under signal-dependent noise. On top of the LQG
// propagation, the state block picks up the control-noise outer products
//   sum_i C_i L_t (cov(x_hat) + E[x_hat]E[x_hat]^T) L_t^T C_i^T
// and the estimate block the state-noise ones
//   sum_i K_t D_i (cov(x) + E[x]E[x]^T) D_i^T K_t^T
// plus Omega_eta, so the mean now feeds back into the covariance.
MomentTrajectory lqs_propagate_moments(const SystemModel& sys, const GainSchedule& gains,
                                       const NoiseOperators& noise);

} // namespace isoc
