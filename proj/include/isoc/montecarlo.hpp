#pragma once

#include <cstdint>
#include <vector>

#include "isoc/lqg.hpp"
#include "isoc/rng.hpp"

namespace isoc {

// Measured-state realizations M x_t, stored sample-major so each rollout
// owns a contiguous slice and samples can be filled on any worker.
struct TrajectoryBatch {
    int sample_count = 0;
    int steps = 0;     // N, trajectories store t = 0..N
    int state_dim = 0; // n_measured
    std::uint64_t seed = 0;
    ModelKind mode = ModelKind::Lqg;
    std::vector<double> data; // (k, t, i) -> data[(k*(steps+1) + t)*state_dim + i]

    double& at(int k, int t, int i) {
        return data[(static_cast<std::size_t>(k) * (steps + 1) + t) * state_dim + i];
    }
    double at(int k, int t, int i) const {
        return data[(static_cast<std::size_t>(k) * (steps + 1) + t) * state_dim + i];
    }
    Eigen::Map<const Vector> state(int k, int t) const {
        return {data.data() + (static_cast<std::size_t>(k) * (steps + 1) + t) * state_dim,
                state_dim};
    }
};

// Simulates the closed estimation-control loop: per sample draw
// x_0 ~ N(x0_mean, Omega_x0), then per step the additive process and
// observation noises (plus the multiplicative ones in Lqs mode), apply
// u_t = -L_t x_hat_t and the filter update, and record M x_t. Every
// sample consumes its own counter-based streams, so output is a pure
// function of (seed, sample_count, mode) regardless of worker count.
TrajectoryBatch sample_trajectories(const SystemModel& sys, const GainSchedule& gains,
                                    const NoiseOperators& noise, int sample_count,
                                    std::uint64_t seed, ModelKind mode, int workers = 1);

// Sample mean and unbiased (K-1) sample covariance per time step.
// Throws InsufficientSamples for fewer than two samples.
GroundTruthMoments estimate_moments(const TrajectoryBatch& batch);

} // namespace isoc
