#include "isoc/montecarlo.hpp"

#include "isoc/parallel.hpp"

namespace isoc {

TrajectoryBatch sample_trajectories(const SystemModel& sys, const GainSchedule& gains,
                                    const NoiseOperators& noise, int sample_count,
                                    std::uint64_t seed, ModelKind mode, int workers) {
    gains.validate(sys);
    if (sample_count < 1)
        throw InvalidConfig("sample_count must be >= 1");

    const int N = sys.horizon;
    const int n = sys.n();
    const int r = sys.r();
    const int c = static_cast<int>(noise.C.size());
    const int d = static_cast<int>(noise.D.size());
    const bool lqs = mode == ModelKind::Lqs;
    const bool has_eta = lqs && noise.Omega_eta.cwiseAbs().maxCoeff() > 0.0;

    // Additive noises are drawn through symmetric square roots of the
    // assembled covariances, which yields the same distributions as the
    // scale-matrix form.
    const Matrix sqrt_x0 = psd_sqrt(sys.Omega_x0);
    const Matrix sqrt_xi = psd_sqrt(noise.Omega_xi);
    const Matrix sqrt_omega = psd_sqrt(noise.Omega_omega);
    const Matrix sqrt_eta = has_eta ? psd_sqrt(noise.Omega_eta) : Matrix();

    TrajectoryBatch batch;
    batch.sample_count = sample_count;
    batch.steps = N;
    batch.state_dim = sys.n_measured();
    batch.seed = seed;
    batch.mode = mode;
    batch.data.resize(static_cast<std::size_t>(sample_count) * (N + 1) * batch.state_dim);

    parallel_for_index(sample_count, workers, [&](long k) {
        const auto sample = static_cast<std::uint32_t>(k);
        Vector zn(n), zr(r);

        NormalStream init(seed, sample, 0, rng_channel::initial_state);
        init.fill(zn);
        Vector x = sys.x0_mean + sqrt_x0 * zn;
        Vector xh = sys.x0_mean;

        for (int t = 0; t <= N; ++t) {
            const Vector measured = sys.M * x;
            for (int i = 0; i < batch.state_dim; ++i)
                batch.at(static_cast<int>(k), t, i) = measured[i];
            if (t == N)
                break;
            const auto step = static_cast<std::uint32_t>(t);

            NormalStream proc(seed, sample, step, rng_channel::process);
            proc.fill(zn);
            NormalStream obs(seed, sample, step, rng_channel::observation);
            obs.fill(zr);

            const Vector u = -gains.L[t] * xh;
            Vector x_next = sys.A * x + sys.B * u + sqrt_xi * zn;
            Vector y = sys.H * x + sqrt_omega * zr;
            if (lqs) {
                NormalStream eps(seed, sample, step, rng_channel::control_dependent);
                for (int i = 0; i < c; ++i)
                    x_next += eps.next() * (noise.C[i] * u);
                NormalStream epsil(seed, sample, step, rng_channel::state_dependent);
                for (int i = 0; i < d; ++i)
                    y += epsil.next() * (noise.D[i] * x);
            }
            Vector xh_next = sys.A * xh + sys.B * u + gains.K[t] * (y - sys.H * xh);
            if (has_eta) {
                Vector ze(n);
                NormalStream eta(seed, sample, step, rng_channel::internal_model);
                eta.fill(ze);
                xh_next += sqrt_eta * ze;
            }
            x = std::move(x_next);
            xh = std::move(xh_next);
        }
    });
    return batch;
}

GroundTruthMoments estimate_moments(const TrajectoryBatch& batch) {
    if (batch.sample_count < 2)
        throw InsufficientSamples("covariance estimation needs at least two samples");
    const int K = batch.sample_count;
    const int T = batch.steps + 1;
    const int nb = batch.state_dim;

    GroundTruthMoments out;
    out.mean.assign(T, Vector::Zero(nb));
    out.cov.assign(T, Matrix::Zero(nb, nb));
    for (int t = 0; t < T; ++t) {
        Vector& mu = out.mean[t];
        for (int k = 0; k < K; ++k)
            mu += batch.state(k, t);
        mu /= K;
        Matrix& cov = out.cov[t];
        for (int k = 0; k < K; ++k) {
            const Vector dev = batch.state(k, t) - mu;
            cov.noalias() += dev * dev.transpose();
        }
        cov /= (K - 1);
    }
    return out;
}

} // namespace isoc
