// Benchmark of the two OpenMP kernels against their serial reference
// paths: grid-candidate evaluation and Monte Carlo rollouts.

#include <chrono>
#include <cstdio>

#include "isoc/io.hpp"
#include "isoc/parallel.hpp"

using namespace isoc;

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double time_grid(const ModelBundle& bundle, const GroundTruthMoments& truth, int workers) {
    GridSearchConfig cfg;
    const int dim = bundle.layout.free_sigma_count();
    cfg.lower = Vector::Zero(dim);
    cfg.upper = Vector::Constant(dim, 4.0);
    cfg.grid_points = 4;
    cfg.subsets = {{0, 1, 2, 3}, {4, 5, 6, 7}, {8, 9, 10}, {11, 12, 13}};
    cfg.max_iterations = 2;
    cfg.stop_threshold = 1e-12;
    cfg.shrink_trigger = 1e-12;
    cfg.objective.w_mean = Vector::Constant(4, 0.1);
    cfg.objective.w_cov = Vector::Constant(4, 0.9);

    const Vector theta_s = extract_free_s(bundle.cost, bundle.layout);
    auto objective = [&](const Vector& theta) {
        return evaluate_candidate(theta_s, theta, bundle, ModelKind::Lqg, {}, truth,
                                  cfg.objective);
    };
    const auto start = std::chrono::steady_clock::now();
    grid_search(Vector::Zero(dim), cfg, objective, workers);
    return seconds_since(start);
}

double time_sampler(const ModelBundle& bundle, const GainSchedule& gains,
                    const NoiseOperators& ops, int samples, int workers) {
    const auto start = std::chrono::steady_clock::now();
    sample_trajectories(bundle.system, gains, ops, samples, 42, ModelKind::Lqg, workers);
    return seconds_since(start);
}

} // namespace

int main(int argc, char** argv) {
    const int workers = argc > 1 ? std::atoi(argv[1]) : default_workers();
    const int samples = argc > 2 ? std::atoi(argv[2]) : 200000;

    const ModelBundle bundle = build_reaching_model(ModelKind::Lqg);
    const CostMatrices cm = assemble_cost(bundle.cost, bundle.system.n(), bundle.system.m());
    const NoiseOperators ops = assemble_noise(bundle.noise, bundle.system.B, bundle.system.H);
    const GainSchedule gains = lqg_gains(bundle.system, cm, ops);
    const GroundTruthMoments truth =
        lqg_propagate_moments(bundle.system, gains, ops).measured(bundle.system.M);

    std::printf("kernel            serial [s]   omp x%-2d [s]   speedup\n", workers);

    const double grid_serial = time_grid(bundle, truth, 1);
    const double grid_par = time_grid(bundle, truth, workers);
    std::printf("grid-candidates   %10.3f   %12.3f   %7.2f\n", grid_serial, grid_par,
                grid_serial / grid_par);

    const double mc_serial = time_sampler(bundle, gains, ops, samples, 1);
    const double mc_par = time_sampler(bundle, gains, ops, samples, workers);
    std::printf("mc-rollouts       %10.3f   %12.3f   %7.2f\n", mc_serial, mc_par,
                mc_serial / mc_par);
    return 0;
}
