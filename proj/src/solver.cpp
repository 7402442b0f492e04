#include "isoc/solver.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "isoc/parallel.hpp"

namespace isoc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

} // namespace

void GridSearchConfig::validate(int dim) const {
    if (lower.size() != dim || upper.size() != dim)
        throw InvalidConfig("grid bounds must match the free-parameter count");
    for (int i = 0; i < dim; ++i) {
        if (!(lower[i] >= 0.0) || !(upper[i] >= lower[i]) || !std::isfinite(upper[i]))
            throw InvalidConfig("grid bounds must satisfy 0 <= lower <= upper < inf");
    }
    if (grid_points < 2)
        throw InvalidConfig("grid_points must be >= 2");
    if (max_iterations < 1)
        throw InvalidConfig("max_iterations must be >= 1");
    if (!(shrink_rate > 1.0) || !(shrink_trigger > 0.0) || !(stop_threshold > 0.0))
        throw InvalidConfig("shrink_rate must exceed 1 and thresholds must be positive");
    std::vector<bool> covered(dim, false);
    for (const auto& subset : subsets) {
        if (subset.empty())
            throw InvalidConfig("parameter subsets must be non-empty");
        for (int idx : subset) {
            if (idx < 0 || idx >= dim)
                throw InvalidConfig("subset index out of range");
            covered[idx] = true;
        }
    }
    for (int i = 0; i < dim; ++i)
        if (!covered[i])
            throw InvalidConfig("every free parameter must appear in a subset");
}

GridSearchResult grid_search(const Vector& theta0, const GridSearchConfig& cfg,
                             const ObjectiveFn& objective, int workers,
                             std::vector<GridTraceRecord>* trace, int outer_iteration,
                             const std::string& step_tag) {
    const int dim = static_cast<int>(theta0.size());
    cfg.validate(dim);
    const int npoints = cfg.grid_points;

    Vector incumbent = theta0;
    double incumbent_score = kNegInf;
    double gamma = 2.0;
    long total_evals = 0;

    // Score after each completed pass; out-of-range reads count as -inf,
    // so the two-lag stop test cannot fire before pass three.
    std::vector<double> pass_score;
    auto score_at = [&](int v) {
        return (v >= 1 && v <= static_cast<int>(pass_score.size())) ? pass_score[v - 1]
                                                                    : kNegInf;
    };

    int v = 1;
    for (;; ++v) {
        for (std::size_t subset_idx = 0; subset_idx < cfg.subsets.size(); ++subset_idx) {
            const auto& subset = cfg.subsets[subset_idx];
            const int sdim = static_cast<int>(subset.size());

            // Per-coordinate candidate values: npoints equally spaced
            // across the incumbent-centered window, clamped below at 0.
            std::vector<std::vector<double>> values(sdim);
            for (int k = 0; k < sdim; ++k) {
                const int i = subset[k];
                const double half = (cfg.upper[i] - cfg.lower[i]) / gamma;
                const double lo = std::max(0.0, incumbent[i] - half);
                const double hi = incumbent[i] + half;
                values[k].resize(npoints);
                for (int j = 0; j < npoints; ++j)
                    values[k][j] = lo + (hi - lo) * j / (npoints - 1);
            }

            long grid_size = 1;
            for (int k = 0; k < sdim; ++k)
                grid_size *= npoints;
            const long candidate_count = grid_size + (cfg.elitism ? 1 : 0);

            // Candidate j in lexicographic order, first subset coordinate
            // slowest; index grid_size (when present) is the incumbent.
            auto candidate = [&](long j) {
                Vector theta = incumbent;
                if (j < grid_size) {
                    long rest = j;
                    for (int k = sdim - 1; k >= 0; --k) {
                        theta[subset[k]] = values[k][rest % npoints];
                        rest /= npoints;
                    }
                }
                return theta;
            };

            std::vector<double> scores(candidate_count, kNegInf);
            parallel_for_index(candidate_count, workers, [&](long j) {
                const double s = objective(candidate(j));
                scores[j] = std::isnan(s) ? kNegInf : s;
            });
            total_evals += candidate_count;

            long best = 0;
            for (long j = 1; j < candidate_count; ++j)
                if (scores[j] > scores[best])
                    best = j;
            incumbent = candidate(best);
            incumbent_score = scores[best];

            if (trace) {
                // Candidate records carry no evaluation count; the
                // summary record accounts for the whole subset pass.
                if (cfg.verbose_trace)
                    for (long j = 0; j < candidate_count; ++j)
                        trace->push_back({outer_iteration, step_tag, v,
                                          static_cast<int>(subset_idx), scores[j],
                                          candidate(j), 0, j});
                trace->push_back({outer_iteration, step_tag, v, static_cast<int>(subset_idx),
                                  incumbent_score, incumbent, candidate_count});
            }
        }

        pass_score.push_back(incumbent_score);
        // NaN from inf - inf compares false, which is the intended
        // "no information yet" behavior for the first passes.
        if (std::abs(score_at(v) - score_at(v - 1)) < cfg.shrink_trigger)
            gamma *= cfg.shrink_rate;

        const bool settled = std::abs(score_at(v) - score_at(v - 1)) < cfg.stop_threshold &&
                             std::abs(score_at(v) - score_at(v - 2)) < cfg.stop_threshold;
        if (v + 1 > cfg.max_iterations || settled)
            break;
    }

    return {incumbent, incumbent_score, gamma, v, total_evals};
}

void IsocConfig::validate(const ModelBundle& bundle) const {
    bundle.validate();
    s_grid.validate(bundle.layout.free_s_count());
    sigma_grid.validate(bundle.layout.free_sigma_count());
    if (!(outer_shrink > 1.0) || outer_iterations < 1)
        throw InvalidConfig("outer_shrink must exceed 1 and outer_iterations be >= 1");
    const int nbar = bundle.system.n_measured();
    s_grid.objective.validate(nbar);
    sigma_grid.objective.validate(nbar);
}

double evaluate_candidate(const Vector& theta_s, const Vector& theta_sigma,
                          const ModelBundle& bundle, ModelKind kind, const LqsOptions& lqs,
                          const GroundTruthMoments& truth, const ObjectiveConfig& objective) {
    if ((theta_s.size() && theta_s.minCoeff() < 0.0) ||
        (theta_sigma.size() && theta_sigma.minCoeff() < 0.0))
        return kNegInf;
    try {
        CostModel cost = bundle.cost;
        cost.s = apply_free_s(bundle.cost, bundle.layout, theta_s);
        const NoiseModel noise = with_noise_scales(
            bundle.noise, apply_free_sigma(bundle.noise, bundle.layout, theta_sigma));

        const CostMatrices cm = assemble_cost(cost, bundle.system.n(), bundle.system.m());
        const NoiseOperators ops = assemble_noise(noise, bundle.system.B, bundle.system.H);

        MomentTrajectory traj;
        if (kind == ModelKind::Lqg) {
            traj = lqg_propagate_moments(bundle.system, lqg_gains(bundle.system, cm, ops), ops);
        } else {
            // A non-converged fixed point still yields gains worth scoring.
            const LqsSolution sol = lqs_gains(bundle.system, cm, ops, lqs);
            traj = lqs_propagate_moments(bundle.system, sol.gains, ops);
        }
        const FitReport fit = evaluate_fit(traj, bundle.system.M, truth, objective);
        return std::isnan(fit.score) ? kNegInf : fit.score;
    } catch (const Error&) {
        return kNegInf;
    }
}

IsocResult isoc_solve(const GroundTruthMoments& truth, const ModelBundle& bundle,
                      const IsocConfig& cfg, int workers) {
    cfg.validate(bundle);
    truth.validate();
    if (truth.steps() != bundle.system.horizon ||
        truth.channels() != bundle.system.n_measured())
        throw InvalidConfig("ground truth does not match the model horizon or channels");

    const auto start = std::chrono::steady_clock::now();
    IsocResult result;

    GridSearchConfig s_grid = cfg.s_grid;
    GridSearchConfig sigma_grid = cfg.sigma_grid;

    Vector theta_s = 0.5 * (s_grid.lower + s_grid.upper);
    Vector theta_sigma = Vector::Zero(sigma_grid.lower.size());

    for (int l = 1; l <= cfg.outer_iterations; ++l) {
        {
            const Vector lambda = theta_sigma;
            auto objective = [&](const Vector& theta) {
                return evaluate_candidate(theta, lambda, bundle, cfg.kind, cfg.lqs, truth,
                                          s_grid.objective);
            };
            const auto r = grid_search(theta_s, s_grid, objective, workers, &result.trace, l, "s");
            theta_s = r.theta;
            result.evaluations += r.evaluations;
        }
        {
            const Vector lambda = theta_s;
            auto objective = [&](const Vector& theta) {
                return evaluate_candidate(lambda, theta, bundle, cfg.kind, cfg.lqs, truth,
                                          sigma_grid.objective);
            };
            const auto r =
                grid_search(theta_sigma, sigma_grid, objective, workers, &result.trace, l, "sigma");
            theta_sigma = r.theta;
            result.evaluations += r.evaluations;
        }
        for (int i = 0; i < s_grid.upper.size(); ++i)
            s_grid.upper[i] =
                s_grid.lower[i] + (s_grid.upper[i] - s_grid.lower[i]) / cfg.outer_shrink;
        for (int i = 0; i < sigma_grid.upper.size(); ++i)
            sigma_grid.upper[i] =
                sigma_grid.lower[i] + (sigma_grid.upper[i] - sigma_grid.lower[i]) / cfg.outer_shrink;
    }

    result.theta_s = theta_s;
    result.theta_sigma = theta_sigma;
    result.s = apply_free_s(bundle.cost, bundle.layout, theta_s);
    result.sigma = apply_free_sigma(bundle.noise, bundle.layout, theta_sigma);

    // Final report at the recovered parameters (scored with the
    // noise-step weights, the last ones used in the search).
    CostModel cost = bundle.cost;
    cost.s = result.s;
    const NoiseModel noise = with_noise_scales(bundle.noise, result.sigma);
    const CostMatrices cm = assemble_cost(cost, bundle.system.n(), bundle.system.m());
    const NoiseOperators ops = assemble_noise(noise, bundle.system.B, bundle.system.H);
    MomentTrajectory traj;
    if (cfg.kind == ModelKind::Lqg)
        traj = lqg_propagate_moments(bundle.system, lqg_gains(bundle.system, cm, ops), ops);
    else
        traj = lqs_propagate_moments(bundle.system,
                                     lqs_gains(bundle.system, cm, ops, cfg.lqs).gains, ops);
    result.fit = evaluate_fit(traj, bundle.system.M, truth, cfg.sigma_grid.objective);

    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

} // namespace isoc
