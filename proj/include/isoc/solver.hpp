#pragma once

#include <functional>
#include <string>
#include <vector>

#include "isoc/lqs.hpp"
#include "isoc/montecarlo.hpp"
#include "isoc/objective.hpp"

namespace isoc {

// One shrinking, subset-structured grid search (the inner optimizer of
// the alternating scheme). Bounds are per free parameter; subsets are
// index sets into the free-parameter vector, searched sequentially with
// immediate incumbent updates. The half-width of the search window
// around the incumbent starts at (upper - lower)/2 and divides by
// shrink_rate whenever a full subset pass improves the score by less
// than shrink_trigger. The pass loop stops after max_iterations or once
// the score has moved less than stop_threshold over the last two and
// three passes.
struct GridSearchConfig {
    Vector lower, upper;
    int grid_points = 8;
    std::vector<std::vector<int>> subsets;
    double shrink_rate = 2.0;    // multiplies the window divisor gamma
    double shrink_trigger = 0.01;
    double stop_threshold = 0.001;
    int max_iterations = 20;
    ObjectiveConfig objective;
    // Adds the incumbent to every candidate list so the best score never
    // regresses between passes. Off reproduces the bare grid.
    bool elitism = true;
    // Also record every candidate, not just per-subset summaries. Large
    // searches evaluate millions of points, so this is off by default.
    bool verbose_trace = false;

    void validate(int dim) const;
};

// candidate < 0 marks a per-subset summary record (best_score is the
// incumbent's); otherwise the record is one scored candidate.
struct GridTraceRecord {
    int outer_iteration = 0; // l, 0 when called standalone
    std::string step;        // "s", "sigma", or caller-supplied tag
    int pass = 0;            // v
    int subset = 0;
    double best_score = 0.0;
    Vector incumbent;
    long evaluations = 0;
    long candidate = -1;
};

struct GridSearchResult {
    Vector theta;
    double best_score = 0.0;
    double final_gamma = 0.0;
    int passes = 0;
    long evaluations = 0;
};

using ObjectiveFn = std::function<double(const Vector&)>;

// objective must be pure and must not throw; failing candidates are expected
// to come back as -inf. Candidates within one subset grid are evaluated
// in parallel; the argmax breaks ties toward the smallest candidate index
// in grid order, so the result does not depend on the worker count.
GridSearchResult grid_search(const Vector& theta0, const GridSearchConfig& cfg,
                             const ObjectiveFn& objective, int workers,
                             std::vector<GridTraceRecord>* trace = nullptr,
                             int outer_iteration = 0, const std::string& step_tag = "");

// Alternating inverse solver configuration. outer_shrink tightens every
// upper bound toward its lower bound after each outer iteration.
struct IsocConfig {
    GridSearchConfig s_grid;
    GridSearchConfig sigma_grid;
    double outer_shrink = 2.0;
    int outer_iterations = 3;
    ModelKind kind = ModelKind::Lqg;
    LqsOptions lqs;

    void validate(const ModelBundle& bundle) const;
};

struct IsocResult {
    Vector s;          // full cost-weight vector
    Vector sigma;      // full flattened noise-scale vector
    Vector theta_s;    // free cost weights
    Vector theta_sigma;// free noise scales
    FitReport fit;
    std::vector<GridTraceRecord> trace;
    long evaluations = 0;
    double wall_seconds = 0.0;
};

// Scores one candidate assignment of the free parameters: assembles the
// model, solves the forward problem, propagates moments, and evaluates
// the fit against the ground truth. Any assembly or solver failure maps
// to -inf so the surrounding search never aborts on a bad grid point.
double evaluate_candidate(const Vector& theta_s, const Vector& theta_sigma,
                          const ModelBundle& bundle, ModelKind kind, const LqsOptions& lqs,
                          const GroundTruthMoments& truth, const ObjectiveConfig& objective);

// The alternating scheme: starting from all-zero noise scales and
// midpoint cost weights, each outer iteration runs a cost-weight grid
// search against the current noise scales, then a noise-scale search
// against the updated weights, then shrinks every upper bound.
IsocResult isoc_solve(const GroundTruthMoments& truth, const ModelBundle& bundle,
                      const IsocConfig& cfg, int workers);

} // namespace isoc
