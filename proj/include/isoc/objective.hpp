#pragma once

#include "isoc/lqg.hpp"

namespace isoc {

enum class CovMode { Full, Diagonal };

// Weights of the fit score. w_mean has one entry per measured channel;
// w_cov has n_measured entries in Diagonal mode and n_measured^2
// (row-major over (i, j)) in Full mode.
struct ObjectiveConfig {
    Vector w_mean;
    Vector w_cov;
    CovMode mode = CovMode::Diagonal;

    void validate(int n_measured) const;
};

// Per-channel variance-accounted-for of predicted means against the
// ground truth:
//   1 - sum_t (pred - truth)^2 / sum_t (truth - time_mean(truth))^2.
// A channel whose truth is constant over time has no variance to
// account for; its entry is returned as NaN and later dropped from the
// fit score together with its weight mass.
Vector vaf_mean(const std::vector<Vector>& predicted, const GroundTruthMoments& truth);

// Same statistic applied entrywise to the covariance trajectories.
Matrix vaf_cov(const std::vector<Matrix>& predicted, const GroundTruthMoments& truth);

// Weighted combination
//   (w_mean . m_vaf + w_cov . cov_vaf) / (|w_mean|_1 + |w_cov|_1)
// over the defined entries; always <= 1, with 1 at a perfect fit.
// Returns -inf if every weighted entry is undefined.
double fit_score(const Vector& m_vaf, const Matrix& omega_vaf, const ObjectiveConfig& cfg);

struct FitReport {
    Vector m_vaf;
    Matrix omega_vaf;
    double score = 0.0;
    CovMode mode = CovMode::Diagonal;
};

FitReport evaluate_fit(const MomentTrajectory& traj, const Matrix& M,
                       const GroundTruthMoments& truth, const ObjectiveConfig& cfg);

// Relative parameter errors against ground truth. Cost weights are only
// identifiable up to a common positive scale, so they are compared after
// normalizing both vectors by the entry at normalizer_index:
//   delta_s[i] = |1 - (s_est[i]/s_true[i]) * (s_true[norm]/s_est[norm])|
//   delta_sigma[i] = |1 - sigma_est[i]/sigma_true[i]|
// Entries whose ground truth is zero cannot be expressed as a ratio; the
// raw estimate is reported instead and flagged.
struct ParameterErrors {
    Vector delta_s;
    Vector delta_sigma;
    std::vector<bool> s_raw;
    std::vector<bool> sigma_raw;
};

ParameterErrors parameter_errors(const Vector& s_est, const Vector& s_true,
                                 const Vector& sigma_est, const Vector& sigma_true,
                                 int normalizer_index = 0);

} // namespace isoc
