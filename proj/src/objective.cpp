#include "isoc/objective.hpp"

#include <cmath>
#include <limits>

namespace isoc {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// VAF of one scalar time series; NaN when the truth carries no variance.
double vaf_series(const std::vector<double>& pred, const std::vector<double>& truth) {
    const std::size_t T = truth.size();
    double mean = 0.0;
    for (double v : truth)
        mean += v;
    mean /= static_cast<double>(T);
    double residual = 0.0, total = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        residual += (pred[t] - truth[t]) * (pred[t] - truth[t]);
        total += (truth[t] - mean) * (truth[t] - mean);
    }
    if (total == 0.0)
        return kNan;
    return 1.0 - residual / total;
}

} // namespace

void ObjectiveConfig::validate(int n_measured) const {
    if (w_mean.size() != n_measured)
        throw InvalidConfig("w_mean must have one entry per measured channel");
    const int expect = mode == CovMode::Diagonal ? n_measured : n_measured * n_measured;
    if (w_cov.size() != expect)
        throw InvalidConfig("w_cov has wrong length for the covariance mode");
    if (w_mean.minCoeff() < 0.0 || w_cov.minCoeff() < 0.0)
        throw InvalidConfig("objective weights must be nonnegative");
    if (w_mean.lpNorm<1>() + w_cov.lpNorm<1>() <= 0.0)
        throw InvalidConfig("objective weights must not all be zero");
}

Vector vaf_mean(const std::vector<Vector>& predicted, const GroundTruthMoments& truth) {
    if (predicted.size() != truth.mean.size())
        throw DimensionError("predicted and truth trajectories differ in length");
    const int nb = truth.channels();
    const std::size_t T = truth.mean.size();
    Vector out(nb);
    std::vector<double> p(T), q(T);
    for (int i = 0; i < nb; ++i) {
        for (std::size_t t = 0; t < T; ++t) {
            p[t] = predicted[t][i];
            q[t] = truth.mean[t][i];
        }
        out[i] = vaf_series(p, q);
    }
    return out;
}

Matrix vaf_cov(const std::vector<Matrix>& predicted, const GroundTruthMoments& truth) {
    if (predicted.size() != truth.cov.size())
        throw DimensionError("predicted and truth trajectories differ in length");
    const int nb = truth.channels();
    const std::size_t T = truth.cov.size();
    Matrix out(nb, nb);
    std::vector<double> p(T), q(T);
    for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) {
            for (std::size_t t = 0; t < T; ++t) {
                p[t] = predicted[t](i, j);
                q[t] = truth.cov[t](i, j);
            }
            out(i, j) = vaf_series(p, q);
        }
    return out;
}

double fit_score(const Vector& m_vaf, const Matrix& omega_vaf, const ObjectiveConfig& cfg) {
    cfg.validate(static_cast<int>(m_vaf.size()));
    const int nb = static_cast<int>(m_vaf.size());
    double numerator = 0.0, weight_mass = 0.0;
    auto add = [&](double weight, double vaf) {
        if (weight == 0.0 || std::isnan(vaf))
            return;
        numerator += weight * vaf;
        weight_mass += std::abs(weight);
    };
    for (int i = 0; i < nb; ++i)
        add(cfg.w_mean[i], m_vaf[i]);
    if (cfg.mode == CovMode::Diagonal) {
        for (int i = 0; i < nb; ++i)
            add(cfg.w_cov[i], omega_vaf(i, i));
    } else {
        for (int i = 0; i < nb; ++i)
            for (int j = 0; j < nb; ++j)
                add(cfg.w_cov[i * nb + j], omega_vaf(i, j));
    }
    if (weight_mass == 0.0)
        return kNegInf;
    return numerator / weight_mass;
}

FitReport evaluate_fit(const MomentTrajectory& traj, const Matrix& M,
                       const GroundTruthMoments& truth, const ObjectiveConfig& cfg) {
    FitReport report;
    report.m_vaf = vaf_mean(traj.measured_means(M), truth);
    report.omega_vaf = vaf_cov(traj.measured_covs(M), truth);
    report.mode = cfg.mode;
    report.score = fit_score(report.m_vaf, report.omega_vaf, cfg);
    return report;
}

ParameterErrors parameter_errors(const Vector& s_est, const Vector& s_true,
                                 const Vector& sigma_est, const Vector& sigma_true,
                                 int normalizer_index) {
    if (s_est.size() != s_true.size() || sigma_est.size() != sigma_true.size())
        throw DimensionError("parameter vectors differ in length");
    if (normalizer_index < 0 || normalizer_index >= s_est.size())
        throw InvalidNormalizer("normalizer index out of range");
    if (s_est[normalizer_index] == 0.0 || s_true[normalizer_index] == 0.0)
        throw InvalidNormalizer("normalizer entry must be nonzero");

    ParameterErrors out;
    out.delta_s.resize(s_est.size());
    out.s_raw.assign(s_est.size(), false);
    const double scale = s_true[normalizer_index] / s_est[normalizer_index];
    for (int i = 0; i < s_est.size(); ++i) {
        if (s_true[i] == 0.0) {
            out.delta_s[i] = s_est[i] * scale; // rescaled raw estimate
            out.s_raw[i] = true;
        } else {
            out.delta_s[i] = std::abs(1.0 - s_est[i] / s_true[i] * scale);
        }
    }
    out.delta_sigma.resize(sigma_est.size());
    out.sigma_raw.assign(sigma_est.size(), false);
    for (int i = 0; i < sigma_est.size(); ++i) {
        if (sigma_true[i] == 0.0) {
            out.delta_sigma[i] = sigma_est[i];
            out.sigma_raw[i] = true;
        } else {
            out.delta_sigma[i] = std::abs(1.0 - sigma_est[i] / sigma_true[i]);
        }
    }
    return out;
}

} // namespace isoc
