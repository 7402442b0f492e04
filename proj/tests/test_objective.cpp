#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "isoc/objective.hpp"

using namespace isoc;

namespace {

GroundTruthMoments scalar_truth(std::initializer_list<double> means,
                                std::initializer_list<double> vars) {
    GroundTruthMoments truth;
    for (double m : means)
        truth.mean.push_back(Vector::Constant(1, m));
    for (double v : vars)
        truth.cov.push_back(Matrix::Constant(1, 1, v));
    return truth;
}

} // namespace

TEST_CASE("vaf of a trajectory against itself is exactly one") {
    const auto truth = scalar_truth({0.0, 1.0, 2.0}, {0.5, 0.6, 0.7});
    CHECK(vaf_mean(truth.mean, truth)[0] == 1.0);
    CHECK(vaf_cov(truth.cov, truth)(0, 0) == 1.0);
}

TEST_CASE("hand-computed mean VAF") {
    // truth (0,1,2) vs constant zero prediction:
    // 1 - (0+1+4)/((0-1)^2+(1-1)^2+(2-1)^2) = 1 - 5/2 = -1.5
    const auto truth = scalar_truth({0.0, 1.0, 2.0}, {1.0, 1.0, 1.0});
    const std::vector<Vector> zeros(3, Vector::Zero(1));
    CHECK(vaf_mean(zeros, truth)[0] == doctest::Approx(-1.5).epsilon(1e-15));
}

TEST_CASE("constant truth channels are flagged undefined") {
    const auto truth = scalar_truth({1.0, 1.0, 1.0}, {0.5, 0.5, 0.5});
    const std::vector<Vector> pred(3, Vector::Constant(1, 1.0));
    CHECK(std::isnan(vaf_mean(pred, truth)[0]));
    const std::vector<Matrix> predc(3, Matrix::Constant(1, 1, 0.4));
    CHECK(std::isnan(vaf_cov(predc, truth)(0, 0)));
}

TEST_CASE("fit score combines and normalizes the VAF entries") {
    ObjectiveConfig cfg;
    cfg.w_mean = Vector::Ones(2);
    cfg.w_cov = Vector::Zero(2);
    cfg.mode = CovMode::Diagonal;

    Vector m_vaf(2);
    m_vaf << 1.0, 0.0;
    const Matrix omega_vaf = Matrix::Ones(2, 2);
    CHECK(fit_score(m_vaf, omega_vaf, cfg) == doctest::Approx(0.5));

    SUBCASE("perfect fit scores one for any valid weights") {
        cfg.w_mean << 0.9, 0.9;
        cfg.w_cov << 0.1, 0.1;
        m_vaf.setOnes();
        CHECK(fit_score(m_vaf, omega_vaf, cfg) == doctest::Approx(1.0));
    }
    SUBCASE("invariant to joint weight rescaling") {
        cfg.w_mean << 0.9, 0.2;
        cfg.w_cov << 0.1, 0.4;
        m_vaf << 0.7, -0.3;
        Matrix ov = omega_vaf;
        ov.diagonal() << 0.2, 0.9;
        const double a = fit_score(m_vaf, ov, cfg);
        cfg.w_mean *= 13.0;
        cfg.w_cov *= 13.0;
        CHECK(fit_score(m_vaf, ov, cfg) == doctest::Approx(a).epsilon(1e-12));
    }
    SUBCASE("score never exceeds one") {
        cfg.w_mean << 0.3, 0.7;
        cfg.w_cov << 0.5, 0.1;
        m_vaf << 1.0, 1.0;
        Matrix ov = Matrix::Ones(2, 2);
        CHECK(fit_score(m_vaf, ov, cfg) <= 1.0);
        ov.diagonal() << -3.0, 0.5;
        m_vaf << 0.99, -7.0;
        CHECK(fit_score(m_vaf, ov, cfg) <= 1.0);
    }
    SUBCASE("all-zero weights are rejected") {
        cfg.w_mean.setZero();
        cfg.w_cov.setZero();
        CHECK_THROWS_AS(fit_score(m_vaf, omega_vaf, cfg), InvalidConfig);
    }
    SUBCASE("undefined entries drop their weight mass") {
        cfg.w_mean << 1.0, 1.0;
        cfg.w_cov.setZero();
        m_vaf << 1.0, std::numeric_limits<double>::quiet_NaN();
        CHECK(fit_score(m_vaf, omega_vaf, cfg) == doctest::Approx(1.0));
    }
}

TEST_CASE("full covariance mode weights off-diagonal entries") {
    ObjectiveConfig cfg;
    cfg.w_mean = Vector::Zero(2);
    cfg.w_cov = Vector::Zero(4);
    cfg.w_cov[1] = 1.0; // entry (0, 1) only
    cfg.mode = CovMode::Full;
    Matrix ov(2, 2);
    ov << 1.0, 0.25, 0.25, 1.0;
    CHECK(fit_score(Vector::Zero(2), ov, cfg) == doctest::Approx(0.25));
}

TEST_CASE("parameter errors") {
    Vector s_true(3), sigma_true(2);
    s_true << 1.0, 0.04, 2.0e-7;
    sigma_true << 1.5, 0.02;

    SUBCASE("scaled weight vectors have zero error") {
        const Vector s_est = 3.7 * s_true;
        const auto err = parameter_errors(s_est, s_true, sigma_true, sigma_true, 0);
        CHECK(err.delta_s.cwiseAbs().maxCoeff() < 1e-12);
        CHECK(err.delta_sigma.cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("renormalizing by another index keeps zeros at a scaled truth") {
        const Vector s_est = 0.2 * s_true;
        const auto err = parameter_errors(s_est, s_true, sigma_true, sigma_true, 1);
        CHECK(err.delta_s.cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("zero ground truth reports raw values") {
        Vector sig_t(2), sig_e(2);
        sig_t << 0.0, 2.0;
        sig_e << 0.3, 2.0;
        const auto err = parameter_errors(s_true, s_true, sig_e, sig_t, 0);
        CHECK(err.sigma_raw[0]);
        CHECK(err.delta_sigma[0] == doctest::Approx(0.3));
        CHECK_FALSE(err.sigma_raw[1]);
        CHECK(err.delta_sigma[1] == doctest::Approx(0.0));
    }
    SUBCASE("zero normalizer is rejected") {
        Vector s_est = s_true;
        s_est[0] = 0.0;
        CHECK_THROWS_AS(parameter_errors(s_est, s_true, sigma_true, sigma_true, 0),
                        InvalidNormalizer);
        CHECK_THROWS_AS(parameter_errors(s_true, s_true, sigma_true, sigma_true, 7),
                        InvalidNormalizer);
    }
    SUBCASE("relative sigma error") {
        Vector sig_e = sigma_true;
        sig_e[0] = 1.65; // 10% high
        const auto err = parameter_errors(s_true, s_true, sig_e, sigma_true, 0);
        CHECK(err.delta_sigma[0] == doctest::Approx(0.1));
    }
}
