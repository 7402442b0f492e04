#include "isoc/model.hpp"

#include <cmath>

namespace isoc {

namespace {

void require(bool ok, const char* msg) {
    if (!ok)
        throw DimensionError(msg);
}

} // namespace

void SystemModel::validate() const {
    require(A.rows() == A.cols() && A.rows() > 0, "A must be square and non-empty");
    const int nn = n();
    require(B.rows() == nn && B.cols() > 0, "B must be n x m");
    require(H.cols() == nn && H.rows() > 0, "H must be r x n");
    require(M.rows() > 0 && M.cols() == nn, "M must be n_measured x n");
    require(x0_mean.size() == nn, "x0_mean must have n entries");
    require(Omega_x0.rows() == nn && Omega_x0.cols() == nn, "Omega_x0 must be n x n");
    if (horizon <= 0)
        throw DimensionError("horizon must be positive");
    if (!is_symmetric(Omega_x0) || !is_psd(Omega_x0))
        throw DimensionError("Omega_x0 must be symmetric positive semi-definite");
    // Each row of M must be a distinct standard unit vector.
    std::vector<bool> taken(nn, false);
    for (int i = 0; i < M.rows(); ++i) {
        int hit = -1;
        for (int j = 0; j < nn; ++j) {
            const double v = M(i, j);
            if (v == 0.0)
                continue;
            if (v != 1.0 || hit >= 0)
                throw DimensionError("M rows must be standard unit vectors");
            hit = j;
        }
        if (hit < 0 || taken[hit])
            throw DimensionError("M rows must select distinct states");
        taken[hit] = true;
    }
}

void CostModel::validate(int n, int m) const {
    require(s.size() == weight_count(), "weight vector length must match basis count");
    for (const auto& q : qN_basis)
        require(q.size() == n, "q_N basis vectors must have n entries");
    for (const auto& q : qQ_basis)
        require(q.size() == n, "q_Q basis vectors must have n entries");
    for (const auto& q : qR_basis)
        require(q.size() == m, "q_R basis vectors must have m entries");
    for (int i = 0; i < s.size(); ++i)
        if (!(s[i] >= 0.0))
            throw InvalidCost("cost weights must be nonnegative");
}

void NoiseModel::validate(int n, int m, int r) const {
    require(Sigma_xi.rows() == n, "Sigma_xi must have n rows");
    require(Sigma_omega.rows() == r, "Sigma_omega must have r rows");
    require(static_cast<int>(F.size()) == sigma_u.size(), "sigma_u length must match F count");
    require(static_cast<int>(G.size()) == sigma_x.size(), "sigma_x length must match G count");
    for (const auto& f : F)
        require(f.rows() == m && f.cols() == m, "F matrices must be m x m");
    for (const auto& g : G)
        require(g.rows() == n && g.cols() == n, "G matrices must be n x n");
    if (Omega_eta.size() > 0) {
        require(Omega_eta.rows() == n && Omega_eta.cols() == n, "Omega_eta must be n x n");
        if (!is_symmetric(Omega_eta) || !is_psd(Omega_eta))
            throw DimensionError("Omega_eta must be symmetric positive semi-definite");
    }
    for (int i = 0; i < sigma_u.size(); ++i)
        if (!(sigma_u[i] >= 0.0))
            throw DimensionError("sigma_u entries must be nonnegative");
    for (int i = 0; i < sigma_x.size(); ++i)
        if (!(sigma_x[i] >= 0.0))
            throw DimensionError("sigma_x entries must be nonnegative");
}

void ParameterLayout::validate(int s_count, int sigma_count) const {
    std::vector<bool> seen_s(s_count, false);
    for (int idx : free_s_indices) {
        require(idx >= 0 && idx < s_count, "free s index out of range");
        require(!seen_s[idx], "free s indices must be unique");
        seen_s[idx] = true;
    }
    std::vector<bool> seen_sigma(sigma_count, false);
    for (const auto& group : free_sigma_groups) {
        require(!group.empty(), "sigma groups must be non-empty");
        for (int idx : group) {
            require(idx >= 0 && idx < sigma_count, "free sigma index out of range");
            require(!seen_sigma[idx], "free sigma indices must be unique");
            seen_sigma[idx] = true;
        }
    }
}

void GroundTruthMoments::validate() const {
    if (mean.size() < 2 || mean.size() != cov.size())
        throw DimensionError("moment trajectories need matching length >= 2");
    const int nbar = channels();
    for (const auto& v : mean)
        require(static_cast<int>(v.size()) == nbar, "inconsistent mean dimension");
    for (const auto& c : cov) {
        require(c.rows() == nbar && c.cols() == nbar, "inconsistent covariance dimension");
        if (!is_symmetric(c, 1e-8) || !is_psd(c, 1e-8))
            throw DimensionError("ground-truth covariances must be symmetric PSD");
    }
}

void ModelBundle::validate() const {
    system.validate();
    cost.validate(system.n(), system.m());
    noise.validate(system.n(), system.m(), system.r());
    layout.validate(cost.weight_count(), noise_scale_count(noise));
}

namespace {

// Accumulates the upper triangle and mirrors it, so the result is
// bitwise symmetric regardless of floating-point grouping.
Matrix weighted_outer_sum(const std::vector<Vector>& basis, const Vector& s, int offset, int dim) {
    Matrix out = Matrix::Zero(dim, dim);
    for (std::size_t k = 0; k < basis.size(); ++k) {
        const Vector& q = basis[k];
        const double w = s[offset + static_cast<int>(k)];
        for (int i = 0; i < dim; ++i)
            for (int j = i; j < dim; ++j) {
                const double v = w * (q[i] * q[j]);
                out(i, j) += v;
                if (i != j)
                    out(j, i) = out(i, j);
            }
    }
    return out;
}

} // namespace

CostMatrices assemble_cost(const CostModel& cost, int n, int m) {
    cost.validate(n, m);
    CostMatrices out;
    const int sn = static_cast<int>(cost.qN_basis.size());
    const int sq = static_cast<int>(cost.qQ_basis.size());
    out.QN = weighted_outer_sum(cost.qN_basis, cost.s, 0, n);
    out.Q = weighted_outer_sum(cost.qQ_basis, cost.s, sn, n);
    out.R = weighted_outer_sum(cost.qR_basis, cost.s, sn + sq, m);
    Eigen::SelfAdjointEigenSolver<Matrix> es(out.R, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 1e-12 * out.R.trace())
        throw InvalidCost("assembled R is not positive definite");
    return out;
}

NoiseOperators assemble_noise(const NoiseModel& noise, const Matrix& B, const Matrix& H) {
    noise.validate(static_cast<int>(B.rows()), static_cast<int>(B.cols()),
                   static_cast<int>(H.rows()));
    NoiseOperators out;
    out.Omega_xi = noise.Sigma_xi * noise.Sigma_xi.transpose();
    out.Omega_omega = noise.Sigma_omega * noise.Sigma_omega.transpose();
    out.C.reserve(noise.F.size());
    for (std::size_t i = 0; i < noise.F.size(); ++i)
        out.C.push_back(noise.sigma_u[static_cast<int>(i)] * B * noise.F[i]);
    out.D.reserve(noise.G.size());
    for (std::size_t i = 0; i < noise.G.size(); ++i)
        out.D.push_back(noise.sigma_x[static_cast<int>(i)] * H * noise.G[i]);
    out.Omega_eta = noise.Omega_eta.size() > 0
                        ? noise.Omega_eta
                        : Matrix::Zero(B.rows(), B.rows());
    return out;
}

int noise_scale_count(const NoiseModel& noise) {
    return static_cast<int>(noise.Sigma_xi.size() + noise.Sigma_omega.size() +
                            noise.sigma_u.size() + noise.sigma_x.size());
}

Vector flatten_noise_scales(const NoiseModel& noise) {
    Vector flat(noise_scale_count(noise));
    int at = 0;
    // Eigen stores column-major, so reshaping is the canonical vec().
    flat.segment(at, noise.Sigma_xi.size()) =
        Eigen::Map<const Vector>(noise.Sigma_xi.data(), noise.Sigma_xi.size());
    at += static_cast<int>(noise.Sigma_xi.size());
    flat.segment(at, noise.Sigma_omega.size()) =
        Eigen::Map<const Vector>(noise.Sigma_omega.data(), noise.Sigma_omega.size());
    at += static_cast<int>(noise.Sigma_omega.size());
    flat.segment(at, noise.sigma_u.size()) = noise.sigma_u;
    at += static_cast<int>(noise.sigma_u.size());
    flat.segment(at, noise.sigma_x.size()) = noise.sigma_x;
    return flat;
}

NoiseModel with_noise_scales(const NoiseModel& noise, const Vector& flat) {
    if (flat.size() != noise_scale_count(noise))
        throw DimensionError("flattened noise-scale vector has wrong length");
    NoiseModel out = noise;
    int at = 0;
    Eigen::Map<Vector>(out.Sigma_xi.data(), out.Sigma_xi.size()) =
        flat.segment(at, out.Sigma_xi.size());
    at += static_cast<int>(out.Sigma_xi.size());
    Eigen::Map<Vector>(out.Sigma_omega.data(), out.Sigma_omega.size()) =
        flat.segment(at, out.Sigma_omega.size());
    at += static_cast<int>(out.Sigma_omega.size());
    out.sigma_u = flat.segment(at, out.sigma_u.size());
    at += static_cast<int>(out.sigma_u.size());
    out.sigma_x = flat.segment(at, out.sigma_x.size());
    return out;
}

Vector extract_free_s(const CostModel& cost, const ParameterLayout& layout) {
    Vector theta(layout.free_s_count());
    for (int i = 0; i < theta.size(); ++i)
        theta[i] = cost.s[layout.free_s_indices[i]];
    return theta;
}

Vector extract_free_sigma(const NoiseModel& noise, const ParameterLayout& layout) {
    const Vector flat = flatten_noise_scales(noise);
    Vector theta(layout.free_sigma_count());
    for (int i = 0; i < theta.size(); ++i)
        theta[i] = flat[layout.free_sigma_groups[i].front()];
    return theta;
}

Vector apply_free_s(const CostModel& cost, const ParameterLayout& layout, const Vector& theta) {
    if (theta.size() != layout.free_s_count())
        throw DimensionError("free s vector has wrong length");
    Vector s = cost.s;
    for (int i = 0; i < theta.size(); ++i)
        s[layout.free_s_indices[i]] = theta[i];
    return s;
}

Vector apply_free_sigma(const NoiseModel& noise, const ParameterLayout& layout,
                        const Vector& theta) {
    if (theta.size() != layout.free_sigma_count())
        throw DimensionError("free sigma vector has wrong length");
    Vector flat = flatten_noise_scales(noise);
    for (int i = 0; i < theta.size(); ++i)
        for (int idx : layout.free_sigma_groups[i])
            flat[idx] = theta[i];
    return flat;
}

ModelBundle build_reaching_model(ModelKind kind, double target_x, double target_y) {
    constexpr int n = 10, m = 2, r = 6;
    constexpr double dt = 0.01;   // s
    constexpr double mass = 1.0;  // kg
    constexpr double tau1 = 0.04; // s, neural activation filter
    constexpr double tau2 = 0.04; // s, muscle force filter

    ModelBundle bundle;
    SystemModel& sys = bundle.system;

    // States: p_x p_y  v_x v_y  f_x f_y  g_x g_y  ref_x ref_y
    sys.A = Matrix::Identity(n, n);
    for (int axis = 0; axis < 2; ++axis) {
        sys.A(0 + axis, 2 + axis) = dt;        // position <- velocity
        sys.A(2 + axis, 4 + axis) = dt / mass; // velocity <- force
        sys.A(4 + axis, 4 + axis) = 1.0 - dt / tau2;
        sys.A(4 + axis, 6 + axis) = dt / tau2; // force <- activation
        sys.A(6 + axis, 6 + axis) = 1.0 - dt / tau1;
    }
    sys.B = Matrix::Zero(n, m);
    sys.B(6, 0) = dt / tau1;
    sys.B(7, 1) = dt / tau1;

    sys.H = Matrix::Zero(r, n);
    sys.H.leftCols(r) = Matrix::Identity(r, r);

    sys.M = Matrix::Zero(4, n);
    sys.M.leftCols(4) = Matrix::Identity(4, 4);

    sys.x0_mean = Vector::Zero(n);
    sys.x0_mean[8] = target_x;
    sys.x0_mean[9] = target_y;
    sys.Omega_x0 = Matrix::Zero(n, n);
    sys.horizon = 41;
    sys.dt = dt;

    CostModel& cost = bundle.cost;
    auto unit = [n](int i) {
        Vector e = Vector::Zero(n);
        e[i] = 1.0;
        return e;
    };
    cost.qN_basis = {unit(0) - unit(8), unit(1) - unit(9),
                     unit(2), unit(3), unit(4), unit(5)};
    cost.qR_basis = {Vector::Unit(m, 0), Vector::Unit(m, 1)};
    cost.s = Vector(8);
    cost.s << 1.0, 1.0, 0.04, 0.04, 4e-4, 4e-4, 1e-5 / 42.0, 1e-5 / 42.0;

    NoiseModel& noise = bundle.noise;
    noise.Sigma_xi = Matrix::Zero(n, n);
    if (kind == ModelKind::Lqg) {
        noise.Sigma_xi(6, 6) = 1.5;
        noise.Sigma_xi(7, 7) = 1.5;
    }
    noise.Sigma_omega = Matrix::Zero(r, r);
    noise.Sigma_omega.diagonal() << 0.02, 0.02, 0.2, 0.2, 1.0, 1.0;
    if (kind == ModelKind::Lqs) {
        Matrix rot(m, m);
        rot << 0.0, 1.0, -1.0, 0.0; // columns [-e2, e1]
        noise.F = {Matrix::Identity(m, m), rot};
        noise.sigma_u = Vector::Constant(2, 0.5);
        noise.G = {Matrix::Identity(n, n)};
        noise.sigma_x = Vector::Constant(1, 0.1);
    }

    // Free parameters: the diagonals of Sigma_xi restricted to the eight
    // base states, the diagonal of Sigma_omega, and (LQS) the shared
    // control-noise scale plus the state-noise scale.
    ParameterLayout& layout = bundle.layout;
    layout.free_s_indices = {0, 1, 2, 3, 4, 5, 6, 7};
    const int xi_size = static_cast<int>(noise.Sigma_xi.size());
    for (int i = 0; i < 8; ++i)
        layout.free_sigma_groups.push_back({i * n + i});
    for (int j = 0; j < r; ++j)
        layout.free_sigma_groups.push_back({xi_size + j * r + j});
    if (kind == ModelKind::Lqs) {
        const int base = xi_size + static_cast<int>(noise.Sigma_omega.size());
        layout.free_sigma_groups.push_back({base, base + 1}); // one shared control scale
        layout.free_sigma_groups.push_back({base + 2});
    }

    bundle.validate();
    return bundle;
}

} // namespace isoc
