#pragma once

#include <vector>

#include "isoc/linalg.hpp"

namespace isoc {

enum class ModelKind { Lqg, Lqs };

// Discrete-time linear plant with partial measurement.
//
//   x_{t+1} = A x_t + B u_t + noise,  y_t = H x_t + noise
//
// M selects the states present in ground-truth recordings (rows of the
// identity). dt is bookkeeping only; all dynamics are already discrete.
struct SystemModel {
    Matrix A;        // n x n
    Matrix B;        // n x m
    Matrix H;        // r x n
    Matrix M;        // n_measured x n, 0/1 rows of identity
    Vector x0_mean;  // n
    Matrix Omega_x0; // n x n, PSD
    int horizon = 0; // N, number of steps
    double dt = 0.0; // seconds per step (metadata)

    int n() const { return static_cast<int>(A.rows()); }
    int m() const { return static_cast<int>(B.cols()); }
    int r() const { return static_cast<int>(H.rows()); }
    int n_measured() const { return static_cast<int>(M.rows()); }

    void validate() const;
};

// Quadratic cost in basis-vector form:
//   Q_N = sum s_{N,i} q_{N,i} q_{N,i}^T   (terminal)
//   Q   = sum s_{Q,i} q_{Q,i} q_{Q,i}^T   (running state)
//   R   = sum s_{R,i} q_{R,i} q_{R,i}^T   (running effort)
// with one nonnegative weight vector s ordered (s_N, s_Q, s_R).
struct CostModel {
    std::vector<Vector> qN_basis;
    std::vector<Vector> qQ_basis;
    std::vector<Vector> qR_basis;
    Vector s;

    int weight_count() const {
        return static_cast<int>(qN_basis.size() + qQ_basis.size() + qR_basis.size());
    }

    void validate(int n, int m) const;
};

// Noise description. Additive process/observation noise enters through
// scale matrices, multiplicative noise through scaled structure matrices:
//   Omega_xi = Sigma_xi Sigma_xi^T,  Omega_omega = Sigma_omega Sigma_omega^T
//   C_i = sigma_u[i] * B * F[i]      (control-dependent, state equation)
//   D_i = sigma_x[i] * H * G[i]      (state-dependent, output equation)
// Omega_eta is the internal-model noise covariance; it is carried through
// the moment recursions but never optimized. Empty means zero.
struct NoiseModel {
    Matrix Sigma_xi;    // n x p
    Matrix Sigma_omega; // r x q
    std::vector<Matrix> F; // c entries, m x m
    Vector sigma_u;        // c
    std::vector<Matrix> G; // d entries, n x n
    Vector sigma_x;        // d
    Matrix Omega_eta;      // n x n or empty

    void validate(int n, int m, int r) const;
};

// Which entries of s and of the flattened noise-scale vector are free
// for the inverse problem. The flattened vector is
//   [vec(Sigma_xi) col-major; vec(Sigma_omega) col-major; sigma_u; sigma_x].
// Each sigma group is one optimization variable written to every listed
// position; groups with several positions tie scales together (e.g. one
// shared control-noise scale feeding several structure matrices).
struct ParameterLayout {
    std::vector<int> free_s_indices;
    std::vector<std::vector<int>> free_sigma_groups;

    int free_s_count() const { return static_cast<int>(free_s_indices.size()); }
    int free_sigma_count() const { return static_cast<int>(free_sigma_groups.size()); }

    void validate(int s_count, int sigma_count) const;
};

// Mean and covariance trajectories of the measured states, t = 0..N.
struct GroundTruthMoments {
    std::vector<Vector> mean; // each n_measured
    std::vector<Matrix> cov;  // each n_measured x n_measured

    int steps() const { return static_cast<int>(mean.size()) - 1; }
    int channels() const { return mean.empty() ? 0 : static_cast<int>(mean.front().size()); }

    void validate() const;
};

struct CostMatrices {
    Matrix QN, Q, R;
};

struct NoiseOperators {
    Matrix Omega_xi;    // n x n
    Matrix Omega_omega; // r x r
    std::vector<Matrix> C; // n x m
    std::vector<Matrix> D; // r x n
    Matrix Omega_eta;      // n x n
};

// Assembles Q_N, Q, R from the basis decomposition. The accumulation is
// rank-1 symmetric, so outputs are bitwise symmetric. Throws InvalidCost
// when the assembled R is not positive definite.
CostMatrices assemble_cost(const CostModel& cost, int n, int m);

// Assembles covariances and the scaled multiplicative-noise operators.
NoiseOperators assemble_noise(const NoiseModel& noise, const Matrix& B, const Matrix& H);

// --- flattened noise-scale vector -----------------------------------------

int noise_scale_count(const NoiseModel& noise);
Vector flatten_noise_scales(const NoiseModel& noise);
NoiseModel with_noise_scales(const NoiseModel& noise, const Vector& flat);

// --- free-parameter views ----------------------------------------------------

Vector extract_free_s(const CostModel& cost, const ParameterLayout& layout);
Vector extract_free_sigma(const NoiseModel& noise, const ParameterLayout& layout);

// Full parameter vectors with the free entries replaced by theta.
Vector apply_free_s(const CostModel& cost, const ParameterLayout& layout, const Vector& theta);
Vector apply_free_sigma(const NoiseModel& noise, const ParameterLayout& layout,
                        const Vector& theta);

// --- model bundle ----------------------------------------------------------

struct ModelBundle {
    SystemModel system;
    CostModel cost;
    NoiseModel noise;
    ParameterLayout layout;

    void validate() const;
};

// Planar point-to-point reaching task: point mass driven through a
// second-order muscle filter, discretized at 10 ms over N = 41 steps,
// with the target position carried as two constant augmented states so
// the target-error cost takes the standard quadratic form. The estimator
// knows the target exactly (zero initial covariance on the augmented
// states), which stands in for the mover knowing where it reaches.
// kind selects the additive-only or signal-dependent noise variant.
ModelBundle build_reaching_model(ModelKind kind, double target_x = 0.1, double target_y = 0.1);

} // namespace isoc
