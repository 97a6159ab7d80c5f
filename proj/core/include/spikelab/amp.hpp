#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "spikelab/prior.hpp"
#include "spikelab/quadrature.hpp"

namespace spikelab {

/// Finite-n spiked Wigner instance: W_ij = sqrt(lambda/n) X_i X_j + Z_ij
/// for i < j, symmetrized, zero diagonal. Regeneration from the same seed
/// reproduces W bit-exactly (counter-based noise per pair index).
struct Instance {
    int n = 0;
    double lambda = 0.0;
    Prior prior;
    Eigen::VectorXd X;
    Eigen::MatrixXd W;
    std::uint64_t seed = 0;
};

Instance generate_instance(const Prior& prior, int n, double lambda, std::uint64_t seed);

struct AmpInit {
    enum class Kind { Ones, SideInfo };
    Kind kind = Kind::Ones;
    double eps = 0.0;       // side information strength
    std::uint64_t seed = 0; // noise stream for the side-information init

    static AmpInit ones() { return {Kind::Ones, 0.0, 0}; }
    static AmpInit side_info(double eps, std::uint64_t seed) {
        return {Kind::SideInfo, eps, seed};
    }
};

struct AmpOptions {
    int t_max = 200;
    bool onsager = true;             // disable only to demonstrate divergence
    double early_stop_tol = 1e-8;    // on |delta matrix_mse_norm|
    int early_stop_window = 3;
};

struct AmpRecord {
    int t = 0;
    double overlap = 0.0;          // <f_t(x^t), X>/n
    double onsager = 0.0;          // b_t = mean f_t'(x^t_i)
    double vector_mse_norm = 0.0;  // ||X - f_t||^2 / (n rho)
    double matrix_mse_norm = 0.0;  // ||XX^T - f f^T||_F^2 / (n rho)^2
    double se_tau = 0.0;           // offline tau_{t+1} predicting this row's MSEs
};

struct AmpTrajectory {
    std::vector<AmpRecord> records;
    Eigen::VectorXd estimate;  // f_T(x^T)
};

/// AMP iteration x^{t+1} = A f_t(x^t) - b_t f_{t-1}(x^{t-1}) with
/// A = W/sqrt(n) and conditional-expectation denoisers. Denoiser
/// parameters (mu_t, tau_t) follow the offline state-evolution recursion
/// seeded by the chosen initialization (tau_1 = E||f_0||^2/n). The ones
/// init requires a positive-mean prior; Bernoulli-Rademacher must use
/// side_info.
AmpTrajectory amp_run(const Instance& instance, const AmpInit& init,
                      const AmpOptions& options = {}, const QuadratureSpec& spec = {});

/// (vector_mse_norm, matrix_mse_norm) of an estimate against the truth;
/// the matrix norm uses the rank-one expansion
/// ||XX^T - ee^T||_F^2 = ||X||^4 - 2 (X.e)^2 + ||e||^4.
std::pair<double, double> empirical_mse(const Eigen::VectorXd& X,
                                        const Eigen::VectorXd& estimate, double rho);

}  // namespace spikelab
