#pragma once

#include <span>
#include <vector>

#include "spikelab/prior.hpp"
#include "spikelab/quadrature.hpp"

namespace spikelab {

/// One step of the state evolution tau_{t+1} = E[f(mu X + sqrt(tau) Z)^2]
/// with mu = sqrt(lambda) tau and f the Bayes denoiser of that channel.
/// tau = 0 maps to (E X)^2 exactly (the denoiser degenerates to the prior
/// mean), which is rho^2 for the Bernoulli prior.
double se_step(const Prior& prior, double lambda, double tau,
               const QuadratureSpec& spec = {});
double se_step(const Prior& prior, double lambda, double tau,
               const NormalQuadrature& quad);

/// Bernoulli closed form of the same step,
///   tau_{t+1} = E_Z[ rho^2 / (rho + (1-rho) exp{-lambda tau/2 - sqrt(lambda tau) Z}) ],
/// kept as an independent route for cross-checks and as the fast kernel.
double se_step_bernoulli(double lambda, double rho, double tau,
                         const NormalQuadrature& quad);

struct FixedPointResult {
    double tau_inf = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Plain fixed-point iteration from tau0 (no damping; the map is monotone
/// for the Bernoulli prior). Stops when |tau_{t+1} - tau_t| <= tol.
FixedPointResult se_fixed_point(const Prior& prior, double lambda, double tau0,
                                double tol = 1e-12, int max_iter = 100000,
                                const QuadratureSpec& spec = {});

struct SeCurvePoint {
    double lambda = 0.0;
    double w = 0.0;  // lambda * rho^2
    double tau_inf = 0.0;
    double tau_over_rho = 0.0;
    double vector_mse_norm = 0.0;  // 1 - tau_inf / rho
    double matrix_mse_norm = 0.0;  // 1 - (tau_inf / rho)^2
    int iterations = 0;
};

/// Predicted AMP MSE curve over a lambda grid, from the uninformed start
/// tau0 = 0.
std::vector<SeCurvePoint> amp_mse_curve(const Prior& prior,
                                        std::span<const double> lambdas,
                                        const QuadratureSpec& spec = {},
                                        unsigned threads = 0);

struct AlgThreshold {
    double lambda_amp = 0.0;
    double w_star = 0.0;  // lambda_amp * rho^2
};

/// Algorithmic threshold: bisection in lambda on tau_inf/rho crossing 1/2
/// from tau0 = 0, bracketed over w = lambda rho^2 in [1e-3, 1e2].
/// Requires rho <= 0.05. The measured w_star is reported as is; no
/// asymptotic constant is assumed.
AlgThreshold algorithmic_threshold(const Prior& prior, double rho,
                                   const QuadratureSpec& spec = {});

}  // namespace spikelab
