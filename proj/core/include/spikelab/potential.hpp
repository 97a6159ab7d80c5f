#pragma once

#include <span>
#include <vector>

#include "spikelab/prior.hpp"
#include "spikelab/quadrature.hpp"

namespace spikelab {

/// Statistical scaling lambda = 4 * gamma * |ln rho| / rho.
double lambda_from_gamma(double gamma, double rho);
double gamma_from_lambda(double lambda, double rho);

/// Algorithmic scaling lambda = w / rho^2.
double lambda_from_w(double w, double rho);
double w_from_lambda(double lambda, double rho);

/// Scalar potential whose infimum over q in [0, rho] gives the asymptotic
/// mutual information per variable, rescaled by rho |ln rho|:
///   (lambda/4) (q - rho)^2 + I(X; sqrt(lambda q) X + Z).
/// Discrete priors only; rho must be the prior second moment.
double potential_value(const Prior& prior, double q, double lambda, double rho,
                       const QuadratureSpec& spec = {});

/// Same quantity for the Bernoulli prior through the explicit
/// per-atom log-expectation representation:
///   lambda (q^2 + rho^2)/4 - (1-rho) E ln{1-rho+rho e^{-lq/2+sqrt(lq) Z}}
///                          -   rho   E ln{1-rho+rho e^{+lq/2+sqrt(lq) Z}}.
/// Serves as an independent cross-check of potential_value.
double potential_value_bernoulli(double q, double lambda, double rho,
                                 const QuadratureSpec& spec = {});

struct MinimizeResult {
    double q_star = 0.0;
    double i_min = 0.0;
    /// |q* - (rho - mmse(lambda q*))|; meaningful off the domain boundary.
    double stationarity_residual = 0.0;
    bool at_boundary = false;
};

/// Global minimum of the potential over q in [0, rho]. Two-scale log grid
/// plus golden-section refinement of every grid-local minimum, then a
/// bisection polish on the stationarity condition q = rho - mmse(lambda q).
MinimizeResult minimize_potential(const Prior& prior, double lambda, double rho,
                                  const QuadratureSpec& spec = {});

struct PotentialPoint {
    double gamma = 0.0;
    double lambda = 0.0;
    double q_star = 0.0;
    double i_pot_min = 0.0;
    double mi_rescaled = 0.0;        // i_min / (rho |ln rho|)
    double mmse_matrix_norm = 0.0;   // 1 - (q*/rho)^2
};

struct PotentialCurve {
    double rho = 0.0;
    std::vector<PotentialPoint> rows;
};

/// Per-gamma minimization sweep; rows are independent and evaluated on a
/// worker pool (threads = 0 picks hardware concurrency).
PotentialCurve mmse_curve(const Prior& prior, std::span<const double> gammas,
                          double rho, const QuadratureSpec& spec = {},
                          unsigned threads = 0);

struct StatThreshold {
    double lambda_c = 0.0;
    double gamma_c = 0.0;       // lambda_c * rho / (4 |ln rho|)
};

/// Location of the q-/q+ minimizer jump, by bisection on q*/rho crossing
/// 1/2 over gamma in [0.1, 3]. Requires rho < 0.5; throws if no jump is
/// bracketed.
StatThreshold statistical_threshold(const Prior& prior, double rho,
                                    const QuadratureSpec& spec = {});

/// Limit of the rescaled mutual information as rho -> 0: min(gamma, 1).
double asymptotic_limit(double gamma);

}  // namespace spikelab
