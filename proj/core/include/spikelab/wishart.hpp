#pragma once

#include <span>
#include <vector>

#include "spikelab/prior.hpp"
#include "spikelab/quadrature.hpp"

namespace spikelab {

/// Rectangular spiked model W = sqrt(lambda/n) U (x) V + Z with aspect
/// ratio alpha = m/n. Overlap domains are [0, E U^2] and [0, E V^2]; for
/// the spiked-covariance case U is Gaussian with E U^2 = 1.
struct WishartParams {
    Prior prior_u;
    Prior prior_v;
    double alpha = 1.0;
    double lambda = 0.0;
};

/// V-side statistical scaling lambda = sqrt(4 gamma |ln rho_V| / (alpha rho_V)).
double wishart_lambda_from_gamma(double gamma, double alpha, double rho_v);
double wishart_gamma_from_lambda(double lambda, double alpha, double rho_v);

/// Two-variable potential
///   (lambda alpha / 2)(q_U - rho_U)(q_V - rho_V)
///     + I(U; sqrt(lambda alpha q_V) U + Z) + alpha I(V; sqrt(lambda q_U) V + Z)
/// with rho_U = E U^2, rho_V = E V^2.
double wishart_potential_value(const WishartParams& params, double q_u, double q_v,
                               const QuadratureSpec& spec = {});

struct InfSupResult {
    double q_u_star = 0.0;
    double q_v_star = 0.0;
    double value = 0.0;
    double stationarity_residual_u = 0.0;  // |q_U - (E U^2 - mmse_U(lambda alpha q_V))|
    double stationarity_residual_v = 0.0;  // |q_V - (E V^2 - mmse_V(lambda q_U))|
};

/// inf over q_U of sup over q_V. The inner problem is concave in q_V
/// (mutual information is concave in the SNR), solved by golden section;
/// the outer inf uses the same two-scale log grid as the Wigner solver
/// plus a derivative-bisection polish.
InfSupResult solve_infsup(const WishartParams& params, const QuadratureSpec& spec = {});

struct WishartMmsePoint {
    double lambda = 0.0;
    double gamma_v = 0.0;
    double q_u_star = 0.0;
    double q_v_star = 0.0;
    double value = 0.0;
    double mmse_vv_norm = 0.0;  // 1 - (q_V*/E V^2)^2
    double mmse_uu_norm = 0.0;  // 1 - (q_U*/E U^2)^2
    double mmse_uv_norm = 0.0;  // 1 - q_U* q_V* / (E U^2 E V^2)
};

std::vector<WishartMmsePoint> wishart_mmse(const WishartParams& base,
                                           std::span<const double> lambdas,
                                           const QuadratureSpec& spec = {},
                                           unsigned threads = 0);

struct WishartThreshold {
    double lambda_star = 0.0;
    double gamma_star = 0.0;  // lambda*^2 alpha rho_V / (4 |ln rho_V|)
};

/// Jump of q_V*/E V^2 across 1/2, by bisection on gamma in [0.1, 3] in the
/// V-side scaling.
WishartThreshold wishart_v_threshold(const WishartParams& base,
                                     const QuadratureSpec& spec = {});

}  // namespace spikelab
