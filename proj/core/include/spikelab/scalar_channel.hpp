#pragma once

#include "spikelab/prior.hpp"
#include "spikelab/quadrature.hpp"

namespace spikelab {

/// Mutual information I(X; sqrt(gamma) X + Z) in nats, Z ~ N(0,1).
/// Closed form 0.5*ln(1+gamma) for the Gaussian prior; atom-sum quadrature
/// otherwise. Nonnegative, nondecreasing and concave in gamma.
double mutual_info(const Prior& prior, double gamma, const QuadratureSpec& spec = {});
double mutual_info(const Prior& prior, double gamma, const NormalQuadrature& quad);

/// Scalar MMSE E[(X - E[X | sqrt(gamma) X + Z])^2]. Equals Var(X) at
/// gamma = 0 and 1/(1+gamma) for the Gaussian prior.
double mmse(const Prior& prior, double gamma, const QuadratureSpec& spec = {});
double mmse(const Prior& prior, double gamma, const NormalQuadrature& quad);

/// Bayes posterior mean E[X | mu X + sqrt(tau) Z = x]. Requires tau > 0.
double denoise(const Prior& prior, double mu, double tau, double x);

/// d/dx of the posterior mean; equals (mu/tau) * Var(X | x). For the
/// Bernoulli prior this is (mu/tau) f(x)(1 - f(x)).
double denoise_deriv(const Prior& prior, double mu, double tau, double x);

/// E[f(mu X + sqrt(tau) Z)^2] with f the posterior mean of the same
/// channel; the state-evolution update in its generic (mu, tau) form.
double mean_square_denoise(const Prior& prior, double mu, double tau,
                           const NormalQuadrature& quad);

}  // namespace spikelab
