#include "spikelab/state_evolution.hpp"

#include <cmath>
#include <stdexcept>

#include "spikelab/parallel.hpp"
#include "spikelab/potential.hpp"
#include "spikelab/scalar_channel.hpp"

namespace spikelab {

namespace {

void check_se_args(const Prior& prior, double lambda, double tau) {
    if (!prior.discrete())
        throw std::invalid_argument("state_evolution: prior must have finite support");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("state_evolution: lambda must be finite and >= 0");
    if (!(tau >= 0.0))
        throw std::invalid_argument("state_evolution: tau must be >= 0");
}

double step_impl(const Prior& prior, double lambda, double tau,
                 const NormalQuadrature& quad) {
    if (tau == 0.0) {
        const double m = prior.mean();
        return m * m;
    }
    if (prior.kind() == PriorKind::Bernoulli)
        return se_step_bernoulli(lambda, prior.rho(), tau, quad);
    return mean_square_denoise(prior, std::sqrt(lambda) * tau, tau, quad);
}

}  // namespace

double se_step(const Prior& prior, double lambda, double tau,
               const NormalQuadrature& quad) {
    check_se_args(prior, lambda, tau);
    return step_impl(prior, lambda, tau, quad);
}

double se_step(const Prior& prior, double lambda, double tau,
               const QuadratureSpec& spec) {
    return se_step(prior, lambda, tau, NormalQuadrature(spec));
}

double se_step_bernoulli(double lambda, double rho, double tau,
                         const NormalQuadrature& quad) {
    if (tau == 0.0) return rho * rho;
    const double lt = lambda * tau;
    const double slt = std::sqrt(lt);
    const double lr = std::log(rho);
    const double l1m = std::log1p(-rho);
    // rho^2 / (rho + (1-rho) e^u) = exp(2 ln rho - logaddexp(ln rho, ln(1-rho)+u))
    return quad.expect([&](double z) {
        const double u = -0.5 * lt - slt * z;
        return std::exp(2.0 * lr - log_add_exp(lr, l1m + u));
    });
}

FixedPointResult se_fixed_point(const Prior& prior, double lambda, double tau0,
                                double tol, int max_iter, const QuadratureSpec& spec) {
    if (!(tol > 0.0)) throw std::invalid_argument("state_evolution: tol must be > 0");
    check_se_args(prior, lambda, tau0);
    const NormalQuadrature quad(spec);

    FixedPointResult r;
    double tau = tau0;
    for (int t = 0; t < max_iter; ++t) {
        const double next = step_impl(prior, lambda, tau, quad);
        r.iterations = t + 1;
        if (std::abs(next - tau) <= tol) {
            r.tau_inf = next;
            r.converged = true;
            return r;
        }
        tau = next;
    }
    r.tau_inf = tau;
    r.converged = false;
    return r;
}

std::vector<SeCurvePoint> amp_mse_curve(const Prior& prior,
                                        std::span<const double> lambdas,
                                        const QuadratureSpec& spec, unsigned threads) {
    if (lambdas.empty()) throw std::invalid_argument("state_evolution: empty lambda grid");
    const double rho = prior.rho();
    std::vector<SeCurvePoint> rows(lambdas.size());
    parallel_for(lambdas.size(), threads, [&](std::size_t i) {
        const FixedPointResult fp = se_fixed_point(prior, lambdas[i], 0.0, 1e-12, 100000, spec);
        SeCurvePoint& p = rows[i];
        p.lambda = lambdas[i];
        p.w = w_from_lambda(lambdas[i], rho);
        p.tau_inf = fp.tau_inf;
        p.tau_over_rho = fp.tau_inf / rho;
        p.vector_mse_norm = 1.0 - p.tau_over_rho;
        p.matrix_mse_norm = 1.0 - p.tau_over_rho * p.tau_over_rho;
        p.iterations = fp.iterations;
    });
    return rows;
}

AlgThreshold algorithmic_threshold(const Prior& prior, double rho,
                                   const QuadratureSpec& spec) {
    if (!(rho <= 0.05))
        throw std::invalid_argument("state_evolution: threshold search requires rho <= 0.05");
    if (std::abs(prior.rho() - rho) > 1e-15)
        throw std::invalid_argument("state_evolution: rho must match the prior");
    const NormalQuadrature quad(spec);

    // Classify a lambda as informative when the iteration from tau = 0
    // crosses tau/rho >= 1/2; subcritical runs settle far below that.
    auto informative = [&](double lambda) {
        double tau = 0.0;
        for (int t = 0; t < 100000; ++t) {
            const double next = step_impl(prior, lambda, tau, quad);
            if (next / rho >= 0.5) return true;
            if (std::abs(next - tau) <= 1e-12) return false;
            tau = next;
        }
        return tau / rho >= 0.5;
    };

    double wlo = 1e-3, whi = 1e2;
    if (informative(lambda_from_w(wlo, rho)) || !informative(lambda_from_w(whi, rho)))
        throw std::runtime_error(
            "state_evolution: tau/rho crossing not bracketed in w = lambda rho^2 in [1e-3, 1e2]");
    while ((whi - wlo) / whi > 1e-4) {
        const double mid = std::sqrt(wlo * whi);
        if (informative(lambda_from_w(mid, rho)))
            whi = mid;
        else
            wlo = mid;
    }
    const double w_star = std::sqrt(wlo * whi);
    return {lambda_from_w(w_star, rho), w_star};
}

}  // namespace spikelab
