#include "spikelab/scalar_channel.hpp"

#include <cmath>
#include <stdexcept>

namespace spikelab {

namespace {

constexpr int kMaxAtoms = 8;

struct AtomSet {
    int m = 0;
    double v[kMaxAtoms];
    double lp[kMaxAtoms];
};

AtomSet active_atoms(const Prior& prior) {
    AtomSet s;
    for (const Atom& a : prior.atoms()) {
        if (a.prob <= 0.0) continue;
        s.v[s.m] = a.value;
        s.lp[s.m] = std::log(a.prob);
        ++s.m;
    }
    return s;
}

void check_gamma(double gamma) {
    if (!std::isfinite(gamma) || gamma < 0.0)
        throw std::invalid_argument("scalar_channel: gamma must be finite and >= 0");
}

// Posterior atom weights given observation y = mu*X + sqrt(tau)*Z, as
// normalized probabilities. Log-weights are shifted by their max before
// exponentiation; exponents of order lambda*q never appear raw.
void posterior_weights(const AtomSet& s, double mu, double tau, double x, double* w) {
    double t[kMaxAtoms];
    double tmax = -1e300;
    for (int j = 0; j < s.m; ++j) {
        t[j] = s.lp[j] + (mu * s.v[j] * x - 0.5 * mu * mu * s.v[j] * s.v[j]) / tau;
        if (t[j] > tmax) tmax = t[j];
    }
    double norm = 0.0;
    for (int j = 0; j < s.m; ++j) {
        w[j] = std::exp(t[j] - tmax);
        norm += w[j];
    }
    for (int j = 0; j < s.m; ++j) w[j] /= norm;
}

struct PosteriorMoments {
    double m1 = 0.0;
    double m2 = 0.0;
};

PosteriorMoments posterior_moments(const AtomSet& s, double mu, double tau, double x) {
    double w[kMaxAtoms];
    posterior_weights(s, mu, tau, x, w);
    PosteriorMoments out;
    for (int j = 0; j < s.m; ++j) {
        out.m1 += w[j] * s.v[j];
        out.m2 += w[j] * s.v[j] * s.v[j];
    }
    return out;
}

void check_tau(double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw std::invalid_argument("scalar_channel: tau must be finite and > 0");
}

}  // namespace

double mutual_info(const Prior& prior, double gamma, const NormalQuadrature& quad) {
    check_gamma(gamma);
    if (gamma == 0.0) return 0.0;
    if (!prior.discrete()) return 0.5 * std::log1p(gamma);

    const AtomSet s = active_atoms(prior);
    const double sg = std::sqrt(gamma);

    // I = -sum_k p_k E_z ln sum_j p_j exp(-sqrt(g) z d - g d^2/2), d = v_k - v_j.
    // The j = k term is exp(0), so the inner sum is bounded below by p_k and
    // the log never blows up.
    double info = 0.0;
    for (int k = 0; k < s.m; ++k) {
        double c0[kMaxAtoms], c1[kMaxAtoms];
        for (int j = 0; j < s.m; ++j) {
            const double d = s.v[k] - s.v[j];
            c1[j] = -sg * d;
            c0[j] = s.lp[j] - 0.5 * gamma * d * d;
        }
        const double term = quad.expect([&](double z) {
            double tmax = -1e300;
            double t[kMaxAtoms];
            for (int j = 0; j < s.m; ++j) {
                t[j] = c0[j] + c1[j] * z;
                if (t[j] > tmax) tmax = t[j];
            }
            double acc = 0.0;
            for (int j = 0; j < s.m; ++j) acc += std::exp(t[j] - tmax);
            return tmax + std::log(acc);
        });
        info -= std::exp(s.lp[k]) * term;
    }
    return info;
}

double mutual_info(const Prior& prior, double gamma, const QuadratureSpec& spec) {
    return mutual_info(prior, gamma, NormalQuadrature(spec));
}

double mmse(const Prior& prior, double gamma, const NormalQuadrature& quad) {
    check_gamma(gamma);
    if (!prior.discrete()) return 1.0 / (1.0 + gamma);
    if (gamma == 0.0) return prior.variance();

    const AtomSet s = active_atoms(prior);
    const double sg = std::sqrt(gamma);

    // E[Var(X|Y)]: condition on X = v_k, integrate the posterior variance
    // at y = sqrt(g) v_k + z over the noise.
    double out = 0.0;
    for (int k = 0; k < s.m; ++k) {
        double c0[kMaxAtoms], c1[kMaxAtoms];
        for (int j = 0; j < s.m; ++j) {
            const double d = s.v[k] - s.v[j];
            c1[j] = -sg * d;
            c0[j] = s.lp[j] - 0.5 * gamma * d * d;
        }
        const double term = quad.expect([&](double z) {
            double t[kMaxAtoms];
            double tmax = -1e300;
            for (int j = 0; j < s.m; ++j) {
                t[j] = c0[j] + c1[j] * z;
                if (t[j] > tmax) tmax = t[j];
            }
            double norm = 0.0, m1 = 0.0, m2 = 0.0;
            for (int j = 0; j < s.m; ++j) {
                const double w = std::exp(t[j] - tmax);
                norm += w;
                m1 += w * s.v[j];
                m2 += w * s.v[j] * s.v[j];
            }
            m1 /= norm;
            m2 /= norm;
            return m2 - m1 * m1;
        });
        out += std::exp(s.lp[k]) * term;
    }
    return out;
}

double mmse(const Prior& prior, double gamma, const QuadratureSpec& spec) {
    return mmse(prior, gamma, NormalQuadrature(spec));
}

double denoise(const Prior& prior, double mu, double tau, double x) {
    check_tau(tau);
    if (!prior.discrete()) return mu * x / (mu * mu + tau);
    const AtomSet s = active_atoms(prior);
    return posterior_moments(s, mu, tau, x).m1;
}

double denoise_deriv(const Prior& prior, double mu, double tau, double x) {
    check_tau(tau);
    if (!prior.discrete()) return mu / (mu * mu + tau);
    const AtomSet s = active_atoms(prior);
    const PosteriorMoments pm = posterior_moments(s, mu, tau, x);
    return (mu / tau) * (pm.m2 - pm.m1 * pm.m1);
}

double mean_square_denoise(const Prior& prior, double mu, double tau,
                           const NormalQuadrature& quad) {
    check_tau(tau);
    if (!prior.discrete()) {
        // f(y) = mu y / (mu^2 + tau); E[f(mu X + sqrt(tau) Z)^2] with E[X^2]=1.
        const double c = mu / (mu * mu + tau);
        return c * c * (mu * mu + tau);
    }
    const AtomSet s = active_atoms(prior);
    const double st = std::sqrt(tau);
    double out = 0.0;
    for (int k = 0; k < s.m; ++k) {
        const double term = quad.expect([&](double z) {
            const double f = posterior_moments(s, mu, tau, mu * s.v[k] + st * z).m1;
            return f * f;
        });
        out += std::exp(s.lp[k]) * term;
    }
    return out;
}

}  // namespace spikelab
