#include "spikelab/potential.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spikelab/parallel.hpp"
#include "spikelab/scalar_channel.hpp"

namespace spikelab {

namespace {

constexpr int kGridPoints = 512;
constexpr double kGridFloorFactor = 1e-12;

void check_args(const Prior& prior, double lambda, double rho) {
    if (!prior.discrete())
        throw std::invalid_argument("potential: prior must have finite support");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("potential: lambda must be finite and >= 0");
    if (std::abs(prior.second_moment() - rho) > 1e-12)
        throw std::invalid_argument("potential: rho must equal the prior second moment");
}

double value_impl(const Prior& prior, double q, double lambda, double rho,
                  const NormalQuadrature& quad) {
    return 0.25 * lambda * (q - rho) * (q - rho) + mutual_info(prior, lambda * q, quad);
}

struct GoldenResult {
    double x = 0.0;
    double fx = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

template <class F>
GoldenResult golden_minimize(F&& f, double a, double b, int iters = 140) {
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters && (b - a) > 1e-18 + 1e-16 * std::abs(b); ++i) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    GoldenResult r;
    r.lo = a;
    r.hi = b;
    if (f1 <= f2) {
        r.x = x1;
        r.fx = f1;
    } else {
        r.x = x2;
        r.fx = f2;
    }
    return r;
}

}  // namespace

double lambda_from_gamma(double gamma, double rho) {
    return 4.0 * gamma * std::abs(std::log(rho)) / rho;
}

double gamma_from_lambda(double lambda, double rho) {
    return lambda * rho / (4.0 * std::abs(std::log(rho)));
}

double lambda_from_w(double w, double rho) { return w / (rho * rho); }

double w_from_lambda(double lambda, double rho) { return lambda * rho * rho; }

double potential_value(const Prior& prior, double q, double lambda, double rho,
                       const QuadratureSpec& spec) {
    check_args(prior, lambda, rho);
    if (!(q >= 0.0) || q > rho * (1.0 + 1e-12))
        throw std::invalid_argument("potential: q must lie in [0, rho]");
    return value_impl(prior, std::min(q, rho), lambda, rho, NormalQuadrature(spec));
}

double potential_value_bernoulli(double q, double lambda, double rho,
                                 const QuadratureSpec& spec) {
    if (!(q >= 0.0) || q > rho * (1.0 + 1e-12))
        throw std::invalid_argument("potential: q must lie in [0, rho]");
    const NormalQuadrature quad(spec);
    const double lq = lambda * q;
    const double slq = std::sqrt(lq);
    const double l1m = std::log1p(-rho);
    const double lr = std::log(rho);
    const double e0 = quad.expect(
        [&](double z) { return log_add_exp(l1m, lr - 0.5 * lq + slq * z); });
    const double e1 = quad.expect(
        [&](double z) { return log_add_exp(l1m, lr + 0.5 * lq + slq * z); });
    return 0.25 * lambda * (q * q + rho * rho) - (1.0 - rho) * e0 - rho * e1;
}

MinimizeResult minimize_potential(const Prior& prior, double lambda, double rho,
                                  const QuadratureSpec& spec) {
    check_args(prior, lambda, rho);
    if (lambda == 0.0) return {0.0, 0.0, 0.0, true};

    const NormalQuadrature quad(spec);
    auto f = [&](double q) { return value_impl(prior, q, lambda, rho, quad); };

    // Two-scale grid: q = 0 plus log-spaced points; the two competing minima
    // sit at opposite ends (q- = o(rho/|ln rho|), q+ -> rho).
    std::vector<double> qs;
    qs.reserve(kGridPoints + 1);
    qs.push_back(0.0);
    const double qlo = rho * kGridFloorFactor;
    const double step = std::log(rho / qlo) / (kGridPoints - 1);
    for (int i = 0; i < kGridPoints; ++i) qs.push_back(qlo * std::exp(step * i));
    qs.back() = rho;

    std::vector<double> vals(qs.size());
    for (std::size_t i = 0; i < qs.size(); ++i) vals[i] = f(qs[i]);

    // Refine every grid-local minimum; keep the best.
    MinimizeResult best;
    best.q_star = qs[0];
    best.i_min = vals[0];
    GoldenResult best_g{qs[0], vals[0], qs[0], qs[0]};
    bool have = false;
    const std::size_t last = qs.size() - 1;
    for (std::size_t i = 0; i <= last; ++i) {
        const bool left_ok = i == 0 || vals[i] <= vals[i - 1];
        const bool right_ok = i == last || vals[i] <= vals[i + 1];
        if (!(left_ok && right_ok)) continue;
        const double a = qs[i == 0 ? 0 : i - 1];
        const double b = qs[i == last ? last : i + 1];
        GoldenResult g = golden_minimize(f, a, b);
        if (!have || g.fx < best_g.fx) {
            best_g = g;
            have = true;
        }
    }

    double q_star = best_g.x;
    double i_min = best_g.fx;

    // Polish on the stationarity condition q = rho - mmse(lambda q): the
    // potential derivative is (lambda/2) r(q), so a sign change of r inside
    // the refined bracket pins the interior minimizer to root accuracy.
    auto resid = [&](double q) { return q - rho + mmse(prior, lambda * q, quad); };
    const bool boundary = q_star <= qs[1] * 0.5 || q_star >= rho * (1.0 - 1e-13);
    if (!boundary) {
        double lo = std::max(best_g.lo, qlo);
        double hi = std::min(best_g.hi, rho);
        double rlo = resid(lo), rhi = resid(hi);
        if (rlo < 0.0 && rhi > 0.0) {
            for (int it = 0; it < 200 && (hi - lo) > 1e-17 * rho; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (resid(mid) < 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            const double q_root = 0.5 * (lo + hi);
            const double v_root = f(q_root);
            if (v_root <= i_min + 1e-14 * (1.0 + std::abs(i_min))) {
                q_star = q_root;
                i_min = std::min(v_root, i_min);
            }
        }
    }

    MinimizeResult r;
    r.q_star = q_star;
    r.i_min = i_min;
    r.at_boundary = boundary;
    r.stationarity_residual = std::abs(resid(q_star));
    return r;
}

PotentialCurve mmse_curve(const Prior& prior, std::span<const double> gammas,
                          double rho, const QuadratureSpec& spec, unsigned threads) {
    if (gammas.empty()) throw std::invalid_argument("potential: empty gamma grid");
    check_args(prior, 0.0, rho);
    if (!(rho < 1.0))
        throw std::invalid_argument("potential: curve requires rho < 1");

    PotentialCurve curve;
    curve.rho = rho;
    curve.rows.resize(gammas.size());
    const double scale = rho * std::abs(std::log(rho));
    parallel_for(gammas.size(), threads, [&](std::size_t i) {
        const double gamma = gammas[i];
        const double lambda = lambda_from_gamma(gamma, rho);
        const MinimizeResult m = minimize_potential(prior, lambda, rho, spec);
        PotentialPoint& p = curve.rows[i];
        p.gamma = gamma;
        p.lambda = lambda;
        p.q_star = m.q_star;
        p.i_pot_min = m.i_min;
        p.mi_rescaled = m.i_min / scale;
        const double ratio = m.q_star / rho;
        p.mmse_matrix_norm = 1.0 - ratio * ratio;
    });
    return curve;
}

StatThreshold statistical_threshold(const Prior& prior, double rho,
                                    const QuadratureSpec& spec) {
    if (!(rho < 0.5))
        throw std::invalid_argument("potential: threshold search requires rho < 0.5");
    check_args(prior, 0.0, rho);

    auto informative = [&](double gamma) {
        const double lambda = lambda_from_gamma(gamma, rho);
        return minimize_potential(prior, lambda, rho, spec).q_star / rho >= 0.5;
    };

    double lo = 0.1, hi = 3.0;
    if (informative(lo) || !informative(hi))
        throw std::runtime_error("potential: no q* jump detected in gamma window [0.1, 3]");
    while ((hi - lo) / hi > 1e-4) {
        const double mid = 0.5 * (lo + hi);
        if (informative(mid))
            hi = mid;
        else
            lo = mid;
    }
    const double gamma_c = 0.5 * (lo + hi);
    return {lambda_from_gamma(gamma_c, rho), gamma_c};
}

double asymptotic_limit(double gamma) {
    if (!(gamma >= 0.0))
        throw std::invalid_argument("potential: gamma must be >= 0");
    return std::min(gamma, 1.0);
}

}  // namespace spikelab
