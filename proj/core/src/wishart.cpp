#include "spikelab/wishart.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "spikelab/parallel.hpp"
#include "spikelab/scalar_channel.hpp"

namespace spikelab {

namespace {

constexpr int kGridPoints = 512;

void check_params(const WishartParams& p) {
    if (!(p.alpha > 0.0)) throw std::invalid_argument("wishart: alpha must be > 0");
    if (!(p.lambda >= 0.0) || !std::isfinite(p.lambda))
        throw std::invalid_argument("wishart: lambda must be finite and >= 0");
}

double cross_term(const WishartParams& p, double q_u, double q_v, double ru, double rv) {
    return 0.5 * p.lambda * p.alpha * (q_u - ru) * (q_v - rv);
}

struct InnerSup {
    double q_v = 0.0;
    double value = 0.0;  // full potential at (q_u, q_v)
};

// sup over q_v of the potential for fixed q_u. Only the cross term and the
// U-side mutual information depend on q_v; the V-side term is passed in.
InnerSup inner_sup(const WishartParams& p, double q_u, double ru, double rv,
                   double v_side, const NormalQuadrature& quad) {
    auto h = [&](double q_v) {
        return cross_term(p, q_u, q_v, ru, rv) +
               mutual_info(p.prior_u, p.lambda * p.alpha * q_v, quad);
    };
    constexpr double inv_phi = 0.6180339887498949;
    double a = 0.0, b = rv;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = h(x1), f2 = h(x2);
    for (int i = 0; i < 140 && (b - a) > 1e-18 + 1e-16 * rv; ++i) {
        if (f1 >= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = h(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = h(x2);
        }
    }
    InnerSup s;
    s.q_v = f1 >= f2 ? x1 : x2;
    double best = std::max(f1, f2);
    // concave in q_v, but guard the endpoints anyway
    const double h0 = h(0.0), hr = h(rv);
    if (h0 > best) {
        best = h0;
        s.q_v = 0.0;
    }
    if (hr > best) {
        best = hr;
        s.q_v = rv;
    }
    s.value = best + v_side;
    return s;
}

}  // namespace

double wishart_lambda_from_gamma(double gamma, double alpha, double rho_v) {
    return std::sqrt(4.0 * gamma * std::abs(std::log(rho_v)) / (alpha * rho_v));
}

double wishart_gamma_from_lambda(double lambda, double alpha, double rho_v) {
    return lambda * lambda * alpha * rho_v / (4.0 * std::abs(std::log(rho_v)));
}

double wishart_potential_value(const WishartParams& p, double q_u, double q_v,
                               const QuadratureSpec& spec) {
    check_params(p);
    const double ru = p.prior_u.second_moment();
    const double rv = p.prior_v.second_moment();
    if (!(q_u >= 0.0) || q_u > ru * (1.0 + 1e-12))
        throw std::invalid_argument("wishart: q_u out of [0, E U^2]");
    if (!(q_v >= 0.0) || q_v > rv * (1.0 + 1e-12))
        throw std::invalid_argument("wishart: q_v out of [0, E V^2]");
    const NormalQuadrature quad(spec);
    return cross_term(p, q_u, q_v, ru, rv) +
           mutual_info(p.prior_u, p.lambda * p.alpha * q_v, quad) +
           p.alpha * mutual_info(p.prior_v, p.lambda * q_u, quad);
}

InfSupResult solve_infsup(const WishartParams& p, const QuadratureSpec& spec) {
    check_params(p);
    const double ru = p.prior_u.second_moment();
    const double rv = p.prior_v.second_moment();
    if (p.lambda == 0.0) return {0.0, 0.0, 0.0, 0.0, 0.0};

    const NormalQuadrature quad(spec);
    auto outer = [&](double q_u) {
        const double v_side = p.alpha * mutual_info(p.prior_v, p.lambda * q_u, quad);
        return inner_sup(p, q_u, ru, rv, v_side, quad);
    };

    std::vector<double> qs;
    qs.reserve(kGridPoints + 1);
    qs.push_back(0.0);
    const double qlo = ru * 1e-12;
    const double step = std::log(ru / qlo) / (kGridPoints - 1);
    for (int i = 0; i < kGridPoints; ++i) qs.push_back(qlo * std::exp(step * i));
    qs.back() = ru;

    std::vector<double> vals(qs.size());
    for (std::size_t i = 0; i < qs.size(); ++i) vals[i] = outer(qs[i]).value;

    std::size_t best_i = 0;
    const std::size_t last = qs.size() - 1;
    double best_val = vals[0];
    double best_q = qs[0];
    bool have = false;
    auto g = [&](double q_u) { return outer(q_u).value; };
    constexpr double inv_phi = 0.6180339887498949;
    for (std::size_t i = 0; i <= last; ++i) {
        const bool left_ok = i == 0 || vals[i] <= vals[i - 1];
        const bool right_ok = i == last || vals[i] <= vals[i + 1];
        if (!(left_ok && right_ok)) continue;
        double a = qs[i == 0 ? 0 : i - 1];
        double b = qs[i == last ? last : i + 1];
        double x1 = b - inv_phi * (b - a);
        double x2 = a + inv_phi * (b - a);
        double f1 = g(x1), f2 = g(x2);
        for (int it = 0; it < 140 && (b - a) > 1e-18 + 1e-16 * std::abs(b); ++it) {
            if (f1 <= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = g(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = g(x2);
            }
        }
        const double x = f1 <= f2 ? x1 : x2;
        const double fx = std::min(f1, f2);
        if (!have || fx < best_val) {
            best_val = fx;
            best_q = x;
            best_i = i;
            have = true;
        }
    }
    (void)best_i;

    // Outer derivative by Danskin: g'(q_u) propto q_v*(q_u) - rv + mmse_V(lambda q_u).
    // Bisect it across the refined point when a sign change brackets the root.
    auto outer_resid = [&](double q_u) {
        const double v_side = p.alpha * mutual_info(p.prior_v, p.lambda * q_u, quad);
        const InnerSup s = inner_sup(p, q_u, ru, rv, v_side, quad);
        return s.q_v - rv + mmse(p.prior_v, p.lambda * q_u, quad);
    };
    if (best_q > qs[1] * 0.5 && best_q < ru * (1.0 - 1e-13)) {
        double lo = std::max(best_q * (1.0 - 1e-3), qlo);
        double hi = std::min(best_q * (1.0 + 1e-3), ru);
        double rl = outer_resid(lo), rh = outer_resid(hi);
        if (rl < 0.0 && rh > 0.0) {
            for (int it = 0; it < 100 && (hi - lo) > 1e-17 * ru; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (outer_resid(mid) < 0.0)
                    lo = mid;
                else
                    hi = mid;
            }
            const double q_root = 0.5 * (lo + hi);
            const double v_root = g(q_root);
            if (v_root <= best_val + 1e-13 * (1.0 + std::abs(best_val))) {
                best_q = q_root;
                best_val = v_root;
            }
        }
    }

    const InnerSup s = outer(best_q);
    InfSupResult r;
    r.q_u_star = best_q;
    r.q_v_star = s.q_v;
    r.value = s.value;
    r.stationarity_residual_u =
        std::abs(best_q - (ru - mmse(p.prior_u, p.lambda * p.alpha * s.q_v, quad)));
    r.stationarity_residual_v =
        std::abs(s.q_v - (rv - mmse(p.prior_v, p.lambda * best_q, quad)));
    return r;
}

std::vector<WishartMmsePoint> wishart_mmse(const WishartParams& base,
                                           std::span<const double> lambdas,
                                           const QuadratureSpec& spec,
                                           unsigned threads) {
    if (lambdas.empty()) throw std::invalid_argument("wishart: empty lambda grid");
    const double ru = base.prior_u.second_moment();
    const double rv = base.prior_v.second_moment();
    std::vector<WishartMmsePoint> rows(lambdas.size());
    parallel_for(lambdas.size(), threads, [&](std::size_t i) {
        WishartParams p = base;
        p.lambda = lambdas[i];
        const InfSupResult r = solve_infsup(p, spec);
        WishartMmsePoint& row = rows[i];
        row.lambda = p.lambda;
        row.gamma_v = wishart_gamma_from_lambda(p.lambda, p.alpha, base.prior_v.rho());
        row.q_u_star = r.q_u_star;
        row.q_v_star = r.q_v_star;
        row.value = r.value;
        row.mmse_vv_norm = 1.0 - (r.q_v_star / rv) * (r.q_v_star / rv);
        row.mmse_uu_norm = 1.0 - (r.q_u_star / ru) * (r.q_u_star / ru);
        row.mmse_uv_norm = 1.0 - r.q_u_star * r.q_v_star / (ru * rv);
    });
    return rows;
}

WishartThreshold wishart_v_threshold(const WishartParams& base,
                                     const QuadratureSpec& spec) {
    const double rho_v = base.prior_v.rho();
    if (!(rho_v < 0.5))
        throw std::invalid_argument("wishart: threshold search requires rho_V < 0.5");
    const double rv = base.prior_v.second_moment();

    auto informative = [&](double gamma) {
        WishartParams p = base;
        p.lambda = wishart_lambda_from_gamma(gamma, base.alpha, rho_v);
        return solve_infsup(p, spec).q_v_star / rv >= 0.5;
    };

    double lo = 0.1, hi = 3.0;
    if (informative(lo) || !informative(hi))
        throw std::runtime_error("wishart: no q_V* jump detected in gamma window [0.1, 3]");
    while ((hi - lo) / hi > 1e-4) {
        const double mid = 0.5 * (lo + hi);
        if (informative(mid))
            hi = mid;
        else
            lo = mid;
    }
    const double gamma_star = 0.5 * (lo + hi);
    return {wishart_lambda_from_gamma(gamma_star, base.alpha, rho_v), gamma_star};
}

}  // namespace spikelab
