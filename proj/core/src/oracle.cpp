#include "spikelab/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "spikelab/quadrature.hpp"

namespace spikelab {

namespace {

void check_limits(const Prior& prior, int n) {
    if (!prior.discrete())
        throw std::invalid_argument("oracle: prior must have finite support");
    int support = 0;
    for (const Atom& a : prior.atoms())
        if (a.prob > 0.0) ++support;
    const int limit = support <= 2 ? 14 : 9;
    if (n < 1 || n > limit)
        throw std::invalid_argument("oracle: n exceeds enumeration limit");
}

struct RunningStat {
    double sum = 0.0;
    double sum_sq = 0.0;
    int count = 0;

    void add(double x) {
        sum += x;
        sum_sq += x * x;
        ++count;
    }
    McEstimate estimate() const {
        McEstimate e;
        e.samples = count;
        e.estimate = sum / count;
        if (count > 1) {
            const double var = (sum_sq - sum * sum / count) / (count - 1);
            e.std_error = std::sqrt(std::max(var, 0.0) / count);
        }
        return e;
    }
};

std::uint64_t sample_seed(std::uint64_t seed, int s) {
    return derive_seed(seed, static_cast<std::uint64_t>(s) + 1000);
}

}  // namespace

PosteriorTable exact_posterior(const Instance& inst, std::optional<double> lambda_assumed) {
    check_limits(inst.prior, inst.n);
    const int n = inst.n;
    const double lambda = lambda_assumed.value_or(inst.lambda);
    const double cw = std::sqrt(lambda / n);
    const double dw = 0.5 * lambda / n;

    PosteriorTable table;
    table.n = n;
    std::vector<double> log_prob;
    for (const Atom& a : inst.prior.atoms()) {
        if (a.prob <= 0.0) continue;
        table.atom_values.push_back(a.value);
        log_prob.push_back(std::log(a.prob));
    }
    table.support = static_cast<int>(table.atom_values.size());

    std::size_t n_configs = 1;
    for (int i = 0; i < n; ++i) n_configs *= static_cast<std::size_t>(table.support);
    table.configs.resize(n_configs * static_cast<std::size_t>(n));
    table.log_weights.resize(n_configs);

    std::vector<std::int8_t> digits(n, 0);
    std::vector<double> xv(n);
    for (std::size_t c = 0; c < n_configs; ++c) {
        double lw = 0.0;
        for (int i = 0; i < n; ++i) {
            table.configs[c * n + i] = digits[i];
            xv[i] = table.atom_values[digits[i]];
            lw += log_prob[digits[i]];
        }
        for (int i = 0; i < n; ++i) {
            const double xi = xv[i];
            if (xi == 0.0) continue;
            for (int j = i + 1; j < n; ++j) {
                const double prod = xi * xv[j];
                lw += cw * prod * inst.W(i, j) - dw * prod * prod;
            }
        }
        table.log_weights[c] = lw;

        // odometer
        for (int i = 0; i < n; ++i) {
            if (++digits[i] < table.support) break;
            digits[i] = 0;
        }
    }

    double lmax = table.log_weights[0];
    for (double lw : table.log_weights) lmax = std::max(lmax, lw);
    double acc = 0.0;
    for (double lw : table.log_weights) acc += std::exp(lw - lmax);
    table.log_z = lmax + std::log(acc);
    for (double& lw : table.log_weights) lw -= table.log_z;

    table.marginal_means = Eigen::VectorXd::Zero(n);
    table.pair_means = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t c = 0; c < n_configs; ++c) {
        const double w = std::exp(table.log_weights[c]);
        for (int i = 0; i < n; ++i) xv[i] = table.config_value(c, i);
        for (int i = 0; i < n; ++i) {
            table.marginal_means[i] += w * xv[i];
            for (int j = i; j < n; ++j) table.pair_means(i, j) += w * xv[i] * xv[j];
        }
    }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) table.pair_means(j, i) = table.pair_means(i, j);
    return table;
}

double posterior_overlap_sq(const PosteriorTable& table, const Eigen::VectorXd& X) {
    const int n = table.n;
    double acc = 0.0;
    for (std::size_t c = 0; c < table.n_configs(); ++c) {
        double dot = 0.0;
        for (int i = 0; i < n; ++i) dot += table.config_value(c, i) * X[i];
        acc += std::exp(table.log_weights[c]) * dot * dot;
    }
    return acc / (static_cast<double>(n) * n);
}

McEstimate exact_matrix_mmse(const Prior& prior, int n, double lambda,
                             int n_samples, std::uint64_t seed) {
    check_limits(prior, n);
    if (n < 2) throw std::invalid_argument("oracle: matrix mmse needs n >= 2");
    if (n_samples < 2) throw std::invalid_argument("oracle: n_samples too small");
    RunningStat stat;
    for (int s = 0; s < n_samples; ++s) {
        const Instance inst = generate_instance(prior, n, lambda, sample_seed(seed, s));
        const PosteriorTable table = exact_posterior(inst);
        double frob = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double d = inst.X[i] * inst.X[j] - table.pair_means(i, j);
                frob += d * d;
            }
        stat.add(frob / (static_cast<double>(n) * n));
    }
    return stat.estimate();
}

McEstimate exact_mutual_info(const Prior& prior, int n, double lambda,
                             int n_samples, std::uint64_t seed) {
    check_limits(prior, n);
    if (n_samples < 2) throw std::invalid_argument("oracle: n_samples too small");
    const double m2 = prior.second_moment();
    const double offset = (n - 1) * lambda * m2 * m2 / (4.0 * n);
    RunningStat stat;
    for (int s = 0; s < n_samples; ++s) {
        if (n == 1) {
            stat.add(0.0);  // no observations exist
            continue;
        }
        const Instance inst = generate_instance(prior, n, lambda, sample_seed(seed, s));
        const PosteriorTable table = exact_posterior(inst);
        stat.add(offset - table.log_z / n);
    }
    return stat.estimate();
}

bool NishimoriReport::pass(double n_sigma) const {
    return std::abs(mean_residual.estimate) <= n_sigma * mean_residual.std_error &&
           std::abs(overlap_residual.estimate) <= n_sigma * overlap_residual.std_error;
}

NishimoriReport check_nishimori(const Prior& prior, int n, double lambda,
                                int n_samples, std::uint64_t seed,
                                std::optional<double> lambda_assumed) {
    check_limits(prior, n);
    if (n < 2) throw std::invalid_argument("oracle: nishimori check needs n >= 2");
    RunningStat mean_stat, overlap_stat;
    for (int s = 0; s < n_samples; ++s) {
        const Instance inst = generate_instance(prior, n, lambda, sample_seed(seed, s));
        const PosteriorTable table = exact_posterior(inst, lambda_assumed);
        const double norm_sq = table.marginal_means.squaredNorm();
        const double cross = inst.X.dot(table.marginal_means);
        mean_stat.add((norm_sq - cross) / n);
        const double q_x = posterior_overlap_sq(table, inst.X);
        const double q_12 = table.pair_means.squaredNorm() / (static_cast<double>(n) * n);
        overlap_stat.add(q_x - q_12);
    }
    return {mean_stat.estimate(), overlap_stat.estimate()};
}

bool ImmseReport::pass(double n_sigma) const {
    return std::abs(fd_derivative - half_pair_mmse) <= n_sigma * combined_std_error;
}

ImmseReport check_immse(const Prior& prior, int n, double lambda, double h,
                        int n_samples, std::uint64_t seed) {
    check_limits(prior, n);
    if (n < 2) throw std::invalid_argument("oracle: immse check needs n >= 2");
    if (!(h > 0.0) || h >= lambda)
        throw std::invalid_argument("oracle: need 0 < h < lambda");
    const double m2 = prior.second_moment();

    RunningStat fd_stat, mmse_stat;
    for (int s = 0; s < n_samples; ++s) {
        // Shared (X, Z); only the spike scaling differs between the three
        // lambdas, which makes the finite difference nearly noise-free.
        const std::uint64_t inst_seed = sample_seed(seed, s);
        Instance inst = generate_instance(prior, n, 0.0, inst_seed);
        Eigen::MatrixXd Z = inst.W;
        auto set_lambda = [&](double lam) {
            inst.lambda = lam;
            const double scale = std::sqrt(lam / n);
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j) {
                    const double w = scale * inst.X[i] * inst.X[j] + Z(i, j);
                    inst.W(i, j) = w;
                    inst.W(j, i) = w;
                }
        };

        set_lambda(lambda + h);
        const double i_plus =
            (n - 1) * (lambda + h) * m2 * m2 / (4.0 * n) - exact_posterior(inst).log_z / n;
        set_lambda(lambda - h);
        const double i_minus =
            (n - 1) * (lambda - h) * m2 * m2 / (4.0 * n) - exact_posterior(inst).log_z / n;
        fd_stat.add((i_plus - i_minus) / (2.0 * h));

        set_lambda(lambda);
        const PosteriorTable table = exact_posterior(inst);
        double pair_sq = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double d = inst.X[i] * inst.X[j] - table.pair_means(i, j);
                pair_sq += d * d;
            }
        mmse_stat.add(pair_sq / (2.0 * static_cast<double>(n) * n));
    }

    ImmseReport rep;
    const McEstimate fd = fd_stat.estimate();
    const McEstimate mm = mmse_stat.estimate();
    rep.fd_derivative = fd.estimate;
    rep.fd_std_error = fd.std_error;
    rep.half_pair_mmse = mm.estimate;
    rep.mmse_std_error = mm.std_error;
    rep.combined_std_error = std::sqrt(fd.std_error * fd.std_error + mm.std_error * mm.std_error);
    return rep;
}

}  // namespace spikelab
