#include "spikelab/amp.hpp"

#include <cmath>
#include <stdexcept>

#include "spikelab/scalar_channel.hpp"

namespace spikelab {

namespace {

// Stream labels within an instance seed.
constexpr std::uint64_t kSignalStream = 0;
constexpr std::uint64_t kNoiseStream = 1;
constexpr std::uint64_t kInitStream = 2;

inline std::uint64_t pair_index(int i, int j, int n) {
    // row-major upper triangle, i < j
    return static_cast<std::uint64_t>(i) * (2 * n - i - 1) / 2 + (j - i - 1);
}

}  // namespace

Instance generate_instance(const Prior& prior, int n, double lambda, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("amp: instance needs n >= 2");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("amp: lambda must be finite and >= 0");

    Instance inst{n, lambda, prior, Eigen::VectorXd(n), Eigen::MatrixXd(n, n), seed};
    const RngStream xs{seed, kSignalStream};
    for (int i = 0; i < n; ++i) inst.X[i] = prior.sample_at(xs, static_cast<std::uint64_t>(i));

    const RngStream zs{seed, kNoiseStream};
    const double scale = std::sqrt(lambda / n);
    for (int i = 0; i < n; ++i) {
        inst.W(i, i) = 0.0;
        for (int j = i + 1; j < n; ++j) {
            const double w = scale * inst.X[i] * inst.X[j] + zs.normal(pair_index(i, j, n));
            inst.W(i, j) = w;
            inst.W(j, i) = w;
        }
    }
    return inst;
}

AmpTrajectory amp_run(const Instance& inst, const AmpInit& init,
                      const AmpOptions& opt, const QuadratureSpec& spec) {
    if (opt.t_max < 1) throw std::invalid_argument("amp: t_max must be >= 1");
    const Prior& prior = inst.prior;
    if (!prior.discrete())
        throw std::invalid_argument("amp: prior must have finite support");
    const int n = inst.n;
    const double rho = prior.second_moment();
    const double sqrt_lambda = std::sqrt(inst.lambda);
    const NormalQuadrature quad(spec);

    // f_0(x^0) and the offline state-evolution seed (mu_1, tau_1).
    Eigen::VectorXd f_prev(n);
    double mu, tau;
    switch (init.kind) {
        case AmpInit::Kind::Ones: {
            if (!(prior.mean() > 0.0))
                throw std::invalid_argument(
                    "amp: ones init needs a positive-mean prior; use side_info "
                    "for bernoulli_rademacher");
            f_prev.setOnes();
            mu = sqrt_lambda * prior.mean();
            tau = 1.0;
            break;
        }
        case AmpInit::Kind::SideInfo: {
            if (!(init.eps > 0.0))
                throw std::invalid_argument("amp: side_info init needs eps > 0");
            const RngStream is{init.seed != 0 ? init.seed : inst.seed, kInitStream};
            for (int i = 0; i < n; ++i)
                f_prev[i] = init.eps * inst.X[i] + is.normal(static_cast<std::uint64_t>(i));
            mu = sqrt_lambda * init.eps * rho;
            tau = init.eps * init.eps * rho + 1.0;
            break;
        }
        default:
            throw std::invalid_argument("amp: unknown init");
    }

    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    Eigen::VectorXd x = inv_sqrt_n * (inst.W.selfadjointView<Eigen::Upper>() * f_prev);

    AmpTrajectory traj;
    traj.records.reserve(static_cast<std::size_t>(opt.t_max));
    Eigen::VectorXd f(n), x_next(n);
    double prev_matrix_mse = -1.0;
    int flat_count = 0;

    for (int t = 1; t <= opt.t_max; ++t) {
        double b = 0.0;
        for (int i = 0; i < n; ++i) {
            f[i] = denoise(prior, mu, tau, x[i]);
            b += denoise_deriv(prior, mu, tau, x[i]);
        }
        b /= n;

        const auto [vec_mse, mat_mse] = empirical_mse(inst.X, f, rho);
        const double tau_next = mean_square_denoise(prior, mu, tau, quad);
        traj.records.push_back({t, f.dot(inst.X) / n, b, vec_mse, mat_mse, tau_next});

        if (prev_matrix_mse >= 0.0 && std::abs(mat_mse - prev_matrix_mse) < opt.early_stop_tol) {
            if (++flat_count >= opt.early_stop_window) break;
        } else {
            flat_count = 0;
        }
        prev_matrix_mse = mat_mse;
        if (t == opt.t_max) break;

        x_next = inv_sqrt_n * (inst.W.selfadjointView<Eigen::Upper>() * f);
        if (opt.onsager) x_next -= b * f_prev;
        f_prev = f;
        x = x_next;
        mu = sqrt_lambda * tau_next;
        tau = tau_next;
    }

    traj.estimate = f;
    return traj;
}

std::pair<double, double> empirical_mse(const Eigen::VectorXd& X,
                                        const Eigen::VectorXd& estimate, double rho) {
    if (X.size() != estimate.size())
        throw std::invalid_argument("amp: estimate length mismatch");
    const double n_rho = static_cast<double>(X.size()) * rho;
    const double x2 = X.squaredNorm();
    const double e2 = estimate.squaredNorm();
    const double xe = X.dot(estimate);
    const double vector_mse = (X - estimate).squaredNorm() / n_rho;
    const double matrix_mse = (x2 * x2 - 2.0 * xe * xe + e2 * e2) / (n_rho * n_rho);
    return {vector_mse, matrix_mse};
}

}  // namespace spikelab
