#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "spikelab/amp.hpp"
#include "spikelab/prior.hpp"

namespace spikelab {

/// Exhaustive posterior over all |support|^n signal configurations of a
/// small instance. Enumeration limits: n <= 14 for binary support,
/// n <= 9 for ternary.
struct PosteriorTable {
    int n = 0;
    int support = 0;
    std::vector<double> atom_values;
    std::vector<std::int8_t> configs;   // n_configs x n atom indices, row-major
    std::vector<double> log_weights;    // normalized: logsumexp == 0
    double log_z = 0.0;                 // unnormalized log partition sum
    Eigen::VectorXd marginal_means;     // <x_i>
    Eigen::MatrixXd pair_means;         // <x_i x_j>, diagonal <x_i^2>

    std::size_t n_configs() const { return log_weights.size(); }
    double config_value(std::size_t c, int i) const {
        return atom_values[static_cast<std::size_t>(
            configs[c * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)])];
    }
};

/// All log weights follow the model posterior
///   log w(x) = sum_i log P(x_i)
///            + sum_{i<j} [ sqrt(lambda/n) x_i x_j W_ij - lambda x_i^2 x_j^2 / (2n) ]
/// up to the common normalizer. lambda_assumed overrides the instance
/// lambda inside the weights (mismatched-posterior negative controls).
PosteriorTable exact_posterior(const Instance& instance,
                               std::optional<double> lambda_assumed = {});

/// <(x . X)^2> / n^2 under the table's posterior.
double posterior_overlap_sq(const PosteriorTable& table, const Eigen::VectorXd& X);

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    int samples = 0;
};

/// Monte Carlo over instances of (1/n^2) ||X (x) X - <x (x) x>||_F^2 with
/// the exact inner posterior (full matrix, diagonal included).
McEstimate exact_matrix_mmse(const Prior& prior, int n, double lambda,
                             int n_samples, std::uint64_t seed);

/// Monte Carlo estimate of (1/n) I(X; W) through the exact log partition
/// sum: i = (n-1) lambda (E X^2)^2 / (4n) - E[ln Z]/n.
McEstimate exact_mutual_info(const Prior& prior, int n, double lambda,
                             int n_samples, std::uint64_t seed);

struct NishimoriReport {
    /// (E||<x>||^2 - E[X . <x>]) / n; zero in expectation for the matched posterior.
    McEstimate mean_residual;
    /// E<(x.X)^2>/n^2 - E||<x (x) x>||_F^2/n^2; the two-replica overlap version.
    McEstimate overlap_residual;
    bool pass(double n_sigma = 3.0) const;
};

/// Nishimori identity residuals with exact inner expectations, so any
/// deviation is pure Monte Carlo noise; lambda_assumed != lambda makes
/// them significantly nonzero (negative control).
NishimoriReport check_nishimori(const Prior& prior, int n, double lambda,
                                int n_samples, std::uint64_t seed,
                                std::optional<double> lambda_assumed = {});

struct ImmseReport {
    double fd_derivative = 0.0;      // [i(lambda+h) - i(lambda-h)] / (2h), CRN paired
    double fd_std_error = 0.0;
    double half_pair_mmse = 0.0;     // (1/2n^2) MMSE((X_i X_j)_{i<j} | W)
    double mmse_std_error = 0.0;
    double combined_std_error = 0.0;
    bool pass(double n_sigma = 3.0) const;
};

/// I-MMSE identity d/dlambda (1/n) I = (1/2n^2) MMSE((X_i X_j)_{i<j}|W),
/// finite difference against the exact pairwise MMSE. The lambda +- h
/// evaluations share signal and noise draws.
ImmseReport check_immse(const Prior& prior, int n, double lambda, double h,
                        int n_samples, std::uint64_t seed);

}  // namespace spikelab
