#pragma once

#include <cstddef>
#include <vector>

namespace spikelab {

/// Settings for expectations over a standard normal variable.
/// The integral is a composite Gauss-Legendre rule on
/// [-half_width, +half_width] with the N(0,1) density folded into the
/// weights. A wide window is required because several integrands carry
/// exp() factors whose argument scales like lambda*q.
struct QuadratureSpec {
    int node_count = 2000;
    double half_width = 10.0;
};

/// Throws std::invalid_argument if the spec violates its invariants
/// (node_count >= 16, half_width >= 6).
void validate(const QuadratureSpec& spec);

/// Precomputed nodes z_i and weights w_i (including the normal density)
/// so that E[f(Z)] ~ sum_i w_i f(z_i) for Z ~ N(0,1).
class NormalQuadrature {
public:
    explicit NormalQuadrature(const QuadratureSpec& spec = {});

    template <class F>
    double expect(F&& f) const {
        double acc = 0.0;
        const std::size_t m = z_.size();
        for (std::size_t i = 0; i < m; ++i) acc += w_[i] * f(z_[i]);
        return acc;
    }

    const std::vector<double>& nodes() const { return z_; }
    const std::vector<double>& weights() const { return w_; }

private:
    std::vector<double> z_;
    std::vector<double> w_;
};

/// log(exp(a) + exp(b)) without overflow.
double log_add_exp(double a, double b);

}  // namespace spikelab
