#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "spikelab/rng.hpp"

namespace spikelab {

enum class PriorKind { Bernoulli, BernoulliRademacher, Gaussian };

struct Atom {
    double value = 0.0;
    double prob = 0.0;
};

struct Moments {
    double mean = 0.0;
    double second_moment = 0.0;
    double variance = 0.0;
};

/// Signal law P_X = rho * p_X + (1 - rho) * delta_0 with the non-zero part
/// p_X normalized to unit second moment, so E[X^2] = rho for the discrete
/// kinds. The Gaussian kind is the unit normal (E[X^2] = 1); it exists for
/// the spiked-covariance setting and is rejected by operations that require
/// finite support.
class Prior {
public:
    static Prior bernoulli(double rho);
    static Prior bernoulli_rademacher(double rho);
    static Prior gaussian();

    /// Parse {"bernoulli" | "bernoulli_rademacher" | "gaussian"}.
    static Prior from_config(const std::string& kind, double rho);

    PriorKind kind() const { return kind_; }
    bool discrete() const { return kind_ != PriorKind::Gaussian; }

    /// Sparsity weight; 1 for the Gaussian kind.
    double rho() const { return rho_; }

    /// Atoms of the discrete law; empty for the Gaussian kind.
    const std::vector<Atom>& atoms() const { return atoms_; }

    Moments moments() const;
    double mean() const { return moments().mean; }
    double second_moment() const { return moments().second_moment; }
    double variance() const { return moments().variance; }

    /// n i.i.d. draws, derived per-index from the stream so the result is
    /// independent of evaluation order. Throws on n == 0.
    std::vector<double> sample(std::size_t n, const RngStream& stream) const;

    /// Single draw at a given stream index.
    double sample_at(const RngStream& stream, std::uint64_t index) const;

    std::string name() const;

private:
    Prior(PriorKind kind, double rho, std::vector<Atom> atoms);

    PriorKind kind_;
    double rho_;
    std::vector<Atom> atoms_;
};

}  // namespace spikelab
