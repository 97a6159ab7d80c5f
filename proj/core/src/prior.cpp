#include "spikelab/prior.hpp"

#include <cmath>
#include <stdexcept>

namespace spikelab {

namespace {

void check_rho(double rho) {
    if (!(rho > 0.0) || rho > 1.0)
        throw std::invalid_argument("prior: rho must lie in (0, 1]");
}

}  // namespace

Prior::Prior(PriorKind kind, double rho, std::vector<Atom> atoms)
    : kind_(kind), rho_(rho), atoms_(std::move(atoms)) {
    if (atoms_.empty()) return;
    double psum = 0.0, m2 = 0.0;
    for (const Atom& a : atoms_) {
        psum += a.prob;
        m2 += a.prob * a.value * a.value;
    }
    if (std::abs(psum - 1.0) > 1e-15)
        throw std::logic_error("prior: atom probabilities must sum to 1");
    if (std::abs(m2 - rho_) > 1e-15)
        throw std::logic_error("prior: atoms must have second moment rho");
}

Prior Prior::bernoulli(double rho) {
    check_rho(rho);
    return Prior(PriorKind::Bernoulli, rho, {{0.0, 1.0 - rho}, {1.0, rho}});
}

Prior Prior::bernoulli_rademacher(double rho) {
    check_rho(rho);
    return Prior(PriorKind::BernoulliRademacher, rho,
                 {{-1.0, 0.5 * rho}, {0.0, 1.0 - rho}, {1.0, 0.5 * rho}});
}

Prior Prior::gaussian() { return Prior(PriorKind::Gaussian, 1.0, {}); }

Prior Prior::from_config(const std::string& kind, double rho) {
    if (kind == "bernoulli") return bernoulli(rho);
    if (kind == "bernoulli_rademacher") return bernoulli_rademacher(rho);
    if (kind == "gaussian") return gaussian();
    throw std::invalid_argument("prior: unknown kind '" + kind + "'");
}

Moments Prior::moments() const {
    if (kind_ == PriorKind::Gaussian) return {0.0, 1.0, 1.0};
    double mean = 0.0, m2 = 0.0;
    for (const Atom& a : atoms_) {
        mean += a.prob * a.value;
        m2 += a.prob * a.value * a.value;
    }
    return {mean, m2, m2 - mean * mean};
}

double Prior::sample_at(const RngStream& stream, std::uint64_t index) const {
    if (kind_ == PriorKind::Gaussian) return stream.normal(index);
    const double u = stream.uniform(index);
    double cum = 0.0;
    for (const Atom& a : atoms_) {
        cum += a.prob;
        if (u < cum) return a.value;
    }
    return atoms_.back().value;
}

std::vector<double> Prior::sample(std::size_t n, const RngStream& stream) const {
    if (n == 0) throw std::invalid_argument("prior: sample of size 0 requested");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = sample_at(stream, i);
    return out;
}

std::string Prior::name() const {
    switch (kind_) {
        case PriorKind::Bernoulli: return "bernoulli";
        case PriorKind::BernoulliRademacher: return "bernoulli_rademacher";
        case PriorKind::Gaussian: return "gaussian";
    }
    return "?";
}

}  // namespace spikelab
