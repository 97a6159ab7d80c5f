#include "spikelab/quadrature.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace spikelab {

void validate(const QuadratureSpec& spec) {
    if (spec.node_count < 16)
        throw std::invalid_argument("quadrature: node_count must be >= 16");
    if (!(spec.half_width >= 6.0))
        throw std::invalid_argument("quadrature: half_width must be >= 6");
}

namespace {

// Gauss-Legendre nodes/weights on [-1,1], Newton iteration on P_m.
void gauss_legendre(int m, std::vector<double>& x, std::vector<double>& w) {
    x.assign(m, 0.0);
    w.assign(m, 0.0);
    const int half = (m + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < m; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = m * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[m - 1 - i] = w[i];
    }
}

constexpr int kPanelOrder = 20;

}  // namespace

NormalQuadrature::NormalQuadrature(const QuadratureSpec& spec) {
    validate(spec);
    static const auto ref = [] {
        std::pair<std::vector<double>, std::vector<double>> r;
        gauss_legendre(kPanelOrder, r.first, r.second);
        return r;
    }();

    const int panels = (spec.node_count + kPanelOrder - 1) / kPanelOrder;
    const double H = spec.half_width;
    const double dz = 2.0 * H / panels;
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);

    z_.reserve(static_cast<std::size_t>(panels) * kPanelOrder);
    w_.reserve(z_.capacity());
    for (int p = 0; p < panels; ++p) {
        const double a = -H + p * dz;
        const double c = a + 0.5 * dz;
        for (int i = 0; i < kPanelOrder; ++i) {
            const double z = c + 0.5 * dz * ref.first[i];
            z_.push_back(z);
            w_.push_back(0.5 * dz * ref.second[i] * norm * std::exp(-0.5 * z * z));
        }
    }
}

double log_add_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    const double m = a > b ? a : b;
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace spikelab
