#include "spikelab/grid.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace spikelab {

namespace {

double parse_double(const std::string& s) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("grid: bad number '" + s + "'");
    }
    if (pos != s.size()) throw std::invalid_argument("grid: bad number '" + s + "'");
    return v;
}

}  // namespace

GridSpec GridSpec::parse(const std::string& text) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t colon = text.find(':', start);
        if (colon == std::string::npos) {
            parts.push_back(text.substr(start));
            break;
        }
        parts.push_back(text.substr(start, colon - start));
        start = colon + 1;
    }

    GridSpec g;
    if (parts.size() == 1) {
        g.min = g.max = parse_double(parts[0]);
        g.points = 1;
        return g;
    }
    if (parts.size() < 3 || parts.size() > 4)
        throw std::invalid_argument("grid: expected 'min:max:points[:log]', got '" + text + "'");
    g.min = parse_double(parts[0]);
    g.max = parse_double(parts[1]);
    const double pts = parse_double(parts[2]);
    g.points = static_cast<int>(pts);
    if (g.points < 1 || pts != g.points)
        throw std::invalid_argument("grid: points must be a positive integer");
    if (parts.size() == 4) {
        if (parts[3] != "log")
            throw std::invalid_argument("grid: trailing qualifier must be 'log'");
        g.log_scale = true;
    }
    if (g.max < g.min) throw std::invalid_argument("grid: max must be >= min");
    if (g.log_scale && !(g.min > 0.0))
        throw std::invalid_argument("grid: log scale needs min > 0");
    return g;
}

std::vector<double> GridSpec::values() const {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(points));
    if (points == 1) {
        out.push_back(min);
        return out;
    }
    if (log_scale) {
        const double step = std::log(max / min) / (points - 1);
        for (int i = 0; i < points; ++i) out.push_back(min * std::exp(step * i));
    } else {
        const double step = (max - min) / (points - 1);
        for (int i = 0; i < points; ++i) out.push_back(min + step * i);
    }
    out.back() = max;
    return out;
}

}  // namespace spikelab
