#pragma once

#include <string>
#include <vector>

namespace spikelab {

/// Sweep grid parsed from "min:max:points[:log]". A bare number is a
/// one-point grid.
struct GridSpec {
    double min = 0.0;
    double max = 0.0;
    int points = 1;
    bool log_scale = false;

    static GridSpec parse(const std::string& text);
    std::vector<double> values() const;
};

}  // namespace spikelab
