#pragma once

#include <string>
#include <vector>

namespace spikelab::cli {

/// Experiment runner behind the spikelab binary. Exit codes: 0 success,
/// 1 validation failure (an oracle check failed), 2 configuration error.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace spikelab::cli
