#pragma once

namespace spikelab {

inline constexpr const char* version() { return "0.1.0"; }

}  // namespace spikelab
