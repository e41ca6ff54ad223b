// Shared fixtures: the small family of markets the tests keep coming back to.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "corn/market.hpp"

namespace support {

// Deterministic 2-asset market alternating (2, 0.5), (0.5, 2), (2, 0.5), ...
corn::MarketSequence alternating(int n);

// Cash + double-or-half risky asset: {(1,2): 0.6, (1,0.5): 0.4}.
corn::SyntheticMarketSpec kelly_spec(std::uint64_t seed);

// Two regimes that alternate deterministically, each emitting one vector.
corn::SyntheticMarketSpec alternating_spec(std::uint64_t seed);

// Sticky two-regime chain [[0.9,0.1],[0.1,0.9]]; regime 0 emits (1,1.25),
// regime 1 emits (1,0.8).
corn::SyntheticMarketSpec sticky_spec(std::uint64_t seed);

// Fresh empty scratch directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

void write_file(const std::filesystem::path& p, const std::string& content);
std::string read_file(const std::filesystem::path& p);

}  // namespace support
