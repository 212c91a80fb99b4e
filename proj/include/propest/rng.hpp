#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace propest {

using Engine = std::mt19937_64;

/// Name recorded in simulation reports so runs can be reproduced.
inline constexpr std::string_view kStreamName = "mt19937_64 seeded by seed_seq(seed, stream_index)";

/// Independent stream number `index` under `seed`. The mapping depends only
/// on (seed, index), never on which worker asks for it.
inline Engine derive_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Engine(seq);
}

}  // namespace propest
