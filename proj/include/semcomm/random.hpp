// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace semcomm {

using Rng = std::mt19937_64;

/// Independent, reproducible generator for the named stream of `seed`.
/// Every consumer of randomness draws from its own (name, index) stream so
/// that adding a consumer never shifts another one's draws.
Rng substream(std::uint64_t seed, std::string_view name, std::uint64_t index = 0);

}  // namespace semcomm
