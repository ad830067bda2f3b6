#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lenscrypt {

inline constexpr const char* kVersion = "0.1.0";

// SplitMix64 step. Advances state and returns the next value.
std::uint64_t splitmix64(std::uint64_t& state);

// Independent sub-seed for stream `index` of a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

std::uint64_t fnv1a64(const void* data, std::size_t size,
                      std::uint64_t h = 0xcbf29ce484222325ULL);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

// Runs fn(i) for i in [0, n). threads <= 1 runs inline; otherwise work is
// split statically across a worker pool. fn must only touch per-index state.
// The first exception thrown by any worker is rethrown on the caller.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn);

// Shortest round-trip decimal form; used everywhere CSV determinism matters.
std::string format_double(double v);

}  // namespace lenscrypt
