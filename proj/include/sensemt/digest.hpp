#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace sensemt {

using Sha256 = std::array<std::uint8_t, 32>;

Sha256 sha256(std::span<const std::uint8_t> bytes);
Sha256 sha256(std::string_view bytes);
std::string to_hex(const Sha256& digest);
std::string sha256_hex(std::string_view bytes);
std::string file_sha256_hex(const std::string& path);

/// Stable 64-bit seed derived from a base seed and a key.
std::uint64_t derive_seed(std::uint64_t base, std::string_view key);

}  // namespace sensemt
