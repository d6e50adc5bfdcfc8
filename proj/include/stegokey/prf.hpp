#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace stegokey::prf {

/// 32-byte BLAKE2b digest of arbitrary bytes (unkeyed).
std::array<std::uint8_t, 32> digest32(std::span<const std::uint8_t> data);

/// 32-byte keyed BLAKE2b of `message` under a 32-byte key.
std::array<std::uint8_t, 32> keyed32(const std::array<std::uint8_t, 32>& key,
                                     std::span<const std::uint8_t> message);

/// First 8 bytes of keyed32, little endian.
std::uint64_t keyed64(const std::array<std::uint8_t, 32>& key,
                      std::span<const std::uint8_t> message);

/// Little-endian append helpers for building PRF messages.
void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v);
void append_u64(std::vector<std::uint8_t>& out, std::uint64_t v);
void append_tag(std::vector<std::uint8_t>& out, const char (&tag)[5]);

} // namespace stegokey::prf
