#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stegokey/payload.hpp"
#include "stegokey/poly_keys.hpp"
#include "stegokey/wav.hpp"

namespace stegokey {

inline constexpr std::uint32_t kDefaultFrameLen = 16; // samples per channel per frame

/// Where and how a key hides data in a cover: the start frame, the two bit
/// positions used in every designated sample, and the key-derived bit
/// sequence XORed onto the data. Everything is a pure function of the key,
/// so nothing has to travel with the file.
struct StegoGeometry {
    std::uint32_t frame_len = kDefaultFrameLen;
    std::size_t total_frames = 0;
    std::size_t start_frame = 0;
    std::uint32_t loc1 = 0; // in [0,3]
    std::uint32_t loc2 = 4; // in [4,7]
    std::vector<std::uint8_t> keybits; // cycled during embedding
};

struct BitMasks {
    std::uint16_t cmask1 = 0;
    std::uint16_t cmask2 = 0;
    std::uint16_t cmask = 0; // cmask1 AND cmask2: exactly two zero bits
};

StegoGeometry derive_geometry(const ClassKey& key, std::size_t total_frames,
                              std::uint32_t frame_len = kDefaultFrameLen);

/// Single-bit clearing masks for the two embedding positions.
BitMasks clear_masks(std::uint32_t loc1, std::uint32_t loc2);

/// Worst-case embeddable bits for any key: two bits per channel per frame,
/// counted from the largest possible start frame.
std::size_t capacity_bits(const WavAudio& cover, std::uint32_t frame_len = kDefaultFrameLen);

/// Hides `sealed` in a copy of `cover`. Touches only bits loc1/loc2 of the
/// first sample of each used frame, on every channel; the output serializes
/// to exactly the cover's byte length.
WavAudio embed(const WavAudio& cover, std::span<const std::uint8_t> sealed,
               const ClassKey& key, std::uint32_t frame_len = kDefaultFrameLen);

/// Recovers the sealed bytes embed() hid. Reads the envelope length fields
/// through the keystream to know exactly how many bits to consume.
std::vector<std::uint8_t> extract(const WavAudio& stego, const ClassKey& key,
                                  std::uint32_t frame_len = kDefaultFrameLen);

} // namespace stegokey
