#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "stegokey/errors.hpp"

namespace stegokey {

/// An opaque RIFF chunk carried through parse/serialize untouched.
struct WavChunk {
    std::array<char, 4> id{};
    std::vector<std::uint8_t> payload; // without the 8-byte header; pad byte implied

    bool operator==(const WavChunk&) const = default;
};

/// A 16-bit PCM RIFF/WAVE file, decoded to per-channel samples. Parsing and
/// serializing a valid file is byte-identical, including unknown chunks.
struct WavAudio {
    std::uint16_t format_tag = 1; // PCM
    std::uint16_t channels = 0;
    std::uint32_t sample_rate = 0;
    std::uint32_t byte_rate = 0;
    std::uint16_t block_align = 0;
    std::uint16_t bits_per_sample = 16;

    /// Raw fmt-chunk payload as parsed (may be longer than 16 bytes);
    /// re-emitted verbatim so odd-but-valid headers round-trip.
    std::vector<std::uint8_t> fmt_payload;

    std::vector<std::vector<std::int16_t>> samples; // [channel][frame index]

    std::vector<WavChunk> chunks_before_fmt;
    std::vector<WavChunk> chunks_before_data;
    std::vector<WavChunk> chunks_after_data;

    std::size_t frames_per_channel() const {
        return samples.empty() ? 0 : samples.front().size();
    }
};

WavAudio parse_wav(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> serialize_wav(const WavAudio& wav);

/// Builds a canonical PCM file from samples (16-byte fmt chunk, no extras).
WavAudio make_wav(std::uint32_t sample_rate,
                  std::vector<std::vector<std::int16_t>> channel_samples);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);

} // namespace stegokey
