#pragma once

// Shared test fixtures: the two reference hierarchies, a random-DAG
// generator, and an independent WAV writer used as the parser oracle.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "stegokey/config.hpp"

namespace fixtures {

// Nine-class hierarchy: 1 and 2 are roots, 3:{1,2}, 4:{2}, 5:{2}, 6:{3},
// 7:{3,4}, 8:{3,5}, 9:{5}. Class params s1..s9 and dummies r1..r9 are the
// stock values the reference tables use.
inline const char* kNineClassConfig = R"(
[scheme]
seed = 5bd8f02a9c3e417d66a1b0e4128f9c35
t = 2
m = 7
p = 2147483647
epoch = 0
dummies = 11,12,13,14,15,16,17,18,19

class 1 param=5  parents=
class 2 param=10 parents= users=21,22
class 3 param=13 parents=1,2 users=31,32
class 4 param=9  parents=2
class 5 param=6  parents=2
class 6 param=22 parents=3
class 7 param=18 parents=3,4 users=71,72
class 8 param=30 parents=3,5
class 9 param=39 parents=5 users=91
)";

// Two-class chain with rosters, for class/user key tables.
inline const char* kTwoClassConfig = R"(
[scheme]
seed = 00ff00ff00ff00ff00ff00ff00ff00ff
t = 2
m = 7
p = 2147483647
epoch = 0
dummies = 11,12,13,14,15,16,17,18,19

class 2 param=10 parents= users=21,22,23,24
class 4 param=9 parents=2 users=41,42,43,44
)";

inline stegokey::Config nine_class() { return stegokey::parse_config(kNineClassConfig); }
inline stegokey::Config two_class() { return stegokey::parse_config(kTwoClassConfig); }

// Random DAG with ids 1..n; node i may only have parents below it, so the
// result is acyclic by construction. Params are distinct and away from the
// dummy range.
inline stegokey::Hierarchy random_dag(std::mt19937_64& rng, std::size_t n) {
    std::vector<stegokey::ClassNode> nodes;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    for (std::size_t i = 1; i <= n; ++i) {
        stegokey::ClassNode node;
        node.id = static_cast<stegokey::ClassId>(i);
        node.public_param = 1000 + i;
        for (std::size_t p = 1; p < i; ++p) {
            if (coin(rng) < 0.35) node.parents.insert(static_cast<stegokey::ClassId>(p));
        }
        nodes.push_back(std::move(node));
    }
    return stegokey::Hierarchy(std::move(nodes));
}

inline stegokey::DummyParams test_dummies(std::size_t count) {
    stegokey::DummyParams d;
    for (std::size_t i = 0; i < count; ++i) d.push_back(500 + i);
    return d;
}

// --- independent WAV writer -------------------------------------------------
// Deliberately not using the library serializer: plain byte pokes, so the
// parser round-trip has something external to agree with.

inline void wr_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

inline void wr_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 24));
}

inline void wr_tag(std::vector<std::uint8_t>& out, const char* tag) {
    out.insert(out.end(), tag, tag + 4);
}

struct RawChunk {
    const char* id;
    std::vector<std::uint8_t> payload;
};

/// Builds a complete RIFF/WAVE file around interleaved 16-bit samples.
/// `fmt_extra` appends bytes to the fmt payload (e.g. a cbSize=0 word).
inline std::vector<std::uint8_t> write_wav_independent(
    std::uint16_t channels, std::uint32_t sample_rate,
    const std::vector<std::int16_t>& interleaved,
    const std::vector<RawChunk>& before_fmt = {},
    const std::vector<RawChunk>& before_data = {},
    const std::vector<RawChunk>& after_data = {},
    const std::vector<std::uint8_t>& fmt_extra = {}) {
    const std::uint16_t block_align = static_cast<std::uint16_t>(channels * 2);
    const std::uint32_t data_size = static_cast<std::uint32_t>(interleaved.size() * 2);

    auto chunk_bytes = [](const RawChunk& c) {
        return 8 + c.payload.size() + (c.payload.size() % 2);
    };
    std::size_t riff = 4 + (8 + 16 + fmt_extra.size() + (fmt_extra.size() % 2)) +
                       (8 + data_size + (data_size % 2));
    for (const auto& c : before_fmt) riff += chunk_bytes(c);
    for (const auto& c : before_data) riff += chunk_bytes(c);
    for (const auto& c : after_data) riff += chunk_bytes(c);

    std::vector<std::uint8_t> out;
    wr_tag(out, "RIFF");
    wr_u32(out, static_cast<std::uint32_t>(riff));
    wr_tag(out, "WAVE");

    auto emit = [&](const RawChunk& c) {
        wr_tag(out, c.id);
        wr_u32(out, static_cast<std::uint32_t>(c.payload.size()));
        out.insert(out.end(), c.payload.begin(), c.payload.end());
        if (c.payload.size() % 2) out.push_back(0);
    };

    for (const auto& c : before_fmt) emit(c);
    wr_tag(out, "fmt ");
    wr_u32(out, static_cast<std::uint32_t>(16 + fmt_extra.size()));
    wr_u16(out, 1);
    wr_u16(out, channels);
    wr_u32(out, sample_rate);
    wr_u32(out, sample_rate * block_align);
    wr_u16(out, block_align);
    wr_u16(out, 16);
    out.insert(out.end(), fmt_extra.begin(), fmt_extra.end());
    if (fmt_extra.size() % 2) out.push_back(0);

    for (const auto& c : before_data) emit(c);
    wr_tag(out, "data");
    wr_u32(out, data_size);
    for (std::int16_t s : interleaved) wr_u16(out, static_cast<std::uint16_t>(s));
    if (data_size % 2) out.push_back(0);
    for (const auto& c : after_data) emit(c);
    return out;
}

/// The 44-byte header from the reference hexdump (2ch, 11025 Hz, 16-bit,
/// 81920 data bytes) followed by silence.
inline std::vector<std::uint8_t> hexdump_wav() {
    std::vector<std::int16_t> silence(81920 / 2, 0);
    return write_wav_independent(2, 11025, silence);
}

inline std::vector<std::int16_t> random_samples(std::mt19937_64& rng, std::size_t count) {
    std::uniform_int_distribution<int> dist(-32768, 32767);
    std::vector<std::int16_t> out(count);
    for (auto& s : out) s = static_cast<std::int16_t>(dist(rng));
    return out;
}

inline std::vector<std::uint8_t> random_bytes(std::mt19937_64& rng, std::size_t count) {
    std::uniform_int_distribution<int> dist(0, 255);
    std::vector<std::uint8_t> out(count);
    for (auto& b : out) b = static_cast<std::uint8_t>(dist(rng));
    return out;
}

} // namespace fixtures
