#include "stegokey/payload.hpp"

#include <zlib.h>

#include <cstring>

#include "stegokey/prf.hpp"

namespace stegokey {

namespace {

constexpr std::uint8_t kMagic[4] = {'S', 'T', 'E', 'G'};
constexpr std::uint8_t kVersion = 1;

std::uint32_t crc32_ieee(std::span<const std::uint8_t> data) {
    return static_cast<std::uint32_t>(
        ::crc32(0L, data.data(), static_cast<uInt>(data.size())));
}

void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t read_u32_be(const std::uint8_t* p) {
    return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) |
           (std::uint32_t{p[2]} << 8) | std::uint32_t{p[3]};
}

} // namespace

Keystream::Keystream(std::uint64_t key_value, std::uint64_t epoch) {
    std::vector<std::uint8_t> seed;
    prf::append_tag(seed, "seal");
    prf::append_u64(seed, key_value);
    prf::append_u64(seed, epoch);
    key_ = prf::digest32(seed);
}

std::uint8_t Keystream::byte_at(std::size_t index) const {
    const std::uint64_t block_index = index / block_.size();
    if (block_index != cached_block_) {
        std::vector<std::uint8_t> msg;
        prf::append_tag(msg, "blk\0");
        prf::append_u64(msg, block_index);
        block_ = prf::keyed32(key_, msg);
        cached_block_ = block_index;
    }
    return block_[index % block_.size()];
}

void Keystream::xor_into(std::span<std::uint8_t> data, std::size_t stream_offset) const {
    for (std::size_t i = 0; i < data.size(); ++i) {
        data[i] ^= byte_at(stream_offset + i);
    }
}

std::vector<std::uint8_t> serialize_envelope(const Payload& payload) {
    if (payload.name.size() > 255) {
        throw Error(ErrorCode::NameTooLong,
                    "payload name is " + std::to_string(payload.name.size()) + " bytes");
    }
    if (payload.body.size() > 0xFFFFFFFFULL) {
        throw Error(ErrorCode::BodyTooLarge, "payload body exceeds 4 GiB");
    }
    if (payload.body.empty() && payload.kind != PayloadKind::Service) {
        throw Error(ErrorCode::ConfigInvalid, "empty body is only valid for service payloads");
    }
    std::vector<std::uint8_t> out;
    out.reserve(kEnvelopeMinSize + payload.name.size() + payload.body.size());
    out.insert(out.end(), kMagic, kMagic + 4);
    out.push_back(kVersion);
    out.push_back(static_cast<std::uint8_t>(payload.kind));
    out.push_back(static_cast<std::uint8_t>(payload.name.size()));
    out.insert(out.end(), payload.name.begin(), payload.name.end());
    put_u32_be(out, static_cast<std::uint32_t>(payload.body.size()));
    out.insert(out.end(), payload.body.begin(), payload.body.end());
    put_u32_be(out, crc32_ieee(out));
    return out;
}

Payload parse_envelope(std::span<const std::uint8_t> envelope) {
    if (envelope.size() < kEnvelopeMinSize) {
        throw Error(ErrorCode::TruncatedEnvelope,
                    std::to_string(envelope.size()) + " bytes is below the envelope minimum");
    }
    if (std::memcmp(envelope.data(), kMagic, 4) != 0 || envelope[4] != kVersion) {
        throw Error(ErrorCode::BadMagic, "envelope magic/version mismatch");
    }
    const std::size_t name_len = envelope[6];
    if (envelope.size() < kEnvelopeFixedPrefix + name_len + 4) {
        throw Error(ErrorCode::BadChecksum, "declared name overruns the envelope");
    }
    const std::uint32_t body_len = read_u32_be(envelope.data() + 7 + name_len);
    const std::size_t total = kEnvelopeFixedPrefix + name_len + body_len + 4;
    if (envelope.size() != total) {
        throw Error(ErrorCode::BadChecksum, "envelope length does not match its length fields");
    }
    const std::uint32_t stored = read_u32_be(envelope.data() + total - 4);
    if (crc32_ieee(envelope.first(total - 4)) != stored) {
        throw Error(ErrorCode::BadChecksum, "crc mismatch");
    }
    const std::uint8_t kind_byte = envelope[5];
    if (kind_byte < 1 || kind_byte > 3) {
        throw Error(ErrorCode::BadChecksum, "unknown payload kind " + std::to_string(kind_byte));
    }
    Payload p;
    p.kind = static_cast<PayloadKind>(kind_byte);
    p.name.assign(envelope.begin() + 7, envelope.begin() + 7 + static_cast<long>(name_len));
    p.body.assign(envelope.begin() + 11 + static_cast<long>(name_len),
                  envelope.begin() + static_cast<long>(total - 4));
    return p;
}

std::vector<std::uint8_t> seal(const Payload& payload, std::uint64_t key_value,
                               std::uint64_t epoch) {
    auto bytes = serialize_envelope(payload);
    Keystream(key_value, epoch).xor_into(bytes);
    return bytes;
}

Payload open(std::span<const std::uint8_t> sealed, std::uint64_t key_value,
             std::uint64_t epoch) {
    if (sealed.size() < kEnvelopeMinSize) {
        throw Error(ErrorCode::TruncatedEnvelope,
                    std::to_string(sealed.size()) + " bytes is below the envelope minimum");
    }
    const Keystream ks(key_value, epoch);
    // decrypt just the magic first; wrong keys bail out without touching the body
    std::uint8_t head[5];
    for (std::size_t i = 0; i < sizeof(head); ++i) head[i] = sealed[i] ^ ks.byte_at(i);
    if (std::memcmp(head, kMagic, 4) != 0 || head[4] != kVersion) {
        throw Error(ErrorCode::BadMagic, "envelope magic/version mismatch");
    }
    std::vector<std::uint8_t> plain(sealed.begin(), sealed.end());
    ks.xor_into(plain);
    return parse_envelope(plain);
}

std::optional<std::size_t> sealed_total_length(std::span<const std::uint8_t> sealed_prefix,
                                               std::uint64_t key_value, std::uint64_t epoch) {
    if (sealed_prefix.size() < 7) return std::nullopt;
    Keystream ks(key_value, epoch);
    const std::size_t name_len = sealed_prefix[6] ^ ks.byte_at(6);
    if (sealed_prefix.size() < kEnvelopeFixedPrefix + name_len) return std::nullopt;
    std::uint8_t len_be[4];
    for (std::size_t i = 0; i < 4; ++i) {
        len_be[i] = sealed_prefix[7 + name_len + i] ^ ks.byte_at(7 + name_len + i);
    }
    const std::uint32_t body_len = read_u32_be(len_be);
    return kEnvelopeFixedPrefix + name_len + body_len + 4;
}

} // namespace stegokey
