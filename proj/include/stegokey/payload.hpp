#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stegokey/errors.hpp"

namespace stegokey {

enum class PayloadKind : std::uint8_t {
    Image = 1,
    Text = 2,
    Service = 3,
};

struct Payload {
    PayloadKind kind = PayloadKind::Text;
    std::string name;               // <= 255 bytes
    std::vector<std::uint8_t> body; // may be empty only for Service

    bool operator==(const Payload&) const = default;
};

// Envelope wire layout (normative, big-endian lengths):
//   magic "STEG" | version 1B | kind 1B | name_len 1B | name |
//   body_len 4B BE | body | crc32 4B BE over everything before it
// The sealed form is the envelope XORed with a keystream derived from
// (key value, epoch). The keystream cipher is demonstration grade; swap in
// an authenticated cipher behind seal/open if you need a real one.

inline constexpr std::size_t kEnvelopeFixedPrefix = 11; // magic..body_len
inline constexpr std::size_t kEnvelopeMinSize = kEnvelopeFixedPrefix + 4;

/// Byte-addressable keystream for one (key, epoch) pair.
class Keystream {
public:
    Keystream(std::uint64_t key_value, std::uint64_t epoch);

    std::uint8_t byte_at(std::size_t index) const;
    void xor_into(std::span<std::uint8_t> data, std::size_t stream_offset = 0) const;

private:
    std::array<std::uint8_t, 32> key_;
    mutable std::uint64_t cached_block_ = ~std::uint64_t{0};
    mutable std::array<std::uint8_t, 32> block_{};
};

std::vector<std::uint8_t> serialize_envelope(const Payload& payload);
Payload parse_envelope(std::span<const std::uint8_t> envelope);

/// Serializes and encrypts a payload under a class or user key.
std::vector<std::uint8_t> seal(const Payload& payload, std::uint64_t key_value,
                               std::uint64_t epoch);

/// Decrypts and verifies. Throws BadMagic on a wrong key, BadChecksum on
/// corruption, TruncatedEnvelope when the input cannot hold an envelope.
Payload open(std::span<const std::uint8_t> sealed, std::uint64_t key_value,
             std::uint64_t epoch);

/// Total sealed-envelope length implied by an encrypted prefix, once enough
/// bytes are present to decrypt the length fields; nullopt until then.
/// Lets the stego extractor stop reading at exactly the right byte.
std::optional<std::size_t> sealed_total_length(std::span<const std::uint8_t> sealed_prefix,
                                               std::uint64_t key_value, std::uint64_t epoch);

} // namespace stegokey
