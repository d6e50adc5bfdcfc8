#include "stegokey/prf.hpp"

#include <sodium.h>

#include <mutex>
#include <stdexcept>

namespace stegokey::prf {

namespace {

void ensure_sodium() {
    static std::once_flag once;
    std::call_once(once, [] {
        if (sodium_init() < 0) {
            throw std::runtime_error("libsodium initialization failed");
        }
    });
}

} // namespace

std::array<std::uint8_t, 32> digest32(std::span<const std::uint8_t> data) {
    ensure_sodium();
    std::array<std::uint8_t, 32> out{};
    crypto_generichash(out.data(), out.size(), data.data(), data.size(), nullptr, 0);
    return out;
}

std::array<std::uint8_t, 32> keyed32(const std::array<std::uint8_t, 32>& key,
                                     std::span<const std::uint8_t> message) {
    ensure_sodium();
    std::array<std::uint8_t, 32> out{};
    crypto_generichash(out.data(), out.size(), message.data(), message.size(),
                       key.data(), key.size());
    return out;
}

std::uint64_t keyed64(const std::array<std::uint8_t, 32>& key,
                      std::span<const std::uint8_t> message) {
    const auto h = keyed32(key, message);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) {
        v = (v << 8) | h[static_cast<std::size_t>(i)];
    }
    return v;
}

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

void append_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
}

void append_tag(std::vector<std::uint8_t>& out, const char (&tag)[5]) {
    out.insert(out.end(), tag, tag + 4);
}

} // namespace stegokey::prf
