#include "stegokey/stego.hpp"

namespace stegokey {

namespace {

std::size_t frame_count(const WavAudio& wav, std::uint32_t frame_len) {
    if (frame_len == 0) {
        throw Error(ErrorCode::ConfigInvalid, "frame length must be positive");
    }
    return wav.frames_per_channel() / frame_len;
}

// One keybit per data bit, cycling through the key's binary expansion.
class KeybitCursor {
public:
    explicit KeybitCursor(const std::vector<std::uint8_t>& bits) : bits_(bits) {}
    std::uint8_t next() {
        const std::uint8_t b = bits_[pos_];
        pos_ = (pos_ + 1) % bits_.size();
        return b;
    }

private:
    const std::vector<std::uint8_t>& bits_;
    std::size_t pos_ = 0;
};

} // namespace

StegoGeometry derive_geometry(const ClassKey& key, std::size_t total_frames,
                              std::uint32_t frame_len) {
    if (total_frames < 2) {
        throw Error(ErrorCode::CoverTooSmall,
                    std::to_string(total_frames) + " frames, need at least 2");
    }
    StegoGeometry g;
    g.frame_len = frame_len;
    g.total_frames = total_frames;
    g.loc1 = static_cast<std::uint32_t>(key.value % 4);
    g.loc2 = 4 + static_cast<std::uint32_t>((key.value / 4) % 4);
    g.start_frame = key.value % (total_frames / 2);

    // Binary expansion of the key value, most significant bit first.
    std::uint64_t v = key.value;
    if (v == 0) {
        g.keybits.push_back(0);
    } else {
        std::vector<std::uint8_t> rev;
        while (v != 0) {
            rev.push_back(static_cast<std::uint8_t>(v & 1));
            v >>= 1;
        }
        g.keybits.assign(rev.rbegin(), rev.rend());
    }
    return g;
}

BitMasks clear_masks(std::uint32_t loc1, std::uint32_t loc2) {
    if (loc1 > 15 || loc2 > 15 || loc1 == loc2) {
        throw Error(ErrorCode::BadBitPosition,
                    "bit positions " + std::to_string(loc1) + "," + std::to_string(loc2));
    }
    BitMasks m;
    m.cmask1 = static_cast<std::uint16_t>(~(1u << loc1));
    m.cmask2 = static_cast<std::uint16_t>(~(1u << loc2));
    m.cmask = m.cmask1 & m.cmask2;
    return m;
}

std::size_t capacity_bits(const WavAudio& cover, std::uint32_t frame_len) {
    const std::size_t total = frame_count(cover, frame_len);
    if (total < 2) return 0;
    const std::size_t max_start = total / 2 - 1;
    return (total - max_start) * cover.channels * 2;
}

WavAudio embed(const WavAudio& cover, std::span<const std::uint8_t> sealed,
               const ClassKey& key, std::uint32_t frame_len) {
    const std::size_t total = frame_count(cover, frame_len);
    const auto g = derive_geometry(key, total, frame_len);
    const std::size_t avail_bits = (total - g.start_frame) * cover.channels * 2;
    if (sealed.size() * 8 > avail_bits) {
        throw Error(ErrorCode::PayloadTooLarge,
                    std::to_string(sealed.size() * 8) + " bits into " +
                        std::to_string(avail_bits) + " available");
    }

    const auto masks = clear_masks(g.loc1, g.loc2);
    WavAudio out = cover;
    KeybitCursor keybits(g.keybits);

    std::size_t bit_index = 0; // over the sealed bytes, msb first
    const std::size_t total_bits = sealed.size() * 8;
    auto next_data_bit = [&] {
        const std::uint8_t byte = sealed[bit_index / 8];
        const std::uint8_t bit = (byte >> (7 - bit_index % 8)) & 1;
        ++bit_index;
        return bit;
    };

    for (std::size_t f = g.start_frame; f < total && bit_index < total_bits; ++f) {
        const std::size_t sample_index = f * frame_len; // first sample of the frame
        for (std::uint16_t ch = 0; ch < cover.channels && bit_index < total_bits; ++ch) {
            auto u = static_cast<std::uint16_t>(out.samples[ch][sample_index]);
            u &= masks.cmask;
            u |= static_cast<std::uint16_t>((next_data_bit() ^ keybits.next()) << g.loc1);
            if (bit_index < total_bits) {
                u |= static_cast<std::uint16_t>((next_data_bit() ^ keybits.next()) << g.loc2);
            }
            out.samples[ch][sample_index] = static_cast<std::int16_t>(u);
        }
    }
    return out;
}

std::vector<std::uint8_t> extract(const WavAudio& stego, const ClassKey& key,
                                  std::uint32_t frame_len) {
    const std::size_t total = frame_count(stego, frame_len);
    const auto g = derive_geometry(key, total, frame_len);
    KeybitCursor keybits(g.keybits);

    std::vector<std::uint8_t> sealed;
    std::optional<std::size_t> expected;
    std::uint8_t pending = 0;
    std::uint32_t pending_bits = 0;

    auto push_bit = [&](std::uint8_t bit) {
        pending = static_cast<std::uint8_t>((pending << 1) | bit);
        if (++pending_bits == 8) {
            sealed.push_back(pending);
            pending = 0;
            pending_bits = 0;
            if (!expected) {
                expected = sealed_total_length(sealed, key.value, key.epoch);
                if (expected) {
                    const std::size_t avail = (total - g.start_frame) * stego.channels * 2;
                    if (*expected * 8 > avail) {
                        throw Error(ErrorCode::TruncatedEnvelope,
                                    "declared envelope of " + std::to_string(*expected) +
                                        " bytes does not fit the cover");
                    }
                }
            }
        }
    };

    for (std::size_t f = g.start_frame; f < total; ++f) {
        const std::size_t sample_index = f * frame_len;
        for (std::uint16_t ch = 0; ch < stego.channels; ++ch) {
            const auto u = static_cast<std::uint16_t>(stego.samples[ch][sample_index]);
            push_bit(static_cast<std::uint8_t>(((u >> g.loc1) & 1) ^ keybits.next()));
            if (expected && sealed.size() == *expected) return sealed;
            push_bit(static_cast<std::uint8_t>(((u >> g.loc2) & 1) ^ keybits.next()));
            if (expected && sealed.size() == *expected) return sealed;
        }
    }
    throw Error(ErrorCode::TruncatedEnvelope, "cover ended before the envelope did");
}

} // namespace stegokey
