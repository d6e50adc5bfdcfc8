#include "stegokey/wav.hpp"

#include <cstring>
#include <fstream>

namespace stegokey {

namespace {

std::uint16_t read_u16(const std::uint8_t* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const std::uint8_t* p) {
    return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
           (std::uint32_t{p[3]} << 24);
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 24));
}

bool fourcc_is(const std::uint8_t* p, const char* tag) {
    return std::memcmp(p, tag, 4) == 0;
}

void emit_chunk(std::vector<std::uint8_t>& out, const WavChunk& c) {
    out.insert(out.end(), c.id.begin(), c.id.end());
    put_u32(out, static_cast<std::uint32_t>(c.payload.size()));
    out.insert(out.end(), c.payload.begin(), c.payload.end());
    if (c.payload.size() % 2 != 0) out.push_back(0); // RIFF 2-byte alignment
}

std::size_t chunk_span(const WavChunk& c) {
    return 8 + c.payload.size() + (c.payload.size() % 2);
}

} // namespace

WavAudio parse_wav(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 12 || !fourcc_is(bytes.data(), "RIFF")) {
        throw Error(ErrorCode::NotRiff, "missing RIFF header");
    }
    const std::uint32_t riff_size = read_u32(bytes.data() + 4);
    if (riff_size < 4 || 8 + static_cast<std::size_t>(riff_size) > bytes.size()) {
        throw Error(ErrorCode::TruncatedFile, "RIFF size overruns the file");
    }
    if (!fourcc_is(bytes.data() + 8, "WAVE")) {
        throw Error(ErrorCode::NotWave, "RIFF form is not WAVE");
    }

    WavAudio wav;
    bool have_fmt = false;
    bool have_data = false;
    std::vector<std::uint8_t> data_payload;

    std::size_t pos = 12;
    const std::size_t end = 8 + riff_size;
    while (pos < end) {
        if (pos + 8 > end) {
            throw Error(ErrorCode::TruncatedFile, "dangling bytes where a chunk header should be");
        }
        const std::uint8_t* hdr = bytes.data() + pos;
        const std::uint32_t size = read_u32(hdr + 4);
        const std::size_t body = pos + 8;
        if (body + size > end) {
            throw Error(ErrorCode::TruncatedFile, "chunk overruns the file");
        }
        if (fourcc_is(hdr, "fmt ") && !have_fmt) {
            if (size < 16) {
                throw Error(ErrorCode::UnsupportedFormat, "fmt chunk shorter than 16 bytes");
            }
            wav.fmt_payload.assign(bytes.begin() + static_cast<long>(body),
                                   bytes.begin() + static_cast<long>(body + size));
            const std::uint8_t* f = wav.fmt_payload.data();
            wav.format_tag = read_u16(f);
            wav.channels = read_u16(f + 2);
            wav.sample_rate = read_u32(f + 4);
            wav.byte_rate = read_u32(f + 8);
            wav.block_align = read_u16(f + 12);
            wav.bits_per_sample = read_u16(f + 14);
            have_fmt = true;
        } else if (fourcc_is(hdr, "data") && !have_data) {
            if (!have_fmt) {
                throw Error(ErrorCode::MissingFmt, "data chunk before fmt");
            }
            data_payload.assign(bytes.begin() + static_cast<long>(body),
                                bytes.begin() + static_cast<long>(body + size));
            have_data = true;
        } else {
            WavChunk c;
            std::memcpy(c.id.data(), hdr, 4);
            c.payload.assign(bytes.begin() + static_cast<long>(body),
                             bytes.begin() + static_cast<long>(body + size));
            if (!have_fmt) {
                wav.chunks_before_fmt.push_back(std::move(c));
            } else if (!have_data) {
                wav.chunks_before_data.push_back(std::move(c));
            } else {
                wav.chunks_after_data.push_back(std::move(c));
            }
        }
        pos = body + size + (size % 2);
    }

    if (!have_fmt) throw Error(ErrorCode::MissingFmt, "no fmt chunk");
    if (!have_data) throw Error(ErrorCode::MissingData, "no data chunk");

    if (wav.format_tag != 1) {
        throw Error(ErrorCode::UnsupportedFormat,
                    "format tag " + std::to_string(wav.format_tag) + " is not PCM");
    }
    if (wav.bits_per_sample != 16) {
        throw Error(ErrorCode::UnsupportedFormat,
                    std::to_string(wav.bits_per_sample) + "-bit samples, only 16-bit supported");
    }
    if (wav.channels == 0) {
        throw Error(ErrorCode::UnsupportedFormat, "zero channels");
    }
    if (wav.block_align != wav.channels * 2u) {
        throw Error(ErrorCode::UnsupportedFormat, "block align does not match channels * 2");
    }
    if (wav.byte_rate != wav.sample_rate * wav.block_align) {
        throw Error(ErrorCode::UnsupportedFormat, "byte rate does not match rate * block align");
    }
    if (data_payload.size() % wav.block_align != 0) {
        throw Error(ErrorCode::UnsupportedFormat, "data size is not a whole number of frames");
    }

    const std::size_t frames = data_payload.size() / wav.block_align;
    wav.samples.assign(wav.channels, std::vector<std::int16_t>(frames));
    for (std::size_t f = 0; f < frames; ++f) {
        const std::uint8_t* frame = data_payload.data() + f * wav.block_align;
        for (std::uint16_t ch = 0; ch < wav.channels; ++ch) {
            wav.samples[ch][f] = static_cast<std::int16_t>(read_u16(frame + 2 * ch));
        }
    }
    return wav;
}

std::vector<std::uint8_t> serialize_wav(const WavAudio& wav) {
    const std::size_t frames = wav.frames_per_channel();
    const std::size_t data_size = frames * wav.channels * 2;

    std::size_t riff_size = 4; // "WAVE"
    for (const auto& c : wav.chunks_before_fmt) riff_size += chunk_span(c);
    riff_size += 8 + wav.fmt_payload.size() + (wav.fmt_payload.size() % 2);
    for (const auto& c : wav.chunks_before_data) riff_size += chunk_span(c);
    riff_size += 8 + data_size + (data_size % 2);
    for (const auto& c : wav.chunks_after_data) riff_size += chunk_span(c);

    std::vector<std::uint8_t> out;
    out.reserve(8 + riff_size);
    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    put_u32(out, static_cast<std::uint32_t>(riff_size));
    out.insert(out.end(), {'W', 'A', 'V', 'E'});

    for (const auto& c : wav.chunks_before_fmt) emit_chunk(out, c);

    out.insert(out.end(), {'f', 'm', 't', ' '});
    put_u32(out, static_cast<std::uint32_t>(wav.fmt_payload.size()));
    out.insert(out.end(), wav.fmt_payload.begin(), wav.fmt_payload.end());
    if (wav.fmt_payload.size() % 2 != 0) out.push_back(0);

    for (const auto& c : wav.chunks_before_data) emit_chunk(out, c);

    out.insert(out.end(), {'d', 'a', 't', 'a'});
    put_u32(out, static_cast<std::uint32_t>(data_size));
    for (std::size_t f = 0; f < frames; ++f) {
        for (std::uint16_t ch = 0; ch < wav.channels; ++ch) {
            put_u16(out, static_cast<std::uint16_t>(wav.samples[ch][f]));
        }
    }
    if (data_size % 2 != 0) out.push_back(0);

    for (const auto& c : wav.chunks_after_data) emit_chunk(out, c);
    return out;
}

WavAudio make_wav(std::uint32_t sample_rate,
                  std::vector<std::vector<std::int16_t>> channel_samples) {
    if (channel_samples.empty()) {
        throw Error(ErrorCode::UnsupportedFormat, "need at least one channel");
    }
    const std::size_t frames = channel_samples.front().size();
    for (const auto& ch : channel_samples) {
        if (ch.size() != frames) {
            throw Error(ErrorCode::UnsupportedFormat, "channels differ in length");
        }
    }
    WavAudio wav;
    wav.channels = static_cast<std::uint16_t>(channel_samples.size());
    wav.sample_rate = sample_rate;
    wav.block_align = static_cast<std::uint16_t>(wav.channels * 2);
    wav.byte_rate = sample_rate * wav.block_align;
    wav.samples = std::move(channel_samples);

    wav.fmt_payload.clear();
    put_u16(wav.fmt_payload, 1); // PCM
    put_u16(wav.fmt_payload, wav.channels);
    put_u32(wav.fmt_payload, wav.sample_rate);
    put_u32(wav.fmt_payload, wav.byte_rate);
    put_u16(wav.fmt_payload, wav.block_align);
    put_u16(wav.fmt_payload, 16);
    return wav;
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open " + path);
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw Error(ErrorCode::IoError, "short write to " + path);
    }
}

} // namespace stegokey
