#ifndef DSBEAM_WAV_HPP
#define DSBEAM_WAV_HPP

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "dsbeam/error.hpp"
#include "dsbeam/synthesis.hpp"

namespace dsbeam {

/// Integer PCM stream parameters. Only 16-, 24- and 32-bit PCM is handled.
struct WavSpec {
    std::uint32_t sample_rate_hz = 96000;
    int bit_depth = 16;
    std::uint16_t channel_count = 1;

    void validate() const {
        if (bit_depth != 16 && bit_depth != 24 && bit_depth != 32)
            fail(errc::unsupported_format, "bit depth must be 16, 24 or 32");
        if (channel_count < 1) fail(errc::shape_error, "channel count must be >= 1");
        if (sample_rate_hz == 0) fail(errc::shape_error, "sample rate must be positive");
    }
};

struct WavReadResult {
    WavSpec spec;
    MultichannelRecording recording;
};

struct WavWriteResult {
    std::vector<std::uint8_t> bytes;
    std::size_t clipped_samples = 0;  // inputs beyond +-1 that were saturated
};

namespace detail {

inline std::uint16_t read_u16(std::span<const std::uint8_t> b, std::size_t off) {
    return static_cast<std::uint16_t>(b[off] | (b[off + 1] << 8));
}

inline std::uint32_t read_u32(std::span<const std::uint8_t> b, std::size_t off) {
    return static_cast<std::uint32_t>(b[off]) | (static_cast<std::uint32_t>(b[off + 1]) << 8) |
           (static_cast<std::uint32_t>(b[off + 2]) << 16) |
           (static_cast<std::uint32_t>(b[off + 3]) << 24);
}

inline void put_u16(std::vector<std::uint8_t>& b, std::uint16_t v) {
    b.push_back(static_cast<std::uint8_t>(v & 0xff));
    b.push_back(static_cast<std::uint8_t>(v >> 8));
}

inline void put_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
}

inline bool tag_is(std::span<const std::uint8_t> b, std::size_t off, const char* tag) {
    return std::memcmp(b.data() + off, tag, 4) == 0;
}

}  // namespace detail

/// Parses a RIFF/WAVE byte stream into float channels in [-1, 1); integer
/// samples are scaled by 2^(bits-1), so the most negative code maps to -1.0
/// exactly. Unknown chunks are skipped. Compressed and float formats are
/// rejected rather than converted.
inline WavReadResult read_wav(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 12) fail(errc::parse_error, "file shorter than a RIFF header");
    if (!detail::tag_is(bytes, 0, "RIFF")) throw Error(errc::parse_error, "missing RIFF tag", 0);
    if (!detail::tag_is(bytes, 8, "WAVE")) throw Error(errc::parse_error, "missing WAVE tag", 8);

    bool have_fmt = false;
    WavSpec spec;
    std::size_t off = 12;
    while (off + 8 <= bytes.size()) {
        const std::size_t chunk_off = off;
        const std::uint32_t chunk_size = detail::read_u32(bytes, off + 4);
        const std::size_t body = off + 8;

        if (detail::tag_is(bytes, off, "fmt ")) {
            if (chunk_size < 16 || body + chunk_size > bytes.size())
                throw Error(errc::parse_error, "fmt chunk truncated", chunk_off);
            const std::uint16_t format = detail::read_u16(bytes, body);
            if (format == 3)
                throw Error(errc::unsupported_format, "float WAV is not supported", chunk_off);
            if (format != 1)
                throw Error(errc::unsupported_format,
                            "only PCM (format 1) is supported, got format " +
                                std::to_string(format),
                            chunk_off);
            spec.channel_count = detail::read_u16(bytes, body + 2);
            spec.sample_rate_hz = detail::read_u32(bytes, body + 4);
            const std::uint16_t block_align = detail::read_u16(bytes, body + 12);
            const std::uint16_t bits = detail::read_u16(bytes, body + 14);
            if (bits != 16 && bits != 24 && bits != 32)
                throw Error(errc::unsupported_format,
                            std::to_string(bits) + "-bit PCM is not supported", chunk_off);
            spec.bit_depth = bits;
            if (spec.channel_count == 0)
                throw Error(errc::parse_error, "zero channels", chunk_off);
            if (spec.sample_rate_hz == 0)
                throw Error(errc::parse_error, "zero sample rate", chunk_off);
            if (block_align != spec.channel_count * (bits / 8))
                throw Error(errc::parse_error, "block align inconsistent with channels and depth",
                            chunk_off);
            have_fmt = true;
        } else if (detail::tag_is(bytes, off, "data")) {
            if (!have_fmt)
                throw Error(errc::parse_error, "data chunk before fmt chunk", chunk_off);
            if (body + chunk_size > bytes.size())
                throw Error(errc::truncation_error,
                            "data chunk claims " + std::to_string(chunk_size) + " bytes, only " +
                                std::to_string(bytes.size() - body) + " remain",
                            chunk_off);
            const std::size_t bytes_per_sample = static_cast<std::size_t>(spec.bit_depth) / 8;
            const std::size_t frame_size = bytes_per_sample * spec.channel_count;
            if (chunk_size % frame_size != 0)
                throw Error(errc::truncation_error, "data chunk ends mid-frame", chunk_off);
            const std::size_t frames = chunk_size / frame_size;

            MultichannelRecording rec;
            rec.sample_rate_hz = static_cast<double>(spec.sample_rate_hz);
            rec.channels.assign(spec.channel_count, std::vector<double>(frames));
            const double scale = 1.0 / static_cast<double>(1u << (spec.bit_depth - 1 - 8)) / 256.0;
            std::size_t p = body;
            for (std::size_t fr = 0; fr < frames; ++fr) {
                for (std::size_t ch = 0; ch < spec.channel_count; ++ch) {
                    std::int32_t v = 0;
                    if (spec.bit_depth == 16) {
                        v = static_cast<std::int16_t>(detail::read_u16(bytes, p));
                    } else if (spec.bit_depth == 24) {
                        std::uint32_t u = bytes[p] | (bytes[p + 1] << 8) | (bytes[p + 2] << 16);
                        if (u & 0x800000u) u |= 0xff000000u;
                        v = static_cast<std::int32_t>(u);
                    } else {
                        v = static_cast<std::int32_t>(detail::read_u32(bytes, p));
                    }
                    rec.channels[ch][fr] = static_cast<double>(v) * scale;
                    p += bytes_per_sample;
                }
            }
            return WavReadResult{spec, std::move(rec)};
        }
        // skip chunk body plus RIFF pad byte for odd sizes
        off = body + chunk_size + (chunk_size & 1u);
    }
    if (off != bytes.size())
        throw Error(errc::parse_error, "truncated chunk header", off);
    fail(errc::parse_error, have_fmt ? "no data chunk" : "no fmt chunk");
}

/// Emits a canonical 44-byte-header RIFF PCM stream. Samples beyond +-1 are
/// saturated and counted in the result.
inline WavWriteResult write_wav(const WavSpec& spec, const MultichannelRecording& rec) {
    spec.validate();
    rec.validate();
    if (spec.channel_count != rec.channel_count())
        fail(errc::shape_error, "spec channel count does not match recording");
    if (static_cast<double>(spec.sample_rate_hz) != rec.sample_rate_hz)
        fail(errc::shape_error, "spec sample rate does not match recording");

    const std::size_t frames = rec.frames();
    const std::size_t bytes_per_sample = static_cast<std::size_t>(spec.bit_depth) / 8;
    const std::size_t frame_size = bytes_per_sample * spec.channel_count;
    const std::size_t data_size = frames * frame_size;
    const std::size_t pad = data_size & 1u;

    WavWriteResult result;
    auto& out = result.bytes;
    out.reserve(44 + data_size + pad);
    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    detail::put_u32(out, static_cast<std::uint32_t>(36 + data_size + pad));
    out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
    detail::put_u32(out, 16);
    detail::put_u16(out, 1);  // integer PCM
    detail::put_u16(out, spec.channel_count);
    detail::put_u32(out, spec.sample_rate_hz);
    detail::put_u32(out, static_cast<std::uint32_t>(spec.sample_rate_hz * frame_size));
    detail::put_u16(out, static_cast<std::uint16_t>(frame_size));
    detail::put_u16(out, static_cast<std::uint16_t>(spec.bit_depth));
    out.insert(out.end(), {'d', 'a', 't', 'a'});
    detail::put_u32(out, static_cast<std::uint32_t>(data_size));

    const double scale = static_cast<double>(1u << (spec.bit_depth - 1 - 8)) * 256.0;
    const std::int64_t q_max = static_cast<std::int64_t>(scale) - 1;
    const std::int64_t q_min = -static_cast<std::int64_t>(scale);
    for (std::size_t fr = 0; fr < frames; ++fr) {
        for (std::size_t ch = 0; ch < spec.channel_count; ++ch) {
            const double v = rec.channels[ch][fr];
            std::int64_t q;
            if (v > 1.0) {
                q = q_max;
                ++result.clipped_samples;
            } else if (v < -1.0) {
                q = q_min;
                ++result.clipped_samples;
            } else {
                q = std::llround(v * scale);
                if (q > q_max) q = q_max;  // exactly +1.0 saturates silently
            }
            for (std::size_t b = 0; b < bytes_per_sample; ++b)
                out.push_back(static_cast<std::uint8_t>((static_cast<std::uint64_t>(q) >> (8 * b)) & 0xff));
        }
    }
    if (pad) out.push_back(0);
    return result;
}

inline WavReadResult read_wav_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(errc::parse_error, "cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    try {
        return read_wav(bytes);
    } catch (const Error& e) {
        throw Error(e.kind(), path.filename().string() + ": " + e.what(),
                    e.byte_offset().value_or(0));
    }
}

inline std::size_t write_wav_file(const std::filesystem::path& path, const WavSpec& spec,
                                  const MultichannelRecording& rec) {
    const WavWriteResult r = write_wav(spec, rec);
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(errc::parse_error, "cannot open " + path.string() + " for writing");
    out.write(reinterpret_cast<const char*>(r.bytes.data()),
              static_cast<std::streamsize>(r.bytes.size()));
    if (!out) fail(errc::parse_error, "short write to " + path.string());
    return r.clipped_samples;
}

}  // namespace dsbeam

#endif
