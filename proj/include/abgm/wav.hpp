#pragma once

// Minimal RIFF/WAVE reader and writer: PCM 16-bit and IEEE float 32-bit,
// any channel count, little-endian on disk regardless of host.

#include "abgm/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

namespace abgm {

enum class SampleFormat { Pcm16, Float32 };

struct WavData {
    int sample_rate = 48000;
    int channels = 1;
    SampleFormat format = SampleFormat::Float32;
    std::vector<float> samples; // interleaved
};

namespace wav_detail {

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline void put_tag(std::vector<std::uint8_t>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

inline std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t at) {
    return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

inline std::uint32_t get_u32(std::span<const std::uint8_t> b, std::size_t at) {
    return static_cast<std::uint32_t>(b[at]) | (static_cast<std::uint32_t>(b[at + 1]) << 8) |
           (static_cast<std::uint32_t>(b[at + 2]) << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

inline bool tag_is(std::span<const std::uint8_t> b, std::size_t at, const char* tag) {
    return std::memcmp(b.data() + at, tag, 4) == 0;
}

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;

} // namespace wav_detail

inline std::int16_t to_pcm16(float s) noexcept {
    const float c = std::clamp(s, -1.0f, 1.0f);
    return static_cast<std::int16_t>(std::lround(c * 32767.0f));
}

inline float from_pcm16(std::int16_t v) noexcept { return static_cast<float>(v) / 32767.0f; }

inline std::vector<std::uint8_t> encode_wav(const WavData& wav) {
    using namespace wav_detail;
    const std::uint16_t bits = wav.format == SampleFormat::Pcm16 ? 16 : 32;
    const std::uint16_t block_align = static_cast<std::uint16_t>(wav.channels * bits / 8);
    const auto data_bytes = static_cast<std::uint32_t>(wav.samples.size() * (bits / 8));

    std::vector<std::uint8_t> out;
    out.reserve(44 + data_bytes);
    put_tag(out, "RIFF");
    put_u32(out, 36 + data_bytes);
    put_tag(out, "WAVE");
    put_tag(out, "fmt ");
    put_u32(out, 16);
    put_u16(out, wav.format == SampleFormat::Pcm16 ? kFormatPcm : kFormatFloat);
    put_u16(out, static_cast<std::uint16_t>(wav.channels));
    put_u32(out, static_cast<std::uint32_t>(wav.sample_rate));
    put_u32(out, static_cast<std::uint32_t>(wav.sample_rate) * block_align);
    put_u16(out, block_align);
    put_u16(out, bits);
    put_tag(out, "data");
    put_u32(out, data_bytes);
    if (wav.format == SampleFormat::Pcm16) {
        for (float s : wav.samples) put_u16(out, static_cast<std::uint16_t>(to_pcm16(s)));
    } else {
        for (float s : wav.samples) put_u32(out, std::bit_cast<std::uint32_t>(s));
    }
    return out;
}

inline WavData decode_wav(std::span<const std::uint8_t> bytes) {
    using namespace wav_detail;
    if (bytes.size() < 12 || !tag_is(bytes, 0, "RIFF")) throw FormatError("WAV: missing RIFF header");
    if (!tag_is(bytes, 8, "WAVE")) throw FormatError("WAV: RIFF form type is not WAVE");

    WavData wav;
    bool have_fmt = false;
    std::uint16_t bits = 0;
    std::uint16_t format_tag = 0;
    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const std::uint32_t size = get_u32(bytes, pos + 4);
        const std::size_t body = pos + 8;
        if (size > bytes.size() - body) throw FormatError("WAV: chunk size exceeds file length");
        if (tag_is(bytes, pos, "fmt ")) {
            if (size < 16) throw FormatError("WAV: fmt chunk shorter than 16 bytes");
            format_tag = get_u16(bytes, body);
            wav.channels = get_u16(bytes, body + 2);
            wav.sample_rate = static_cast<int>(get_u32(bytes, body + 4));
            bits = get_u16(bytes, body + 14);
            if (format_tag == kFormatPcm && bits == 16) wav.format = SampleFormat::Pcm16;
            else if (format_tag == kFormatFloat && bits == 32) wav.format = SampleFormat::Float32;
            else {
                throw FormatError("WAV: unsupported audio_format/bits_per_sample " + std::to_string(format_tag) +
                                  "/" + std::to_string(bits));
            }
            if (wav.channels < 1) throw FormatError("WAV: channels must be >= 1");
            have_fmt = true;
        } else if (tag_is(bytes, pos, "data")) {
            if (!have_fmt) throw FormatError("WAV: data chunk before fmt chunk");
            const std::size_t width = bits / 8;
            const std::size_t count = size / width;
            wav.samples.resize(count);
            for (std::size_t i = 0; i < count; ++i) {
                const std::size_t at = body + i * width;
                if (width == 2) {
                    wav.samples[i] = from_pcm16(static_cast<std::int16_t>(get_u16(bytes, at)));
                } else {
                    wav.samples[i] = std::bit_cast<float>(get_u32(bytes, at));
                }
            }
            return wav;
        }
        pos = body + size + (size & 1u);
    }
    throw FormatError(have_fmt ? "WAV: missing data chunk" : "WAV: missing fmt chunk");
}

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Writes to `path.tmp` then renames, so readers never see a partial file.
inline void write_file_atomic(const std::string& path, std::span<const std::uint8_t> bytes) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp);
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw Error("short write to " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

inline void write_file_atomic(const std::string& path, const std::string& text) {
    write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

inline WavData read_wav(const std::string& path) { return decode_wav(read_file_bytes(path)); }

inline void write_wav(const std::string& path, const WavData& wav) { write_file_atomic(path, encode_wav(wav)); }

} // namespace abgm
