#pragma once

// Procedural instrument stems. Each instrument is a pure tone at its own
// octave-spaced signature frequency with a slow amplitude vibrato, so the five
// stems occupy disjoint FFT bins.

#include "abgm/error.hpp"
#include "abgm/rng.hpp"
#include "abgm/rules.hpp"
#include "abgm/wav.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

namespace abgm {

inline constexpr int kSampleRate = 48000;
inline constexpr int kFrameSamples = kSampleRate / kFramesPerSecond; // 800
inline constexpr int kDefaultAnchorX = 350;
inline constexpr int kDefaultStemFrames = 60;
inline constexpr double kStemPeak = 0.3;
inline constexpr double kVibratoHz = 2.0;
inline constexpr double kVibratoDepth = 0.1;

constexpr double signature_hz(InstrumentId i) noexcept {
    switch (i) {
    case InstrumentId::Cello: return 110.0;
    case InstrumentId::Piano: return 220.0;
    case InstrumentId::Ukulele: return 440.0;
    case InstrumentId::Violin: return 880.0;
    case InstrumentId::Flute: return 1760.0;
    }
    return 0.0;
}

// File names used for stems on disk.
inline std::string stem_filename(InstrumentId i) {
    switch (i) {
    case InstrumentId::Violin: return "bach_V.wav";
    case InstrumentId::Piano: return "bach_P.wav";
    case InstrumentId::Flute: return "bach_F.wav";
    case InstrumentId::Ukulele: return "bach_U.wav";
    case InstrumentId::Cello: return "bach_C.wav";
    }
    return "bach_X.wav";
}

struct Stem {
    InstrumentId instrument = InstrumentId::Violin;
    std::vector<float> samples; // mono
    int sample_rate = kSampleRate;
    int anchor_x = kDefaultAnchorX;
    double signature_hz = 0.0;
    bool loop = true;

    std::size_t frames() const noexcept { return samples.size() / kFrameSamples; }
};

using StemSet = std::array<Stem, kInstrumentCount>;

namespace detail {
inline float clamp_to_peak(double v) noexcept {
    float s = static_cast<float>(v);
    while (std::fabs(static_cast<double>(s)) > kStemPeak) s = std::nextafter(s, 0.0f);
    return s;
}
} // namespace detail

// Carrier and vibrato are snapped to whole cycles over the loop so the stem
// wraps without a seam; at the default 60-frame length both are exact. The
// seed picks the carrier start phase.
inline Stem synth_stem(InstrumentId instrument, int duration_frames, std::uint64_t seed) {
    if (duration_frames < 1) throw ConfigError("stem duration must be >= 1 frame");
    const std::size_t n = static_cast<std::size_t>(duration_frames) * kFrameSamples;
    const double seconds = static_cast<double>(n) / kSampleRate;
    const double carrier_cycles = std::max(1.0, std::round(signature_hz(instrument) * seconds));
    const double vibrato_cycles = std::max(1.0, std::round(kVibratoHz * seconds));

    SplitMix64 rng(derive_seed(seed, index_of(instrument)));
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const double amplitude = kStemPeak / (1.0 + kVibratoDepth);

    Stem stem;
    stem.instrument = instrument;
    stem.signature_hz = signature_hz(instrument);
    stem.samples.resize(n);
    for (std::size_t t = 0; t < n; ++t) {
        const double u = static_cast<double>(t) / static_cast<double>(n);
        const double env = 1.0 + kVibratoDepth * std::sin(2.0 * std::numbers::pi * vibrato_cycles * u);
        const double v = amplitude * env * std::sin(2.0 * std::numbers::pi * carrier_cycles * u + phase);
        stem.samples[t] = detail::clamp_to_peak(v);
    }
    return stem;
}

inline StemSet synth_stems(int duration_frames = kDefaultStemFrames, std::uint64_t seed = 1) {
    StemSet out;
    for (InstrumentId i : kInstruments) out[index_of(i)] = synth_stem(i, duration_frames, seed);
    return out;
}

inline void pad_to_frame(std::vector<float>& samples) {
    const std::size_t rem = samples.size() % kFrameSamples;
    if (rem != 0 || samples.empty()) samples.resize(samples.size() + (kFrameSamples - rem), 0.0f);
}

inline void save_wav(const Stem& stem, const std::string& path, SampleFormat format = SampleFormat::Float32) {
    write_wav(path, WavData{stem.sample_rate, 1, format, stem.samples});
}

// Loads a mono 48 kHz stem, zero-padding to a whole number of frames.
inline Stem load_wav(const std::string& path, InstrumentId instrument) {
    WavData wav = read_wav(path);
    if (wav.sample_rate != kSampleRate) {
        throw FormatError("WAV " + path + ": sample_rate " + std::to_string(wav.sample_rate) + " (need " +
                          std::to_string(kSampleRate) + ")");
    }
    if (wav.channels != 1) {
        throw FormatError("WAV " + path + ": channels " + std::to_string(wav.channels) + " (need 1)");
    }
    Stem stem;
    stem.instrument = instrument;
    stem.signature_hz = signature_hz(instrument);
    stem.samples = std::move(wav.samples);
    pad_to_frame(stem.samples);
    return stem;
}

} // namespace abgm
