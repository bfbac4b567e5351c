#pragma once

// Per-frame audio features: raw window, Hann-windowed FFT magnitude and a
// log mel spectrogram. Channels are processed independently.

#include "abgm/mixer.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace abgm {

inline constexpr std::size_t kFftSize = 1024;
inline constexpr std::size_t kFftBins = kFftSize / 2 + 1; // 513
inline constexpr std::size_t kMelBands = 64;
inline constexpr double kMelLowHz = 50.0;
inline constexpr double kMelHighHz = 8000.0;

// In-place iterative radix-2 decimation-in-time FFT (forward, unnormalized).
inline void fft_radix2(std::span<std::complex<double>> data) {
    const std::size_t n = data.size();
    if (n == 0 || (n & (n - 1)) != 0) throw ConfigError("FFT length must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len / 2;
        for (std::size_t k = 0; k < half; ++k) {
            // Twiddles from the exact angle rather than repeated multiplication.
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(len);
            const std::complex<double> w(std::cos(angle), std::sin(angle));
            for (std::size_t start = 0; start < n; start += len) {
                const std::complex<double> a = data[start + k];
                const std::complex<double> b = w * data[start + k + half];
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
    }
}

// Periodic Hann window.
inline const std::array<double, kFrameSamples>& hann_window() {
    static const auto w = [] {
        std::array<double, kFrameSamples> out{};
        for (std::size_t n = 0; n < kFrameSamples; ++n) {
            out[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / kFrameSamples);
        }
        return out;
    }();
    return w;
}

// Full complex spectrum of the windowed, zero-padded frame channel.
inline std::vector<std::complex<double>> windowed_spectrum(std::span<const float> samples) {
    const auto& w = hann_window();
    std::vector<std::complex<double>> buf(kFftSize);
    for (std::size_t n = 0; n < kFrameSamples && n < samples.size(); ++n) buf[n] = w[n] * samples[n];
    fft_radix2(buf);
    return buf;
}

enum class FeatureKind { Raw, FftMag, MelSpec };

inline std::string_view to_string(FeatureKind k) noexcept {
    switch (k) {
    case FeatureKind::Raw: return "raw";
    case FeatureKind::FftMag: return "fft";
    case FeatureKind::MelSpec: return "mel";
    }
    return "?";
}

inline FeatureKind parse_feature_kind(std::string_view s) {
    if (s == "raw") return FeatureKind::Raw;
    if (s == "fft") return FeatureKind::FftMag;
    if (s == "mel") return FeatureKind::MelSpec;
    throw ConfigError("unknown encoder '" + std::string(s) + "'");
}

constexpr std::size_t feature_length(FeatureKind k) noexcept {
    switch (k) {
    case FeatureKind::Raw: return kFrameSamples;
    case FeatureKind::FftMag: return kFftBins;
    case FeatureKind::MelSpec: return kMelBands;
    }
    return 0;
}

struct FeatureVector {
    FeatureKind kind = FeatureKind::Raw;
    int frame_index = 0;
    std::array<std::vector<double>, 2> values; // [0] left, [1] right
};

namespace detail {
inline std::span<const float> channel(const AudioFrame& f, std::size_t c) {
    return c == 0 ? std::span<const float>(f.left) : std::span<const float>(f.right);
}
} // namespace detail

inline std::vector<double> fft_magnitude(std::span<const float> samples) {
    const auto spec = windowed_spectrum(samples);
    std::vector<double> mag(kFftBins);
    for (std::size_t k = 0; k < kFftBins; ++k) mag[k] = std::abs(spec[k]);
    return mag;
}

inline FeatureVector fft_magnitude(const AudioFrame& frame) {
    FeatureVector out{FeatureKind::FftMag, frame.frame_index, {}};
    for (std::size_t c = 0; c < 2; ++c) out.values[c] = fft_magnitude(detail::channel(frame, c));
    return out;
}

inline FeatureVector raw_window(const AudioFrame& frame) {
    FeatureVector out{FeatureKind::Raw, frame.frame_index, {}};
    for (std::size_t c = 0; c < 2; ++c) {
        const auto ch = detail::channel(frame, c);
        out.values[c].assign(ch.begin(), ch.end());
    }
    return out;
}

// Inverse of raw_window.
inline AudioFrame to_audio_frame(const FeatureVector& raw) {
    if (raw.kind != FeatureKind::Raw) throw ConfigError("only raw features convert back to audio");
    AudioFrame f;
    f.frame_index = raw.frame_index;
    for (std::size_t t = 0; t < kFrameSamples; ++t) {
        f.left[t] = static_cast<float>(raw.values[0].at(t));
        f.right[t] = static_cast<float>(raw.values[1].at(t));
    }
    return f;
}

inline double hz_to_mel(double hz) noexcept { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) noexcept { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

inline double bin_hz(std::size_t bin) noexcept {
    return static_cast<double>(bin) * kSampleRate / static_cast<double>(kFftSize);
}

// Triangular filters with centers equally spaced on the mel scale. Filter i
// rises from edge i to its peak (1.0) at edge i+1 and falls to zero at edge i+2.
class MelFilterbank {
public:
    MelFilterbank() {
        const double lo = hz_to_mel(kMelLowHz);
        const double hi = hz_to_mel(kMelHighHz);
        for (std::size_t i = 0; i < edges_.size(); ++i) {
            edges_[i] = mel_to_hz(lo + (hi - lo) * static_cast<double>(i) / (kMelBands + 1));
        }
        for (std::size_t m = 0; m < kMelBands; ++m) {
            weights_[m].resize(kFftBins);
            for (std::size_t k = 0; k < kFftBins; ++k) weights_[m][k] = weight(m, bin_hz(k));
        }
    }

    double center_hz(std::size_t m) const noexcept { return edges_[m + 1]; }
    double lower_hz(std::size_t m) const noexcept { return edges_[m]; }
    double upper_hz(std::size_t m) const noexcept { return edges_[m + 2]; }

    double weight(std::size_t m, double hz) const noexcept {
        const double a = edges_[m], b = edges_[m + 1], c = edges_[m + 2];
        if (hz <= a || hz >= c) return 0.0;
        return hz <= b ? (hz - a) / (b - a) : (c - hz) / (c - b);
    }

    const std::vector<double>& bin_weights(std::size_t m) const noexcept { return weights_[m]; }

    // log(1 + filter energy) for each band of a magnitude spectrum.
    std::vector<double> apply(std::span<const double> magnitude) const {
        std::vector<double> out(kMelBands);
        for (std::size_t m = 0; m < kMelBands; ++m) {
            double e = 0.0;
            for (std::size_t k = 0; k < kFftBins; ++k) e += weights_[m][k] * magnitude[k] * magnitude[k];
            out[m] = std::log1p(e);
        }
        return out;
    }

private:
    std::array<double, kMelBands + 2> edges_{};
    std::array<std::vector<double>, kMelBands> weights_;
};

inline const MelFilterbank& mel_filterbank() {
    static const MelFilterbank bank;
    return bank;
}

inline FeatureVector mel_spectrogram(const AudioFrame& frame) {
    FeatureVector out{FeatureKind::MelSpec, frame.frame_index, {}};
    for (std::size_t c = 0; c < 2; ++c) {
        out.values[c] = mel_filterbank().apply(fft_magnitude(detail::channel(frame, c)));
    }
    return out;
}

inline FeatureVector extract(FeatureKind kind, const AudioFrame& frame) {
    switch (kind) {
    case FeatureKind::Raw: return raw_window(frame);
    case FeatureKind::FftMag: return fft_magnitude(frame);
    case FeatureKind::MelSpec: return mel_spectrogram(frame);
    }
    throw ConfigError("unknown feature kind");
}

} // namespace abgm
