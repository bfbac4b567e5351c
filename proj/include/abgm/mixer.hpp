#pragma once

// Frame-synchronous stereo mixer. Every game frame the mixer takes a volume
// plan, ramps each instrument's gain toward its new target over 10 ms and
// renders 800 stereo samples. Stems loop; their playheads advance one frame
// per render call.

#include "abgm/error.hpp"
#include "abgm/game_core.hpp"
#include "abgm/rules.hpp"
#include "abgm/stem.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

namespace abgm {

struct AudioFrame {
    int frame_index = 0;
    std::array<float, kFrameSamples> left{};
    std::array<float, kFrameSamples> right{};

    friend bool operator==(const AudioFrame&, const AudioFrame&) = default;
};

struct MixerConfig {
    int listener_x = kStageWidth / 2;
    double master_gain = 0.8;
    int ramp_samples = kSampleRate / 100; // 10 ms
};

struct PanGains {
    double left = 0.0;
    double right = 0.0;
};

// Constant-power pan: p in [-1, 1] maps to the quarter circle.
inline PanGains pan_gains(int anchor_x, int listener_x) noexcept {
    const double p = std::clamp((anchor_x - listener_x) / 400.0, -1.0, 1.0);
    const double theta = (p + 1.0) * std::numbers::pi / 4.0;
    return {std::cos(theta), std::sin(theta)};
}

class Mixer {
public:
    explicit Mixer(StemSet stems, MixerConfig config = {}) : stems_(std::move(stems)), config_(config) {
        for (std::size_t i = 0; i < kInstrumentCount; ++i) {
            pan_[i] = pan_gains(stems_[i].anchor_x, config_.listener_x);
        }
    }

    const StemSet& stems() const noexcept { return stems_; }
    const MixerConfig& config() const noexcept { return config_; }

    void set_plan(const VolumePlan& plan) {
        for (InstrumentId i : kInstruments) set_target(i, plan[i].gain());
    }

    // Restarts the ramp only when the target actually changes.
    void set_target(InstrumentId instrument, double gain) {
        Voice& v = voices_[index_of(instrument)];
        const double g = std::clamp(gain, 0.0, 1.0);
        if (g == v.target) return;
        v.target = g;
        v.remaining = std::max(1, config_.ramp_samples);
        v.step = (v.target - v.current) / v.remaining;
    }

    double current_gain(InstrumentId i) const noexcept { return voices_[index_of(i)].current; }
    double target_gain(InstrumentId i) const noexcept { return voices_[index_of(i)].target; }
    std::size_t playhead(InstrumentId i) const noexcept { return voices_[index_of(i)].playhead; }
    PanGains pan(InstrumentId i) const noexcept { return pan_[index_of(i)]; }

    // Silence, playheads at 0.
    void reset() noexcept { voices_ = {}; }

    AudioFrame render_frame(int frame_index = 0) {
        for (const Stem& s : stems_) {
            if (s.samples.empty()) throw ConfigError(std::string(to_string(s.instrument)) + " stem is empty");
        }
        AudioFrame out;
        out.frame_index = frame_index;
        std::array<double, kFrameSamples> left{};
        std::array<double, kFrameSamples> right{};
        for (std::size_t i = 0; i < kInstrumentCount; ++i) {
            Voice& v = voices_[i];
            const std::vector<float>& samples = stems_[i].samples;
            const double gl = config_.master_gain * pan_[i].left;
            const double gr = config_.master_gain * pan_[i].right;
            std::size_t ph = v.playhead;
            for (std::size_t t = 0; t < kFrameSamples; ++t) {
                if (v.remaining > 0) {
                    v.current = --v.remaining == 0 ? v.target : v.current + v.step;
                }
                const double s = v.current * samples[ph];
                left[t] += gl * s;
                right[t] += gr * s;
                if (++ph == samples.size()) ph = 0;
            }
            v.playhead = ph;
        }
        for (std::size_t t = 0; t < kFrameSamples; ++t) {
            out.left[t] = static_cast<float>(std::clamp(left[t], -1.0, 1.0));
            out.right[t] = static_cast<float>(std::clamp(right[t], -1.0, 1.0));
        }
        return out;
    }

private:
    struct Voice {
        double current = 0.0;
        double target = 0.0;
        double step = 0.0;
        int remaining = 0;
        std::size_t playhead = 0;
    };

    StemSet stems_;
    MixerConfig config_;
    std::array<PanGains, kInstrumentCount> pan_{};
    std::array<Voice, kInstrumentCount> voices_{};
};

enum class BgmMode { Adaptive, Static };

inline VolumePlan plan_for_mode(const AdaptationRules& rules, const FrameState& s, BgmMode mode) {
    return mode == BgmMode::Adaptive ? rules.plan_for_frame(s) : uniform_plan(s.frame_index);
}

inline void check_consecutive(std::span<const FrameState> states) {
    if (states.empty()) throw SequencingError("empty frame-state list");
    for (std::size_t k = 1; k < states.size(); ++k) {
        if (states[k].frame_index != states[k - 1].frame_index + 1) {
            throw SequencingError("frame " + std::to_string(states[k].frame_index) + " follows frame " +
                                  std::to_string(states[k - 1].frame_index));
        }
    }
}

// One audio frame per state. The mixer keeps its gains and playheads, so
// successive rounds rendered through the same mixer form one continuous stream.
inline std::vector<AudioFrame> render_match(std::span<const FrameState> states, const AdaptationRules& rules,
                                            Mixer& mixer, BgmMode mode = BgmMode::Adaptive) {
    check_consecutive(states);
    std::vector<AudioFrame> out;
    out.reserve(states.size());
    for (const FrameState& s : states) {
        mixer.set_plan(plan_for_mode(rules, s, mode));
        out.push_back(mixer.render_frame(s.frame_index));
    }
    return out;
}

// Interleaves frames into a stereo WAV body.
inline WavData to_wav(std::span<const AudioFrame> frames, SampleFormat format) {
    WavData wav{kSampleRate, 2, format, {}};
    wav.samples.reserve(frames.size() * kFrameSamples * 2);
    for (const AudioFrame& f : frames) {
        for (std::size_t t = 0; t < kFrameSamples; ++t) {
            wav.samples.push_back(f.left[t]);
            wav.samples.push_back(f.right[t]);
        }
    }
    return wav;
}

} // namespace abgm
