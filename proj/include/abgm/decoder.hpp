#pragma once

// Recovers volume levels, and from them the quantized game state, from the
// mixed audio alone.
//
// Calibration renders each stem solo at unit gain and records the magnitude
// of its signature FFT bin at every loop position. Because each stem carries
// a vibrato, one frame's magnitude depends on where in the loop it was taken;
// keeping the reference per loop position makes the gain estimate exact up to
// spectral leakage between stems.

#include "abgm/error.hpp"
#include "abgm/features.hpp"
#include "abgm/mixer.hpp"
#include "abgm/rules.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace abgm {

inline std::size_t signature_bin(double hz) noexcept {
    return static_cast<std::size_t>(std::lround(hz * static_cast<double>(kFftSize) / kSampleRate));
}

using ChannelPair = std::array<double, 2>;

struct ReferenceProfile {
    std::array<std::size_t, kInstrumentCount> bins{};
    std::array<ChannelPair, kInstrumentCount> mean_magnitude{};
    std::array<std::vector<ChannelPair>, kInstrumentCount> loop_magnitude; // indexed by loop frame
    std::array<PanGains, kInstrumentCount> pan{};

    const ChannelPair& reference(InstrumentId i, std::uint64_t stream_frame) const {
        const auto& loop = loop_magnitude[index_of(i)];
        return loop[stream_frame % loop.size()];
    }

    friend bool operator==(const ReferenceProfile& a, const ReferenceProfile& b) {
        if (a.bins != b.bins || a.mean_magnitude != b.mean_magnitude || a.loop_magnitude != b.loop_magnitude) {
            return false;
        }
        for (std::size_t i = 0; i < kInstrumentCount; ++i) {
            if (a.pan[i].left != b.pan[i].left || a.pan[i].right != b.pan[i].right) return false;
        }
        return true;
    }
};

inline constexpr int kCalibrationFrames = 10;

inline ReferenceProfile calibrate(const StemSet& stems, const MixerConfig& config = {}) {
    ReferenceProfile profile;
    for (std::size_t i = 0; i < kInstrumentCount; ++i) {
        if (stems[i].frames() == 0) {
            throw CalibrationError(std::string(to_string(stems[i].instrument)) + " stem is empty");
        }
        profile.bins[i] = signature_bin(stems[i].signature_hz);
        for (std::size_t j = 0; j < i; ++j) {
            if (profile.bins[j] == profile.bins[i]) {
                throw CalibrationError(std::string(to_string(kInstruments[j])) + " and " +
                                       std::string(to_string(kInstruments[i])) + " share FFT bin " +
                                       std::to_string(profile.bins[i]));
            }
        }
    }
    for (InstrumentId inst : kInstruments) {
        const std::size_t i = index_of(inst);
        Mixer solo(stems, config);
        solo.set_target(inst, 1.0);
        profile.pan[i] = solo.pan(inst);
        solo.render_frame(); // ramp from silence

        const std::size_t loop = stems[i].frames();
        const std::size_t count = std::max<std::size_t>(kCalibrationFrames, loop);
        auto& per_loop = profile.loop_magnitude[i];
        per_loop.assign(loop, ChannelPair{});
        ChannelPair sum{};
        for (std::size_t f = 1; f <= count; ++f) {
            const FeatureVector fv = fft_magnitude(solo.render_frame());
            const ChannelPair m{fv.values[0][profile.bins[i]], fv.values[1][profile.bins[i]]};
            per_loop[f % loop] = m;
            sum[0] += m[0];
            sum[1] += m[1];
        }
        profile.mean_magnitude[i] = {sum[0] / static_cast<double>(count), sum[1] / static_cast<double>(count)};
        if (!(profile.mean_magnitude[i][0] + profile.mean_magnitude[i][1] > 0.0)) {
            throw CalibrationError(std::string(to_string(inst)) + " produced no signal at its signature bin");
        }
    }
    return profile;
}

// Nearest ladder level to `gain`; exact midpoints go to the lower level.
inline VolumeLevel snap_to_ladder(double gain, std::span<const VolumeLevel> ladder) {
    VolumeLevel best = ladder.front();
    double best_d = std::fabs(gain - best.gain());
    for (const VolumeLevel& l : ladder.subspan(1)) {
        const double d = std::fabs(gain - l.gain());
        if (d < best_d - 1e-12) {
            best = l;
            best_d = d;
        }
    }
    return best;
}

struct DecodedState {
    std::array<VolumeLevel, kInstrumentCount> levels{};
    std::array<double, kInstrumentCount> gain_estimate{};
    std::array<Band, kInstrumentCount> bands{}; // indexed like Element
};

// Per-instrument gain estimate snapped to that instrument's ladder.
// `stream_frame` is the frame's position in the rendered stream (0 for the
// first frame rendered after a mixer reset).
inline DecodedState estimate_plan(const FeatureVector& fft, const ReferenceProfile& profile,
                                  const AdaptationRules& rules, std::uint64_t stream_frame) {
    if (fft.kind != FeatureKind::FftMag) throw ConfigError("decoder needs FFT magnitude features");
    DecodedState out;
    for (InstrumentId inst : kInstruments) {
        const std::size_t i = index_of(inst);
        const std::size_t bin = profile.bins[i];
        const ChannelPair& ref = profile.reference(inst, stream_frame);
        const PanGains& pan = profile.pan[i];
        const double observed = pan.left * fft.values[0][bin] + pan.right * fft.values[1][bin];
        const double expected = pan.left * ref[0] + pan.right * ref[1];
        const double g = expected > 0.0 ? observed / expected : 0.0;
        out.gain_estimate[i] = g;
        out.levels[i] = snap_to_ladder(g, rules.table_for(inst).ladder());
    }
    return out;
}

inline void invert_tables(DecodedState& state, const AdaptationRules& rules) {
    for (InstrumentId inst : kInstruments) {
        const std::size_t i = index_of(inst);
        state.bands[static_cast<std::size_t>(element_of(inst))] = rules.table_for(inst).invert(state.levels[i]);
    }
}

inline DecodedState decode(const FeatureVector& fft, const ReferenceProfile& profile, const AdaptationRules& rules,
                           std::uint64_t stream_frame) {
    DecodedState s = estimate_plan(fft, profile, rules, stream_frame);
    invert_tables(s, rules);
    return s;
}

inline constexpr std::size_t kElementCount = 5;
inline constexpr std::array kElements{Element::P1Hp, Element::P1Ep, Element::P2Hp, Element::P2Ep, Element::Pd};

struct ElementAccuracy {
    std::size_t frames = 0;
    std::size_t correct = 0;
    double accuracy() const noexcept {
        return frames == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(frames);
    }
};

struct AccuracyReport {
    std::array<ElementAccuracy, kElementCount> elements{};
    std::size_t excluded_frames = 0;

    const ElementAccuracy& operator[](Element e) const noexcept { return elements[static_cast<std::size_t>(e)]; }

    ElementAccuracy overall() const noexcept {
        ElementAccuracy o;
        for (const auto& e : elements) {
            o.frames += e.frames;
            o.correct += e.correct;
        }
        return o;
    }

    void merge(const AccuracyReport& other) noexcept {
        for (std::size_t e = 0; e < kElementCount; ++e) {
            elements[e].frames += other.elements[e].frames;
            elements[e].correct += other.elements[e].correct;
        }
        excluded_frames += other.excluded_frames;
    }
};

// Scores decoded bands against the true state bands, frame by frame, over a
// continuous stream. The first stream frame and every frame whose true plan
// differs from the previous one are skipped: the gain ramp mixes old and new
// levels within them.
class DecodabilityScorer {
public:
    DecodabilityScorer(const ReferenceProfile& profile, const AdaptationRules& rules)
        : profile_(&profile), rules_(&rules) {}

    void add(const FrameState& state, const FeatureVector& fft) {
        const VolumePlan truth = rules_->plan_for_frame(state);
        const bool settled = stream_frame_ > 0 && truth.same_levels(previous_);
        previous_ = truth;
        if (!settled) {
            ++report_.excluded_frames;
            ++stream_frame_;
            return;
        }
        const DecodedState decoded = decode(fft, *profile_, *rules_, stream_frame_);
        for (Element e : kElements) {
            const std::size_t k = static_cast<std::size_t>(e);
            const Band truth_band = rules_->table_for(e).invert(rules_->table_for(e).lookup(element_value(state, e)));
            ++report_.elements[k].frames;
            if (decoded.bands[k] == truth_band) ++report_.elements[k].correct;
        }
        ++stream_frame_;
    }

    void add(const FrameState& state, const AudioFrame& audio) { add(state, fft_magnitude(audio)); }

    const AccuracyReport& report() const noexcept { return report_; }

private:
    const ReferenceProfile* profile_;
    const AdaptationRules* rules_;
    AccuracyReport report_;
    VolumePlan previous_;
    std::uint64_t stream_frame_ = 0;
};

inline AccuracyReport evaluate_decodability(std::span<const FrameState> states, std::span<const AudioFrame> audio,
                                            const ReferenceProfile& profile, const AdaptationRules& rules) {
    if (states.empty() || audio.empty()) throw SequencingError("empty state or audio stream");
    if (states.size() != audio.size()) {
        throw SequencingError(std::to_string(states.size()) + " states but " + std::to_string(audio.size()) +
                              " audio frames");
    }
    DecodabilityScorer scorer(profile, rules);
    for (std::size_t k = 0; k < states.size(); ++k) {
        if (states[k].frame_index != audio[k].frame_index) {
            throw SequencingError("state frame " + std::to_string(states[k].frame_index) + " paired with audio frame " +
                                  std::to_string(audio[k].frame_index));
        }
        scorer.add(states[k], audio[k]);
    }
    return scorer.report();
}

// Expected accuracy of a decoder that ignores the audio: 1 / number of bands.
inline double chance_level(const AdaptationRules& rules, Element e) {
    return 1.0 / static_cast<double>(rules.table_for(e).ladder().size());
}

} // namespace abgm
