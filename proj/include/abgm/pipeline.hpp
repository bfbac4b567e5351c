#pragma once

// End-to-end experiment: simulate a match, render it with adaptive and with
// static BGM, and measure how well the game state decodes from each mix. Both
// arms consume the same MatchLog; the music never feeds back into play.

#include "abgm/decoder.hpp"
#include "abgm/features.hpp"
#include "abgm/game_core.hpp"
#include "abgm/metrics.hpp"
#include "abgm/mixer.hpp"
#include "abgm/rules.hpp"
#include "abgm/stem.hpp"

#include <charconv>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace abgm {

// Renders every round of `log` through one mixer as a continuous stream.
// `sink(state, audio)` sees each frame in order.
inline void render_log(const MatchLog& log, const AdaptationRules& rules, Mixer& mixer, BgmMode mode,
                       const std::function<void(const FrameState&, const AudioFrame&)>& sink) {
    if (log.states.empty()) throw SequencingError("match log carries no frame states");
    for (const auto& round : log.states) {
        check_consecutive(round);
        for (const FrameState& s : round) {
            mixer.set_plan(plan_for_mode(rules, s, mode));
            sink(s, mixer.render_frame(s.frame_index));
        }
    }
}

struct DecodabilityResult {
    AccuracyReport adaptive;
    AccuracyReport static_control;
};

using FrameSink = std::function<void(BgmMode, const FrameState&, const AudioFrame&)>;

inline DecodabilityResult run_decodability_experiment(const MatchLog& log, const StemSet& stems,
                                                      const AdaptationRules& rules, const MixerConfig& config = {},
                                                      const FrameSink& sink = {}) {
    const ReferenceProfile profile = calibrate(stems, config);
    DecodabilityResult result;
    for (BgmMode mode : {BgmMode::Adaptive, BgmMode::Static}) {
        Mixer mixer(stems, config);
        DecodabilityScorer scorer(profile, rules);
        render_log(log, rules, mixer, mode, [&](const FrameState& s, const AudioFrame& a) {
            scorer.add(s, a);
            if (sink) sink(mode, s, a);
        });
        (mode == BgmMode::Adaptive ? result.adaptive : result.static_control) = scorer.report();
    }
    return result;
}

// Shortest round-trip decimal form, identical on every run.
inline void append_number(std::string& out, double v) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, r.ptr);
}

inline std::string features_csv_header(FeatureKind kind) {
    std::string out = "frame,kind,channel";
    for (std::size_t k = 0; k < feature_length(kind); ++k) out += ",v" + std::to_string(k);
    out += '\n';
    return out;
}

inline void append_features_csv(std::string& out, const FeatureVector& fv) {
    for (std::size_t c = 0; c < 2; ++c) {
        out += std::to_string(fv.frame_index);
        out += ',';
        out += to_string(fv.kind);
        out += ',';
        out += std::to_string(c);
        for (double v : fv.values[c]) {
            out += ',';
            append_number(out, v);
        }
        out += '\n';
    }
}

inline std::string report_csv(const AccuracyReport& report) {
    std::string out = "element,frames,correct,accuracy\n";
    auto row = [&](std::string_view name, const ElementAccuracy& a) {
        out += name;
        out += ',' + std::to_string(a.frames) + ',' + std::to_string(a.correct) + ',';
        append_number(out, a.accuracy());
        out += '\n';
    };
    for (Element e : kElements) row(to_string(e), report[e]);
    row("overall", report.overall());
    return out;
}

inline std::string format_comparison(const DecodabilityResult& r) {
    std::string out;
    char line[160];
    std::snprintf(line, sizeof line, "%-9s %7s %7s %7s %7s %7s %8s\n", "mode", "p1_hp", "p1_ep", "p2_hp", "p2_ep",
                  "pd", "overall");
    out += line;
    for (const auto* rep : {&r.adaptive, &r.static_control}) {
        std::snprintf(line, sizeof line, "%-9s %7.4f %7.4f %7.4f %7.4f %7.4f %8.4f\n",
                      rep == &r.adaptive ? "adaptive" : "static", (*rep)[Element::P1Hp].accuracy(),
                      (*rep)[Element::P1Ep].accuracy(), (*rep)[Element::P2Hp].accuracy(),
                      (*rep)[Element::P2Ep].accuracy(), (*rep)[Element::Pd].accuracy(), rep->overall().accuracy());
        out += line;
    }
    return out;
}

} // namespace abgm
