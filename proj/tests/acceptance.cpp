// Acceptance suite: one PASS/FAIL line per criterion. Exit status is nonzero
// if any criterion fails. argv[1] is the path to the abgm CLI binary.

#include "abgm/decoder.hpp"
#include "abgm/metrics.hpp"
#include "abgm/pipeline.hpp"
#include "abgm/session.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <unistd.h>

using namespace abgm;
namespace fs = std::filesystem;
using clock_type = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Collects the first failing check's description.
class Checker {
public:
    bool operator()(bool ok, const std::string& what) {
        if (!ok && pass_) {
            pass_ = false;
            first_failure_ = what;
        }
        return ok;
    }
    bool pass() const noexcept { return pass_; }
    const std::string& failure() const noexcept { return first_failure_; }

private:
    bool pass_ = true;
    std::string first_failure_;
};

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome finish(const Checker& c, std::string detail) {
    if (!c.pass()) return {false, c.failure()};
    return {true, std::move(detail)};
}

double uniform(SplitMix64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; }

// 1. Rule tables over their full integer domains.
Outcome rule_tables() {
    const auto t0 = clock_type::now();
    Checker c;
    const int hp_anchor[7][2] = {{400, 75}, {300, 60}, {250, 55}, {200, 40}, {150, 35}, {100, 25}, {50, 10}};
    for (auto& a : hp_anchor) c(hp_volume(a[0]).percent() == a[1], fmt("hp_volume(%d) != %d", a[0], a[1]));
    const int ep_anchor[6][2] = {{300, 75}, {250, 60}, {200, 55}, {150, 40}, {100, 35}, {50, 25}};
    for (auto& a : ep_anchor) c(ep_volume(a[0]).percent() == a[1], fmt("ep_volume(%d) != %d", a[0], a[1]));
    c(pd_volume(0).percent() == 75, "pd_volume(0) != 75");
    for (int v = 0; v <= kMaxHp; ++v) {
        c(hp_volume(v).percent() == oracle::lookup(oracle::kHpBands, v), fmt("hp_volume(%d) disagrees with oracle", v));
    }
    for (int v = 0; v <= kMaxEp; ++v) {
        c(ep_volume(v).percent() == oracle::lookup(oracle::kEpBands, v), fmt("ep_volume(%d) disagrees with oracle", v));
    }
    for (int v = 0; v <= kStageWidth; ++v) {
        c(pd_volume(v).percent() == oracle::lookup(oracle::kPdBands, v), fmt("pd_volume(%d) disagrees with oracle", v));
        if (v > 0) c(pd_volume(v) <= pd_volume(v - 1), fmt("pd_volume increases at %d", v));
    }
    const double s = seconds_since(t0);
    c(s <= 1.0, fmt("took %.3f s", s));
    return finish(c, fmt("1501 domain points, %.3f s", s));
}

// 2. Frame-pair monotonicity.
Outcome monotonicity() {
    Checker c;
    SplitMix64 rng(20240);
    auto fighter = [&] {
        return FighterState{static_cast<int>(rng.below(kMaxHp + 1)), static_cast<int>(rng.below(kMaxEp + 1)),
                            static_cast<int>(rng.below(kStageWidth + 1))};
    };
    auto shrink = [&](int v) { return static_cast<int>(rng.below(static_cast<std::uint32_t>(v) + 1)); };
    for (int trial = 0; trial < 10000; ++trial) {
        const FrameState a{0, fighter(), fighter()};
        FrameState b = a;
        b.p1.hp = shrink(a.p1.hp);
        b.p2.hp = shrink(a.p2.hp);
        b.p1.ep = shrink(a.p1.ep);
        b.p2.ep = shrink(a.p2.ep);
        b.p2.x = a.p1.x + (a.p2.x >= a.p1.x ? 1 : -1) * shrink(a.pd());
        const VolumePlan pa = plan_for_frame(a), pb = plan_for_frame(b);
        for (InstrumentId i : {InstrumentId::Violin, InstrumentId::Piano, InstrumentId::Flute, InstrumentId::Ukulele}) {
            c(pb[i] <= pa[i], fmt("trial %d: %s volume rose", trial, std::string(to_string(i)).c_str()));
        }
        c(pb[InstrumentId::Cello] >= pa[InstrumentId::Cello], fmt("trial %d: Cello volume fell", trial));
    }
    return finish(c, "10000 seeded frame pairs");
}

// 3. FFT, Parseval and mel filterbank shape.
Outcome dsp() {
    const auto t0 = clock_type::now();
    Checker c;
    SplitMix64 rng(1024);
    double worst_dft = 0.0, worst_parseval = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::complex<double>> x(kFftSize);
        for (auto& v : x) v = uniform(rng);
        const auto want = oracle::naive_dft(x);
        auto got = x;
        fft_radix2(got);
        double num = 0.0, den = 0.0, time_e = 0.0, freq_e = 0.0;
        for (std::size_t k = 0; k < kFftSize; ++k) {
            num = std::max(num, std::abs(got[k] - want[k]));
            den = std::max(den, std::abs(want[k]));
            time_e += std::norm(x[k]);
            freq_e += std::norm(got[k]);
        }
        worst_dft = std::max(worst_dft, num / den);
        worst_parseval = std::max(worst_parseval, std::fabs(freq_e / kFftSize - time_e) / time_e);
    }
    c(worst_dft <= 1e-6, fmt("FFT vs DFT relative error %.3g", worst_dft));
    c(worst_parseval <= 1e-6, fmt("Parseval relative error %.3g", worst_parseval));

    const MelFilterbank& fb = mel_filterbank();
    c(std::fabs(hz_to_mel(700.0) - 781.17) < 0.01, "m(700) != 781.17");
    for (std::size_t m = 1; m < kMelBands; ++m) c(fb.center_hz(m) > fb.center_hz(m - 1), "centers not increasing");
    for (std::size_t m = 0; m < kMelBands; ++m) c(fb.weight(m, fb.center_hz(m)) == 1.0, "filter peak != 1");
    for (double hz = fb.center_hz(0); hz <= fb.center_hz(kMelBands - 1); hz += 0.5) {
        double total = 0.0;
        for (std::size_t m = 0; m < kMelBands; ++m) total += fb.weight(m, hz);
        c(total > 0.0, fmt("no filter weight at %.1f Hz", hz));
    }
    const auto zero = mel_filterbank().apply(std::vector<double>(kFftBins, 0.0));
    c(std::all_of(zero.begin(), zero.end(), [](double v) { return v == 0.0; }), "zero frame gives nonzero mel");

    // a tone sweeping across each filter's band: one peak, rising then falling
    auto response = [&](std::size_t m, double hz) {
        std::vector<float> x(kFrameSamples);
        for (std::size_t t = 0; t < x.size(); ++t) {
            x[t] = static_cast<float>(0.5 * std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(t) / kSampleRate));
        }
        return fb.apply(fft_magnitude(x))[m];
    };
    for (std::size_t m = 0; m < kMelBands; ++m) {
        const double lo = fb.lower_hz(m), hi = fb.upper_hz(m);
        std::vector<double> r;
        for (int i = 0; i <= 100; ++i) r.push_back(response(m, lo + (hi - lo) * i / 100.0));
        const auto peak = static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
        for (std::size_t i = 1; i < r.size(); ++i) {
            c(i <= peak ? r[i] >= r[i - 1] : r[i] <= r[i - 1], fmt("band %zu response not unimodal at step %zu", m, i));
        }
    }
    const double s = seconds_since(t0);
    c(s < 10.0, fmt("took %.2f s", s));
    return finish(c, fmt("FFT err %.2g, Parseval err %.2g, %.2f s", worst_dft, worst_parseval, s));
}

// 4. No-clip, closed-form RMS, silence.
Outcome mixer_laws() {
    Checker c;
    const MatchLog log = simulate_match(PolicyId::Rusher, PolicyId::RandomWalker, kDefaultRounds, 42);
    double peak = 0.0;
    std::size_t frames = 0;
    for (BgmMode mode : {BgmMode::Adaptive, BgmMode::Static}) {
        Mixer m(synth_stems());
        render_log(log, default_rules(), m, mode, [&](const FrameState&, const AudioFrame& a) {
            for (std::size_t t = 0; t < kFrameSamples; ++t) {
                peak = std::max({peak, static_cast<double>(std::fabs(a.left[t])), static_cast<double>(std::fabs(a.right[t]))});
            }
            ++frames;
        });
    }
    c(peak <= 0.9, fmt("peak %.4f > 0.9", peak));

    double worst_rms = 0.0;
    for (InstrumentId inst : kInstruments) {
        StemSet set = synth_stems();
        Stem& s = set[index_of(inst)];
        const double a = 0.3;
        for (std::size_t t = 0; t < s.samples.size(); ++t) {
            s.samples[t] = static_cast<float>(
                a * std::sin(2.0 * std::numbers::pi * s.signature_hz * static_cast<double>(t) / kSampleRate));
        }
        Mixer m(set);
        m.set_target(inst, 0.55);
        m.render_frame();
        double el = 0.0, er = 0.0;
        const int n = 60;
        for (int f = 0; f < n; ++f) {
            const AudioFrame fr = m.render_frame(f);
            for (std::size_t t = 0; t < kFrameSamples; ++t) {
                el += static_cast<double>(fr.left[t]) * fr.left[t];
                er += static_cast<double>(fr.right[t]) * fr.right[t];
            }
        }
        const double count = static_cast<double>(n) * kFrameSamples;
        const PanGains p = pan_gains(s.anchor_x, 400);
        const double base = 0.8 * 0.55 * a / std::sqrt(2.0);
        worst_rms = std::max({worst_rms, std::fabs(std::sqrt(el / count) / (base * p.left) - 1.0),
                              std::fabs(std::sqrt(er / count) / (base * p.right) - 1.0)});
    }
    c(worst_rms <= 1e-3, fmt("RMS relative error %.3g", worst_rms));

    Mixer silent(synth_stems());
    bool exact = true;
    for (int f = 0; f < 60; ++f) {
        const AudioFrame fr = silent.render_frame(f);
        for (std::size_t t = 0; t < kFrameSamples; ++t) exact = exact && fr.left[t] == 0.0f && fr.right[t] == 0.0f;
    }
    c(exact, "zero gains did not give exact silence");
    return finish(c, fmt("%zu frames, peak %.4f, RMS err %.2g", frames, peak, worst_rms));
}

// 5. Adaptive vs static decodability on a 3-round match.
Outcome information_channel() {
    const auto t0 = clock_type::now();
    Checker c;
    const MatchLog log = simulate_match(PolicyId::Rusher, PolicyId::RandomWalker, kDefaultRounds, 42);
    const DecodabilityResult r = run_decodability_experiment(log, synth_stems(), default_rules());
    double min_adaptive = 1.0, max_static_margin = -1.0;
    for (Element e : kElements) {
        const double a = r.adaptive[e].accuracy();
        const double s = r.static_control[e].accuracy();
        const double chance = chance_level(default_rules(), e);
        const std::string name(to_string(e));
        c(r.adaptive[e].frames > 0, name + ": no settled frames");
        c(a >= 0.99, fmt("%s adaptive %.4f < 0.99", name.c_str(), a));
        c(s <= chance + 0.05, fmt("%s static %.4f > chance+0.05 (%.4f)", name.c_str(), s, chance + 0.05));
        c(a > s, fmt("%s adaptive %.4f <= static %.4f", name.c_str(), a, s));
        min_adaptive = std::min(min_adaptive, a);
        max_static_margin = std::max(max_static_margin, s - chance);
    }
    const double secs = seconds_since(t0);
    c(secs < 120.0, fmt("took %.1f s", secs));
    return finish(c, fmt("adaptive min %.4f, static max %+.4f vs chance, %zu settled frames, %.1f s", min_adaptive,
                         max_static_margin, r.adaptive.overall().frames / kElementCount, secs));
}

// 6. Every legal plan renders and decodes to itself.
Outcome plan_round_trip() {
    const auto t0 = clock_type::now();
    Checker c;
    const StemSet stems = synth_stems();
    const ReferenceProfile profile = calibrate(stems);
    const AdaptationRules& rules = default_rules();
    std::array<std::vector<VolumeLevel>, kInstrumentCount> ladders;
    for (InstrumentId i : kInstruments) ladders[index_of(i)] = rules.table_for(i).ladder();

    Mixer mixer(stems);
    std::uint64_t stream_frame = 0;
    std::size_t cases = 0, failures = 0;
    std::array<std::size_t, kInstrumentCount> idx{};
    for (;;) {
        VolumePlan plan;
        for (std::size_t i = 0; i < kInstrumentCount; ++i) plan.levels[i] = ladders[i][idx[i]];
        mixer.set_plan(plan);
        mixer.render_frame(); // ramp frame
        ++stream_frame;
        const AudioFrame settled = mixer.render_frame();
        const DecodedState d = estimate_plan(fft_magnitude(settled), profile, rules, stream_frame);
        ++stream_frame;
        ++cases;
        if (d.levels != plan.levels) {
            if (failures == 0) c(false, fmt("plan #%zu decoded wrongly", cases));
            ++failures;
        }
        std::size_t k = 0;
        while (k < kInstrumentCount && ++idx[k] == ladders[k].size()) idx[k++] = 0;
        if (k == kInstrumentCount) break;
    }
    const double secs = seconds_since(t0);
    c(cases == 16807, fmt("%zu plans enumerated", cases));
    c(secs < 600.0, fmt("took %.1f s", secs));
    return finish(c, fmt("%zu plans, %zu failures, %.1f s", cases, failures, secs));
}

// 7. Win ratio and average HP difference.
Outcome metrics() {
    Checker c;
    struct Hand {
        std::vector<RoundResult> rounds;
        int p1_wins, p2_wins, total, hp_diff_sum; // counted by hand
    };
    auto rep = [](std::vector<RoundResult> unit, int times) {
        std::vector<RoundResult> out;
        for (int i = 0; i < times; ++i) out.insert(out.end(), unit.begin(), unit.end());
        return out;
    };
    const RoundResult ko1{Winner::P1, 400, 0, 600}, ko2{Winner::P2, 0, 400, 600};
    std::vector<Hand> logs{
        {{{Winner::P1, 250, 0, 900}}, 1, 0, 1, 250},
        {{{Winner::P2, 0, 120, 900}}, 0, 1, 1, -120},
        {{{Winner::Draw, 180, 180, 3600}}, 0, 0, 1, 0},
        {{ko1, ko2}, 1, 1, 2, 0},
        {{{Winner::P1, 250, 100, 3600}}, 1, 0, 1, 150},
        {[&] {
             auto v = rep({{Winner::P1, 300, 100, 3600}}, 63);
             auto w = rep({{Winner::P2, 100, 300, 3600}}, 27);
             v.insert(v.end(), w.begin(), w.end());
             return v;
         }(),
         63, 27, 90, 7200},
        {{{Winner::Draw, 0, 0, 700}}, 0, 0, 1, 0},
        {{{Winner::P1, 10, 0, 1}, {Winner::P1, 20, 0, 1}, {Winner::P1, 30, 0, 1}}, 3, 0, 3, 60},
        {{{Winner::P2, 0, 10, 5}, {Winner::P1, 5, 0, 5}, {Winner::Draw, 7, 7, 3600}, {Winner::P1, 1, 0, 5}}, 2, 1, 4, -4},
        {{{Winner::P1, 400, 399, 3600}}, 1, 0, 1, 1},
        {{{Winner::P2, 399, 400, 3600}}, 0, 1, 1, -1},
        {{{Winner::P1, 120, 0, 900}, {Winner::P2, 0, 40, 1200}, {Winner::P1, 10, 0, 3000}}, 2, 1, 3, 90},
        {rep({{Winner::Draw, 400, 400, 3600}}, 10), 0, 0, 10, 0},
        {[&] {
             auto v = rep({{Winner::P1, 300, 0, 800}}, 3);
             v.push_back({Winner::P2, 0, 300, 800});
             return v;
         }(),
         3, 1, 4, 600},
        {rep({{Winner::P1, 1, 0, 10}, {Winner::P2, 0, 1, 10}}, 5), 5, 5, 10, 0},
        {{{Winner::P1, 200, 50, 3600}, {Winner::P1, 150, 100, 3600}, {Winner::P2, 30, 60, 3600}}, 2, 1, 3, 170},
        {{{Winner::P2, 0, 250, 400}, {Winner::P2, 0, 150, 400}}, 0, 2, 2, -400},
        {[&] {
             auto v = rep({ko1}, 9);
             v.push_back({Winner::Draw, 200, 200, 3600});
             return v;
         }(),
         9, 0, 10, 3600},
        {{{Winner::P1, 50, 0, 9}, {Winner::P2, 0, 75, 9}, {Winner::P2, 0, 100, 9}, {Winner::P1, 25, 0, 9},
          {Winner::Draw, 0, 0, 9}},
         2, 2, 5, -100},
        {rep({ko1, ko2, {Winner::Draw, 100, 100, 3600}}, 30), 30, 30, 90, 0},
    };
    c(logs.size() == 20, "expected 20 hand-crafted logs");
    for (std::size_t k = 0; k < logs.size(); ++k) {
        const Hand& h = logs[k];
        MatchLog log;
        log.rounds = h.rounds;
        c(static_cast<int>(log.rounds.size()) == h.total, fmt("log %zu: round count", k));
        const double n = h.total;
        c(win_ratio(log, Side::P1) == h.p1_wins / n, fmt("log %zu: P1 win_ratio", k));
        c(win_ratio(log, Side::P2) == h.p2_wins / n, fmt("log %zu: P2 win_ratio", k));
        c(avg_hp_diff(log, Side::P1) == h.hp_diff_sum / n, fmt("log %zu: P1 avg_hp_diff", k));
        c(avg_hp_diff(log, Side::P2) == -h.hp_diff_sum / n, fmt("log %zu: P2 avg_hp_diff", k));
    }
    {
        MatchLog log;
        log.rounds = logs[5].rounds;
        c(fmt("%.2f", win_ratio(log, Side::P1)) == "0.70", "63/90 does not print as 0.70");
    }

    SplitMix64 rng(1000);
    for (int trial = 0; trial < 1000; ++trial) {
        MatchLog log;
        const std::uint32_t rounds = 1 + rng.below(90);
        for (std::uint32_t r = 0; r < rounds; ++r) {
            const bool ko = rng.chance(40);
            int hp1 = static_cast<int>(rng.below(kMaxHp + 1)), hp2 = static_cast<int>(rng.below(kMaxHp + 1));
            if (ko) (rng.chance(50) ? hp1 : hp2) = 0;
            log.rounds.push_back({decide_winner(hp1, hp2, !ko), hp1, hp2, ko ? 1 + static_cast<int>(rng.below(3599)) : 3600});
        }
        c(avg_hp_diff(log, Side::P1) == -avg_hp_diff(log, Side::P2), fmt("random log %d: antisymmetry", trial));
        const double sum = win_ratio(log, Side::P1) + win_ratio(log, Side::P2) + draw_ratio(log);
        c(std::fabs(sum - 1.0) < 1e-12, fmt("random log %d: win+loss+draw = %.17g", trial, sum));
    }
    return finish(c, "20 hand-crafted logs, 1000 random logs");
}

// 8. Wire format and session conformance.
Outcome protocol() {
    using namespace abgm::proto;
    Checker c;
    const Message su = StateUpdate{FrameState{0, {400, 0, 100}, {400, 0, 700}}};
    const std::vector<std::uint8_t> golden{0x10, 0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00, 0x00, 0x90, 0x01,
                                           0x00, 0x00, 0x64, 0x00, 0x90, 0x01, 0x00, 0x00, 0xBC, 0x02};
    c(encode(su) == golden, "StateUpdate golden bytes");
    c(decode(golden).message == su && decode(golden).consumed == 21, "StateUpdate golden decode");
    const std::vector<std::uint8_t> ctrl{0x01, 0x00, 0x00, 0x00, 0x03, 0x01};
    c(encode(Control{}) == ctrl && decode(ctrl).message == Message{Control{}}, "Control golden bytes");
    const std::vector<std::uint8_t> err{0x05, 0x00, 0x00, 0x00, 0x04, 0x02, 0x00, 'b', 'a', 'd'};
    c(encode(ErrorMessage{ErrorCode::FieldRange, "bad"}) == err, "Error golden bytes");
    AudioMessage am;
    am.frame.frame_index = 17;
    for (std::size_t t = 0; t < kFrameSamples; ++t) {
        am.frame.left[t] = static_cast<float>(t) / 1024.0f;
        am.frame.right[t] = -static_cast<float>(t) / 2048.0f;
    }
    const auto am_bytes = encode(am);
    c(am_bytes.size() == 6409 && am_bytes[0] == 0x04 && am_bytes[1] == 0x19 && am_bytes[4] == 0x02, "AudioFrame header");
    c(decode(am_bytes).message == Message{am}, "AudioFrame round trip");

    auto code_of = [](const std::vector<std::uint8_t>& bytes) -> int {
        try {
            decode(bytes);
        } catch (const ProtocolError& e) {
            return static_cast<int>(e.code());
        }
        return 0;
    };
    c(code_of({0x00, 0x00, 0x00, 0x00, 0x01}) == static_cast<int>(ErrorCode::MalformedFrame), "zero-length StateUpdate");
    auto bad_hp = encode(StateUpdate{FrameState{0, {400, 0, 100}, {400, 0, 700}}});
    bad_hp[9] = 0x91; // hp1 = 401
    c(code_of(bad_hp) == static_cast<int>(ErrorCode::FieldRange), "hp1 = 401");
    auto bad_tag = golden;
    bad_tag[4] = 0x7F;
    c(code_of(bad_tag) == static_cast<int>(ErrorCode::MalformedFrame), "unknown tag");
    c(code_of(std::vector<std::uint8_t>(golden.begin(), golden.end() - 3)) == static_cast<int>(ErrorCode::Truncated),
      "truncated payload");

    const MatchLog log = simulate_match(PolicyId::Turtle, PolicyId::Turtle, 1, 9);
    std::vector<std::uint8_t> input;
    for (const FrameState& s : log.states[0]) {
        const auto b = encode(StateUpdate{s});
        input.insert(input.end(), b.begin(), b.end());
    }
    MemoryTransport t(input);
    Engine engine(synth_stems());
    const SessionStats stats = serve_session(t, engine);
    const auto replies = t.output_messages();
    c(stats.end == SessionEnd::ClientClosed && stats.frames_served == 3600, "3600-frame session did not complete");
    c(replies.size() == 3600, fmt("%zu replies for 3600 frames", replies.size()));
    for (std::size_t k = 0; k < replies.size(); ++k) {
        const auto* a = std::get_if<AudioMessage>(&replies[k]);
        c(a && a->frame.frame_index == static_cast<int>(k), fmt("reply %zu out of order", k));
    }

    std::vector<std::uint8_t> skip;
    for (int f : {0, 1, 3}) {
        const auto b = encode(StateUpdate{FrameState{f, {400, 0, 200}, {400, 0, 600}}});
        skip.insert(skip.end(), b.begin(), b.end());
    }
    MemoryTransport ts(skip);
    Engine e2(synth_stems());
    serve_session(ts, e2);
    const auto out = ts.output_messages();
    c(out.size() == 3 && std::holds_alternative<ErrorMessage>(out[2]) &&
          std::get<ErrorMessage>(out[2]).code == ErrorCode::Sequencing,
      "skipped frame not reported as Sequencing");
    return finish(c, "golden vectors, 3600-frame session, 5 error cases");
}

// 9. Per-frame cost of rules + mix + FFT features.
Outcome realtime_budget() {
    Checker c;
    const MatchLog log = simulate_match(PolicyId::Rusher, PolicyId::RandomWalker, 4, 42);
    std::vector<FrameState> states;
    for (const auto& round : log.states) states.insert(states.end(), round.begin(), round.end());
    states.resize(std::min<std::size_t>(states.size(), kRoundFrames));
    while (states.size() < static_cast<std::size_t>(kRoundFrames)) states.push_back(states.back());
    Mixer mixer(synth_stems());
    const AdaptationRules& rules = default_rules();
    double sink = 0.0;
    const auto t0 = clock_type::now();
    for (const FrameState& s : states) {
        mixer.set_plan(rules.plan_for_frame(s));
        const FeatureVector fv = fft_magnitude(mixer.render_frame(s.frame_index));
        sink += fv.values[0][19];
    }
    const double ms = seconds_since(t0) * 1000.0 / static_cast<double>(states.size());
    c(sink > 0.0, "no signal rendered");
    c(ms < 1000.0 / 60.0, fmt("mean %.3f ms per frame", ms));
    return finish(c, fmt("mean %.4f ms per frame over %zu frames (budget 16.67 ms)", ms, states.size()));
}

// 10. Two evaluate runs give byte-identical outputs.
Outcome determinism(const std::string& cli) {
    Checker c;
    if (cli.empty()) return {false, "no CLI path given"};
    const fs::path base = fs::temp_directory_path() / ("abgm_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(base);
    std::array<fs::path, 2> dirs{base / "a", base / "b"};
    for (const fs::path& d : dirs) {
        fs::create_directories(d);
        const std::string cmd = "\"" + cli + "\" evaluate --rounds 3 --seed 42 --encoder mel --out \"" + d.string() +
                                "\" > \"" + (d / "stdout.txt").string() + "\" 2>&1";
        const int rc = std::system(cmd.c_str());
        c(rc == 0, fmt("evaluate exited with status %d", rc));
    }
    std::size_t bytes = 0;
    for (const char* name : {"bgm.wav", "features.csv", "decode_report.csv", "decode_report_static.csv", "match.log"}) {
        const fs::path a = dirs[0] / name, b = dirs[1] / name;
        if (!c(fs::exists(a) && fs::exists(b), std::string(name) + " missing")) continue;
        const auto x = read_file_bytes(a.string()), y = read_file_bytes(b.string());
        c(!x.empty() && x == y, std::string(name) + " differs between runs");
        bytes += x.size();
    }
    fs::remove_all(base);
    return finish(c, fmt("5 files, %zu bytes identical", bytes));
}

} // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"rule-table exactness", rule_tables},
        {"monotone consistency", monotonicity},
        {"DSP correctness", dsp},
        {"mixer laws", mixer_laws},
        {"information channel", information_channel},
        {"exhaustive plan round-trip", plan_round_trip},
        {"metrics", metrics},
        {"protocol conformance", protocol},
        {"real-time budget", realtime_budget},
        {"determinism", [&] { return determinism(cli); }},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("[%s] criterion %zu: %s (%s)\n", o.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
    return failed == 0 ? 0 : 1;
}
