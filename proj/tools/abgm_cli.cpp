// abgm: synthesize stems, simulate matches, render adaptive/static BGM, run
// the decodability experiment, print match metrics, and serve the engine over
// TCP.

#include "abgm/decoder.hpp"
#include "abgm/match_log.hpp"
#include "abgm/metrics.hpp"
#include "abgm/pipeline.hpp"
#include "abgm/session.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace abgm;

namespace {

// Bad flag values that CLI11's validators cannot express.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    int rounds = kDefaultRounds;
    std::uint64_t seed = 42;
    std::string bgm = "adaptive";
    std::string policies = "Rusher,RandomWalker";
    std::string out = ".";
    std::string encoder;
    int bits = 16;
    std::string stems_dir;
    std::string rules_file;
    std::string log_file;
    std::string host = "127.0.0.1";
    int port = 7777;
    int max_sessions = 0;
    int stem_frames = kDefaultStemFrames;
    std::uint64_t stem_seed = 1;
    int stem_bits = 32;
};

std::pair<PolicyId, PolicyId> parse_policies(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw UsageError("--policies expects A,B");
    try {
        return {parse_policy(s.substr(0, comma)), parse_policy(s.substr(comma + 1))};
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
}

BgmMode parse_mode(const std::string& s) { return s == "static" ? BgmMode::Static : BgmMode::Adaptive; }

SampleFormat wav_format(int bits) { return bits == 32 ? SampleFormat::Float32 : SampleFormat::Pcm16; }

StemSet load_stems(const Options& o) {
    if (o.stems_dir.empty()) return synth_stems();
    StemSet set;
    for (InstrumentId i : kInstruments) set[index_of(i)] = load_wav((fs::path(o.stems_dir) / stem_filename(i)).string(), i);
    return set;
}

AdaptationRules load_rules_opt(const Options& o) {
    return o.rules_file.empty() ? default_rules() : load_rules(o.rules_file);
}

fs::path out_path(const Options& o, const char* name) {
    fs::create_directories(o.out);
    return fs::path(o.out) / name;
}

// Streams a large text file to NAME.tmp and renames it into place on commit.
class AtomicTextFile {
public:
    explicit AtomicTextFile(fs::path path) : path_(std::move(path)), tmp_(path_.string() + ".tmp") {
        os_.open(tmp_, std::ios::binary | std::ios::trunc);
        if (!os_) throw FormatError("cannot write " + tmp_.string());
    }
    void write(const std::string& s) { os_ << s; }
    void commit() {
        os_.close();
        if (!os_) throw FormatError("write failed for " + tmp_.string());
        fs::rename(tmp_, path_);
    }

private:
    fs::path path_;
    fs::path tmp_;
    std::ofstream os_;
};

MatchLog simulate(const Options& o) {
    const auto [p1, p2] = parse_policies(o.policies);
    return simulate_match(p1, p2, o.rounds, o.seed);
}

void write_log(const Options& o, const MatchLog& log) {
    write_file_atomic(out_path(o, "match.log").string(), to_text(log));
}

std::string metrics_table(const MatchLog& log) {
    const std::vector<SummaryRow> rows{{"P1", summarize(log, Side::P1)}, {"P2", summarize(log, Side::P2)}};
    return format_summary_table(rows);
}

int cmd_synth(const Options& o) {
    for (InstrumentId i : kInstruments) {
        const Stem s = synth_stem(i, o.stem_frames, o.stem_seed);
        const fs::path p = out_path(o, stem_filename(i).c_str());
        save_wav(s, p.string(), wav_format(o.stem_bits));
        std::printf("%s  %.0f Hz  %zu frames\n", p.string().c_str(), s.signature_hz, s.frames());
    }
    return 0;
}

int cmd_simulate(const Options& o) {
    const MatchLog log = simulate(o);
    write_log(o, log);
    for (std::size_t r = 0; r < log.rounds.size(); ++r) {
        const RoundResult& res = log.rounds[r];
        std::printf("round %zu: %s  hp %d-%d  %d frames\n", r, std::string(to_string(res.winner)).c_str(),
                    res.end_hp_p1, res.end_hp_p2, res.frames_elapsed);
    }
    return 0;
}

int cmd_render(const Options& o) {
    const MatchLog log = simulate(o);
    const AdaptationRules rules = load_rules_opt(o);
    Mixer mixer(load_stems(o));
    std::optional<AtomicTextFile> features;
    std::optional<FeatureKind> kind;
    if (!o.encoder.empty()) {
        kind = parse_feature_kind(o.encoder);
        features.emplace(out_path(o, "features.csv"));
        features->write(features_csv_header(*kind));
    }
    std::vector<AudioFrame> audio;
    std::string chunk;
    render_log(log, rules, mixer, parse_mode(o.bgm), [&](const FrameState&, const AudioFrame& a) {
        audio.push_back(a);
        if (features) {
            chunk.clear();
            append_features_csv(chunk, extract(*kind, a));
            features->write(chunk);
        }
    });
    write_log(o, log);
    write_wav(out_path(o, "bgm.wav").string(), to_wav(audio, wav_format(o.bits)));
    if (features) features->commit();
    std::printf("rendered %zu frames (%zu sample pairs) in %s mode\n", audio.size(), audio.size() * kFrameSamples,
                o.bgm.c_str());
    return 0;
}

int cmd_evaluate(const Options& o) {
    const MatchLog log = simulate(o);
    const AdaptationRules rules = load_rules_opt(o);
    const StemSet stems = load_stems(o);
    std::optional<AtomicTextFile> features;
    std::optional<FeatureKind> kind;
    if (!o.encoder.empty()) {
        kind = parse_feature_kind(o.encoder);
        features.emplace(out_path(o, "features.csv"));
        features->write(features_csv_header(*kind));
    }
    std::vector<AudioFrame> adaptive_audio;
    std::string chunk;
    const DecodabilityResult r =
        run_decodability_experiment(log, stems, rules, {}, [&](BgmMode mode, const FrameState&, const AudioFrame& a) {
            if (mode != BgmMode::Adaptive) return;
            adaptive_audio.push_back(a);
            if (features) {
                chunk.clear();
                append_features_csv(chunk, extract(*kind, a));
                features->write(chunk);
            }
        });
    write_log(o, log);
    write_wav(out_path(o, "bgm.wav").string(), to_wav(adaptive_audio, wav_format(o.bits)));
    write_file_atomic(out_path(o, "decode_report.csv").string(), report_csv(r.adaptive));
    write_file_atomic(out_path(o, "decode_report_static.csv").string(), report_csv(r.static_control));
    if (features) features->commit();

    std::cout << format_comparison(r) << '\n' << metrics_table(log);
    const bool improved = r.adaptive.overall().accuracy() > r.static_control.overall().accuracy();
    if (!improved) std::cerr << "adaptive BGM did not beat the static control\n";
    return improved ? 0 : 3;
}

int cmd_metrics(const Options& o) {
    MatchLog log;
    if (o.log_file.empty()) {
        log = simulate(o);
    } else {
        std::ifstream in(o.log_file);
        if (!in) throw FormatError("cannot open " + o.log_file);
        log = read_match_log(in);
    }
    std::cout << metrics_table(log);
    std::printf("rounds %zu, draws %.2f\n", log.rounds.size(), draw_ratio(log));
    return 0;
}

int cmd_serve(const Options& o) {
    const StemSet stems = load_stems(o);
    const AdaptationRules rules = load_rules_opt(o);
    TcpListener listener(static_cast<std::uint16_t>(o.port), o.host);
    std::printf("listening on %s:%u\n", o.host.c_str(), listener.port());
    std::fflush(stdout);
    std::vector<std::thread> sessions;
    for (int n = 0; o.max_sessions == 0 || n < o.max_sessions; ++n) {
        SocketTransport conn = listener.accept();
        sessions.emplace_back([&stems, &rules, c = std::move(conn)]() mutable {
            Engine engine(stems, rules);
            const SessionStats s = serve_session(c, engine);
            std::fprintf(stderr, "session closed after %zu frames%s%s\n", s.frames_served,
                         s.detail.empty() ? "" : ": ", s.detail.c_str());
        });
    }
    for (auto& t : sessions) t.join();
    return 0;
}

int cmd_client(const Options& o) {
    const MatchLog log = simulate(o);
    SocketTransport conn = connect_tcp(o.host, static_cast<std::uint16_t>(o.port));
    using clock = std::chrono::steady_clock;
    double total_ms = 0.0, worst_ms = 0.0;
    std::size_t frames = 0;
    for (const auto& round : log.states) {
        for (const FrameState& s : round) {
            const auto t0 = clock::now();
            write_message(conn, proto::StateUpdate{s});
            const auto reply = read_message(conn);
            const double ms = std::chrono::duration<double, std::milli>(clock::now() - t0).count();
            if (!reply) throw TransportError("server closed the connection");
            if (const auto* e = std::get_if<proto::ErrorMessage>(&*reply)) {
                throw proto::ProtocolError(e->code, "server: " + e->text);
            }
            const auto* a = std::get_if<proto::AudioMessage>(&*reply);
            if (!a || a->frame.frame_index != s.frame_index) {
                throw SequencingError("reply does not match frame " + std::to_string(s.frame_index));
            }
            total_ms += ms;
            worst_ms = std::max(worst_ms, ms);
            ++frames;
        }
    }
    conn.shutdown_write();
    std::printf("frames %zu  mean round trip %.3f ms  max %.3f ms  (frame budget 16.67 ms)\n", frames,
                total_ms / static_cast<double>(frames), worst_ms);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive background music engine for a 2D fighting game"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App* c) {
        c->add_option("--rounds", o.rounds, "rounds to simulate")->check(CLI::Range(1, 100000));
        c->add_option("--seed", o.seed, "match seed");
        c->add_option("--policies", o.policies, "policy pair A,B (Rusher, Turtle, RandomWalker)");
        c->add_option("--rules", o.rules_file, "rule-table file");
        c->add_option("--stems", o.stems_dir, "directory with bach_{V,P,F,U,C}.wav");
    };
    auto outputs = [&](CLI::App* c) {
        c->add_option("--out", o.out, "output directory");
        c->add_option("--encoder", o.encoder, "also write features.csv")->check(CLI::IsMember({"raw", "fft", "mel"}));
        c->add_option("--bits", o.bits, "bgm.wav sample format")->check(CLI::IsMember({16, 32}));
    };

    CLI::App* synth = app.add_subcommand("synth", "write the five procedural stems");
    synth->add_option("--out", o.out, "output directory");
    synth->add_option("--seed", o.stem_seed, "stem phase seed");
    synth->add_option("--frames", o.stem_frames, "stem length in frames")->check(CLI::PositiveNumber);
    synth->add_option("--bits", o.stem_bits, "sample format")->check(CLI::IsMember({16, 32}));

    CLI::App* sim = app.add_subcommand("simulate", "simulate a match and write match.log");
    common(sim);
    sim->add_option("--out", o.out, "output directory");

    CLI::App* render = app.add_subcommand("render", "render one BGM arm to bgm.wav");
    common(render);
    outputs(render);
    render->add_option("--bgm", o.bgm, "adaptive or static")->check(CLI::IsMember({"adaptive", "static"}));

    CLI::App* eval = app.add_subcommand("evaluate", "compare decodability of adaptive and static BGM");
    common(eval);
    outputs(eval);
    eval->add_option("--bgm", o.bgm, "arm exported to bgm.wav (always adaptive)")
        ->check(CLI::IsMember({"adaptive", "static"}));

    CLI::App* metrics = app.add_subcommand("metrics", "win ratio and average HP difference");
    common(metrics);
    metrics->add_option("--log", o.log_file, "existing match.log (default: simulate)");

    CLI::App* serve = app.add_subcommand("serve", "serve the engine over TCP");
    serve->add_option("--port", o.port, "TCP port (0 = ephemeral)")->check(CLI::Range(0, 65535));
    serve->add_option("--host", o.host, "bind address");
    serve->add_option("--sessions", o.max_sessions, "exit after N sessions (0 = never)")->check(CLI::NonNegativeNumber);
    serve->add_option("--rules", o.rules_file, "rule-table file");
    serve->add_option("--stems", o.stems_dir, "stem directory");

    CLI::App* client = app.add_subcommand("client", "stream a simulated match to a server and time it");
    common(client);
    client->add_option("--port", o.port, "server port")->check(CLI::Range(1, 65535));
    client->add_option("--host", o.host, "server address");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*synth) return cmd_synth(o);
        if (*sim) return cmd_simulate(o);
        if (*render) return cmd_render(o);
        if (*eval) return cmd_evaluate(o);
        if (*metrics) return cmd_metrics(o);
        if (*serve) return cmd_serve(o);
        if (*client) return cmd_client(o);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
