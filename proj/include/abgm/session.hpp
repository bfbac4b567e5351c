#pragma once

// Request/response session over a reliable byte stream: each StateUpdate is
// answered with exactly one AudioFrame for the same frame index.

#include "abgm/error.hpp"
#include "abgm/mixer.hpp"
#include "abgm/protocol.hpp"
#include "abgm/rules.hpp"

#include <algorithm>
#include <array>
#include <cerrno>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

namespace abgm {

class TransportError : public Error {
public:
    using Error::Error;
};

class Transport {
public:
    virtual ~Transport() = default;
    // Reads up to buf.size() bytes; returns 0 only at end of stream.
    virtual std::size_t read_some(std::span<std::uint8_t> buf) = 0;
    virtual void write_all(std::span<const std::uint8_t> bytes) = 0;
};

// Fills `buf` completely. Returns false on a clean end of stream before the
// first byte; throws Truncated when the stream ends part-way.
inline bool read_exact(Transport& t, std::span<std::uint8_t> buf) {
    std::size_t got = 0;
    while (got < buf.size()) {
        const std::size_t n = t.read_some(buf.subspan(got));
        if (n == 0) {
            if (got == 0) return false;
            throw proto::ProtocolError(proto::ErrorCode::Truncated, "stream ended inside a message");
        }
        got += n;
    }
    return true;
}

inline std::optional<proto::Message> read_message(Transport& t) {
    std::array<std::uint8_t, proto::kHeaderSize> header{};
    if (!read_exact(t, header)) return std::nullopt;
    const proto::Header h = proto::parse_header(header);
    std::vector<std::uint8_t> payload(h.length);
    if (h.length > 0 && !read_exact(t, payload)) {
        throw proto::ProtocolError(proto::ErrorCode::Truncated, "stream ended before payload");
    }
    return proto::decode_payload(static_cast<proto::MessageType>(h.tag), payload);
}

inline void write_message(Transport& t, const proto::Message& m) { t.write_all(proto::encode(m)); }

// In-memory pipe: reads drain `input`, writes append to `output`.
class MemoryTransport final : public Transport {
public:
    MemoryTransport() = default;
    explicit MemoryTransport(std::vector<std::uint8_t> input) : input_(std::move(input)) {}

    void push_input(std::span<const std::uint8_t> bytes) { input_.insert(input_.end(), bytes.begin(), bytes.end()); }

    std::size_t read_some(std::span<std::uint8_t> buf) override {
        const std::size_t n = std::min(buf.size(), input_.size() - read_pos_);
        std::copy_n(input_.begin() + static_cast<std::ptrdiff_t>(read_pos_), n, buf.begin());
        read_pos_ += n;
        return n;
    }

    void write_all(std::span<const std::uint8_t> bytes) override {
        output_.insert(output_.end(), bytes.begin(), bytes.end());
    }

    const std::vector<std::uint8_t>& output() const noexcept { return output_; }

    std::vector<proto::Message> output_messages() const {
        std::vector<proto::Message> out;
        std::span<const std::uint8_t> rest(output_);
        while (!rest.empty()) {
            auto d = proto::decode(rest);
            out.push_back(std::move(d.message));
            rest = rest.subspan(d.consumed);
        }
        return out;
    }

private:
    std::vector<std::uint8_t> input_;
    std::size_t read_pos_ = 0;
    std::vector<std::uint8_t> output_;
};

// Owns a connected stream socket.
class SocketTransport final : public Transport {
public:
    explicit SocketTransport(int fd) noexcept : fd_(fd) {}
    SocketTransport(const SocketTransport&) = delete;
    SocketTransport& operator=(const SocketTransport&) = delete;
    SocketTransport(SocketTransport&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
    ~SocketTransport() override {
        if (fd_ >= 0) ::close(fd_);
    }

    std::size_t read_some(std::span<std::uint8_t> buf) override {
        for (;;) {
            const ssize_t n = ::recv(fd_, buf.data(), buf.size(), 0);
            if (n >= 0) return static_cast<std::size_t>(n);
            if (errno != EINTR) throw TransportError(std::string("recv: ") + std::strerror(errno));
        }
    }

    void write_all(std::span<const std::uint8_t> bytes) override {
        std::size_t sent = 0;
        while (sent < bytes.size()) {
            const ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw TransportError(std::string("send: ") + std::strerror(errno));
            }
            sent += static_cast<std::size_t>(n);
        }
    }

    void shutdown_write() noexcept { ::shutdown(fd_, SHUT_WR); }
    int fd() const noexcept { return fd_; }

private:
    int fd_;
};

inline SocketTransport connect_tcp(const std::string& host, std::uint16_t port) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw TransportError(std::string("socket: ") + std::strerror(errno));
    SocketTransport t(fd);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) throw TransportError("bad IPv4 address " + host);
    if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
        throw TransportError(std::string("connect: ") + std::strerror(errno));
    }
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return t;
}

class TcpListener {
public:
    // port 0 picks an ephemeral port; see port().
    explicit TcpListener(std::uint16_t port, const std::string& host = "127.0.0.1") {
        fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd_ < 0) throw TransportError(std::string("socket: ") + std::strerror(errno));
        const int one = 1;
        ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(port);
        if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
            ::close(fd_);
            throw TransportError("bad IPv4 address " + host);
        }
        if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd_, 8) != 0) {
            const std::string why = std::strerror(errno);
            ::close(fd_);
            throw TransportError("bind/listen on port " + std::to_string(port) + ": " + why);
        }
        socklen_t len = sizeof addr;
        ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
        port_ = ntohs(addr.sin_port);
    }
    TcpListener(const TcpListener&) = delete;
    TcpListener& operator=(const TcpListener&) = delete;
    ~TcpListener() {
        if (fd_ >= 0) ::close(fd_);
    }

    std::uint16_t port() const noexcept { return port_; }

    SocketTransport accept() {
        for (;;) {
            const int c = ::accept(fd_, nullptr, nullptr);
            if (c >= 0) {
                const int one = 1;
                ::setsockopt(c, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
                return SocketTransport(c);
            }
            if (errno != EINTR) throw TransportError(std::string("accept: ") + std::strerror(errno));
        }
    }

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

// Rules + mixer for one session.
class Engine {
public:
    Engine(StemSet stems, AdaptationRules rules = {}, MixerConfig config = {})
        : rules_(std::move(rules)), mixer_(std::move(stems), config) {}

    AudioFrame on_state(const FrameState& s) {
        mixer_.set_plan(rules_.plan_for_frame(s));
        return mixer_.render_frame(s.frame_index);
    }

    void reset() noexcept { mixer_.reset(); }

    const Mixer& mixer() const noexcept { return mixer_; }

private:
    AdaptationRules rules_;
    Mixer mixer_;
};

enum class SessionEnd { ClientClosed, ProtocolError, TransportError };

struct SessionStats {
    std::size_t frames_served = 0;
    SessionEnd end = SessionEnd::ClientClosed;
    std::string detail;
};

// Serves until the client closes the stream or a protocol error occurs. After
// the first StateUpdate (or a reset) each frame index must be the previous
// one plus 1, or 0 to start a new round.
inline SessionStats serve_session(Transport& transport, Engine& engine) {
    SessionStats stats;
    int last_frame = -1; // -1 until the first StateUpdate
    auto fail = [&](proto::ErrorCode code, const std::string& text) {
        stats.end = SessionEnd::ProtocolError;
        stats.detail = text;
        try {
            write_message(transport, proto::ErrorMessage{code, text});
        } catch (const TransportError&) {
        }
    };
    try {
        for (;;) {
            std::optional<proto::Message> msg;
            try {
                msg = read_message(transport);
            } catch (const proto::ProtocolError& e) {
                fail(e.code(), e.what());
                return stats;
            }
            if (!msg) return stats;

            if (const auto* su = std::get_if<proto::StateUpdate>(&*msg)) {
                const int f = su->state.frame_index;
                if (last_frame >= 0 && f != last_frame + 1 && f != 0) {
                    fail(proto::ErrorCode::Sequencing,
                         "frame " + std::to_string(f) + " after frame " + std::to_string(last_frame));
                    return stats;
                }
                last_frame = f;
                AudioFrame audio;
                try {
                    audio = engine.on_state(su->state);
                } catch (const Error& e) {
                    fail(proto::ErrorCode::Engine, e.what());
                    return stats;
                }
                write_message(transport, proto::AudioMessage{audio});
                ++stats.frames_served;
            } else if (std::holds_alternative<proto::Control>(*msg)) {
                engine.reset();
                last_frame = -1;
            } else {
                fail(proto::ErrorCode::Unexpected, "client may only send StateUpdate or Control");
                return stats;
            }
        }
    } catch (const TransportError& e) {
        stats.end = SessionEnd::TransportError;
        stats.detail = e.what();
    }
    return stats;
}

} // namespace abgm
