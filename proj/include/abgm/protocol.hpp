#pragma once

// Length-prefixed binary messages between a game client and the BGM engine.
//
//   offset 0  u32  payload length (little-endian, <= 16 MiB)
//   offset 4  u8   type tag
//   offset 5  ...  payload
//
// Payloads (all little-endian):
//   StateUpdate (1)  u32 frame_index, u16 hp1 ep1 x1 hp2 ep2 x2      16 bytes
//   AudioFrame  (2)  u32 frame_index, 1600 x f32 interleaved L/R      6404 bytes
//   Control     (3)  u8 code (1 = reset)                              1 byte
//   Error       (4)  u16 code, UTF-8 text                             >= 2 bytes

#include "abgm/error.hpp"
#include "abgm/game_core.hpp"
#include "abgm/mixer.hpp"

#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace abgm::proto {

inline constexpr std::size_t kHeaderSize = 5;
inline constexpr std::uint32_t kMaxPayload = 16u * 1024u * 1024u;
inline constexpr std::size_t kStatePayload = 4 + 6 * 2;
inline constexpr std::size_t kAudioPayload = 4 + 2 * kFrameSamples * 4;

enum class MessageType : std::uint8_t { StateUpdate = 1, AudioFrame = 2, Control = 3, Error = 4 };

enum class ErrorCode : std::uint16_t {
    MalformedFrame = 1,
    FieldRange = 2,
    Truncated = 3,
    Sequencing = 4,
    Engine = 5,
    Unexpected = 6,
};

inline const char* to_string(ErrorCode c) noexcept {
    switch (c) {
    case ErrorCode::MalformedFrame: return "MalformedFrame";
    case ErrorCode::FieldRange: return "FieldRange";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::Sequencing: return "Sequencing";
    case ErrorCode::Engine: return "Engine";
    case ErrorCode::Unexpected: return "Unexpected";
    }
    return "Unknown";
}

class ProtocolError : public Error {
public:
    ProtocolError(ErrorCode code, const std::string& what)
        : Error(std::string("protocol error ") + to_string(code) + ": " + what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

enum class ControlCode : std::uint8_t { Reset = 1 };

struct StateUpdate {
    FrameState state;
    friend bool operator==(const StateUpdate&, const StateUpdate&) = default;
};

struct AudioMessage {
    AudioFrame frame;
    friend bool operator==(const AudioMessage&, const AudioMessage&) = default;
};

struct Control {
    ControlCode code = ControlCode::Reset;
    friend bool operator==(const Control&, const Control&) = default;
};

struct ErrorMessage {
    ErrorCode code = ErrorCode::MalformedFrame;
    std::string text;
    friend bool operator==(const ErrorMessage&, const ErrorMessage&) = default;
};

using Message = std::variant<StateUpdate, AudioMessage, Control, ErrorMessage>;

namespace detail {

class Writer {
public:
    void u8(std::uint8_t v) { bytes.push_back(v); }
    void u16(std::uint16_t v) {
        u8(static_cast<std::uint8_t>(v));
        u8(static_cast<std::uint8_t>(v >> 8));
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    std::vector<std::uint8_t> bytes;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}
    std::uint8_t u8() { return b_[pos_++]; }
    std::uint16_t u16() {
        const auto lo = u8();
        return static_cast<std::uint16_t>(lo | (u8() << 8));
    }
    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
        return v;
    }
    float f32() { return std::bit_cast<float>(u32()); }
    std::span<const std::uint8_t> rest() const { return b_.subspan(pos_); }

private:
    std::span<const std::uint8_t> b_;
    std::size_t pos_ = 0;
};

inline std::uint16_t narrow_field(int v, const char* name) {
    if (v < 0 || v > 0xFFFF) throw ProtocolError(ErrorCode::FieldRange, std::string(name) + " out of range");
    return static_cast<std::uint16_t>(v);
}

} // namespace detail

inline MessageType type_of(const Message& m) noexcept {
    return static_cast<MessageType>(m.index() + 1);
}

inline std::vector<std::uint8_t> encode_payload(const Message& m) {
    detail::Writer w;
    if (const auto* s = std::get_if<StateUpdate>(&m)) {
        const FrameState& st = s->state;
        w.u32(static_cast<std::uint32_t>(st.frame_index));
        for (int v : {st.p1.hp, st.p1.ep, st.p1.x, st.p2.hp, st.p2.ep, st.p2.x}) w.u16(detail::narrow_field(v, "state field"));
    } else if (const auto* a = std::get_if<AudioMessage>(&m)) {
        w.u32(static_cast<std::uint32_t>(a->frame.frame_index));
        for (std::size_t t = 0; t < kFrameSamples; ++t) {
            w.f32(a->frame.left[t]);
            w.f32(a->frame.right[t]);
        }
    } else if (const auto* c = std::get_if<Control>(&m)) {
        w.u8(static_cast<std::uint8_t>(c->code));
    } else if (const auto* e = std::get_if<ErrorMessage>(&m)) {
        w.u16(static_cast<std::uint16_t>(e->code));
        w.bytes.insert(w.bytes.end(), e->text.begin(), e->text.end());
    }
    return std::move(w.bytes);
}

inline std::vector<std::uint8_t> encode(const Message& m) {
    const std::vector<std::uint8_t> payload = encode_payload(m);
    detail::Writer w;
    w.u32(static_cast<std::uint32_t>(payload.size()));
    w.u8(static_cast<std::uint8_t>(type_of(m)));
    w.bytes.insert(w.bytes.end(), payload.begin(), payload.end());
    return std::move(w.bytes);
}

struct Header {
    std::uint32_t length = 0;
    std::uint8_t tag = 0;
};

// Validates the length/tag combination before any payload is read.
inline Header parse_header(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kHeaderSize) throw ProtocolError(ErrorCode::Truncated, "incomplete header");
    detail::Reader r(bytes);
    Header h{r.u32(), r.u8()};
    if (h.length > kMaxPayload) throw ProtocolError(ErrorCode::MalformedFrame, "payload exceeds 16 MiB");
    auto expect = [&](bool ok, const char* what) {
        if (!ok) {
            throw ProtocolError(ErrorCode::MalformedFrame,
                                std::string(what) + " payload has length " + std::to_string(h.length));
        }
    };
    switch (static_cast<MessageType>(h.tag)) {
    case MessageType::StateUpdate: expect(h.length == kStatePayload, "StateUpdate"); break;
    case MessageType::AudioFrame: expect(h.length == kAudioPayload, "AudioFrame"); break;
    case MessageType::Control: expect(h.length == 1, "Control"); break;
    case MessageType::Error: expect(h.length >= 2, "Error"); break;
    default: throw ProtocolError(ErrorCode::MalformedFrame, "unknown type tag " + std::to_string(h.tag));
    }
    return h;
}

inline Message decode_payload(MessageType type, std::span<const std::uint8_t> payload) {
    detail::Reader r(payload);
    switch (type) {
    case MessageType::StateUpdate: {
        FrameState s;
        const std::uint32_t frame = r.u32();
        if (frame >= static_cast<std::uint32_t>(kRoundFrames)) {
            throw ProtocolError(ErrorCode::FieldRange, "frame_index >= " + std::to_string(kRoundFrames));
        }
        s.frame_index = static_cast<int>(frame);
        s.p1 = {r.u16(), r.u16(), r.u16()};
        s.p2 = {r.u16(), r.u16(), r.u16()};
        if (s.p1.hp > kMaxHp || s.p2.hp > kMaxHp) throw ProtocolError(ErrorCode::FieldRange, "hp > 400");
        if (s.p1.ep > kMaxEp || s.p2.ep > kMaxEp) throw ProtocolError(ErrorCode::FieldRange, "ep > 300");
        if (s.p1.x > kStageWidth || s.p2.x > kStageWidth) throw ProtocolError(ErrorCode::FieldRange, "x > 800");
        return StateUpdate{s};
    }
    case MessageType::AudioFrame: {
        AudioMessage a;
        a.frame.frame_index = static_cast<int>(r.u32());
        for (std::size_t t = 0; t < kFrameSamples; ++t) {
            a.frame.left[t] = r.f32();
            a.frame.right[t] = r.f32();
        }
        return a;
    }
    case MessageType::Control: {
        const std::uint8_t code = r.u8();
        if (code != static_cast<std::uint8_t>(ControlCode::Reset)) {
            throw ProtocolError(ErrorCode::MalformedFrame, "unknown control code " + std::to_string(code));
        }
        return Control{ControlCode::Reset};
    }
    case MessageType::Error: {
        ErrorMessage e;
        e.code = static_cast<ErrorCode>(r.u16());
        const auto text = r.rest();
        e.text.assign(text.begin(), text.end());
        return e;
    }
    }
    throw ProtocolError(ErrorCode::MalformedFrame, "unknown type tag");
}

struct Decoded {
    Message message;
    std::size_t consumed = 0;
};

// Decodes the first message in `bytes`.
inline Decoded decode(std::span<const std::uint8_t> bytes) {
    const Header h = parse_header(bytes);
    if (bytes.size() - kHeaderSize < h.length) {
        throw ProtocolError(ErrorCode::Truncated, "payload has " + std::to_string(bytes.size() - kHeaderSize) +
                                                      " of " + std::to_string(h.length) + " bytes");
    }
    return {decode_payload(static_cast<MessageType>(h.tag), bytes.subspan(kHeaderSize, h.length)),
            kHeaderSize + h.length};
}

} // namespace abgm::proto
