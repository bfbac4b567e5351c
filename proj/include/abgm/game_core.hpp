#pragma once

// Fighter/match state types and a deterministic scripted-match simulator.
//
// A round is a sequence of 60 Hz frame snapshots. Frame 0 is the reset state
// (hp 400, ep 0, x 200 / 600). Each step resolves both fighters' actions from
// the previous snapshot, so neither side gets a first-mover advantage on hits.

#include "abgm/error.hpp"
#include "abgm/rng.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

namespace abgm {

inline constexpr int kMaxHp = 400;
inline constexpr int kMaxEp = 300;
inline constexpr int kStageWidth = 800;
inline constexpr int kFramesPerSecond = 60;
inline constexpr int kRoundFrames = 60 * kFramesPerSecond;
inline constexpr int kDefaultRounds = 3;

struct FighterState {
    int hp = kMaxHp;
    int ep = 0;
    int x = 0;

    friend constexpr bool operator==(const FighterState&, const FighterState&) = default;
};

struct FrameState {
    int frame_index = 0;
    FighterState p1;
    FighterState p2;

    constexpr int pd() const noexcept { return std::abs(p1.x - p2.x); }

    friend constexpr bool operator==(const FrameState&, const FrameState&) = default;
};

inline bool is_valid(const FighterState& f) noexcept {
    return f.hp >= 0 && f.hp <= kMaxHp && f.ep >= 0 && f.ep <= kMaxEp && f.x >= 0 &&
           f.x <= kStageWidth;
}

inline bool is_valid(const FrameState& s) noexcept {
    return s.frame_index >= 0 && s.frame_index < kRoundFrames && is_valid(s.p1) && is_valid(s.p2);
}

enum class Winner { P1, P2, Draw };
enum class Side { P1, P2 };

inline std::string_view to_string(Winner w) noexcept {
    switch (w) {
    case Winner::P1: return "P1";
    case Winner::P2: return "P2";
    case Winner::Draw: return "Draw";
    }
    return "?";
}

inline Winner parse_winner(std::string_view s) {
    if (s == "P1") return Winner::P1;
    if (s == "P2") return Winner::P2;
    if (s == "Draw") return Winner::Draw;
    throw FormatError("unknown winner '" + std::string(s) + "'");
}

struct RoundResult {
    Winner winner = Winner::Draw;
    int end_hp_p1 = kMaxHp;
    int end_hp_p2 = kMaxHp;
    int frames_elapsed = 0;

    friend constexpr bool operator==(const RoundResult&, const RoundResult&) = default;
};

// KO: the fighter left with non-zero HP wins (a double KO is a draw).
// Timeout: higher HP wins, equal HP is a draw.
constexpr Winner decide_winner(int end_hp_p1, int end_hp_p2, bool timed_out) noexcept {
    if (!timed_out) {
        if (end_hp_p2 == 0 && end_hp_p1 > 0) return Winner::P1;
        if (end_hp_p1 == 0 && end_hp_p2 > 0) return Winner::P2;
        return Winner::Draw;
    }
    if (end_hp_p1 > end_hp_p2) return Winner::P1;
    if (end_hp_p2 > end_hp_p1) return Winner::P2;
    return Winner::Draw;
}

struct MatchLog {
    std::vector<RoundResult> rounds;
    // One entry per round. May be empty for a results-only log.
    std::vector<std::vector<FrameState>> states;
};

struct RoundSimulation {
    RoundResult result;
    std::vector<FrameState> states;
};

enum class PolicyId { Rusher, Turtle, RandomWalker };

inline constexpr std::array kAllPolicies{PolicyId::Rusher, PolicyId::Turtle, PolicyId::RandomWalker};

inline std::string_view to_string(PolicyId p) noexcept {
    switch (p) {
    case PolicyId::Rusher: return "Rusher";
    case PolicyId::Turtle: return "Turtle";
    case PolicyId::RandomWalker: return "RandomWalker";
    }
    return "?";
}

inline PolicyId parse_policy(std::string_view name) {
    for (PolicyId p : kAllPolicies) {
        if (name == to_string(p)) return p;
    }
    throw ConfigError("unknown policy '" + std::string(name) + "'");
}

// Move set. Ranges are compared against the pre-step distance.
namespace moves {
inline constexpr int kLightDamage = 10;
inline constexpr int kLightRange = 60;
inline constexpr int kLightRecovery = 75; // frames before the next attack
inline constexpr int kLightKnockback = 40;

inline constexpr int kHeavyDamage = 30;
inline constexpr int kHeavyRange = 60;
inline constexpr int kHeavyCooldown = 30;
inline constexpr int kHeavyRecovery = 90;
inline constexpr int kHeavyKnockback = 80;

inline constexpr int kSpecialDamage = 60;
inline constexpr int kSpecialRange = 300;
inline constexpr int kSpecialCost = 50;
inline constexpr int kSpecialRecovery = 90;
inline constexpr int kSpecialKnockback = 120;

inline constexpr int kEpPerHitLanded = 10;
inline constexpr int kEpPerHitTaken = 5;

inline constexpr int kWalkSpeed = 4;
inline constexpr int kRetreatSpeed = 3;

inline constexpr int kStartX1 = 200;
inline constexpr int kStartX2 = 600;
} // namespace moves

enum class Action { Idle, Forward, Back, Light, Heavy, Special };

namespace detail {

struct Fighter {
    FighterState s;
    int recovery = 0;       // frames until any attack is allowed
    int heavy_cooldown = 0; // frames until the heavy hit is allowed

    bool ready() const noexcept { return recovery == 0; }
    bool can_heavy() const noexcept { return ready() && heavy_cooldown == 0; }
    bool can_special() const noexcept { return ready() && s.ep >= moves::kSpecialCost; }
};

// Rusher closes distance and trades hits, backing off while recovering.
// Turtle keeps out of special range and never attacks.
// RandomWalker drifts at random and attacks when the opponent is in reach.
inline Action decide(PolicyId policy, const Fighter& self, int pd, SplitMix64& rng) {
    using namespace moves;
    switch (policy) {
    case PolicyId::Rusher: {
        if (self.can_special() && pd <= kSpecialRange && rng.chance(3)) return Action::Special;
        if (pd <= kLightRange) {
            if (!self.ready()) return Action::Back;
            if (!rng.chance(80)) return Action::Idle;
            return self.can_heavy() && rng.chance(30) ? Action::Heavy : Action::Light;
        }
        if (pd > 80) return rng.chance(90) ? Action::Forward : Action::Idle;
        const std::uint32_t r = rng.below(100);
        if (r < 25) return Action::Forward;
        if (r < 45) return Action::Back;
        return Action::Idle;
    }
    case PolicyId::Turtle:
        return pd < kSpecialRange ? Action::Back : Action::Idle;
    case PolicyId::RandomWalker: {
        if (self.can_special() && pd <= kSpecialRange && rng.chance(3)) return Action::Special;
        if (pd <= kLightRange) {
            if (!self.ready()) return Action::Back;
            if (rng.chance(80)) return self.can_heavy() && rng.chance(30) ? Action::Heavy : Action::Light;
        }
        const std::uint32_t r = rng.below(100);
        if (r < 50) return Action::Forward;
        if (r < 75) return Action::Back;
        return Action::Idle;
    }
    }
    throw ConfigError("unknown policy id " + std::to_string(static_cast<int>(policy)));
}

struct Hit {
    int damage = 0;
    int knockback = 0;
};

// Starts the attack (spending EP and setting recovery). Returns the hit that
// lands given the pre-step distance, or a zero hit on a whiff.
inline Hit start_attack(Action a, Fighter& f, int pd) {
    using namespace moves;
    switch (a) {
    case Action::Light:
        if (!f.ready()) return {};
        f.recovery = kLightRecovery;
        return pd <= kLightRange ? Hit{kLightDamage, kLightKnockback} : Hit{};
    case Action::Heavy:
        if (!f.can_heavy()) return {};
        f.recovery = kHeavyRecovery;
        f.heavy_cooldown = kHeavyCooldown;
        return pd <= kHeavyRange ? Hit{kHeavyDamage, kHeavyKnockback} : Hit{};
    case Action::Special:
        if (!f.can_special()) return {};
        f.s.ep -= kSpecialCost;
        f.recovery = kSpecialRecovery;
        return pd <= kSpecialRange ? Hit{kSpecialDamage, kSpecialKnockback} : Hit{};
    default:
        return {};
    }
}

inline int clamp_x(int x) noexcept { return std::clamp(x, 0, kStageWidth); }

inline void move(Action a, Fighter& self, const Fighter& opp) {
    const int dir = opp.s.x >= self.s.x ? 1 : -1;
    const int pd = std::abs(opp.s.x - self.s.x);
    if (a == Action::Forward) {
        self.s.x = clamp_x(self.s.x + dir * std::min(moves::kWalkSpeed, pd));
    } else if (a == Action::Back) {
        self.s.x = clamp_x(self.s.x - dir * moves::kRetreatSpeed);
    }
}

inline void apply_hit(const Hit& hit, Fighter& attacker, Fighter& defender) {
    if (hit.damage == 0) return;
    defender.s.hp = std::max(0, defender.s.hp - hit.damage);
    attacker.s.ep = std::min(kMaxEp, attacker.s.ep + moves::kEpPerHitLanded);
    defender.s.ep = std::min(kMaxEp, defender.s.ep + moves::kEpPerHitTaken);
    const int dir = defender.s.x >= attacker.s.x ? 1 : -1;
    defender.s.x = clamp_x(defender.s.x + dir * hit.knockback);
}

inline void tick(Fighter& f) noexcept {
    if (f.recovery > 0) --f.recovery;
    if (f.heavy_cooldown > 0) --f.heavy_cooldown;
}

inline void check_policy(PolicyId p) {
    const int v = static_cast<int>(p);
    if (v < 0 || v >= static_cast<int>(kAllPolicies.size())) {
        throw ConfigError("unknown policy id " + std::to_string(v));
    }
}

} // namespace detail

// Runs one round to KO or the 60 s limit. frames_elapsed equals the number of
// recorded frame states, so a timeout round has exactly kRoundFrames frames.
inline RoundSimulation simulate_round(PolicyId policy_p1, PolicyId policy_p2, std::uint64_t seed) {
    detail::check_policy(policy_p1);
    detail::check_policy(policy_p2);

    SplitMix64 rng1(derive_seed(seed, 1));
    SplitMix64 rng2(derive_seed(seed, 2));
    detail::Fighter f1{{kMaxHp, 0, moves::kStartX1}};
    detail::Fighter f2{{kMaxHp, 0, moves::kStartX2}};

    RoundSimulation out;
    out.states.reserve(kRoundFrames);
    out.states.push_back({0, f1.s, f2.s});

    bool ko = false;
    for (int frame = 1; frame < kRoundFrames && !ko; ++frame) {
        const int pd = std::abs(f1.s.x - f2.s.x);
        const Action a1 = detail::decide(policy_p1, f1, pd, rng1);
        const Action a2 = detail::decide(policy_p2, f2, pd, rng2);
        detail::tick(f1);
        detail::tick(f2);

        const detail::Hit h1 = detail::start_attack(a1, f1, pd);
        const detail::Hit h2 = detail::start_attack(a2, f2, pd);
        detail::apply_hit(h1, f1, f2);
        detail::apply_hit(h2, f2, f1);

        detail::move(a1, f1, f2);
        detail::move(a2, f2, f1);

        out.states.push_back({frame, f1.s, f2.s});
        ko = f1.s.hp == 0 || f2.s.hp == 0;
    }

    const FrameState& last = out.states.back();
    out.result.end_hp_p1 = last.p1.hp;
    out.result.end_hp_p2 = last.p2.hp;
    out.result.frames_elapsed = static_cast<int>(out.states.size());
    out.result.winner = decide_winner(last.p1.hp, last.p2.hp, !ko);
    return out;
}

inline MatchLog simulate_match(PolicyId policy_p1, PolicyId policy_p2, int rounds, std::uint64_t seed) {
    if (rounds < 1) throw ConfigError("rounds must be >= 1, got " + std::to_string(rounds));
    MatchLog log;
    log.rounds.reserve(static_cast<std::size_t>(rounds));
    log.states.reserve(static_cast<std::size_t>(rounds));
    for (int r = 0; r < rounds; ++r) {
        RoundSimulation sim =
            simulate_round(policy_p1, policy_p2, derive_seed(seed, 1000 + static_cast<std::uint64_t>(r)));
        log.rounds.push_back(sim.result);
        log.states.push_back(std::move(sim.states));
    }
    return log;
}

} // namespace abgm
