#pragma once

#include "abgm/error.hpp"
#include "abgm/game_core.hpp"

#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

namespace abgm {

struct EvalSummary {
    double win_ratio = 0.0;
    double avg_hp_diff = 0.0;
    int total_rounds = 0;
};

namespace detail {
inline void require_rounds(const MatchLog& log) {
    if (log.rounds.empty()) throw DomainError("match log has no rounds");
}
constexpr Winner winner_for(Side s) noexcept { return s == Side::P1 ? Winner::P1 : Winner::P2; }
} // namespace detail

// Winning rounds over total rounds. Draws only enlarge the denominator.
inline double win_ratio(const MatchLog& log, Side side) {
    detail::require_rounds(log);
    std::size_t wins = 0;
    for (const RoundResult& r : log.rounds) wins += r.winner == detail::winner_for(side);
    return static_cast<double>(wins) / static_cast<double>(log.rounds.size());
}

inline double draw_ratio(const MatchLog& log) {
    detail::require_rounds(log);
    std::size_t draws = 0;
    for (const RoundResult& r : log.rounds) draws += r.winner == Winner::Draw;
    return static_cast<double>(draws) / static_cast<double>(log.rounds.size());
}

// Mean end-of-round HP of `side` minus that of its opponent.
inline double avg_hp_diff(const MatchLog& log, Side side) {
    detail::require_rounds(log);
    long long sum = 0;
    for (const RoundResult& r : log.rounds) {
        const int diff = r.end_hp_p1 - r.end_hp_p2;
        sum += side == Side::P1 ? diff : -diff;
    }
    return static_cast<double>(sum) / static_cast<double>(log.rounds.size());
}

inline EvalSummary summarize(const MatchLog& log, Side side) {
    return {win_ratio(log, side), avg_hp_diff(log, side), static_cast<int>(log.rounds.size())};
}

struct SummaryRow {
    std::string encoder;
    EvalSummary summary;
};

inline std::string format_summary_table(std::span<const SummaryRow> rows) {
    std::string out;
    char line[128];
    std::snprintf(line, sizeof line, "%-10s %10s %14s\n", "Encoder", "win_ratio", "avg HP_diff");
    out += line;
    for (const SummaryRow& r : rows) {
        std::snprintf(line, sizeof line, "%-10s %10.2f %14.2f\n", r.encoder.c_str(), r.summary.win_ratio,
                      r.summary.avg_hp_diff);
        out += line;
    }
    return out;
}

} // namespace abgm
