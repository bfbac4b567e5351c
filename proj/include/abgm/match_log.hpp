#pragma once

// Line-delimited text form of a MatchLog.
//
//   <round> <frame> <p1.hp> <p1.ep> <p1.x> <p2.hp> <p2.ep> <p2.x>   one per frame
//   R <round> <winner> <hp1> <hp2> <frames>                       after all frames
//
// Rounds are numbered from 0. Integers are plain decimal, fields separated by
// one space, lines end with '\n'.

#include "abgm/error.hpp"
#include "abgm/game_core.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace abgm {

inline void write_match_log(std::ostream& os, const MatchLog& log) {
    for (std::size_t r = 0; r < log.states.size(); ++r) {
        for (const FrameState& s : log.states[r]) {
            os << r << ' ' << s.frame_index << ' ' << s.p1.hp << ' ' << s.p1.ep << ' ' << s.p1.x << ' '
               << s.p2.hp << ' ' << s.p2.ep << ' ' << s.p2.x << '\n';
        }
    }
    for (std::size_t r = 0; r < log.rounds.size(); ++r) {
        const RoundResult& res = log.rounds[r];
        os << "R " << r << ' ' << to_string(res.winner) << ' ' << res.end_hp_p1 << ' ' << res.end_hp_p2
           << ' ' << res.frames_elapsed << '\n';
    }
}

inline std::string to_text(const MatchLog& log) {
    std::ostringstream os;
    write_match_log(os, log);
    return os.str();
}

inline MatchLog read_match_log(std::istream& is) {
    MatchLog log;
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& why) {
        throw FormatError("match log line " + std::to_string(line_no) + ": " + why);
    };
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        if (line[0] == 'R') {
            std::string tag, winner;
            std::size_t round = 0;
            RoundResult res;
            if (!(ls >> tag >> round >> winner >> res.end_hp_p1 >> res.end_hp_p2 >> res.frames_elapsed)) {
                fail("expected 'R round winner hp1 hp2 frames'");
            }
            res.winner = parse_winner(winner);
            if (round != log.rounds.size()) fail("round results out of order");
            log.rounds.push_back(res);
            continue;
        }
        if (!log.rounds.empty()) fail("frame record after round results");
        std::size_t round = 0;
        FrameState s;
        if (!(ls >> round >> s.frame_index >> s.p1.hp >> s.p1.ep >> s.p1.x >> s.p2.hp >> s.p2.ep >> s.p2.x)) {
            fail("expected 8 integers");
        }
        if (!is_valid(s)) fail("field out of range");
        if (round + 1 < log.states.size() || round > log.states.size()) fail("round index out of order");
        if (round == log.states.size()) log.states.emplace_back();
        auto& states = log.states[round];
        if (!states.empty() && s.frame_index <= states.back().frame_index) {
            fail("frame index not increasing");
        }
        states.push_back(s);
    }
    if (!log.states.empty()) {
        if (log.states.size() != log.rounds.size()) {
            throw FormatError("match log has " + std::to_string(log.states.size()) + " rounds of frames but " +
                              std::to_string(log.rounds.size()) + " round results");
        }
        for (std::size_t r = 0; r < log.rounds.size(); ++r) {
            const FrameState& last = log.states[r].back();
            if (last.p1.hp != log.rounds[r].end_hp_p1 || last.p2.hp != log.rounds[r].end_hp_p2) {
                throw FormatError("round " + std::to_string(r) + " result does not match its final frame");
            }
        }
    }
    return log;
}

inline MatchLog parse_match_log(const std::string& text) {
    std::istringstream is(text);
    return read_match_log(is);
}

} // namespace abgm
