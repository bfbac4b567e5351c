#pragma once

// Game state -> per-instrument volume levels.
//
// Each game element feeds one threshold table. A table maps a value to the
// volume of the first band whose threshold the value reaches, scanning from
// the highest threshold down. HP and EP tables track the element (high HP is
// loud); the distance table is reversed so that close fighters are loud.

#include "abgm/error.hpp"
#include "abgm/game_core.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace abgm {

enum class InstrumentId { Violin, Piano, Flute, Ukulele, Cello };

inline constexpr std::size_t kInstrumentCount = 5;
inline constexpr std::array kInstruments{InstrumentId::Violin, InstrumentId::Piano, InstrumentId::Flute,
                                         InstrumentId::Ukulele, InstrumentId::Cello};

constexpr std::size_t index_of(InstrumentId i) noexcept { return static_cast<std::size_t>(i); }

inline std::string_view to_string(InstrumentId i) noexcept {
    switch (i) {
    case InstrumentId::Violin: return "Violin";
    case InstrumentId::Piano: return "Piano";
    case InstrumentId::Flute: return "Flute";
    case InstrumentId::Ukulele: return "Ukulele";
    case InstrumentId::Cello: return "Cello";
    }
    return "?";
}

// The game element each instrument follows.
enum class Element { P1Hp, P1Ep, P2Hp, P2Ep, Pd };

constexpr Element element_of(InstrumentId i) noexcept {
    switch (i) {
    case InstrumentId::Violin: return Element::P1Hp;
    case InstrumentId::Piano: return Element::P1Ep;
    case InstrumentId::Flute: return Element::P2Hp;
    case InstrumentId::Ukulele: return Element::P2Ep;
    case InstrumentId::Cello: return Element::Pd;
    }
    return Element::Pd;
}

inline std::string_view to_string(Element e) noexcept {
    switch (e) {
    case Element::P1Hp: return "p1_hp";
    case Element::P1Ep: return "p1_ep";
    case Element::P2Hp: return "p2_hp";
    case Element::P2Ep: return "p2_ep";
    case Element::Pd: return "pd";
    }
    return "?";
}

constexpr int element_value(const FrameState& s, Element e) noexcept {
    switch (e) {
    case Element::P1Hp: return s.p1.hp;
    case Element::P1Ep: return s.p1.ep;
    case Element::P2Hp: return s.p2.hp;
    case Element::P2Ep: return s.p2.ep;
    case Element::Pd: return s.pd();
    }
    return 0;
}

// A volume in percent. Only the levels the rule tables use are representable.
class VolumeLevel {
public:
    static constexpr std::array<int, 10> kLegal{10, 20, 25, 30, 35, 40, 50, 55, 60, 75};

    constexpr VolumeLevel() noexcept = default;

    explicit VolumeLevel(int percent) : percent_(percent) {
        if (!is_legal(percent)) {
            throw DomainError("volume level " + std::to_string(percent) + "% is not a table level");
        }
    }

    static constexpr bool is_legal(int percent) noexcept {
        return std::find(kLegal.begin(), kLegal.end(), percent) != kLegal.end();
    }

    constexpr int percent() const noexcept { return percent_; }
    constexpr double gain() const noexcept { return percent_ / 100.0; }

    friend constexpr auto operator<=>(const VolumeLevel&, const VolumeLevel&) = default;

private:
    int percent_ = 10;
};

// Inclusive integer interval of element values sharing one volume level.
struct Band {
    std::size_t index = 0; // first table row producing the level (rows.size() for the floor)
    int lo = 0;
    int hi = 0;

    constexpr bool contains(int v) const noexcept { return v >= lo && v <= hi; }
    friend constexpr bool operator==(const Band&, const Band&) = default;
};

class BandTable {
public:
    BandTable(std::vector<int> thresholds, std::vector<VolumeLevel> volumes, std::optional<VolumeLevel> floor,
              int domain_max)
        : thresholds_(std::move(thresholds)), volumes_(std::move(volumes)), floor_(floor),
          domain_max_(domain_max) {
        if (thresholds_.empty() || thresholds_.size() != volumes_.size()) {
            throw ConfigError("band table needs equal, non-empty threshold and volume lists");
        }
        for (std::size_t i = 1; i < thresholds_.size(); ++i) {
            if (thresholds_[i] >= thresholds_[i - 1]) {
                throw ConfigError("band thresholds must be strictly descending");
            }
        }
        if (thresholds_.back() < 0 || thresholds_.front() > domain_max_) {
            throw ConfigError("band thresholds must lie in [0, " + std::to_string(domain_max_) + "]");
        }
        if (!floor_ && thresholds_.back() != 0) {
            throw ConfigError("band table without a floor must end at threshold 0");
        }
    }

    const std::vector<int>& thresholds() const noexcept { return thresholds_; }
    const std::vector<VolumeLevel>& volumes() const noexcept { return volumes_; }
    const std::optional<VolumeLevel>& floor() const noexcept { return floor_; }
    int domain_max() const noexcept { return domain_max_; }

    VolumeLevel lookup(int value) const {
        if (value < 0 || value > domain_max_) {
            throw DomainError("value " + std::to_string(value) + " outside [0, " + std::to_string(domain_max_) +
                              "]");
        }
        for (std::size_t i = 0; i < thresholds_.size(); ++i) {
            if (value >= thresholds_[i]) return volumes_[i];
        }
        return *floor_;
    }

    // Distinct levels the table can produce, ascending.
    std::vector<VolumeLevel> ladder() const {
        std::vector<VolumeLevel> out(volumes_.begin(), volumes_.end());
        if (floor_ && thresholds_.back() > 0) out.push_back(*floor_);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    // The set of values mapping to `level`. Rows sharing a level must be
    // adjacent so the preimage is one interval.
    Band invert(VolumeLevel level) const {
        std::optional<Band> band;
        auto extend = [&](std::size_t index, int lo, int hi) {
            if (!band) {
                band = Band{index, lo, hi};
                return;
            }
            if (hi + 1 != band->lo) {
                throw DomainError("level " + std::to_string(level.percent()) + "% maps to disjoint bands");
            }
            band->lo = lo;
        };
        for (std::size_t i = 0; i < thresholds_.size(); ++i) {
            const int hi = i == 0 ? domain_max_ : thresholds_[i - 1] - 1;
            if (volumes_[i] == level && thresholds_[i] <= hi) extend(i, thresholds_[i], hi);
        }
        if (floor_ && thresholds_.back() > 0 && *floor_ == level) {
            extend(thresholds_.size(), 0, thresholds_.back() - 1);
        }
        if (!band) {
            throw DomainError("level " + std::to_string(level.percent()) + "% is not in this table's ladder");
        }
        return *band;
    }

private:
    std::vector<int> thresholds_;
    std::vector<VolumeLevel> volumes_;
    std::optional<VolumeLevel> floor_;
    int domain_max_;
};

namespace detail {
inline std::vector<VolumeLevel> levels(std::initializer_list<int> percents) {
    std::vector<VolumeLevel> out;
    for (int p : percents) out.emplace_back(p);
    return out;
}
} // namespace detail

inline BandTable default_hp_table() {
    return BandTable({400, 300, 250, 200, 150, 100, 50}, detail::levels({75, 60, 55, 40, 35, 25, 10}),
                     VolumeLevel(10), kMaxHp);
}

// Six thresholds against the top six HP volumes; below 50 falls to 10%.
inline BandTable default_ep_table() {
    return BandTable({300, 250, 200, 150, 100, 50}, detail::levels({75, 60, 55, 40, 35, 25}), VolumeLevel(10),
                     kMaxEp);
}

inline BandTable default_pd_table() {
    return BandTable({800, 600, 500, 400, 300, 60, 0}, detail::levels({10, 20, 30, 40, 50, 60, 75}), std::nullopt,
                     kStageWidth);
}

struct VolumePlan {
    int frame_index = 0;
    std::array<VolumeLevel, kInstrumentCount> levels{};

    VolumeLevel& operator[](InstrumentId i) noexcept { return levels[index_of(i)]; }
    const VolumeLevel& operator[](InstrumentId i) const noexcept { return levels[index_of(i)]; }

    // Same levels; the frame index is ignored.
    bool same_levels(const VolumePlan& o) const noexcept { return levels == o.levels; }

    friend bool operator==(const VolumePlan&, const VolumePlan&) = default;
};

class AdaptationRules {
public:
    AdaptationRules() : hp_(default_hp_table()), ep_(default_ep_table()), pd_(default_pd_table()) {}
    AdaptationRules(BandTable hp, BandTable ep, BandTable pd)
        : hp_(std::move(hp)), ep_(std::move(ep)), pd_(std::move(pd)) {}

    const BandTable& hp() const noexcept { return hp_; }
    const BandTable& ep() const noexcept { return ep_; }
    const BandTable& pd() const noexcept { return pd_; }

    const BandTable& table_for(Element e) const noexcept {
        switch (e) {
        case Element::P1Hp:
        case Element::P2Hp: return hp_;
        case Element::P1Ep:
        case Element::P2Ep: return ep_;
        case Element::Pd: return pd_;
        }
        return pd_;
    }
    const BandTable& table_for(InstrumentId i) const noexcept { return table_for(element_of(i)); }

    VolumePlan plan_for_frame(const FrameState& s) const {
        VolumePlan plan;
        plan.frame_index = s.frame_index;
        for (InstrumentId i : kInstruments) {
            const Element e = element_of(i);
            plan[i] = table_for(e).lookup(element_value(s, e));
        }
        return plan;
    }

private:
    BandTable hp_;
    BandTable ep_;
    BandTable pd_;
};

inline const AdaptationRules& default_rules() {
    static const AdaptationRules rules;
    return rules;
}

inline VolumeLevel hp_volume(int hp) { return default_rules().hp().lookup(hp); }
inline VolumeLevel ep_volume(int ep) { return default_rules().ep().lookup(ep); }
inline VolumeLevel pd_volume(int pd) { return default_rules().pd().lookup(pd); }

inline VolumePlan plan_for_frame(const FrameState& s) { return default_rules().plan_for_frame(s); }

// Every instrument at `level`; the non-adaptive control mix.
inline VolumePlan uniform_plan(int frame_index, VolumeLevel level = VolumeLevel(75)) {
    VolumePlan p;
    p.frame_index = frame_index;
    p.levels.fill(level);
    return p;
}

// Rule-table file:
//
//   # comment
//   [hp]            section: hp, ep or pd
//   400 75          threshold volume, highest threshold first
//   floor 10        optional level below the last threshold
//
// Sections that are omitted keep their default table.
inline AdaptationRules parse_rules(std::istream& is) {
    struct Section {
        std::vector<int> thresholds;
        std::vector<VolumeLevel> volumes;
        std::optional<VolumeLevel> floor;
        bool present = false;
    };
    std::array<Section, 3> sections;
    Section* current = nullptr;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string head;
        if (!(ls >> head)) continue;
        const auto where = " (line " + std::to_string(line_no) + ")";
        if (head.front() == '[') {
            if (head == "[hp]") current = &sections[0];
            else if (head == "[ep]") current = &sections[1];
            else if (head == "[pd]") current = &sections[2];
            else throw ConfigError("unknown rule section " + head + where);
            if (current->present) throw ConfigError("duplicate rule section " + head + where);
            current->present = true;
            continue;
        }
        if (!current) throw ConfigError("band line before any section" + where);
        int volume = 0;
        if (!(ls >> volume)) throw ConfigError("expected 'threshold volume'" + where);
        std::string extra;
        if (ls >> extra) throw ConfigError("trailing text '" + extra + "'" + where);
        if (!VolumeLevel::is_legal(volume)) {
            throw ConfigError("volume " + std::to_string(volume) + "% is not a table level" + where);
        }
        if (head == "floor") {
            current->floor = VolumeLevel(volume);
            continue;
        }
        try {
            std::size_t used = 0;
            const int threshold = std::stoi(head, &used);
            if (used != head.size()) throw std::invalid_argument(head);
            current->thresholds.push_back(threshold);
        } catch (const std::logic_error&) {
            throw ConfigError("bad threshold '" + head + "'" + where);
        }
        current->volumes.emplace_back(volume);
    }
    auto build = [](Section& s, BandTable fallback, int domain_max) {
        if (!s.present) return fallback;
        return BandTable(std::move(s.thresholds), std::move(s.volumes), s.floor, domain_max);
    };
    return AdaptationRules(build(sections[0], default_hp_table(), kMaxHp),
                           build(sections[1], default_ep_table(), kMaxEp),
                           build(sections[2], default_pd_table(), kStageWidth));
}

inline AdaptationRules load_rules(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open rule file " + path);
    return parse_rules(in);
}

} // namespace abgm
