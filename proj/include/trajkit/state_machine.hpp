#pragma once

#include <algorithm>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "trajkit/errors.hpp"
#include "trajkit/time.hpp"
#include "trajkit/trajectory.hpp"

namespace trajkit {

enum class mission_state {
    ready,
    move_in_road,
    stop_failure,
    stop_in_destination,
    move_in_destination,
};

enum class event_kind {
    depart_road,
    breakdown,
    repaired,
    arrive_destination,
    roam_destination,
    halt_at_destination,
    depart_for_next_leg,
    end_mission,
};

inline const char* to_string(mission_state s) {
    switch (s) {
        case mission_state::ready: return "Ready";
        case mission_state::move_in_road: return "MoveInRoad";
        case mission_state::stop_failure: return "StopFailure";
        case mission_state::stop_in_destination: return "StopInDestination";
        case mission_state::move_in_destination: return "MoveInDestination";
    }
    return "?";
}

inline const char* to_string(event_kind k) {
    switch (k) {
        case event_kind::depart_road: return "DepartRoad";
        case event_kind::breakdown: return "Breakdown";
        case event_kind::repaired: return "Repaired";
        case event_kind::arrive_destination: return "ArriveDestination";
        case event_kind::roam_destination: return "RoamDestination";
        case event_kind::halt_at_destination: return "HaltAtDestination";
        case event_kind::depart_for_next_leg: return "DepartForNextLeg";
        case event_kind::end_mission: return "EndMission";
    }
    return "?";
}

// Wire names are case-sensitive.
inline std::optional<mission_state> parse_mission_state(std::string_view s) {
    for (auto v : {mission_state::ready, mission_state::move_in_road, mission_state::stop_failure,
                   mission_state::stop_in_destination, mission_state::move_in_destination}) {
        if (s == to_string(v)) return v;
    }
    return std::nullopt;
}

inline std::optional<event_kind> parse_event_kind(std::string_view s) {
    for (auto v : {event_kind::depart_road, event_kind::breakdown, event_kind::repaired,
                   event_kind::arrive_destination, event_kind::roam_destination,
                   event_kind::halt_at_destination, event_kind::depart_for_next_leg,
                   event_kind::end_mission}) {
        if (s == to_string(v)) return v;
    }
    return std::nullopt;
}

/// A PDA-reported lifecycle event.
struct mission_event {
    std::string object_id;
    timestamp at;
    event_kind kind;
    std::string reporter;

    friend bool operator==(const mission_event&, const mission_event&) = default;
};

/// The mission lifecycle edge set. The standard table carries the default
/// eight edges; an alternative edge set can be loaded from a text override.
class transition_table {
public:
    using edge = std::pair<std::pair<mission_state, event_kind>, mission_state>;

    void add_edge(mission_state from, event_kind on, mission_state to) {
        edges_[{from, on}] = to;
    }

    std::optional<mission_state> next(mission_state from, event_kind on) const {
        const auto it = edges_.find({from, on});
        if (it == edges_.end()) return std::nullopt;
        return it->second;
    }

    std::size_t size() const { return edges_.size(); }

    const std::map<std::pair<mission_state, event_kind>, mission_state>& edges() const {
        return edges_;
    }

    static const transition_table& standard() {
        static const transition_table t = [] {
            transition_table tt;
            tt.add_edge(mission_state::ready, event_kind::depart_road, mission_state::move_in_road);
            tt.add_edge(mission_state::move_in_road, event_kind::breakdown, mission_state::stop_failure);
            tt.add_edge(mission_state::stop_failure, event_kind::repaired, mission_state::move_in_road);
            tt.add_edge(mission_state::move_in_road, event_kind::arrive_destination,
                        mission_state::stop_in_destination);
            tt.add_edge(mission_state::stop_in_destination, event_kind::roam_destination,
                        mission_state::move_in_destination);
            tt.add_edge(mission_state::move_in_destination, event_kind::halt_at_destination,
                        mission_state::stop_in_destination);
            tt.add_edge(mission_state::stop_in_destination, event_kind::depart_for_next_leg,
                        mission_state::move_in_road);
            tt.add_edge(mission_state::stop_in_destination, event_kind::end_mission,
                        mission_state::ready);
            return tt;
        }();
        return t;
    }

    /// Override format: one `FromState,EventKind,ToState` per line; `#` comments
    /// and blank lines are skipped.
    static transition_table parse(std::istream& in) {
        transition_table t;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const auto first = line.find_first_not_of(" \t");
            if (first == std::string::npos || line[first] == '#') continue;
            std::istringstream row(line);
            std::string from_s, on_s, to_s;
            if (!std::getline(row, from_s, ',') || !std::getline(row, on_s, ',') ||
                !std::getline(row, to_s)) {
                throw schema_error(line_no, "expected FromState,EventKind,ToState");
            }
            const auto from = parse_mission_state(from_s);
            const auto on = parse_event_kind(on_s);
            const auto to = parse_mission_state(to_s);
            if (!from) throw schema_error(line_no, "unknown state '" + from_s + "'");
            if (!on) throw schema_error(line_no, "unknown event kind '" + on_s + "'");
            if (!to) throw schema_error(line_no, "unknown state '" + to_s + "'");
            t.add_edge(*from, *on, *to);
        }
        if (t.size() == 0) throw empty_file_error("transition table override defines no edges");
        return t;
    }

private:
    std::map<std::pair<mission_state, event_kind>, mission_state> edges_;
};

/// Single-step transition against a table; invalid pairs throw.
inline mission_state transition(mission_state state, event_kind kind,
                                const transition_table& table = transition_table::standard()) {
    const auto next = table.next(state, kind);
    if (!next) throw invalid_transition_error(to_string(state), to_string(kind));
    return *next;
}

struct timeline_entry {
    mission_state state;
    timestamp begin;
    std::optional<timestamp> end; // open only for the final entry

    friend bool operator==(const timeline_entry&, const timeline_entry&) = default;
};

/// Contiguous state history starting at Ready.
struct state_timeline {
    std::string object_id;
    std::vector<timeline_entry> entries;

    mission_state state_at(timestamp t) const {
        mission_state s = mission_state::ready;
        for (const auto& e : entries) {
            if (e.begin <= t) s = e.state;
        }
        return s;
    }
};

/// Folds the transition table over a time-sorted single-object event stream,
/// starting from Ready at `start`. Fails atomically on the first invalid
/// transition, reporting the offending event index.
inline state_timeline replay(std::span<const mission_event> events, timestamp start,
                             const transition_table& table = transition_table::standard()) {
    state_timeline tl;
    tl.object_id = events.empty() ? std::string{} : events.front().object_id;
    mission_state state = mission_state::ready;
    timestamp since = start;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const auto& ev = events[i];
        if (ev.object_id != tl.object_id) {
            throw mixed_object_error("event " + std::to_string(i) + " belongs to object '" +
                                     ev.object_id + "', expected '" + tl.object_id + "'");
        }
        if (ev.at < since) {
            throw unsorted_input_error("event " + std::to_string(i) + " at " +
                                       format_iso8601(ev.at) + " precedes " + format_iso8601(since));
        }
        const auto next = table.next(state, ev.kind);
        if (!next) throw invalid_transition_error(to_string(state), to_string(ev.kind), i);
        tl.entries.push_back({state, since, ev.at});
        state = *next;
        since = ev.at;
    }
    tl.entries.push_back({state, since, std::nullopt});
    return tl;
}

enum class discrepancy_kind { stop_during_move, move_during_stop };

struct discrepancy {
    discrepancy_kind kind;
    std::string element_id; // the stop or move at fault
    mission_state state;
    timestamp overlap_begin;
    timestamp overlap_end;
};

/// Cross-checks the event-derived timeline against the GPS-derived stop/move
/// decomposition. Overlaps up to `tolerance` are ignored.
inline std::vector<discrepancy> reconcile(const state_timeline& timeline, const trajectory& traj,
                                          duration tolerance = duration{60}) {
    if (timeline.object_id != traj.object_id()) {
        throw object_mismatch_error("timeline is for '" + timeline.object_id +
                                    "', trajectory for '" + traj.object_id() + "'");
    }
    std::vector<discrepancy> out;
    const auto check = [&](timestamp b, timestamp e, const std::string& element_id,
                           discrepancy_kind kind, std::initializer_list<mission_state> states) {
        for (const auto& entry : timeline.entries) {
            if (std::find(states.begin(), states.end(), entry.state) == states.end()) continue;
            const timestamp ob = std::max(b, entry.begin);
            const timestamp oe = entry.end ? std::min(e, *entry.end) : e;
            if (oe > ob && oe - ob > tolerance) {
                out.push_back({kind, element_id, entry.state, ob, oe});
            }
        }
    };
    for (const auto& s : traj.stops()) {
        check(s.begin, s.end, s.id, discrepancy_kind::stop_during_move,
              {mission_state::move_in_road, mission_state::move_in_destination});
    }
    for (const auto& m : traj.moves()) {
        check(m.begin, m.end, m.id, discrepancy_kind::move_during_stop,
              {mission_state::stop_failure, mission_state::stop_in_destination});
    }
    return out;
}

} // namespace trajkit
