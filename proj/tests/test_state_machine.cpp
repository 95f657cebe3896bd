#include <catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "support/generators.hpp"
#include "support/scenario.hpp"
#include "trajkit/segmentation.hpp"
#include "trajkit/state_machine.hpp"

using namespace trajkit;

namespace {

const timestamp t0 = make_timestamp(2010, 3, 1, 8, 0, 0);

std::vector<mission_event> events_from(std::initializer_list<event_kind> kinds,
                                       const std::string& object = "MH-01") {
    std::vector<mission_event> out;
    int i = 1;
    for (const auto k : kinds) {
        out.push_back({object, t0 + duration{60 * i++}, k, "PDA"});
    }
    return out;
}

} // namespace

TEST_CASE("the standard transition table has exactly the eight documented edges") {
    const auto& table = transition_table::standard();
    CHECK(table.size() == 8);
    CHECK(transition(mission_state::ready, event_kind::depart_road) == mission_state::move_in_road);
    CHECK(transition(mission_state::move_in_road, event_kind::breakdown) ==
          mission_state::stop_failure);
    CHECK(transition(mission_state::stop_failure, event_kind::repaired) ==
          mission_state::move_in_road);
    CHECK(transition(mission_state::move_in_road, event_kind::arrive_destination) ==
          mission_state::stop_in_destination);
    CHECK(transition(mission_state::stop_in_destination, event_kind::roam_destination) ==
          mission_state::move_in_destination);
    CHECK(transition(mission_state::move_in_destination, event_kind::halt_at_destination) ==
          mission_state::stop_in_destination);
    CHECK(transition(mission_state::stop_in_destination, event_kind::depart_for_next_leg) ==
          mission_state::move_in_road);
    CHECK(transition(mission_state::stop_in_destination, event_kind::end_mission) ==
          mission_state::ready);
}

TEST_CASE("transition rejects every pair outside the table") {
    const auto& table = transition_table::standard();
    const mission_state states[] = {mission_state::ready, mission_state::move_in_road,
                                    mission_state::stop_failure, mission_state::stop_in_destination,
                                    mission_state::move_in_destination};
    const event_kind kinds[] = {event_kind::depart_road,        event_kind::breakdown,
                                event_kind::repaired,           event_kind::arrive_destination,
                                event_kind::roam_destination,   event_kind::halt_at_destination,
                                event_kind::depart_for_next_leg, event_kind::end_mission};
    int valid = 0;
    for (const auto s : states) {
        for (const auto k : kinds) {
            if (table.next(s, k)) {
                ++valid;
                CHECK_NOTHROW(transition(s, k));
            } else {
                CHECK_THROWS_AS(transition(s, k), invalid_transition_error);
            }
        }
    }
    CHECK(valid == 8);
    CHECK_THROWS_AS(transition(mission_state::ready, event_kind::breakdown),
                    invalid_transition_error);
}

TEST_CASE("replay folds the table over the event log") {
    SECTION("empty log yields a single open Ready entry") {
        const std::vector<mission_event> none;
        const auto tl = replay(none, t0);
        REQUIRE(tl.entries.size() == 1);
        CHECK(tl.entries[0].state == mission_state::ready);
        CHECK(tl.entries[0].begin == t0);
        CHECK_FALSE(tl.entries[0].end.has_value());
    }
    SECTION("full destination visit hand-fold") {
        const auto events = events_from({event_kind::depart_road, event_kind::arrive_destination,
                                         event_kind::roam_destination,
                                         event_kind::halt_at_destination, event_kind::end_mission});
        const auto tl = replay(events, t0);
        REQUIRE(tl.entries.size() == 6);
        const mission_state expected[] = {
            mission_state::ready,               mission_state::move_in_road,
            mission_state::stop_in_destination, mission_state::move_in_destination,
            mission_state::stop_in_destination, mission_state::ready};
        for (std::size_t i = 0; i < 6; ++i) CHECK(tl.entries[i].state == expected[i]);
        for (std::size_t i = 0; i + 1 < 6; ++i) {
            REQUIRE(tl.entries[i].end.has_value());
            CHECK(*tl.entries[i].end == tl.entries[i + 1].begin);
        }
        CHECK_FALSE(tl.entries.back().end.has_value());
        CHECK(tl.object_id == "MH-01");
    }
    SECTION("double departure fails at index 1") {
        const auto events = events_from({event_kind::depart_road, event_kind::depart_road});
        try {
            replay(events, t0);
            FAIL("expected invalid_transition_error");
        } catch (const invalid_transition_error& e) {
            CHECK(e.event_index == 1);
            CHECK(e.from_state == "MoveInRoad");
            CHECK(e.event == "DepartRoad");
        }
    }
    SECTION("unsorted events are rejected") {
        auto events = events_from({event_kind::depart_road, event_kind::arrive_destination});
        std::swap(events[0].at, events[1].at);
        CHECK_THROWS_AS(replay(events, t0), unsorted_input_error);
        const auto before_start = events_from({event_kind::depart_road});
        CHECK_THROWS_AS(replay(before_start, t0 + duration{3600}), unsorted_input_error);
    }
    SECTION("mixed objects are rejected") {
        auto events = events_from({event_kind::depart_road, event_kind::arrive_destination});
        events[1].object_id = "OTHER";
        CHECK_THROWS_AS(replay(events, t0), mixed_object_error);
    }
}

TEST_CASE("random walks over the edge set always replay; prefix states agree") {
    std::mt19937 rng(7401);
    const auto& table = transition_table::standard();
    for (int iter = 0; iter < 200; ++iter) {
        std::vector<mission_event> events;
        mission_state state = mission_state::ready;
        std::vector<mission_state> after; // state after event i
        timestamp t = t0;
        std::uniform_int_distribution<int> len_d(0, 40);
        const int len = len_d(rng);
        for (int i = 0; i < len; ++i) {
            std::vector<event_kind> valid;
            for (const auto& [key, to] : table.edges()) {
                if (key.first == state) valid.push_back(key.second);
            }
            std::uniform_int_distribution<std::size_t> pick(0, valid.size() - 1);
            const event_kind kind = valid[pick(rng)];
            t += duration{60};
            events.push_back({"MH-01", t, kind, "PDA"});
            state = *table.next(state, kind);
            after.push_back(state);
        }
        const auto tl = replay(events, t0);
        REQUIRE(tl.entries.size() == events.size() + 1);
        for (std::size_t i = 0; i < events.size(); ++i) {
            CHECK(tl.state_at(events[i].at) == after[i]);
        }
        CHECK(tl.state_at(t0) == (events.empty() ? mission_state::ready : tl.entries[0].state));
    }
}

TEST_CASE("single-edge corruption fails exactly at the corrupted index") {
    std::mt19937 rng(7402);
    const auto& table = transition_table::standard();
    const event_kind all_kinds[] = {event_kind::depart_road,        event_kind::breakdown,
                                    event_kind::repaired,           event_kind::arrive_destination,
                                    event_kind::roam_destination,   event_kind::halt_at_destination,
                                    event_kind::depart_for_next_leg, event_kind::end_mission};
    for (int iter = 0; iter < 200; ++iter) {
        // build a valid sequence of length >= 1
        std::vector<mission_event> events;
        std::vector<mission_state> before; // state before event i
        mission_state state = mission_state::ready;
        std::uniform_int_distribution<int> len_d(1, 30);
        const int len = len_d(rng);
        timestamp t = t0;
        for (int i = 0; i < len; ++i) {
            std::vector<event_kind> valid;
            for (const auto& [key, to] : table.edges()) {
                if (key.first == state) valid.push_back(key.second);
            }
            std::uniform_int_distribution<std::size_t> pick(0, valid.size() - 1);
            t += duration{60};
            before.push_back(state);
            const event_kind kind = valid[pick(rng)];
            events.push_back({"MH-01", t, kind, "PDA"});
            state = *table.next(state, kind);
        }
        std::uniform_int_distribution<std::size_t> idx_d(0, events.size() - 1);
        const std::size_t idx = idx_d(rng);
        std::vector<event_kind> invalid;
        for (const auto k : all_kinds) {
            if (!table.next(before[idx], k)) invalid.push_back(k);
        }
        REQUIRE_FALSE(invalid.empty());
        std::uniform_int_distribution<std::size_t> pick(0, invalid.size() - 1);
        events[idx].kind = invalid[pick(rng)];
        try {
            replay(events, t0);
            FAIL("expected invalid_transition_error");
        } catch (const invalid_transition_error& e) {
            CHECK(e.event_index == idx);
        }
    }
}

TEST_CASE("transition table override parsing") {
    std::istringstream in("# comment\n"
                          "Ready,DepartRoad,MoveInRoad\n"
                          "MoveInRoad,Breakdown,StopFailure\n"
                          "MoveInDestination,Breakdown,StopFailure\n");
    const auto table = transition_table::parse(in);
    CHECK(table.size() == 3);
    CHECK(table.next(mission_state::move_in_destination, event_kind::breakdown) ==
          mission_state::stop_failure);

    std::istringstream bad("Ready,NoSuchEvent,MoveInRoad\n");
    CHECK_THROWS_AS(transition_table::parse(bad), schema_error);
    std::istringstream bad2("Ready,DepartRoad\n");
    CHECK_THROWS_AS(transition_table::parse(bad2), schema_error);
    std::istringstream empty("# nothing\n");
    CHECK_THROWS_AS(transition_table::parse(empty), empty_file_error);
}

TEST_CASE("reconcile flags stop/move intervals against conflicting states") {
    const auto events = events_from(
        {event_kind::depart_road, event_kind::arrive_destination, event_kind::depart_for_next_leg,
         event_kind::arrive_destination, event_kind::end_mission});
    // entries: Ready[t0,+60] MoveInRoad[+60,+120] StopInDest[+120,+180]
    //          MoveInRoad[+180,+240] StopInDest[+240,+300] Ready[+300,open)
    const auto tl = replay(events, t0);

    const geo_point p{36.8, 10.18};
    const auto mk_traj = [&](duration s0b, duration s0e, duration m0e, duration s1e) {
        std::vector<stop> stops{{"MH-01:stop:0", "MH-01", t0 + s0b, t0 + s0e, p,
                                 stop_source::detected},
                                {"MH-01:stop:1", "MH-01", t0 + m0e, t0 + s1e, p,
                                 stop_source::detected}};
        std::vector<move> moves{
            {"MH-01:move:0", "MH-01", t0 + s0e, t0 + m0e, p, p, {}}};
        return build_trajectory("MH-01", std::move(stops), std::move(moves));
    };

    SECTION("consistent by construction") {
        const auto traj = mk_traj(duration{120}, duration{180}, duration{240}, duration{300});
        CHECK(reconcile(tl, traj).empty());
    }
    SECTION("stop inserted during a road leg is flagged") {
        // stop covers MoveInRoad [+180,+240] far beyond tolerance
        const auto traj = mk_traj(duration{120}, duration{175}, duration{177}, duration{300});
        const auto issues = reconcile(tl, traj, duration{10});
        REQUIRE(issues.size() == 1);
        CHECK(issues[0].kind == discrepancy_kind::stop_during_move);
        CHECK(issues[0].element_id == "MH-01:stop:1");
        CHECK(issues[0].state == mission_state::move_in_road);
    }
    SECTION("move overlapping a destination halt is flagged") {
        const auto traj = mk_traj(duration{120}, duration{130}, duration{175}, duration{190});
        // move [+130,+175] sits inside StopInDest [+120,+180]
        const auto issues = reconcile(tl, traj, duration{10});
        REQUIRE(issues.size() == 1);
        CHECK(issues[0].kind == discrepancy_kind::move_during_stop);
        CHECK(issues[0].element_id == "MH-01:move:0");
    }
    SECTION("overlap at or below tolerance passes") {
        const auto traj = mk_traj(duration{110}, duration{180}, duration{240}, duration{300});
        CHECK(reconcile(tl, traj, duration{10}).empty()); // 10 s into MoveInRoad
        CHECK_FALSE(reconcile(tl, traj, duration{5}).empty());
    }
    SECTION("object mismatch") {
        const auto traj = mk_traj(duration{120}, duration{180}, duration{240}, duration{300});
        state_timeline other = tl;
        other.object_id = "OTHER";
        CHECK_THROWS_AS(reconcile(other, traj), object_mismatch_error);
    }
}

TEST_CASE("randomized consistent scenarios reconcile cleanly") {
    std::mt19937 rng(7403);
    for (int iter = 0; iter < 60; ++iter) {
        const auto sc = gen::random_mission(rng);
        const auto report = segment(sc.fixes, sc.params, sc.events);
        const auto tl = replay(sc.events, sc.start);
        const auto issues = reconcile(tl, report.traj);
        CHECK(issues.empty());
    }
}
