#include <catch_amalgamated.hpp>

#include <random>

#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "support/scenario.hpp"
#include "trajkit/segmentation.hpp"
#include "trajkit/store.hpp"

using namespace trajkit;

namespace {

const timestamp t0 = make_timestamp(2010, 3, 1, 8, 0, 0);

std::vector<gps_fix> fixes_at(const geo_point& pos, int count, duration step,
                              timestamp start = t0, const std::string& object = "OBJ") {
    std::vector<gps_fix> out;
    for (int i = 0; i < count; ++i) {
        out.push_back({object, start + step * i, pos, "GPS"});
    }
    return out;
}

} // namespace

TEST_CASE("validate_fix_stream") {
    const segmentation_params params{100.0, duration{300}, duration{600}};
    SECTION("dense increasing stream is clean") {
        const auto fixes = fixes_at({36.8, 10.18}, 20, duration{30});
        CHECK(validate_fix_stream(fixes, params.max_fix_gap).empty());
    }
    SECTION("one swapped pair yields one out-of-order anomaly at the swap") {
        auto fixes = fixes_at({36.8, 10.18}, 10, duration{30});
        std::swap(fixes[4].at, fixes[5].at);
        const auto anomalies = validate_fix_stream(fixes, params.max_fix_gap);
        REQUIRE(anomalies.size() == 1);
        CHECK(anomalies[0].kind == anomaly_kind::out_of_order);
        CHECK(anomalies[0].at == fixes[5].at);
    }
    SECTION("a two-hour hole is a gap anomaly at the gap's start") {
        auto fixes = fixes_at({36.8, 10.18}, 5, duration{60});
        auto tail = fixes_at({36.8, 10.18}, 5, duration{60}, fixes.back().at + duration{7200});
        fixes.insert(fixes.end(), tail.begin(), tail.end());
        const auto anomalies = validate_fix_stream(fixes, duration{600});
        REQUIRE(anomalies.size() == 1);
        CHECK(anomalies[0].kind == anomaly_kind::gap);
        CHECK(anomalies[0].at == t0 + duration{240});
    }
    SECTION("duplicate timestamps are flagged") {
        auto fixes = fixes_at({36.8, 10.18}, 5, duration{60});
        fixes[2].at = fixes[1].at;
        const auto anomalies = validate_fix_stream(fixes, duration{600});
        REQUIRE(anomalies.size() == 1);
        CHECK(anomalies[0].kind == anomaly_kind::duplicate_timestamp);
    }
}

TEST_CASE("detect_stops basic behavior") {
    const segmentation_params params{100.0, duration{300}, duration{600}};
    SECTION("20 immobile fixes over 10 minutes make exactly one stop") {
        const auto fixes = fixes_at({36.8, 10.18}, 20, duration{30});
        const auto stops = detect_stops(fixes, params);
        REQUIRE(stops.size() == 1);
        CHECK(stops[0].begin == fixes.front().at);
        CHECK(stops[0].end == fixes.back().at);
        CHECK(stops[0].source == stop_source::detected);
        CHECK(haversine_distance(stops[0].position, fixes[0].position) < 1e-6);
    }
    SECTION("steady 200 m/min advance never stops") {
        std::vector<gps_fix> fixes;
        for (int i = 0; i < 30; ++i) {
            fixes.push_back({"OBJ", t0 + duration{60 * i},
                             gen::offset({36.8, 10.18}, 200.0 * i, 0), "GPS"});
        }
        CHECK(detect_stops(fixes, params).empty());
    }
    SECTION("input discipline") {
        auto fixes = fixes_at({36.8, 10.18}, 5, duration{60});
        fixes[3].at = fixes[2].at;
        CHECK_THROWS_AS(detect_stops(fixes, params), unsorted_input_error);
        fixes = fixes_at({36.8, 10.18}, 5, duration{60});
        fixes[3].object_id = "OTHER";
        CHECK_THROWS_AS(detect_stops(fixes, params), mixed_object_error);
    }
}

TEST_CASE("detect_stops equals the every-window oracle on random traces") {
    std::mt19937 rng(7201);
    const segmentation_params params{100.0, duration{300}, duration{600}};
    for (int iter = 0; iter < 120; ++iter) {
        const auto fixes = gen::random_fix_trace(rng, 150, params);
        const auto expected = oracles::stop_windows(fixes, params);
        const auto stops = detect_stops(fixes, params);
        REQUIRE(stops.size() == expected.size());
        for (std::size_t k = 0; k < stops.size(); ++k) {
            CHECK(stops[k].begin == fixes[expected[k].first].at);
            CHECK(stops[k].end == fixes[expected[k].second].at);
        }
    }
}

TEST_CASE("detected stops are disjoint and long enough") {
    std::mt19937 rng(7202);
    const segmentation_params params{100.0, duration{300}, duration{600}};
    for (int iter = 0; iter < 150; ++iter) {
        const auto fixes = gen::random_fix_trace(rng, 150, params);
        const auto stops = detect_stops(fixes, params);
        for (std::size_t k = 0; k < stops.size(); ++k) {
            CHECK(stops[k].end - stops[k].begin >= params.min_dwell);
            if (k > 0) CHECK(stops[k].begin > stops[k - 1].end);
        }
    }
}

TEST_CASE("segment on a constructed stop-drive-stop trace") {
    const segmentation_params params{100.0, duration{300}, duration{600}};
    const geo_point a{36.8, 10.18};
    const geo_point b = gen::offset(a, 6000, 0);
    std::vector<gps_fix> fixes = fixes_at(a, 11, duration{60}); // 08:00..08:10 at a
    for (int i = 1; i <= 9; ++i) {                              // 08:11..08:19 driving
        fixes.push_back({"OBJ", t0 + duration{600 + 60 * i}, gen::offset(a, 600.0 * i, 0), "GPS"});
    }
    for (int i = 0; i <= 10; ++i) {                             // 08:20..08:30 at b
        fixes.push_back({"OBJ", t0 + duration{1200 + 60 * i}, b, "GPS"});
    }

    const auto report = segment(fixes, params);
    REQUIRE(report.traj.stops().size() == 2);
    REQUIRE(report.traj.moves().size() == 1);
    CHECK(report.trimmed_head == 0);
    CHECK(report.trimmed_tail == 0);
    CHECK(report.anomalies.empty());
    const auto& mv = report.traj.moves()[0];
    CHECK(mv.begin == t0 + duration{600});
    CHECK(mv.end == t0 + duration{1200});
    REQUIRE(mv.path.size() == 9); // exactly the drive fixes
    CHECK(mv.path.front().at == t0 + duration{660});
    CHECK(mv.path.back().at == t0 + duration{1140});

    SECTION("declared stop overlapping the first detected stop merges by union") {
        // manager already declared the halt two minutes before the GPS settles
        const std::vector<mission_event> events{
            {"OBJ", t0 - duration{120}, event_kind::depart_road, "PDA"},
            {"OBJ", t0 - duration{60}, event_kind::arrive_destination, "PDA"},
            {"OBJ", t0 + duration{600}, event_kind::depart_for_next_leg, "PDA"},
            {"OBJ", t0 + duration{1200}, event_kind::arrive_destination, "PDA"},
            {"OBJ", t0 + duration{1800}, event_kind::end_mission, "PDA"},
        };
        const auto merged = segment(fixes, params, events);
        REQUIRE(merged.traj.stops().size() == 2);
        CHECK(merged.traj.moves().size() == 1);
        CHECK(merged.traj.stops()[0].begin == t0 - duration{60}); // union of declared+detected
        CHECK(merged.traj.stops()[0].end == t0 + duration{600});
        CHECK(merged.traj.stops()[0].source == stop_source::declared);
        CHECK(merged.traj.stops()[1].source == stop_source::declared);
    }
}

TEST_CASE("segment with no detectable or declared stop") {
    const segmentation_params params{100.0, duration{300}, duration{600}};
    std::vector<gps_fix> fixes;
    for (int i = 0; i < 30; ++i) {
        fixes.push_back(
            {"OBJ", t0 + duration{60 * i}, gen::offset({36.8, 10.18}, 400.0 * i, 0), "GPS"});
    }
    CHECK_THROWS_AS(segment(fixes, params), no_stop_found_error);
    const std::vector<gps_fix> empty;
    CHECK_THROWS_AS(segment(empty, params), no_stop_found_error);
}

TEST_CASE("segment rejects unsorted input but dedups duplicates") {
    const segmentation_params params{100.0, duration{300}, duration{600}};
    auto fixes = fixes_at({36.8, 10.18}, 20, duration{60});
    SECTION("out of order is an error") {
        std::swap(fixes[3].at, fixes[4].at);
        CHECK_THROWS_AS(segment(fixes, params), unsorted_input_error);
    }
    SECTION("duplicates keep the first fix and are flagged") {
        fixes[5].at = fixes[4].at;
        fixes[5].position = gen::offset(fixes[4].position, 5000, 0); // would break the stop
        const auto report = segment(fixes, params);
        REQUIRE(report.traj.stops().size() == 1);
        REQUIRE(report.anomalies.size() == 1);
        CHECK(report.anomalies[0].kind == anomaly_kind::duplicate_timestamp);
    }
}

TEST_CASE("every trimmed-span fix lands in exactly one stop window or move path") {
    std::mt19937 rng(7203);
    const segmentation_params params{100.0, duration{300}, duration{600}};
    int segmented = 0;
    for (int iter = 0; iter < 200 || segmented < 60; ++iter) {
        REQUIRE(iter < 2000);
        const auto fixes = gen::random_fix_trace(rng, 150, params);
        std::optional<segmentation_report> report;
        try {
            report = segment(fixes, params);
        } catch (const no_stop_found_error&) {
            continue;
        }
        ++segmented;
        for (const auto& f : fixes) {
            if (f.at < report->traj.begin_time() || f.at > report->traj.end_time()) continue;
            int owners = 0;
            for (const auto& s : report->traj.stops()) {
                if (f.at >= s.begin && f.at <= s.end) ++owners;
            }
            for (const auto& m : report->traj.moves()) {
                for (const auto& p : m.path) {
                    if (p.at == f.at) ++owners;
                }
            }
            CHECK(owners == 1);
        }
    }
}

TEST_CASE("segmentation is deterministic byte-for-byte") {
    std::mt19937 rng(7204);
    const segmentation_params params{100.0, duration{300}, duration{600}};
    for (int iter = 0; iter < 40; ++iter) {
        const auto sc = gen::random_mission(rng);
        const auto once = segment(sc.fixes, sc.params, sc.events);
        const auto twice = segment(sc.fixes, sc.params, sc.events);
        const trajectory_provenance prov{params, {}, once.trimmed_head, once.trimmed_tail,
                                         once.anomalies};
        CHECK(trajectory_to_json({once.traj, prov}) ==
              trajectory_to_json({twice.traj, prov}));
    }
}

TEST_CASE("declared-only stops: events with no immobile GPS evidence") {
    const segmentation_params params{100.0, duration{300}, duration{600}};
    // driving the whole time, but the manager declares one destination halt
    std::vector<gps_fix> fixes;
    for (int i = 0; i <= 40; ++i) {
        fixes.push_back(
            {"OBJ", t0 + duration{60 * i}, gen::offset({36.8, 10.18}, 400.0 * i, 0), "GPS"});
    }
    const std::vector<mission_event> events{
        {"OBJ", t0, event_kind::depart_road, "PDA"},
        {"OBJ", t0 + duration{600}, event_kind::arrive_destination, "PDA"},
        {"OBJ", t0 + duration{1200}, event_kind::depart_for_next_leg, "PDA"},
        {"OBJ", t0 + duration{1800}, event_kind::arrive_destination, "PDA"},
        {"OBJ", t0 + duration{2400}, event_kind::end_mission, "PDA"},
    };
    const auto report = segment(fixes, params, events);
    REQUIRE(report.traj.stops().size() == 2);
    CHECK(report.traj.stops()[0].source == stop_source::declared);
    CHECK(report.traj.stops()[0].begin == t0 + duration{600});
    CHECK(report.traj.stops()[0].end == t0 + duration{1200});
    CHECK(report.traj.moves().size() == 1);
}
