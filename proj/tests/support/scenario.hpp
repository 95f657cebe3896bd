// One script emits both artifacts of a mission (the PDA event log and the
// GPS fix stream), keeping them consistent by construction, so reconciling
// segment() output against replay() output must come back clean.
#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "generators.hpp"
#include "trajkit/segmentation.hpp"
#include "trajkit/state_machine.hpp"
#include "trajkit/time.hpp"

namespace gen {

struct mission_scenario {
    std::string object_id;
    std::vector<trajkit::gps_fix> fixes;
    std::vector<trajkit::mission_event> events;
    trajkit::timestamp start;
    trajkit::segmentation_params params;
};

/// Random mission: optional depot idle, 1-3 road legs at 10 m/s with optional
/// breakdowns, destination dwells >= min_dwell, optional roaming at the
/// destination. Events land exactly on the fix grid.
inline mission_scenario random_mission(rng_t& rng, const std::string& object_id = "MH-T") {
    mission_scenario sc;
    sc.object_id = object_id;
    sc.params = {};
    const trajkit::duration cadence{30};
    const double leg_speed = 10.0 * 30.0; // meters per fix interval

    std::uniform_int_distribution<int> legs_d(1, 3);
    std::uniform_int_distribution<int> coin(0, 1);
    std::uniform_int_distribution<int> idle_d(2, 14);       // ticks
    std::uniform_int_distribution<int> leg_len_d(8, 40);    // ticks
    std::uniform_int_distribution<int> dwell_d(11, 40);     // ticks (>= min_dwell/cadence + 1)
    std::uniform_int_distribution<int> halt_d(1, 2);        // short breakdown, <= tolerance
    std::uniform_int_distribution<int> long_halt_d(11, 20); // detectable breakdown
    std::uniform_real_distribution<double> dir_d(0.0, 2.0 * std::numbers::pi);

    sc.start = random_start(rng);
    trajkit::timestamp t = sc.start;
    trajkit::geo_point pos = random_point_near(rng, base_point, 500.0);
    double heading = dir_d(rng);

    const auto fix = [&] {
        sc.fixes.push_back({object_id, t, pos, "GPS"});
    };
    const auto event = [&](trajkit::event_kind kind) {
        sc.events.push_back({object_id, t, kind, "PDA"});
    };
    const auto tick = [&](bool moving, double speed) {
        if (moving) pos = offset(pos, speed * std::cos(heading), speed * std::sin(heading));
        t += cadence;
        fix();
    };

    fix();
    if (coin(rng)) {
        for (int i = idle_d(rng); i > 0; --i) tick(false, 0.0);
    }

    const int legs = legs_d(rng);
    for (int leg = 0; leg < legs; ++leg) {
        event(leg == 0 ? trajkit::event_kind::depart_road
                       : trajkit::event_kind::depart_for_next_leg);
        heading = dir_d(rng);
        int remaining = leg_len_d(rng);
        const bool with_breakdown = coin(rng) == 1;
        const int breakdown_after = remaining / 2;
        for (int i = 0; i < remaining; ++i) {
            if (with_breakdown && i == breakdown_after) {
                event(trajkit::event_kind::breakdown);
                const bool long_halt = coin(rng) == 1;
                for (int h = long_halt ? long_halt_d(rng) : halt_d(rng); h > 0; --h) {
                    tick(false, 0.0);
                }
                event(trajkit::event_kind::repaired);
            }
            tick(true, leg_speed);
        }

        event(trajkit::event_kind::arrive_destination);
        for (int i = dwell_d(rng); i > 0; --i) tick(false, 0.0);

        if (coin(rng)) {
            // roam around the destination and come back
            event(trajkit::event_kind::roam_destination);
            const int out_ticks = 4 + idle_d(rng) / 2;
            heading = dir_d(rng);
            for (int i = 0; i < out_ticks; ++i) tick(true, leg_speed);
            heading += std::numbers::pi;
            for (int i = 0; i < out_ticks; ++i) tick(true, leg_speed);
            event(trajkit::event_kind::halt_at_destination);
            for (int i = dwell_d(rng); i > 0; --i) tick(false, 0.0);
        }

        if (leg + 1 == legs) event(trajkit::event_kind::end_mission);
    }
    return sc;
}

} // namespace gen
