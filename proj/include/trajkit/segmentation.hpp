#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "trajkit/errors.hpp"
#include "trajkit/geo.hpp"
#include "trajkit/state_machine.hpp"
#include "trajkit/time.hpp"
#include "trajkit/trajectory.hpp"

namespace trajkit {

/// One timestamped position report from a moving object's GPS unit.
struct gps_fix {
    std::string object_id;
    timestamp at;
    geo_point position;
    std::string device_id; // may be empty

    friend bool operator==(const gps_fix&, const gps_fix&) = default;
};

struct segmentation_params {
    segmentation_params() = default;
    segmentation_params(double stop_radius_m, duration min_dwell, duration max_fix_gap)
        : stop_radius_m(stop_radius_m), min_dwell(min_dwell), max_fix_gap(max_fix_gap) {
        validate();
    }

    void validate() const {
        if (!(stop_radius_m > 0.0)) throw value_error("stop_radius must be positive");
        if (min_dwell <= duration::zero()) throw value_error("min_dwell must be positive");
        if (max_fix_gap <= duration::zero()) throw value_error("max_fix_gap must be positive");
    }

    double stop_radius_m = 100.0;
    duration min_dwell{300};
    duration max_fix_gap{600};
};

enum class anomaly_kind { out_of_order, duplicate_timestamp, gap };

inline const char* to_string(anomaly_kind k) {
    switch (k) {
        case anomaly_kind::out_of_order: return "out_of_order";
        case anomaly_kind::duplicate_timestamp: return "duplicate_timestamp";
        case anomaly_kind::gap: return "gap";
    }
    return "?";
}

struct anomaly {
    anomaly_kind kind;
    timestamp at;

    friend bool operator==(const anomaly&, const anomaly&) = default;
};

struct segmentation_report {
    trajectory traj;
    std::size_t trimmed_head = 0; // fixes dropped before the first stop
    std::size_t trimmed_tail = 0; // fixes dropped after the last stop
    std::vector<anomaly> anomalies;
};

/// Flags out-of-order timestamps, duplicate timestamps, and gaps larger than
/// max_fix_gap. Never mutates or rejects the input.
inline std::vector<anomaly> validate_fix_stream(std::span<const gps_fix> fixes,
                                                duration max_fix_gap) {
    std::vector<anomaly> out;
    for (std::size_t i = 1; i < fixes.size(); ++i) {
        const timestamp prev = fixes[i - 1].at;
        const timestamp cur = fixes[i].at;
        if (cur < prev) {
            out.push_back({anomaly_kind::out_of_order, cur});
        } else if (cur == prev) {
            out.push_back({anomaly_kind::duplicate_timestamp, cur});
        } else if (cur - prev > max_fix_gap) {
            out.push_back({anomaly_kind::gap, prev});
        }
    }
    return out;
}

namespace detail {

inline void require_clean_stream(std::span<const gps_fix> fixes) {
    for (std::size_t i = 0; i < fixes.size(); ++i) {
        if (fixes[i].object_id != fixes.front().object_id) {
            throw mixed_object_error("fix " + std::to_string(i) + " belongs to object '" +
                                     fixes[i].object_id + "', expected '" +
                                     fixes.front().object_id + "'");
        }
        if (i > 0 && fixes[i].at <= fixes[i - 1].at) {
            throw unsorted_input_error("fix timestamps must strictly increase (violated at index " +
                                       std::to_string(i) + ")");
        }
    }
}

inline geo_point centroid(std::span<const gps_fix> fixes, std::size_t i, std::size_t j) {
    double lat = 0.0;
    double lon = 0.0;
    for (std::size_t k = i; k <= j; ++k) {
        lat += fixes[k].position.lat();
        lon += fixes[k].position.lon();
    }
    const auto n = static_cast<double>(j - i + 1);
    return {lat / n, lon / n};
}

/// Window [i, j] qualifies as a stop when it lasts at least min_dwell and
/// every member fix is within stop_radius of the window centroid.
inline bool stop_window_valid(std::span<const gps_fix> fixes, std::size_t i, std::size_t j,
                              const segmentation_params& params) {
    if (fixes[j].at - fixes[i].at < params.min_dwell) return false;
    const geo_point c = centroid(fixes, i, j);
    for (std::size_t k = i; k <= j; ++k) {
        if (haversine_distance(fixes[k].position, c) > params.stop_radius_m) return false;
    }
    return true;
}

struct stop_interval {
    timestamp begin;
    timestamp end;
    stop_source source;
};

} // namespace detail

/// Stay-point detection: greedy left-to-right scan emitting, for each start
/// index, the longest qualifying window, then resuming past it. Windows are
/// the maximal disjoint intervals satisfying the radius/dwell criteria.
inline std::vector<stop> detect_stops(std::span<const gps_fix> fixes,
                                      const segmentation_params& params) {
    params.validate();
    if (fixes.empty()) return {};
    detail::require_clean_stream(fixes);

    std::vector<stop> out;
    const std::size_t n = fixes.size();
    std::size_t i = 0;
    while (i < n) {
        std::optional<std::size_t> best;
        // Once two members are more than 2*radius apart no centroid can hold
        // them both, and that pair persists in every longer window; track the
        // extreme members and bail out when they spread too far.
        std::size_t min_lat_k = i, max_lat_k = i, min_lon_k = i, max_lon_k = i;
        for (std::size_t j = i; j < n; ++j) {
            const auto& p = fixes[j].position;
            if (p.lat() < fixes[min_lat_k].position.lat()) min_lat_k = j;
            if (p.lat() > fixes[max_lat_k].position.lat()) max_lat_k = j;
            if (p.lon() < fixes[min_lon_k].position.lon()) min_lon_k = j;
            if (p.lon() > fixes[max_lon_k].position.lon()) max_lon_k = j;
            if (haversine_distance(fixes[min_lat_k].position, fixes[max_lat_k].position) >
                    2.0 * params.stop_radius_m ||
                haversine_distance(fixes[min_lon_k].position, fixes[max_lon_k].position) >
                    2.0 * params.stop_radius_m) {
                break;
            }
            if (detail::stop_window_valid(fixes, i, j, params)) best = j;
        }
        if (best) {
            const std::size_t j = *best;
            out.emplace_back(fixes.front().object_id + ":stop:" + std::to_string(out.size()),
                             fixes.front().object_id, fixes[i].at, fixes[j].at,
                             detail::centroid(fixes, i, j), stop_source::detected);
            i = j + 1;
        } else {
            ++i;
        }
    }
    return out;
}

namespace detail {

/// Declared stop intervals are the destination halts of the event timeline.
/// An interval left open by the log is closed at the last fix time.
inline std::vector<stop_interval> declared_stop_intervals(std::span<const mission_event> events,
                                                          timestamp last_fix,
                                                          const transition_table& table) {
    std::vector<stop_interval> out;
    if (events.empty()) return out;
    const state_timeline tl = replay(events, events.front().at, table);
    for (const auto& e : tl.entries) {
        if (e.state != mission_state::stop_in_destination) continue;
        const timestamp end = e.end.value_or(last_fix);
        if (end > e.begin) out.push_back({e.begin, end, stop_source::declared});
    }
    return out;
}

/// Union-merge of overlapping or touching intervals; declared wins the
/// source flag of any merged interval.
inline std::vector<stop_interval> merge_intervals(std::vector<stop_interval> intervals) {
    std::sort(intervals.begin(), intervals.end(), [](const auto& a, const auto& b) {
        return a.begin != b.begin ? a.begin < b.begin : a.end < b.end;
    });
    std::vector<stop_interval> out;
    for (const auto& iv : intervals) {
        if (!out.empty() && iv.begin <= out.back().end) {
            out.back().end = std::max(out.back().end, iv.end);
            if (iv.source == stop_source::declared) out.back().source = stop_source::declared;
        } else {
            out.push_back(iv);
        }
    }
    return out;
}

inline geo_point interval_position(std::span<const gps_fix> fixes, timestamp begin, timestamp end) {
    double lat = 0.0;
    double lon = 0.0;
    std::size_t count = 0;
    for (const auto& f : fixes) {
        if (f.at >= begin && f.at <= end) {
            lat += f.position.lat();
            lon += f.position.lon();
            ++count;
        }
    }
    if (count > 0) return {lat / static_cast<double>(count), lon / static_cast<double>(count)};
    // A declared interval with no member fixes: fall back to the fix
    // nearest in time.
    const gps_fix* nearest = nullptr;
    duration best{0};
    for (const auto& f : fixes) {
        const duration gap = f.at < begin ? begin - f.at : (f.at > end ? f.at - end : duration{0});
        if (!nearest || gap < best) {
            nearest = &f;
            best = gap;
        }
    }
    return nearest->position;
}

} // namespace detail

/// Turns a raw single-object fix stream (plus optional declared events) into
/// a valid trajectory. Duplicate timestamps keep the first fix and are
/// flagged; leading/trailing fixes outside the first/last stop are trimmed
/// and counted.
inline segmentation_report segment(std::span<const gps_fix> fixes,
                                   const segmentation_params& params,
                                   std::span<const mission_event> declared_events = {},
                                   const transition_table& table = transition_table::standard()) {
    params.validate();
    if (fixes.empty()) throw no_stop_found_error("empty fix stream");

    std::vector<anomaly> anomalies;
    std::vector<gps_fix> clean;
    clean.reserve(fixes.size());
    for (std::size_t i = 0; i < fixes.size(); ++i) {
        if (fixes[i].object_id != fixes.front().object_id) {
            throw mixed_object_error("fix " + std::to_string(i) + " belongs to object '" +
                                     fixes[i].object_id + "'");
        }
        if (i > 0 && fixes[i].at < fixes[i - 1].at) {
            throw unsorted_input_error("fixes must be time-sorted (violated at index " +
                                       std::to_string(i) + ")");
        }
        if (!clean.empty() && fixes[i].at == clean.back().at) {
            anomalies.push_back({anomaly_kind::duplicate_timestamp, fixes[i].at});
            continue;
        }
        clean.push_back(fixes[i]);
    }
    for (std::size_t i = 1; i < clean.size(); ++i) {
        if (clean[i].at - clean[i - 1].at > params.max_fix_gap) {
            anomalies.push_back({anomaly_kind::gap, clean[i - 1].at});
        }
    }

    std::vector<detail::stop_interval> intervals;
    for (const auto& s : detect_stops(clean, params)) {
        intervals.push_back({s.begin, s.end, stop_source::detected});
    }
    for (const auto& iv :
         detail::declared_stop_intervals(declared_events, clean.back().at, table)) {
        intervals.push_back(iv);
    }
    intervals = detail::merge_intervals(std::move(intervals));
    if (intervals.empty()) {
        throw no_stop_found_error("no stop detectable or declared for object '" +
                                  clean.front().object_id + "'");
    }

    const std::string& object_id = clean.front().object_id;
    std::vector<stop> stops;
    stops.reserve(intervals.size());
    for (std::size_t k = 0; k < intervals.size(); ++k) {
        const auto& iv = intervals[k];
        stops.emplace_back(object_id + ":stop:" + std::to_string(k), object_id, iv.begin, iv.end,
                           detail::interval_position(clean, iv.begin, iv.end), iv.source);
    }

    std::vector<move> moves;
    moves.reserve(stops.size() - 1);
    for (std::size_t k = 0; k + 1 < stops.size(); ++k) {
        const timestamp mb = stops[k].end;
        const timestamp me = stops[k + 1].begin;
        std::vector<path_sample> path;
        for (const auto& f : clean) {
            if (f.at > mb && f.at < me) path.push_back({f.at, f.position});
        }
        const geo_point bp = path.empty() ? stops[k].position : path.front().position;
        const geo_point ep = path.empty() ? stops[k + 1].position : path.back().position;
        moves.emplace_back(object_id + ":move:" + std::to_string(k), object_id, mb, me, bp, ep,
                           std::move(path));
    }

    segmentation_report report{
        build_trajectory(object_id, std::move(stops), std::move(moves)), 0, 0, std::move(anomalies)};
    for (const auto& f : clean) {
        if (f.at < report.traj.begin_time()) ++report.trimmed_head;
        if (f.at > report.traj.end_time()) ++report.trimmed_tail;
    }
    return report;
}

} // namespace trajkit
