#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "trajkit/errors.hpp"
#include "trajkit/geo.hpp"
#include "trajkit/time.hpp"

namespace trajkit {

enum class stop_source { detected, declared };

inline const char* to_string(stop_source s) {
    return s == stop_source::detected ? "detected" : "declared";
}

/// An interval during which the object is immobile, with a single
/// representative position (the centroid of its member fixes).
struct stop {
    stop(std::string id, std::string object_id, timestamp begin, timestamp end, geo_point position,
         stop_source source)
        : id(std::move(id)),
          object_id(std::move(object_id)),
          begin(begin),
          end(end),
          position(position),
          source(source) {
        if (end <= begin) throw value_error("stop '" + this->id + "' has an empty time interval");
    }

    std::string id;
    std::string object_id;
    timestamp begin;
    timestamp end;
    geo_point position;
    stop_source source;

    friend bool operator==(const stop&, const stop&) = default;
};

struct path_sample {
    timestamp at;
    geo_point position;

    friend bool operator==(const path_sample&, const path_sample&) = default;
};

/// The movement between two successive stops, carrying the sampled path.
struct move {
    move(std::string id, std::string object_id, timestamp begin, timestamp end,
         geo_point begin_position, geo_point end_position, std::vector<path_sample> path)
        : id(std::move(id)),
          object_id(std::move(object_id)),
          begin(begin),
          end(end),
          begin_position(begin_position),
          end_position(end_position),
          path(std::move(path)) {
        if (end <= begin) throw value_error("move '" + this->id + "' has an empty time interval");
        for (std::size_t i = 0; i < this->path.size(); ++i) {
            const auto& s = this->path[i];
            if (s.at < begin || s.at > end) {
                throw value_error("move '" + this->id + "' has a path sample outside [begin, end]");
            }
            if (i > 0 && this->path[i - 1].at >= s.at) {
                throw value_error("move '" + this->id + "' path timestamps must strictly increase");
            }
        }
        if (!this->path.empty()) {
            if (this->path.front().position != begin_position ||
                this->path.back().position != end_position) {
                throw value_error("move '" + this->id +
                                  "' path endpoints must match begin/end positions");
            }
        }
    }

    std::string id;
    std::string object_id;
    timestamp begin;
    timestamp end;
    geo_point begin_position;
    geo_point end_position;
    std::vector<path_sample> path;

    friend bool operator==(const move&, const move&) = default;
};

struct trajectory_section {
    std::size_t index;
    stop start_stop;
    move mv;
    stop end_stop;
};

/// A travel in space and time: an alternating, gap-free sequence
/// stop, move, stop, ..., stop. Immutable once built.
class trajectory {
public:
    const std::string& id() const { return id_; }
    const std::string& object_id() const { return object_id_; }
    timestamp begin_time() const { return begin_; }
    timestamp end_time() const { return end_; }
    duration total_duration() const { return duration_; }
    const std::vector<stop>& stops() const { return stops_; }
    const std::vector<move>& moves() const { return moves_; }

    friend bool operator==(const trajectory&, const trajectory&) = default;

    friend trajectory build_trajectory(std::string object_id, std::vector<stop> stops,
                                       std::vector<move> moves, std::string id);

private:
    trajectory() = default;

    std::string id_;
    std::string object_id_;
    timestamp begin_{};
    timestamp end_{};
    duration duration_{};
    std::vector<stop> stops_;
    std::vector<move> moves_;
};

/// Validates alternation and exact temporal adjacency, then assembles the
/// trajectory. Inputs must be sorted by begin time.
inline trajectory build_trajectory(std::string object_id, std::vector<stop> stops,
                                   std::vector<move> moves, std::string id = {}) {
    if (stops.empty()) throw empty_trajectory_error("a trajectory needs at least one stop");
    if (moves.size() != stops.size() - 1) {
        throw alternation_error("expected " + std::to_string(stops.size() - 1) + " moves for " +
                                std::to_string(stops.size()) + " stops, got " +
                                std::to_string(moves.size()));
    }
    for (const auto& s : stops) {
        if (s.object_id != object_id) {
            throw mixed_object_error("stop '" + s.id + "' belongs to object '" + s.object_id + "'");
        }
    }
    for (const auto& m : moves) {
        if (m.object_id != object_id) {
            throw mixed_object_error("move '" + m.id + "' belongs to object '" + m.object_id + "'");
        }
    }
    // The begin of each move is the end of the previous stop, and vice versa.
    for (std::size_t i = 0; i < moves.size(); ++i) {
        if (moves[i].begin != stops[i].end) {
            throw temporal_gap_error("move '" + moves[i].id + "' does not begin when stop '" +
                                     stops[i].id + "' ends");
        }
        if (moves[i].end != stops[i + 1].begin) {
            throw temporal_gap_error("stop '" + stops[i + 1].id + "' does not begin when move '" +
                                     moves[i].id + "' ends");
        }
    }

    trajectory t;
    t.object_id_ = std::move(object_id);
    t.id_ = id.empty() ? t.object_id_ + ":trajectory" : std::move(id);
    t.begin_ = stops.front().begin;
    t.end_ = stops.back().end;
    t.duration_ = t.end_ - t.begin_;
    t.stops_ = std::move(stops);
    t.moves_ = std::move(moves);
    return t;
}

/// The |stops| - 1 (stop, move, stop) triples composing the trajectory.
inline std::vector<trajectory_section> sections(const trajectory& t) {
    std::vector<trajectory_section> out;
    out.reserve(t.moves().size());
    for (std::size_t i = 0; i < t.moves().size(); ++i) {
        out.push_back({i, t.stops()[i], t.moves()[i], t.stops()[i + 1]});
    }
    return out;
}

/// Purely spatial polyline: stop positions and move paths in temporal order,
/// consecutive duplicates collapsed.
inline std::vector<geo_point> spatial_footprint(const trajectory& t) {
    std::vector<geo_point> out;
    const auto push = [&out](const geo_point& p) {
        if (out.empty() || !(out.back() == p)) out.push_back(p);
    };
    for (std::size_t i = 0; i < t.stops().size(); ++i) {
        push(t.stops()[i].position);
        if (i < t.moves().size()) {
            for (const auto& s : t.moves()[i].path) push(s.position);
        }
    }
    return out;
}

} // namespace trajkit
