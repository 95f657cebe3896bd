// Independent reference implementations the real code is checked against.
// Everything here favors directness over speed.
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "trajkit/geo.hpp"
#include "trajkit/relations.hpp"
#include "trajkit/segmentation.hpp"

namespace oracles {

/// Winding-number point-in-polygon with an explicit boundary check, in the
/// region's own projection frame.
inline bool winding_inside(const trajkit::geo_point& p, const trajkit::region& r) {
    using trajkit::detail::planar_point;
    const double ref = r.ref_lat();
    const planar_point q = trajkit::detail::project(p, ref);
    std::vector<planar_point> ring;
    for (const auto& v : r.ring()) ring.push_back(trajkit::detail::project(v, ref));

    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = ring[i];
        const auto& b = ring[(i + 1) % n];
        if (trajkit::detail::orientation(a, b, q) == 0 && trajkit::detail::on_segment(a, b, q)) {
            return true;
        }
    }
    int winding = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = ring[i];
        const auto& b = ring[(i + 1) % n];
        if (a.y <= q.y) {
            if (b.y > q.y && trajkit::detail::orientation(a, b, q) > 0) ++winding;
        } else {
            if (b.y <= q.y && trajkit::detail::orientation(a, b, q) < 0) --winding;
        }
    }
    return winding != 0;
}

/// Every-window stop detector: enumerates all (i, j) candidate windows with
/// direct criteria checks, then keeps maximal windows left to right.
inline std::vector<std::pair<std::size_t, std::size_t>> stop_windows(
    const std::vector<trajkit::gps_fix>& fixes, const trajkit::segmentation_params& params) {
    const std::size_t n = fixes.size();
    const auto window_valid = [&](std::size_t i, std::size_t j) {
        if (fixes[j].at - fixes[i].at < params.min_dwell) return false;
        double lat = 0.0, lon = 0.0;
        for (std::size_t k = i; k <= j; ++k) {
            lat += fixes[k].position.lat();
            lon += fixes[k].position.lon();
        }
        const trajkit::geo_point c{lat / static_cast<double>(j - i + 1),
                                   lon / static_cast<double>(j - i + 1)};
        for (std::size_t k = i; k <= j; ++k) {
            if (trajkit::haversine_distance(fixes[k].position, c) > params.stop_radius_m) {
                return false;
            }
        }
        return true;
    };

    std::vector<std::pair<std::size_t, std::size_t>> valid;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            if (window_valid(i, j)) valid.emplace_back(i, j);
        }
    }

    std::vector<std::pair<std::size_t, std::size_t>> kept;
    std::size_t next_start = 0;
    while (true) {
        const std::pair<std::size_t, std::size_t>* pick = nullptr;
        for (const auto& w : valid) {
            if (w.first < next_start) continue;
            if (!pick || w.first < pick->first ||
                (w.first == pick->first && w.second > pick->second)) {
                pick = &w;
            }
        }
        if (!pick) break;
        kept.push_back(*pick);
        next_start = pick->second + 1;
    }
    return kept;
}

/// All-pairs polyline intersection.
inline bool footprints_intersect(const std::vector<trajkit::geo_point>& f1,
                                 const std::vector<trajkit::geo_point>& f2) {
    const auto seg = [](const std::vector<trajkit::geo_point>& f, std::size_t i) {
        return f.size() == 1 ? std::pair{f[0], f[0]} : std::pair{f[i], f[i + 1]};
    };
    const std::size_t n1 = f1.size() == 1 ? 1 : f1.size() - 1;
    const std::size_t n2 = f2.size() == 1 ? 1 : f2.size() - 1;
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
            const auto [a1, a2] = seg(f1, i);
            const auto [b1, b2] = seg(f2, j);
            if (trajkit::segments_intersect(a1, a2, b1, b2)) return true;
        }
    }
    return false;
}

inline double min_distance(const std::vector<trajkit::geo_point>& f1,
                           const std::vector<trajkit::geo_point>& f2) {
    const auto seg = [](const std::vector<trajkit::geo_point>& f, std::size_t i) {
        return f.size() == 1 ? std::pair{f[0], f[0]} : std::pair{f[i], f[i + 1]};
    };
    const std::size_t n1 = f1.size() == 1 ? 1 : f1.size() - 1;
    const std::size_t n2 = f2.size() == 1 ? 1 : f2.size() - 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
            const auto [a1, a2] = seg(f1, i);
            const auto [b1, b2] = seg(f2, j);
            best = std::min(best, trajkit::segment_distance_m(a1, a2, b1, b2));
        }
    }
    return best;
}

inline double hausdorff(const std::vector<trajkit::geo_point>& f1,
                        const std::vector<trajkit::geo_point>& f2) {
    double worst = 0.0;
    for (const auto& p : f1) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : f2) best = std::min(best, trajkit::haversine_distance(p, q));
        worst = std::max(worst, best);
    }
    for (const auto& q : f2) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : f1) best = std::min(best, trajkit::haversine_distance(p, q));
        worst = std::max(worst, best);
    }
    return worst;
}

/// Dense sampling along the footprint (at most step_m between probes) and
/// flag derivation straight from the inside/outside sample sequence.
struct sampled_region_relation {
    bool stay_within = false;
    bool bypass = false;
    bool leave = false;
    bool enter = false;
    bool cross = false;
    std::size_t crossings = 0;
};

inline sampled_region_relation dense_region_relation(const std::vector<trajkit::geo_point>& footprint,
                                                     const trajkit::region& r, double bypass_margin_m,
                                                     double step_m = 1.0) {
    sampled_region_relation out;
    std::vector<bool> seq;
    for (std::size_t i = 0; i < footprint.size(); ++i) {
        if (i + 1 < footprint.size()) {
            const auto& a = footprint[i];
            const auto& b = footprint[i + 1];
            const double len = trajkit::haversine_distance(a, b);
            const auto steps = static_cast<std::size_t>(std::ceil(len / step_m)) + 1;
            for (std::size_t s = 0; s < steps; ++s) {
                const double t = static_cast<double>(s) / static_cast<double>(steps);
                const trajkit::geo_point probe(a.lat() + (b.lat() - a.lat()) * t,
                                               a.lon() + (b.lon() - a.lon()) * t);
                seq.push_back(trajkit::point_in_region(probe, r));
            }
        } else {
            seq.push_back(trajkit::point_in_region(footprint[i], r));
        }
    }
    bool any = false, all = true, enter_seen = false;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        any |= seq[i];
        all &= seq[i];
        if (i == 0 || seq[i] == seq[i - 1]) continue;
        ++out.crossings;
        if (seq[i]) {
            out.enter = true;
            enter_seen = true;
        } else {
            out.leave = true;
            if (enter_seen) out.cross = true;
        }
    }
    out.stay_within = !seq.empty() && all;
    if (!any && !seq.empty()) {
        std::vector<trajkit::geo_point> boundary = r.ring();
        boundary.push_back(r.ring().front());
        out.bypass = min_distance(footprint, boundary) <= bypass_margin_m;
    }
    return out;
}

} // namespace oracles
