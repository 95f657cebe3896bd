#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

#include "trajkit/errors.hpp"
#include "trajkit/geo.hpp"
#include "trajkit/trajectory.hpp"

namespace trajkit {

struct relation_params {
    relation_params() = default;
    relation_params(double near_threshold_m, double equal_tolerance_m, double bypass_margin_m)
        : near_threshold_m(near_threshold_m),
          equal_tolerance_m(equal_tolerance_m),
          bypass_margin_m(bypass_margin_m) {
        validate();
    }

    void validate() const {
        if (!(near_threshold_m > 0.0)) throw value_error("near_threshold must be positive");
        if (!(equal_tolerance_m > 0.0)) throw value_error("equal_tolerance must be positive");
        if (!(bypass_margin_m > 0.0)) throw value_error("bypass_margin must be positive");
        if (equal_tolerance_m > near_threshold_m) {
            throw value_error("equal_tolerance must not exceed near_threshold");
        }
    }

    double near_threshold_m = 500.0;
    double equal_tolerance_m = 50.0;
    double bypass_margin_m = 500.0;
};

namespace detail {

struct footprint_segment {
    geo_point a;
    geo_point b;
};

// A single-point footprint becomes one degenerate segment so every
// predicate below stays total.
inline std::vector<footprint_segment> footprint_segments(const std::vector<geo_point>& polyline) {
    std::vector<footprint_segment> out;
    if (polyline.empty()) return out;
    if (polyline.size() == 1) {
        out.push_back({polyline[0], polyline[0]});
        return out;
    }
    for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
        out.push_back({polyline[i], polyline[i + 1]});
    }
    return out;
}

} // namespace detail

/// Minimum distance in meters between two footprints (polylines).
inline double footprint_min_distance_m(const std::vector<geo_point>& f1,
                                       const std::vector<geo_point>& f2) {
    const auto s1 = detail::footprint_segments(f1);
    const auto s2 = detail::footprint_segments(f2);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& a : s1) {
        for (const auto& b : s2) {
            best = std::min(best, segment_distance_m(a.a, a.b, b.a, b.b));
            if (best == 0.0) return 0.0;
        }
    }
    return best;
}

/// Symmetric discrete Hausdorff distance over footprint vertices.
inline double footprint_hausdorff_m(const std::vector<geo_point>& f1,
                                    const std::vector<geo_point>& f2) {
    const auto directed = [](const std::vector<geo_point>& from, const std::vector<geo_point>& to) {
        double worst = 0.0;
        for (const auto& p : from) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : to) best = std::min(best, haversine_distance(p, q));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(f1, f2), directed(f2, f1));
}

/// Purely spatial, time-agnostic: true iff the footprints share a point.
inline bool intersects(const trajectory& t1, const trajectory& t2) {
    const auto s1 = detail::footprint_segments(spatial_footprint(t1));
    const auto s2 = detail::footprint_segments(spatial_footprint(t2));
    for (const auto& a : s1) {
        for (const auto& b : s2) {
            if (segments_intersect(a.a, a.b, b.a, b.b)) return true;
        }
    }
    return false;
}

/// Spatial coincidence within tolerance (discrete Hausdorff).
inline bool equal(const trajectory& t1, const trajectory& t2,
                  const relation_params& params = {}) {
    params.validate();
    return footprint_hausdorff_m(spatial_footprint(t1), spatial_footprint(t2)) <=
           params.equal_tolerance_m;
}

inline bool near(const trajectory& t1, const trajectory& t2, const relation_params& params = {}) {
    params.validate();
    return footprint_min_distance_m(spatial_footprint(t1), spatial_footprint(t2)) <=
           params.near_threshold_m;
}

/// Far is the complement of near under the shared threshold.
inline bool far(const trajectory& t1, const trajectory& t2, const relation_params& params = {}) {
    return !near(t1, t2, params);
}

struct region_relation_set {
    bool stay_within = false;
    bool bypass = false;
    bool leave = false;
    bool enter = false;
    bool cross = false;
    std::size_t crossings = 0; // boundary transitions along the footprint

    friend bool operator==(const region_relation_set&, const region_relation_set&) = default;
};

namespace detail {

/// Inside/outside statuses encountered along a footprint, refined so that a
/// segment passing through the region contributes its interior statuses even
/// when both endpoints are outside. Boundary points count as inside.
inline std::vector<bool> inside_sequence(const std::vector<geo_point>& footprint, const region& r) {
    std::vector<bool> seq;
    if (footprint.empty()) return seq;
    const double ref = r.ref_lat();
    const auto& ring = r.ring();
    std::vector<planar_point> ring_p;
    ring_p.reserve(ring.size());
    for (const auto& v : ring) ring_p.push_back(project(v, ref));

    seq.push_back(point_in_region(footprint.front(), r));
    for (std::size_t i = 0; i + 1 < footprint.size(); ++i) {
        const geo_point& a = footprint[i];
        const geo_point& b = footprint[i + 1];
        const planar_point pa = project(a, ref);
        const planar_point pb = project(b, ref);
        const double dx = pb.x - pa.x;
        const double dy = pb.y - pa.y;
        const double len2 = dx * dx + dy * dy;

        // Parameters of the crossings of this segment with the ring edges.
        std::vector<double> cuts;
        if (len2 > 0.0) {
            for (std::size_t e = 0; e < ring_p.size(); ++e) {
                const planar_point& ea = ring_p[e];
                const planar_point& eb = ring_p[(e + 1) % ring_p.size()];
                const double rx = eb.x - ea.x;
                const double ry = eb.y - ea.y;
                const double denom = dx * ry - dy * rx;
                if (denom == 0.0) continue; // parallel or collinear: no proper crossing
                const double t = ((ea.x - pa.x) * ry - (ea.y - pa.y) * rx) / denom;
                const double u = ((ea.x - pa.x) * dy - (ea.y - pa.y) * dx) / denom;
                if (t > 0.0 && t < 1.0 && u >= 0.0 && u <= 1.0) cuts.push_back(t);
            }
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.push_back(1.0);
        double prev = 0.0;
        for (const double t : cuts) {
            if (t > prev) {
                const double mid = (prev + t) / 2.0;
                // Probe the open span between crossings at its midpoint.
                const geo_point probe(a.lat() + (b.lat() - a.lat()) * mid,
                                      a.lon() + (b.lon() - a.lon()) * mid);
                seq.push_back(point_in_region(probe, r));
            }
            prev = t;
        }
        seq.push_back(point_in_region(b, r));
    }
    return seq;
}

} // namespace detail

/// Classify a trajectory against a sector of interest following the
/// inside/outside sequence of its footprint.
inline region_relation_set region_relation(const trajectory& t, const region& r,
                                           const relation_params& params = {}) {
    params.validate();
    const auto footprint = spatial_footprint(t);
    const auto seq = detail::inside_sequence(footprint, r);

    region_relation_set out;
    bool any_inside = false;
    bool all_inside = true;
    bool enter_seen = false;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        any_inside |= seq[i];
        all_inside &= seq[i];
        if (i == 0) continue;
        if (seq[i] == seq[i - 1]) continue;
        ++out.crossings;
        if (seq[i]) {
            out.enter = true;
            enter_seen = true;
        } else {
            out.leave = true;
            if (enter_seen) out.cross = true; // entered earlier, leaving now
        }
    }
    out.stay_within = !seq.empty() && all_inside;
    if (!any_inside && !seq.empty()) {
        std::vector<geo_point> boundary = r.ring();
        boundary.push_back(r.ring().front());
        out.bypass = footprint_min_distance_m(footprint, boundary) <= params.bypass_margin_m;
    }
    return out;
}

} // namespace trajkit
