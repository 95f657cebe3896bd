#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "trajkit/errors.hpp"

namespace trajkit {

inline constexpr double earth_radius_m = 6'371'000.0;
inline constexpr double deg_to_rad = std::numbers::pi / 180.0;
/// Meters per degree of latitude on the reference sphere.
inline constexpr double meters_per_degree = earth_radius_m * deg_to_rad;

/// A WGS84-style position. Latitude in [-90, 90]; longitude normalized
/// into (-180, 180] at construction.
class geo_point {
public:
    geo_point(double lat, double lon) : lat_(lat), lon_(lon) {
        if (!std::isfinite(lat) || !std::isfinite(lon)) {
            throw value_error("coordinates must be finite");
        }
        if (lat < -90.0 || lat > 90.0) {
            throw value_error("latitude out of range: " + std::to_string(lat));
        }
        lon_ = std::fmod(lon_, 360.0);
        if (lon_ > 180.0) lon_ -= 360.0;
        if (lon_ <= -180.0) lon_ += 360.0;
    }

    double lat() const { return lat_; }
    double lon() const { return lon_; }

    friend bool operator==(const geo_point&, const geo_point&) = default;

private:
    double lat_;
    double lon_;
};

/// Great-circle distance in meters on a sphere of radius earth_radius_m.
inline double haversine_distance(const geo_point& a, const geo_point& b) {
    const double phi1 = a.lat() * deg_to_rad;
    const double phi2 = b.lat() * deg_to_rad;
    const double dphi = (b.lat() - a.lat()) * deg_to_rad;
    const double dlambda = (b.lon() - a.lon()) * deg_to_rad;
    const double s = std::sin(dphi / 2.0);
    const double t = std::sin(dlambda / 2.0);
    const double h = s * s + std::cos(phi1) * std::cos(phi2) * t * t;
    return 2.0 * earth_radius_m * std::asin(std::min(1.0, std::sqrt(h)));
}

namespace detail {

/// Local equirectangular frame: planar meters about a reference latitude.
struct planar_point {
    double x;
    double y;
};

inline planar_point project(const geo_point& p, double ref_lat_deg) {
    const double k = std::cos(ref_lat_deg * deg_to_rad);
    return {p.lon() * k * meters_per_degree, p.lat() * meters_per_degree};
}

inline double cross(const planar_point& o, const planar_point& a, const planar_point& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

inline int orientation(const planar_point& o, const planar_point& a, const planar_point& b) {
    const double c = cross(o, a, b);
    if (c > 0.0) return 1;
    if (c < 0.0) return -1;
    return 0;
}

// q within the bounding box of segment ab; only meaningful when collinear.
inline bool on_segment(const planar_point& a, const planar_point& b, const planar_point& q) {
    return std::min(a.x, b.x) <= q.x && q.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= q.y && q.y <= std::max(a.y, b.y);
}

inline bool segments_intersect_planar(const planar_point& p1, const planar_point& p2,
                                      const planar_point& q1, const planar_point& q2) {
    const int o1 = orientation(p1, p2, q1);
    const int o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1);
    const int o4 = orientation(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

inline double point_segment_distance_planar(const planar_point& p, const planar_point& a,
                                            const planar_point& b) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const double len2 = dx * dx + dy * dy;
    double t = 0.0;
    if (len2 > 0.0) {
        t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
        t = std::clamp(t, 0.0, 1.0);
    }
    const double ex = a.x + t * dx - p.x;
    const double ey = a.y + t * dy - p.y;
    return std::sqrt(ex * ex + ey * ey);
}

inline double segment_distance_planar(const planar_point& a1, const planar_point& a2,
                                      const planar_point& b1, const planar_point& b2) {
    if (segments_intersect_planar(a1, a2, b1, b2)) return 0.0;
    return std::min({point_segment_distance_planar(a1, b1, b2),
                     point_segment_distance_planar(a2, b1, b2),
                     point_segment_distance_planar(b1, a1, a2),
                     point_segment_distance_planar(b2, a1, a2)});
}

// Reference latitude independent of argument order, so the symmetric
// predicates built on the projection stay exactly symmetric.
inline double midrange_lat(std::initializer_list<double> lats) {
    return (std::min(lats) + std::max(lats)) / 2.0;
}

} // namespace detail

/// Straight-segment intersection in the local equirectangular frame about
/// the segments' mean latitude. Endpoint touching and collinear overlap count.
inline bool segments_intersect(const geo_point& p1, const geo_point& p2, const geo_point& q1,
                               const geo_point& q2) {
    const double ref = detail::midrange_lat({p1.lat(), p2.lat(), q1.lat(), q2.lat()});
    return detail::segments_intersect_planar(detail::project(p1, ref), detail::project(p2, ref),
                                             detail::project(q1, ref), detail::project(q2, ref));
}

/// Shortest distance in meters between two segments, zero when they touch.
inline double segment_distance_m(const geo_point& a1, const geo_point& a2, const geo_point& b1,
                                 const geo_point& b2) {
    const double ref = detail::midrange_lat({a1.lat(), a2.lat(), b1.lat(), b2.lat()});
    return detail::segment_distance_planar(detail::project(a1, ref), detail::project(a2, ref),
                                           detail::project(b1, ref), detail::project(b2, ref));
}

inline double point_segment_distance_m(const geo_point& p, const geo_point& a, const geo_point& b) {
    const double ref = detail::midrange_lat({p.lat(), a.lat(), b.lat()});
    return detail::point_segment_distance_planar(detail::project(p, ref), detail::project(a, ref),
                                                 detail::project(b, ref));
}

/// A polygonal sector of interest. The ring is a simple closed polygon given
/// as >= 3 vertices without the closing duplicate; area must be non-zero.
class region {
public:
    region(std::string id, std::vector<geo_point> ring) : id_(std::move(id)), ring_(std::move(ring)) {
        validate();
    }

    const std::string& id() const { return id_; }
    const std::vector<geo_point>& ring() const { return ring_; }

    /// Mean ring latitude; the reference for every planar operation on this
    /// region, so classifications do not depend on the query point.
    double ref_lat() const { return ref_lat_; }

    friend bool operator==(const region&, const region&) = default;

private:
    void validate() {
        const std::size_t n = ring_.size();
        if (n < 3) throw value_error("region ring needs at least 3 vertices");
        if (ring_.front() == ring_.back()) {
            throw value_error("region ring must not repeat the first vertex");
        }
        double lat_sum = 0.0;
        for (const auto& p : ring_) lat_sum += p.lat();
        ref_lat_ = lat_sum / static_cast<double>(n);

        std::vector<detail::planar_point> pts;
        pts.reserve(n);
        for (const auto& p : ring_) pts.push_back(detail::project(p, ref_lat_));

        double area2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& a = pts[i];
            const auto& b = pts[(i + 1) % n];
            if (a.x == b.x && a.y == b.y) throw value_error("region ring has a zero-length edge");
            area2 += a.x * b.y - b.x * a.y;
        }
        if (area2 == 0.0) throw value_error("region ring has zero area");

        for (std::size_t i = 0; i < n; ++i) {
            const auto& a1 = pts[i];
            const auto& a2 = pts[(i + 1) % n];
            for (std::size_t j = i + 1; j < n; ++j) {
                const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
                const auto& b1 = pts[j];
                const auto& b2 = pts[(j + 1) % n];
                if (adjacent) {
                    // Consecutive edges may only share their common vertex;
                    // a collinear doubling-back makes the ring non-simple.
                    const auto& shared = j == i + 1 ? a2 : a1;
                    const auto& tail = j == i + 1 ? a1 : a2;
                    const auto& head = j == i + 1 ? b2 : b1;
                    if (detail::orientation(tail, shared, head) == 0 &&
                        ((tail.x - shared.x) * (head.x - shared.x) +
                         (tail.y - shared.y) * (head.y - shared.y)) > 0.0) {
                        throw value_error("region ring doubles back on itself");
                    }
                    continue;
                }
                if (detail::segments_intersect_planar(a1, a2, b1, b2)) {
                    throw value_error("region ring is self-intersecting");
                }
            }
        }
    }

    std::string id_;
    std::vector<geo_point> ring_;
    double ref_lat_ = 0.0;
};

/// True when p lies strictly inside r or on its boundary.
inline bool point_in_region(const geo_point& p, const region& r) {
    const double ref = r.ref_lat();
    const auto q = detail::project(p, ref);
    const auto& ring = r.ring();
    const std::size_t n = ring.size();

    std::vector<detail::planar_point> pts;
    pts.reserve(n);
    for (const auto& v : ring) pts.push_back(detail::project(v, ref));

    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = pts[i];
        const auto& b = pts[(i + 1) % n];
        if (detail::orientation(a, b, q) == 0 && detail::on_segment(a, b, q)) return true;
    }

    // Ray-crossing parity, robust against vertices on the ray.
    bool inside = false;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = pts[i];
        const auto& b = pts[(i + 1) % n];
        if ((a.y > q.y) != (b.y > q.y)) {
            const double x_at = a.x + (q.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (q.x < x_at) inside = !inside;
        }
    }
    return inside;
}

} // namespace trajkit
