#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace aircov {

/// Coincidence / tangency tolerance for all planar geometry, in meters.
inline constexpr double kGeomEps = 1e-9;

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
    friend constexpr Point2 operator*(Point2 p, double s) { return {s * p.x, s * p.y}; }
    friend constexpr bool operator==(Point2 a, Point2 b) { return a.x == b.x && a.y == b.y; }
};

using Vec2 = Point2;

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
constexpr double norm_sq(Vec2 a) { return a.x * a.x + a.y * a.y; }
inline double distance(Point2 a, Point2 b) { return norm(b - a); }

inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Distance from point p to segment [a, b].
inline double point_segment_distance(Point2 p, Point2 a, Point2 b) {
    const Vec2 ab = b - a;
    const double len2 = norm_sq(ab);
    if (len2 <= 0.0) return distance(p, a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return distance(p, a + t * ab);
}

struct Circle {
    Point2 center;
    double radius = 0.0;
};

/// Compact convex region, vertices in counter-clockwise order.
class ConvexRegion {
public:
    explicit ConvexRegion(std::vector<Point2> vertices) : verts_(std::move(vertices)) {
        if (verts_.size() < 3) throw std::invalid_argument("ConvexRegion: need at least 3 vertices");
        const std::size_t n = verts_.size();
        for (std::size_t i = 0; i < n; ++i) {
            if (!is_finite(verts_[i])) throw std::invalid_argument("ConvexRegion: non-finite vertex");
            const Vec2 e0 = verts_[(i + 1) % n] - verts_[i];
            const Vec2 e1 = verts_[(i + 2) % n] - verts_[(i + 1) % n];
            if (cross(e0, e1) <= 0.0)
                throw std::invalid_argument("ConvexRegion: vertices must be strictly convex and CCW");
        }
        double a2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) a2 += cross(verts_[i], verts_[(i + 1) % n]);
        area_ = 0.5 * a2;
        if (area_ <= 0.0) throw std::invalid_argument("ConvexRegion: non-positive area");
    }

    const std::vector<Point2>& vertices() const { return verts_; }
    double area() const { return area_; }

    /// Inside or on the boundary, within kGeomEps of the supporting half-planes.
    bool contains(Point2 p) const {
        const std::size_t n = verts_.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point2 a = verts_[i];
            const Point2 b = verts_[(i + 1) % n];
            const Vec2 e = b - a;
            // signed distance of p left of edge, scaled by |e|
            if (cross(e, p - a) < -kGeomEps * norm(e)) return false;
        }
        return true;
    }

    /// Closest point of the region to p (p itself when already inside).
    Point2 project(Point2 p) const {
        if (contains(p)) return p;
        const std::size_t n = verts_.size();
        double best = std::numeric_limits<double>::infinity();
        Point2 best_p = verts_[0];
        for (std::size_t i = 0; i < n; ++i) {
            const Point2 a = verts_[i];
            const Point2 b = verts_[(i + 1) % n];
            const Vec2 ab = b - a;
            const double t = std::clamp(dot(p - a, ab) / norm_sq(ab), 0.0, 1.0);
            const Point2 q = a + t * ab;
            const double d = distance(p, q);
            if (d < best) {
                best = d;
                best_p = q;
            }
        }
        return best_p;
    }

    std::array<Point2, 2> bounding_box() const {
        Point2 lo = verts_[0], hi = verts_[0];
        for (const Point2& v : verts_) {
            lo.x = std::min(lo.x, v.x);
            lo.y = std::min(lo.y, v.y);
            hi.x = std::max(hi.x, v.x);
            hi.y = std::max(hi.y, v.y);
        }
        return {lo, hi};
    }

private:
    std::vector<Point2> verts_;
    double area_ = 0.0;
};

inline bool contains_point(const ConvexRegion& region, Point2 p) { return region.contains(p); }

/// Provenance of one cell-boundary edge.
struct EdgeTag {
    enum class Kind : std::uint8_t { own_arc, neighbor_arc, region_boundary, tie_chord };

    Kind kind = Kind::own_arc;
    int agent = -1;  // neighbor id for neighbor_arc / tie_chord

    static constexpr EdgeTag own_arc() { return {Kind::own_arc, -1}; }
    static constexpr EdgeTag region_boundary() { return {Kind::region_boundary, -1}; }
    static constexpr EdgeTag neighbor_arc(int j) { return {Kind::neighbor_arc, j}; }
    static constexpr EdgeTag tie_chord(int j) { return {Kind::tie_chord, j}; }

    friend constexpr bool operator==(EdgeTag a, EdgeTag b) = default;
};

struct TaggedEdge {
    Point2 a;
    Point2 b;
    EdgeTag tag;
};

/// Closed chain of tagged edges. Outer loops run CCW, holes CW.
struct TaggedLoop {
    std::vector<TaggedEdge> edges;

    bool closed(double tol = 1e-6) const {
        if (edges.empty()) return false;
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const Point2 end = edges[i].b;
            const Point2 next = edges[(i + 1) % edges.size()].a;
            if (distance(end, next) > tol) return false;
        }
        return true;
    }

    double signed_area() const {
        double a2 = 0.0;
        for (const TaggedEdge& e : edges) a2 += cross(e.a, e.b);
        return 0.5 * a2;
    }

    double perimeter() const {
        double len = 0.0;
        for (const TaggedEdge& e : edges) len += distance(e.a, e.b);
        return len;
    }
};

struct geometry_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shoelace sum over a loop set; outer loops minus holes. Throws on open loops.
inline double signed_area(const std::vector<TaggedLoop>& loops) {
    double total = 0.0;
    for (const TaggedLoop& loop : loops) {
        if (!loop.closed()) throw geometry_error("signed_area: open loop");
        total += loop.signed_area();
    }
    return total;
}

/// Agent responsibility region: zero or more disjoint components, possibly with holes.
struct CellGeometry {
    std::vector<TaggedLoop> loops;

    bool empty() const { return loops.empty(); }
    double area() const { return loops.empty() ? 0.0 : signed_area(loops); }
};

/// Inscribed regular polygon for a circle; vertex k at angle 2*pi*k/segments.
/// All edges tagged own_arc; callers retag as needed.
inline TaggedLoop approximate_circle(const Circle& c, int segments) {
    if (segments < 8) throw std::invalid_argument("approximate_circle: segments must be >= 8");
    if (!(c.radius > 0.0)) throw std::invalid_argument("approximate_circle: radius must be > 0");
    std::vector<Point2> v(static_cast<std::size_t>(segments));
    for (int k = 0; k < segments; ++k) {
        const double ang = 2.0 * std::numbers::pi * k / segments;
        v[static_cast<std::size_t>(k)] = {c.center.x + c.radius * std::cos(ang),
                                          c.center.y + c.radius * std::sin(ang)};
    }
    TaggedLoop loop;
    loop.edges.reserve(v.size());
    for (std::size_t k = 0; k < v.size(); ++k)
        loop.edges.push_back({v[k], v[(k + 1) % v.size()], EdgeTag::own_arc()});
    return loop;
}

/// Boundary loop of a convex region, edges tagged region_boundary.
inline TaggedLoop region_boundary_loop(const ConvexRegion& region) {
    TaggedLoop loop;
    const auto& v = region.vertices();
    loop.edges.reserve(v.size());
    for (std::size_t k = 0; k < v.size(); ++k)
        loop.edges.push_back({v[k], v[(k + 1) % v.size()], EdgeTag::region_boundary()});
    return loop;
}

/// Unit normal pointing right of travel direction (outward for CCW loops).
inline Vec2 outward_normal(Point2 a, Point2 b) {
    const Vec2 d = b - a;
    const double len = norm(d);
    if (len <= kGeomEps) throw geometry_error("outward_normal: zero-length edge");
    return {d.y / len, -d.x / len};
}

inline Vec2 outward_normal(const TaggedEdge& e) { return outward_normal(e.a, e.b); }

/// Boundary intersection points of two circles: 0 (disjoint or nested),
/// 1 (tangent within kGeomEps) or 2. Identical circles are an error.
inline std::vector<Point2> circle_circle_intersection(const Circle& c1, const Circle& c2) {
    if (!(c1.radius > 0.0) || !(c2.radius > 0.0))
        throw std::invalid_argument("circle_circle_intersection: radius must be > 0");
    const double d = distance(c1.center, c2.center);
    if (d <= kGeomEps && std::abs(c1.radius - c2.radius) <= kGeomEps)
        throw geometry_error("circle_circle_intersection: identical circles");
    const double rsum = c1.radius + c2.radius;
    const double rdiff = std::abs(c1.radius - c2.radius);
    if (d > rsum + kGeomEps || d < rdiff - kGeomEps) return {};
    const Vec2 axis = c2.center - c1.center;
    if (std::abs(d - rsum) <= kGeomEps)  // external tangency
        return {c1.center + (c1.radius / d) * axis};
    if (std::abs(d - rdiff) <= kGeomEps)  // internal tangency
        return {c1.center + ((c1.radius >= c2.radius ? c1.radius : -c1.radius) / d) * axis};
    // a = distance from c1 along the center axis to the chord
    const double a = (d * d + c1.radius * c1.radius - c2.radius * c2.radius) / (2.0 * d);
    const double h2 = c1.radius * c1.radius - a * a;
    const double h = h2 > 0.0 ? std::sqrt(h2) : 0.0;
    const Vec2 u = (1.0 / d) * axis;
    const Vec2 perp{-u.y, u.x};
    const Point2 base = c1.center + a * u;
    return {base + h * perp, base - h * perp};
}

enum class PointSide { inside, boundary, outside };

/// Even-odd test of a point against a loop set, with a boundary band of kGeomEps.
inline PointSide point_in_loops(const std::vector<TaggedLoop>& loops, Point2 p) {
    int crossings = 0;
    for (const TaggedLoop& loop : loops) {
        for (const TaggedEdge& e : loop.edges) {
            if (point_segment_distance(p, e.a, e.b) <= kGeomEps) return PointSide::boundary;
            const bool up = e.a.y > p.y;
            const bool up2 = e.b.y > p.y;
            if (up != up2) {
                const double t = (p.y - e.a.y) / (e.b.y - e.a.y);
                const double xc = e.a.x + t * (e.b.x - e.a.x);
                if (xc > p.x) ++crossings;
            }
        }
    }
    return (crossings & 1) ? PointSide::inside : PointSide::outside;
}

}  // namespace aircov
