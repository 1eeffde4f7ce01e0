#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "aircov/clip.hpp"
#include "aircov/geometry.hpp"
#include "aircov/quality.hpp"

namespace aircov {

/// One agent: ground projection q and altitude z. id is the index in the
/// global state vector.
struct AgentState {
    int id = 0;
    Point2 q;
    double z = 0.0;
};

/// Default width of the altitude band treated as a tie. The chord rule applies
/// at exact altitude equality; floating point needs a band.
inline constexpr double kTieEpsDefault = 1e-7;

/// Default polygonization of footprint circles.
inline constexpr int kSegmentsDefault = 720;

/// Ground disk seen by the agent's camera: radius z tan(a).
inline Circle footprint(const AgentState& s, const SensingParams& p) {
    return Circle{s.q, s.z * p.tan_a()};
}

/// Neighbor sets: j is a neighbor of i iff their footprints intersect,
/// i.e. center distance <= r_i + r_j. Symmetric by construction.
inline std::vector<std::vector<int>> neighbors(const std::vector<AgentState>& states,
                                               const SensingParams& p) {
    const std::size_t n = states.size();
    std::vector<std::vector<int>> sets(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Circle ci = footprint(states[i], p);
        for (std::size_t j = i + 1; j < n; ++j) {
            const Circle cj = footprint(states[j], p);
            if (distance(ci.center, cj.center) <= ci.radius + cj.radius) {
                sets[i].push_back(states[j].id);
                sets[j].push_back(states[i].id);
            }
        }
    }
    return sets;
}

/// Radius of the communication sphere guaranteeing every possible neighbor is
/// reachable: the worst cases are neighbors flying at z_min and z_max whose
/// footprints barely touch this agent's footprint.
inline double communication_radius(const AgentState& s, const SensingParams& p) {
    const double t = p.tan_a();
    const double planar = 2.0 * s.z * t;
    const double lo = std::hypot((s.z + p.z_min) * t, s.z - p.z_min);
    const double hi = std::hypot((s.z + p.z_max) * t, s.z - p.z_max);
    return std::max({planar, lo, hi});
}

/// Responsibility cells plus the diagnostics the control layer cares about.
struct Partition {
    std::vector<CellGeometry> cells;              // indexed by agent id
    std::vector<std::vector<int>> neighbor_sets;  // indexed by agent id
    std::vector<std::pair<int, int>> contained_pairs;  // (inner agent, outer agent)
};

namespace partitiondetail {

/// Large half-plane stand-in: a rectangle on the far side of the chord
/// through p1 -> p2, covering everything within `reach` of the chord line.
inline std::vector<TaggedLoop> half_plane_quad(Point2 p1, Point2 p2, Point2 far_side_point,
                                               double reach, EdgeTag tag) {
    Vec2 d = p2 - p1;
    const double len = norm(d);
    d = (1.0 / len) * d;
    Vec2 m{-d.y, d.x};
    if (dot(m, far_side_point - p1) < 0.0) m = -1.0 * m;
    // ensure CCW orientation: chord first, then sweep toward the far side
    const Point2 a = p1 - reach * d;
    const Point2 b = p2 + reach * d;
    const Point2 c = b + reach * m;
    const Point2 e = a + reach * m;
    TaggedLoop loop;
    if (cross(b - a, c - b) < 0.0) {
        loop.edges = {{b, a, tag}, {a, e, tag}, {e, c, tag}, {c, b, tag}};
    } else {
        loop.edges = {{a, b, tag}, {b, c, tag}, {c, e, tag}, {e, a, tag}};
    }
    return {loop};
}

/// Split an edge at its crossings with a circle boundary and append the pieces.
inline void split_edge_by_circle(const TaggedEdge& e, const Circle& c,
                                 std::vector<TaggedEdge>& out) {
    const Vec2 d = e.b - e.a;
    const Vec2 f = e.a - c.center;
    const double qa = norm_sq(d);
    const double qb = 2.0 * dot(f, d);
    const double qc = norm_sq(f) - c.radius * c.radius;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc <= 0.0 || qa <= 0.0) {
        out.push_back(e);
        return;
    }
    const double sq = std::sqrt(disc);
    double t1 = (-qb - sq) / (2.0 * qa);
    double t2 = (-qb + sq) / (2.0 * qa);
    const double tol = kGeomEps / std::sqrt(qa);
    std::vector<double> ts;
    if (t1 > tol && t1 < 1.0 - tol) ts.push_back(t1);
    if (t2 > tol && t2 < 1.0 - tol && t2 - t1 > tol) ts.push_back(t2);
    if (ts.empty()) {
        out.push_back(e);
        return;
    }
    Point2 prev = e.a;
    for (double t : ts) {
        const Point2 p = e.a + t * d;
        out.push_back({prev, p, e.tag});
        prev = p;
    }
    out.push_back({prev, e.b, e.tag});
}

}  // namespace partitiondetail

/// Build every agent's responsibility cell from a shared state snapshot.
///
/// Cell i starts from footprint(i) clipped to the region, loses the footprint
/// of every strictly lower neighbor, and is cut by the chord through the
/// footprint intersection points for every altitude tie. Edges of the agent's
/// own footprint circle that border a higher neighbor's cell are retagged
/// neighbor_arc so the control law can weight shared boundaries correctly.
inline Partition build_partition(const std::vector<AgentState>& states, const ConvexRegion& region,
                                 const SensingParams& p, int segments = kSegmentsDefault,
                                 double tie_eps = kTieEpsDefault) {
    const std::size_t n = states.size();
    if (tie_eps < 0.0) throw std::invalid_argument("build_partition: tie_eps must be >= 0");
    for (std::size_t i = 0; i < n; ++i) {
        if (states[i].id != static_cast<int>(i))
            throw std::invalid_argument("build_partition: state ids must equal their index");
        if (states[i].z < p.z_min - kGeomEps || states[i].z > p.z_max + kGeomEps)
            throw std::invalid_argument("build_partition: altitude outside [z_min, z_max]");
        if (!region.contains(states[i].q))
            throw std::invalid_argument("build_partition: agent projection outside the region");
    }

    Partition part;
    part.cells.resize(n);
    part.neighbor_sets = neighbors(states, p);

    // containment diagnostics (degenerate deployments are reported, not fixed)
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const Circle ci = footprint(states[i], p);
            const Circle cj = footprint(states[j], p);
            const double d = distance(ci.center, cj.center);
            if (d + ci.radius <= cj.radius + kGeomEps)
                part.contained_pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
            else if (d + cj.radius <= ci.radius + kGeomEps)
                part.contained_pairs.emplace_back(static_cast<int>(j), static_cast<int>(i));
        }
    }

    const TaggedLoop region_loop = region_boundary_loop(region);
    const auto [rlo, rhi] = region.bounding_box();
    const double region_reach = 2.0 * (std::max(rhi.x - rlo.x, rhi.y - rlo.y) + 1.0);

    for (std::size_t i = 0; i < n; ++i) {
        const AgentState& si = states[i];
        const Circle ci = footprint(si, p);
        std::vector<TaggedLoop> cell{approximate_circle(ci, segments)};

        // clip to the region unless the footprint polygon is already inside
        bool inside_region = true;
        for (const TaggedEdge& e : cell[0].edges) {
            if (!region.contains(e.a)) {
                inside_region = false;
                break;
            }
        }
        if (!inside_region) cell = clip_intersection(cell, {region_loop});

        // deterministic processing order over neighbors
        std::vector<int> nbrs = part.neighbor_sets[i];
        std::sort(nbrs.begin(), nbrs.end());

        for (int j : nbrs) {
            if (cell.empty()) break;
            const AgentState& sj = states[static_cast<std::size_t>(j)];
            const Circle cj = footprint(sj, p);
            const double dz = sj.z - si.z;
            if (dz < -tie_eps) {
                // strictly lower neighbor claims the overlap
                cell = clip_difference(cell, {approximate_circle(cj, segments)},
                                       EdgeTag::neighbor_arc(j));
            } else if (dz <= tie_eps) {
                // altitude tie: cut along the chord through the footprint
                // boundary intersections; without a chord, lower (z, id) wins
                std::vector<Point2> pts;
                const double cd = distance(ci.center, cj.center);
                if (cd > kGeomEps && !(cd + ci.radius <= cj.radius + kGeomEps) &&
                    !(cd + cj.radius <= ci.radius + kGeomEps))
                    pts = circle_circle_intersection(ci, cj);
                if (pts.size() == 2) {
                    cell = clip_difference(
                        cell,
                        partitiondetail::half_plane_quad(pts[0], pts[1], sj.q, region_reach,
                                                         EdgeTag::tie_chord(j)),
                        EdgeTag::tie_chord(j));
                } else {
                    const bool i_wins = si.z < sj.z || (si.z == sj.z && si.id < sj.id);
                    if (!i_wins)
                        cell = clip_difference(cell, {approximate_circle(cj, segments)},
                                               EdgeTag::neighbor_arc(j));
                }
            }
            // strictly higher neighbors do not reduce the cell
        }

        // retag own-circle arcs that border a higher neighbor's cell: split at
        // the exact circle crossings, then assign each piece to the lowest
        // covering higher agent
        std::vector<int> higher;
        for (int j : nbrs)
            if (states[static_cast<std::size_t>(j)].z - si.z > tie_eps) higher.push_back(j);
        if (!higher.empty()) {
            for (TaggedLoop& loop : cell) {
                std::vector<TaggedEdge> rebuilt;
                rebuilt.reserve(loop.edges.size());
                for (const TaggedEdge& e : loop.edges) {
                    if (e.tag != EdgeTag::own_arc()) {
                        rebuilt.push_back(e);
                        continue;
                    }
                    std::vector<TaggedEdge> pieces{e};
                    for (int j : higher) {
                        std::vector<TaggedEdge> next;
                        for (const TaggedEdge& piece : pieces)
                            partitiondetail::split_edge_by_circle(
                                piece, footprint(states[static_cast<std::size_t>(j)], p), next);
                        pieces = std::move(next);
                    }
                    for (TaggedEdge& piece : pieces) {
                        const Point2 mid = 0.5 * (piece.a + piece.b);
                        int owner = -1;
                        double owner_z = 0.0;
                        for (int j : higher) {
                            const AgentState& sj = states[static_cast<std::size_t>(j)];
                            const Circle cj = footprint(sj, p);
                            if (distance(mid, cj.center) < cj.radius &&
                                (owner < 0 || sj.z < owner_z)) {
                                owner = j;
                                owner_z = sj.z;
                            }
                        }
                        if (owner >= 0) piece.tag = EdgeTag::neighbor_arc(owner);
                        rebuilt.push_back(piece);
                    }
                }
                loop.edges = std::move(rebuilt);
            }
        }

        part.cells[i].loops = std::move(cell);
    }
    return part;
}

/// Total area of all cells (the sensed region inside the region of interest).
inline double covered_area(const Partition& part) {
    double total = 0.0;
    for (const CellGeometry& cell : part.cells) total += cell.area();
    return total;
}

/// Area of the region sensed by nobody.
inline double neutral_area(const Partition& part, const ConvexRegion& region) {
    return region.area() - covered_area(part);
}

}  // namespace aircov
