#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "aircov/geometry.hpp"

namespace aircov {

// Boolean operations on tagged loop sets. Output edges inherit the tag of the
// input edge they lie on; in a difference, edges contributed by operand b are
// reversed and retagged with the caller-supplied tag.
//
// Split / classify / stitch kernel: every edge of one operand is split at its
// intersections with the other operand, surviving fragments are selected by a
// midpoint parity test, and the kept fragments are rechained into closed
// loops. Handles non-convex multi-loop operands and produces holes (CW loops)
// where the result is multiply connected.

namespace clipdetail {

inline constexpr double kAreaCull = 1e-13;  // loops below this |area| are noise

struct WorkEdge {
    Point2 a;
    Point2 b;
    EdgeTag tag;
    std::vector<std::pair<double, Point2>> cuts;  // param in (0,1) -> exact split point
};

struct BBox {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

    static BBox of(Point2 a, Point2 b) {
        return {std::min(a.x, b.x), std::min(a.y, b.y), std::max(a.x, b.x), std::max(a.y, b.y)};
    }
    void expand(double e) {
        x0 -= e;
        y0 -= e;
        x1 += e;
        y1 += e;
    }
    bool overlaps(const BBox& o) const {
        return x0 <= o.x1 && o.x0 <= x1 && y0 <= o.y1 && o.y0 <= y1;
    }
};

inline BBox bbox_of(const std::vector<TaggedLoop>& loops) {
    BBox bb{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const TaggedLoop& loop : loops) {
        for (const TaggedEdge& e : loop.edges) {
            bb.x0 = std::min({bb.x0, e.a.x, e.b.x});
            bb.y0 = std::min({bb.y0, e.a.y, e.b.y});
            bb.x1 = std::max({bb.x1, e.a.x, e.b.x});
            bb.y1 = std::max({bb.y1, e.a.y, e.b.y});
        }
    }
    return bb;
}

/// Uniform grid over edge bounding boxes for broad-phase pair pruning.
class EdgeGrid {
public:
    EdgeGrid(const BBox& bounds, double cell, std::size_t n_edges)
        : x0_(bounds.x0), y0_(bounds.y0), cell_(std::max(cell, 1e-12)) {
        nx_ = std::max<std::int64_t>(1, static_cast<std::int64_t>((bounds.x1 - bounds.x0) / cell_) + 1);
        ny_ = std::max<std::int64_t>(1, static_cast<std::int64_t>((bounds.y1 - bounds.y0) / cell_) + 1);
        // cap total cells to keep memory proportional to the input
        const std::int64_t max_cells = static_cast<std::int64_t>(4 * n_edges + 64);
        while (nx_ * ny_ > max_cells) {
            cell_ *= 2.0;
            nx_ = (nx_ + 1) / 2;
            ny_ = (ny_ + 1) / 2;
        }
        cells_.resize(static_cast<std::size_t>(nx_ * ny_));
        stamp_.assign(n_edges, -1);
    }

    void insert(std::size_t edge_index, const BBox& bb) {
        for (std::int64_t gy = clamp_y(bb.y0); gy <= clamp_y(bb.y1); ++gy)
            for (std::int64_t gx = clamp_x(bb.x0); gx <= clamp_x(bb.x1); ++gx)
                cells_[static_cast<std::size_t>(gy * nx_ + gx)].push_back(edge_index);
    }

    /// Distinct edge indices whose cells overlap bb (stamped dedup, query counter).
    const std::vector<std::size_t>& query(const BBox& bb) {
        ++query_id_;
        result_.clear();
        for (std::int64_t gy = clamp_y(bb.y0); gy <= clamp_y(bb.y1); ++gy)
            for (std::int64_t gx = clamp_x(bb.x0); gx <= clamp_x(bb.x1); ++gx)
                for (std::size_t idx : cells_[static_cast<std::size_t>(gy * nx_ + gx)])
                    if (stamp_[idx] != query_id_) {
                        stamp_[idx] = query_id_;
                        result_.push_back(idx);
                    }
        return result_;
    }

private:
    std::int64_t clamp_x(double x) const {
        return std::clamp<std::int64_t>(static_cast<std::int64_t>((x - x0_) / cell_), 0, nx_ - 1);
    }
    std::int64_t clamp_y(double y) const {
        return std::clamp<std::int64_t>(static_cast<std::int64_t>((y - y0_) / cell_), 0, ny_ - 1);
    }

    double x0_, y0_, cell_;
    std::int64_t nx_ = 1, ny_ = 1;
    std::vector<std::vector<std::size_t>> cells_;
    std::vector<std::int64_t> stamp_;
    std::vector<std::size_t> result_;
    std::int64_t query_id_ = 0;
};

/// Even-odd point classifier over a fixed edge set, bucketed by y for O(bucket) queries.
class LoopClassifier {
public:
    explicit LoopClassifier(const std::vector<WorkEdge>& edges) : edges_(edges) {
        double y0 = std::numeric_limits<double>::infinity();
        double y1 = -std::numeric_limits<double>::infinity();
        for (const WorkEdge& e : edges) {
            y0 = std::min({y0, e.a.y, e.b.y});
            y1 = std::max({y1, e.a.y, e.b.y});
        }
        if (!(y1 >= y0)) {
            y0 = 0.0;
            y1 = 1.0;
        }
        y0_ = y0 - kGeomEps;
        nb_ = std::max<std::size_t>(std::min(edges.size(), std::size_t{4096}), 1);
        dy_ = std::max((y1 + kGeomEps - y0_) / static_cast<double>(nb_), 1e-12);
        buckets_.resize(nb_);
        for (std::size_t i = 0; i < edges.size(); ++i) {
            const double lo = std::min(edges[i].a.y, edges[i].b.y) - kGeomEps;
            const double hi = std::max(edges[i].a.y, edges[i].b.y) + kGeomEps;
            for (std::size_t b = bucket(lo); b <= bucket(hi); ++b) buckets_[b].push_back(i);
        }
    }

    /// Classification plus the index of a boundary edge when on the boundary.
    std::pair<PointSide, std::size_t> classify(Point2 p) const {
        int crossings = 0;
        for (std::size_t idx : buckets_[bucket(p.y)]) {
            const WorkEdge& e = edges_[idx];
            if (point_segment_distance(p, e.a, e.b) <= kGeomEps) return {PointSide::boundary, idx};
            const bool up = e.a.y > p.y;
            const bool up2 = e.b.y > p.y;
            if (up != up2) {
                const double t = (p.y - e.a.y) / (e.b.y - e.a.y);
                const double xc = e.a.x + t * (e.b.x - e.a.x);
                if (xc > p.x) ++crossings;
            }
        }
        return {(crossings & 1) ? PointSide::inside : PointSide::outside, SIZE_MAX};
    }

private:
    std::size_t bucket(double y) const {
        const double f = (y - y0_) / dy_;
        if (f <= 0.0) return 0;
        const auto b = static_cast<std::size_t>(f);
        return b >= nb_ ? nb_ - 1 : b;
    }

    const std::vector<WorkEdge>& edges_;
    double y0_ = 0.0, dy_ = 1.0;
    std::size_t nb_ = 1;
    std::vector<std::vector<std::size_t>> buckets_;
};

inline void flatten(const std::vector<TaggedLoop>& loops, std::vector<WorkEdge>& out) {
    for (const TaggedLoop& loop : loops)
        for (const TaggedEdge& e : loop.edges)
            if (distance(e.a, e.b) > kGeomEps) out.push_back({e.a, e.b, e.tag, {}});
}

/// Record every intersection between ea and eb as parameter cuts on both edges,
/// sharing the exact split coordinates.
inline void intersect_edges(WorkEdge& ea, WorkEdge& eb) {
    const Vec2 d1 = ea.b - ea.a;
    const Vec2 d2 = eb.b - eb.a;
    const double len1 = norm(d1);
    const double len2 = norm(d2);
    const double denom = cross(d1, d2);
    const Vec2 r = eb.a - ea.a;

    if (std::abs(denom) <= kGeomEps * len1 * len2) {
        // parallel; check collinearity via the offset of eb.a from ea's line
        if (std::abs(cross(d1, r)) > kGeomEps * len1) return;
        // collinear overlap: split each edge at the other's endpoints
        const auto param_on = [](const WorkEdge& e, Point2 p, double len) {
            return dot(p - e.a, e.b - e.a) / (len * len);
        };
        for (Point2 p : {eb.a, eb.b}) {
            const double t = param_on(ea, p, len1);
            if (t > kGeomEps / len1 && t < 1.0 - kGeomEps / len1) ea.cuts.emplace_back(t, p);
        }
        for (Point2 p : {ea.a, ea.b}) {
            const double u = param_on(eb, p, len2);
            if (u > kGeomEps / len2 && u < 1.0 - kGeomEps / len2) eb.cuts.emplace_back(u, p);
        }
        return;
    }

    const double t = cross(r, d2) / denom;
    const double u = cross(r, d1) / denom;
    const double tol_t = kGeomEps / len1;
    const double tol_u = kGeomEps / len2;
    if (t < -tol_t || t > 1.0 + tol_t || u < -tol_u || u > 1.0 + tol_u) return;
    const Point2 p = ea.a + t * d1;
    if (t > tol_t && t < 1.0 - tol_t) ea.cuts.emplace_back(t, p);
    if (u > tol_u && u < 1.0 - tol_u) eb.cuts.emplace_back(u, p);
}

struct Fragment {
    Point2 a;
    Point2 b;
    EdgeTag tag;
};

/// Expand an edge into fragments between its sorted, deduplicated cut points.
inline void emit_fragments(const WorkEdge& e, std::vector<Fragment>& out) {
    if (e.cuts.empty()) {
        out.push_back({e.a, e.b, e.tag});
        return;
    }
    auto cuts = e.cuts;
    std::sort(cuts.begin(), cuts.end(),
              [](const auto& l, const auto& r) { return l.first < r.first; });
    const double len = distance(e.a, e.b);
    const double tol = kGeomEps / len;
    Point2 prev = e.a;
    double prev_t = 0.0;
    for (const auto& [t, p] : cuts) {
        if (t - prev_t <= tol) continue;  // merged with previous split point
        out.push_back({prev, p, e.tag});
        prev = p;
        prev_t = t;
    }
    if (1.0 - prev_t > tol) out.push_back({prev, e.b, e.tag});
}

/// Quantized-coordinate key for chaining fragment endpoints.
struct PointKey {
    std::int64_t x;
    std::int64_t y;
    friend bool operator==(PointKey a, PointKey b) = default;
};

struct PointKeyHash {
    std::size_t operator()(PointKey k) const {
        std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ull;
        h ^= static_cast<std::uint64_t>(k.y) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
        return static_cast<std::size_t>(h);
    }
};

inline PointKey make_key(Point2 p) {
    return {static_cast<std::int64_t>(std::llround(p.x / kGeomEps)),
            static_cast<std::int64_t>(std::llround(p.y / kGeomEps))};
}

/// Chain kept fragments into closed loops. At junctions the walk takes the
/// most counter-clockwise turn, keeping each traced face simple. Chains that
/// fail to close are dropped, as are loops with negligible area.
inline std::vector<TaggedLoop> stitch(std::vector<Fragment>& frags) {
    std::unordered_map<PointKey, std::vector<std::size_t>, PointKeyHash> by_start;
    by_start.reserve(frags.size() * 2);
    for (std::size_t i = 0; i < frags.size(); ++i) by_start[make_key(frags[i].a)].push_back(i);

    std::vector<bool> used(frags.size(), false);

    auto candidates_at = [&](Point2 p, std::vector<std::size_t>& out) {
        out.clear();
        const PointKey k = make_key(p);
        for (std::int64_t dx = -1; dx <= 1; ++dx)
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                const auto it = by_start.find({k.x + dx, k.y + dy});
                if (it == by_start.end()) continue;
                for (std::size_t idx : it->second)
                    if (!used[idx] && distance(frags[idx].a, p) <= 2.0 * kGeomEps) out.push_back(idx);
            }
    };

    std::vector<TaggedLoop> result;
    std::vector<std::size_t> cands;
    for (std::size_t start = 0; start < frags.size(); ++start) {
        if (used[start]) continue;
        TaggedLoop loop;
        std::size_t cur = start;
        used[cur] = true;
        loop.edges.push_back({frags[cur].a, frags[cur].b, frags[cur].tag});
        const Point2 origin = frags[cur].a;
        bool closed = false;
        for (std::size_t guard = 0; guard <= frags.size(); ++guard) {
            const Point2 tip = frags[cur].b;
            if (distance(tip, origin) <= 2.0 * kGeomEps && loop.edges.size() >= 2) {
                closed = true;
                break;
            }
            candidates_at(tip, cands);
            if (cands.empty()) break;
            std::size_t best = cands[0];
            if (cands.size() > 1) {
                const Vec2 in_dir = frags[cur].b - frags[cur].a;
                double best_ang = -10.0;
                for (std::size_t idx : cands) {
                    const Vec2 out_dir = frags[idx].b - frags[idx].a;
                    const double ang = std::atan2(cross(in_dir, out_dir), dot(in_dir, out_dir));
                    if (ang > best_ang) {
                        best_ang = ang;
                        best = idx;
                    }
                }
            }
            cur = best;
            used[cur] = true;
            loop.edges.push_back({frags[cur].a, frags[cur].b, frags[cur].tag});
        }
        if (closed && std::abs(loop.signed_area()) > kAreaCull) {
            // seal the numeric gap so downstream closure checks see exact chaining
            loop.edges.back().b = loop.edges.front().a;
            result.push_back(std::move(loop));
        }
    }
    return result;
}

enum class BoolOp { intersection, difference };

inline std::vector<TaggedLoop> boolean_op(const std::vector<TaggedLoop>& a,
                                          const std::vector<TaggedLoop>& b, BoolOp op,
                                          std::optional<EdgeTag> b_retag) {
    const auto degenerate = [](const std::vector<TaggedLoop>& loops) {
        if (loops.empty()) return true;
        double area = 0.0;
        for (const TaggedLoop& l : loops) area += std::abs(l.signed_area());
        return area <= kAreaCull;
    };

    if (degenerate(a)) return {};
    if (degenerate(b)) return op == BoolOp::intersection ? std::vector<TaggedLoop>{} : a;

    BBox ba = bbox_of(a);
    BBox bb = bbox_of(b);
    ba.expand(kGeomEps);
    bb.expand(kGeomEps);
    if (!ba.overlaps(bb)) return op == BoolOp::intersection ? std::vector<TaggedLoop>{} : a;

    std::vector<WorkEdge> ea, eb;
    flatten(a, ea);
    flatten(b, eb);

    // broad phase: grid over b edges sized by the mean b edge extent
    double mean_ext = 0.0;
    for (const WorkEdge& e : eb) mean_ext += std::max(std::abs(e.b.x - e.a.x), std::abs(e.b.y - e.a.y));
    mean_ext /= static_cast<double>(eb.size());
    BBox joint = ba;
    joint.x0 = std::min(joint.x0, bb.x0);
    joint.y0 = std::min(joint.y0, bb.y0);
    joint.x1 = std::max(joint.x1, bb.x1);
    joint.y1 = std::max(joint.y1, bb.y1);
    EdgeGrid grid(joint, std::max(mean_ext * 2.0, 16.0 * kGeomEps), eb.size());
    for (std::size_t i = 0; i < eb.size(); ++i) {
        BBox box = BBox::of(eb[i].a, eb[i].b);
        box.expand(kGeomEps);
        grid.insert(i, box);
    }
    for (WorkEdge& e : ea) {
        BBox box = BBox::of(e.a, e.b);
        box.expand(kGeomEps);
        for (std::size_t j : grid.query(box)) intersect_edges(e, eb[j]);
    }

    const LoopClassifier in_b(eb);
    const LoopClassifier in_a(ea);

    std::vector<Fragment> frags_a, frags_b, kept;
    for (const WorkEdge& e : ea) emit_fragments(e, frags_a);
    for (const WorkEdge& e : eb) emit_fragments(e, frags_b);
    kept.reserve(frags_a.size() + frags_b.size());

    for (const Fragment& f : frags_a) {
        const Point2 mid = 0.5 * (f.a + f.b);
        const auto [side, bidx] = in_b.classify(mid);
        bool keep = false;
        if (side == PointSide::boundary) {
            // collinear with a b edge: same traversal direction means the b
            // interior lies on the same side as the a interior here
            const WorkEdge& be = eb[bidx];
            const bool same_dir = dot(f.b - f.a, be.b - be.a) > 0.0;
            keep = (op == BoolOp::intersection) ? same_dir : !same_dir;
        } else if (op == BoolOp::intersection) {
            keep = side == PointSide::inside;
        } else {
            keep = side == PointSide::outside;
        }
        if (keep) kept.push_back(f);
    }
    for (const Fragment& f : frags_b) {
        const Point2 mid = 0.5 * (f.a + f.b);
        if (in_a.classify(mid).first != PointSide::inside) continue;  // boundary copies come from a
        Fragment g = f;
        if (op == BoolOp::difference) {
            std::swap(g.a, g.b);  // reversed: b boundaries become hole/rim boundaries
        }
        if (b_retag) g.tag = *b_retag;
        kept.push_back(g);
    }

    return stitch(kept);
}

}  // namespace clipdetail

/// a INTERSECT b. Output edges keep the tags of whichever operand they came from.
inline std::vector<TaggedLoop> clip_intersection(const std::vector<TaggedLoop>& a,
                                                 const std::vector<TaggedLoop>& b) {
    return clipdetail::boolean_op(a, b, clipdetail::BoolOp::intersection, std::nullopt);
}

/// a MINUS b. Edges contributed by b are reversed and retagged with b_tag.
inline std::vector<TaggedLoop> clip_difference(const std::vector<TaggedLoop>& a,
                                               const std::vector<TaggedLoop>& b, EdgeTag b_tag) {
    return clipdetail::boolean_op(a, b, clipdetail::BoolOp::difference, b_tag);
}

}  // namespace aircov
