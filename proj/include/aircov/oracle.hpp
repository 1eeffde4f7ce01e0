#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "aircov/geometry.hpp"
#include "aircov/partition.hpp"
#include "aircov/quality.hpp"

namespace aircov {

/// Numerical integration request for the ground-truth coverage objective.
struct QuadratureSpec {
    enum class Mode { grid, monte_carlo };

    Mode mode = Mode::grid;
    int resolution = 1000;  // rows per axis (grid) or sample count (monte_carlo)
    std::uint64_t seed = 0;

    void validate() const {
        if (mode == Mode::grid && resolution < 100)
            throw std::invalid_argument("QuadratureSpec: grid resolution must be >= 100 per axis");
        if (mode == Mode::monte_carlo && resolution < 100000)
            throw std::invalid_argument("QuadratureSpec: monte carlo needs >= 1e5 samples");
    }
};

namespace oracledetail {

struct AgentDisk {
    Point2 q;
    double r;
    double f;
};

/// x-interval of a horizontal line inside a convex region; empty when the line
/// misses the region.
inline bool region_row(const ConvexRegion& region, double y, double& x0, double& x1) {
    const auto& v = region.vertices();
    const std::size_t n = v.size();
    x0 = std::numeric_limits<double>::infinity();
    x1 = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t i = 0; i < n; ++i) {
        const Point2 a = v[i];
        const Point2 b = v[(i + 1) % n];
        if (a.y == b.y) {
            if (a.y == y) {
                x0 = std::min({x0, a.x, b.x});
                x1 = std::max({x1, a.x, b.x});
                any = true;
            }
            continue;
        }
        const double t = (y - a.y) / (b.y - a.y);
        if (t < 0.0 || t > 1.0) continue;
        const double x = a.x + t * (b.x - a.x);
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        any = true;
    }
    return any && x1 > x0;
}

/// Exact 1-D integral over x of max_i f_i at height y: the covered subset of
/// the row is a union of intervals, so sweep their endpoints.
inline double row_quality_measure(const std::vector<AgentDisk>& disks, const ConvexRegion& region,
                                  double y, bool indicator_only) {
    double x0, x1;
    if (!region_row(region, y, x0, x1)) return 0.0;

    struct Span {
        double a, b, f;
    };
    std::array<double, 64> breaks_buf;  // plenty for the agent counts in play
    std::vector<Span> spans;
    spans.reserve(disks.size());
    std::size_t nb = 0;
    breaks_buf[nb++] = x0;
    breaks_buf[nb++] = x1;
    for (const AgentDisk& d : disks) {
        const double dy = y - d.q.y;
        const double w2 = d.r * d.r - dy * dy;
        if (w2 <= 0.0) continue;
        const double w = std::sqrt(w2);
        const double a = std::max(d.q.x - w, x0);
        const double b = std::min(d.q.x + w, x1);
        if (a >= b) continue;
        spans.push_back({a, b, indicator_only ? 1.0 : d.f});
        if (nb + 2 <= breaks_buf.size()) {
            breaks_buf[nb++] = a;
            breaks_buf[nb++] = b;
        }
    }
    if (spans.empty()) return 0.0;
    std::sort(breaks_buf.begin(), breaks_buf.begin() + nb);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < nb; ++k) {
        const double lo = breaks_buf[k];
        const double hi = breaks_buf[k + 1];
        if (hi <= lo) continue;
        const double mid = 0.5 * (lo + hi);
        double best = 0.0;
        for (const Span& s : spans)
            if (s.a <= mid && mid <= s.b) best = std::max(best, s.f);
        total += best * (hi - lo);
    }
    return total;
}

/// Five-point Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr std::array<double, 5> kGlNode{-0.9061798459386640, -0.5384693101056831, 0.0,
                                               0.5384693101056831, 0.9061798459386640};
inline constexpr std::array<double, 5> kGlWeight{0.2369268850561891, 0.4786286704993665,
                                                 0.5688888888888889, 0.4786286704993665,
                                                 0.2369268850561891};

struct RowIntegrator {
    const std::vector<AgentDisk>& disks;
    const ConvexRegion& region;
    bool indicator_only;
    const std::vector<double>& critical;  // y values where the integrand loses smoothness
    double tol_per_length;                // adaptive acceptance threshold per meter of band
    int max_depth = 32;

    double gl5(double a, double b) const {
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        double sum = 0.0;
        for (std::size_t k = 0; k < kGlNode.size(); ++k)
            sum += kGlWeight[k] *
                   row_quality_measure(disks, region, mid + half * kGlNode[k], indicator_only);
        return sum * half;
    }

    /// Split at known square-root edges of the integrand, then bisect
    /// adaptively until two estimates agree within the band tolerance. The
    /// result is deterministic and varies smoothly with the agent states.
    double band(double a, double b, int depth) const {
        const double eps_split = 1e-12 * (1.0 + std::abs(a) + std::abs(b));
        if (depth < max_depth) {
            for (double c : critical)
                if (c > a + eps_split && c < b - eps_split)
                    return band(a, c, depth + 1) + band(c, b, depth + 1);
        }
        const double coarse = gl5(a, b);
        if (depth >= max_depth) return coarse;
        const double m = 0.5 * (a + b);
        const double fine = gl5(a, m) + gl5(m, b);
        if (std::abs(fine - coarse) <= tol_per_length * (b - a) + 1e-16) return fine;
        return band(a, m, depth + 1) + band(m, b, depth + 1);
    }
};

inline std::vector<AgentDisk> make_disks(const std::vector<AgentState>& states,
                                         const SensingParams& p) {
    std::vector<AgentDisk> disks;
    disks.reserve(states.size());
    for (const AgentState& s : states)
        disks.push_back({s.q, s.z * p.tan_a(), coverage_quality(s.z, p)});
    return disks;
}

inline double integrate_grid(const std::vector<AgentDisk>& disks, const ConvexRegion& region,
                             int rows, bool indicator_only) {
    const auto [lo, hi] = region.bounding_box();
    std::vector<double> critical;
    for (const AgentDisk& d : disks) {
        critical.push_back(d.q.y - d.r);
        critical.push_back(d.q.y + d.r);
    }
    for (const Point2& v : region.vertices()) critical.push_back(v.y);

    // total guaranteed error scales as 1/rows: doubling the resolution at
    // least halves the bound
    const double tol = 1e-10 / rows;
    const RowIntegrator integ{disks, region, indicator_only, critical, tol};
    const double dy = (hi.y - lo.y) / rows;
    double total = 0.0;
    for (int k = 0; k < rows; ++k) total += integ.band(lo.y + k * dy, lo.y + (k + 1) * dy, 0);
    return total;
}

inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

inline double integrate_mc(const std::vector<AgentDisk>& disks, const ConvexRegion& region,
                           int samples, std::uint64_t seed, bool indicator_only,
                           double* std_error) {
    const auto [lo, hi] = region.bounding_box();
    const double box_area = (hi.x - lo.x) * (hi.y - lo.y);
    std::mt19937_64 gen(seed);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int k = 0; k < samples; ++k) {
        const Point2 pt{lo.x + (hi.x - lo.x) * uniform01(gen),
                        lo.y + (hi.y - lo.y) * uniform01(gen)};
        double value = 0.0;
        if (region.contains(pt)) {
            for (const AgentDisk& d : disks)
                if (distance(pt, d.q) <= d.r) value = std::max(value, indicator_only ? 1.0 : d.f);
        }
        sum += value;
        sum_sq += value * value;
    }
    const double mean = sum / samples;
    if (std_error) {
        const double var = std::max(sum_sq / samples - mean * mean, 0.0);
        *std_error = box_area * std::sqrt(var / samples);
    }
    return box_area * mean;
}

}  // namespace oracledetail

/// Ground-truth coverage objective: integral over the region of the best
/// coverage quality among the agents whose exact footprint covers each point.
/// Grid mode is deterministic; monte carlo mode is deterministic given the
/// seed and optionally reports its standard error.
inline double oracle_H(const std::vector<AgentState>& states, const ConvexRegion& region,
                       const SensingParams& p, const QuadratureSpec& spec,
                       double* mc_std_error = nullptr) {
    spec.validate();
    const auto disks = oracledetail::make_disks(states, p);
    if (spec.mode == QuadratureSpec::Mode::grid)
        return oracledetail::integrate_grid(disks, region, spec.resolution, false);
    return oracledetail::integrate_mc(disks, region, spec.resolution, spec.seed, false,
                                      mc_std_error);
}

/// Ground-truth area of (union of exact footprints) intersected with the region.
inline double oracle_covered_area(const std::vector<AgentState>& states,
                                  const ConvexRegion& region, const SensingParams& p,
                                  const QuadratureSpec& spec) {
    spec.validate();
    const auto disks = oracledetail::make_disks(states, p);
    if (spec.mode == QuadratureSpec::Mode::grid)
        return oracledetail::integrate_grid(disks, region, spec.resolution, true);
    return oracledetail::integrate_mc(disks, region, spec.resolution, spec.seed, true, nullptr);
}

/// Central finite differences of oracle_H in (x_i, y_i, z_i). Altitude
/// components fall back to one-sided differences at the limits; planar
/// perturbations that leave the region are an error.
inline std::array<double, 3> fd_gradient(const std::vector<AgentState>& states,
                                         const ConvexRegion& region, const SensingParams& p,
                                         const QuadratureSpec& spec, int i, double h = 1e-4) {
    if (i < 0 || static_cast<std::size_t>(i) >= states.size())
        throw std::invalid_argument("fd_gradient: unknown agent id");
    if (!(h > 0.0)) throw std::invalid_argument("fd_gradient: step must be positive");

    auto eval = [&](const std::vector<AgentState>& s) { return oracle_H(s, region, p, spec); };

    std::array<double, 3> grad{};
    for (int axis = 0; axis < 2; ++axis) {
        std::vector<AgentState> plus = states;
        std::vector<AgentState> minus = states;
        auto& pc = axis == 0 ? plus[static_cast<std::size_t>(i)].q.x
                             : plus[static_cast<std::size_t>(i)].q.y;
        auto& mc = axis == 0 ? minus[static_cast<std::size_t>(i)].q.x
                             : minus[static_cast<std::size_t>(i)].q.y;
        pc += h;
        mc -= h;
        if (!region.contains(plus[static_cast<std::size_t>(i)].q) ||
            !region.contains(minus[static_cast<std::size_t>(i)].q))
            throw std::domain_error(
                "fd_gradient: planar perturbation leaves the region; use a smaller h or another "
                "sample");
        grad[static_cast<std::size_t>(axis)] = (eval(plus) - eval(minus)) / (2.0 * h);
    }

    const double z = states[static_cast<std::size_t>(i)].z;
    const bool can_up = z + h <= p.z_max;
    const bool can_down = z - h >= p.z_min;
    if (!can_up && !can_down)
        throw std::domain_error("fd_gradient: altitude step exceeds the altitude range");
    std::vector<AgentState> plus = states;
    std::vector<AgentState> minus = states;
    plus[static_cast<std::size_t>(i)].z = can_up ? z + h : z;
    minus[static_cast<std::size_t>(i)].z = can_down ? z - h : z;
    const double denom = (can_up ? h : 0.0) + (can_down ? h : 0.0);
    grad[2] = (eval(plus) - eval(minus)) / denom;
    return grad;
}

}  // namespace aircov
