#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "aircov/geometry.hpp"
#include "aircov/partition.hpp"
#include "aircov/quality.hpp"

namespace aircov {

/// Positive gradient gains for the planar and altitude laws.
struct Gains {
    double alpha_q = 1.0;
    double alpha_z = 1.0;

    Gains() = default;
    Gains(double aq, double az) : alpha_q(aq), alpha_z(az) {
        if (!(alpha_q > 0.0) || !(alpha_z > 0.0))
            throw std::invalid_argument("Gains: gains must be positive");
    }
};

struct ControlInput {
    Vec2 u_q;         // meters/second
    double u_z = 0.0;  // meters/second
};

/// Band around the altitude limits inside which outward pushes are zeroed.
inline constexpr double kAltGateEps = 1e-9;

/// One-sided saturation at the altitude limits: an agent at z_min never
/// descends and an agent at z_max never climbs; all other commands pass.
inline double altitude_gate(double u_z, double z, const SensingParams& p) {
    if (z <= p.z_min + kAltGateEps && u_z < 0.0) return 0.0;
    if (z >= p.z_max - kAltGateEps && u_z > 0.0) return 0.0;
    return u_z;
}

/// An empty cell produces no boundary or area integrals, so the agent holds
/// position until lower agents move away and uncover part of its footprint.
inline bool empty_cell_stationary(const CellGeometry& cell) { return cell.empty(); }

/// Gradient control law evaluated on a tagged cell.
///
/// Per boundary edge with outward normal n and length l:
///   own_arc (free boundary):      planar += n f_i l,          altitude += tan(a) f_i l
///   neighbor_arc(j), z_i < z_j:   planar += n (f_i - f_j) l,  altitude += tan(a) (f_i - f_j) l
///   neighbor_arc(j), z_i > z_j:   nothing (the arc belongs to j's circle)
///   tie_chord / region_boundary:  nothing
/// plus the area term f'(z_i) * |W_i| on the altitude channel. The outputs are
/// scaled by the gains and the altitude channel is gated at the limits.
inline ControlInput control_input(int i, const CellGeometry& cell,
                                  const std::vector<AgentState>& states, const SensingParams& p,
                                  const Gains& g) {
    if (i < 0 || static_cast<std::size_t>(i) >= states.size())
        throw std::invalid_argument("control_input: unknown agent id");
    const AgentState& self = states[static_cast<std::size_t>(i)];
    const double f_i = coverage_quality(self.z, p);
    const double tan_a = p.tan_a();

    Vec2 planar{0.0, 0.0};
    double boundary_alt = 0.0;
    for (const TaggedLoop& loop : cell.loops) {
        for (const TaggedEdge& e : loop.edges) {
            double weight = 0.0;
            switch (e.tag.kind) {
                case EdgeTag::Kind::own_arc:
                    weight = f_i;
                    break;
                case EdgeTag::Kind::neighbor_arc: {
                    const int j = e.tag.agent;
                    if (j < 0 || static_cast<std::size_t>(j) >= states.size() || j == i)
                        throw std::invalid_argument("control_input: cell references unknown agent");
                    const AgentState& other = states[static_cast<std::size_t>(j)];
                    if (self.z < other.z) weight = f_i - coverage_quality(other.z, p);
                    break;
                }
                case EdgeTag::Kind::tie_chord: {
                    const int j = e.tag.agent;
                    if (j < 0 || static_cast<std::size_t>(j) >= states.size() || j == i)
                        throw std::invalid_argument("control_input: cell references unknown agent");
                    break;  // f_i - f_j = 0 on ties
                }
                case EdgeTag::Kind::region_boundary:
                    break;  // the region is static
            }
            if (weight != 0.0) {
                const Vec2 d = e.b - e.a;
                // outward unit normal times edge length is just (dy, -dx)
                planar.x += d.y * weight;
                planar.y += -d.x * weight;
                boundary_alt += tan_a * weight * norm(d);
            }
        }
    }

    const double area_term = coverage_quality_slope(self.z, p) * cell.area();

    ControlInput u;
    u.u_q = g.alpha_q * planar;
    u.u_z = altitude_gate(g.alpha_z * (boundary_alt + area_term), self.z, p);
    return u;
}

}  // namespace aircov
