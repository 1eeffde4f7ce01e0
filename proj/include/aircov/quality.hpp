#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "aircov/geometry.hpp"

namespace aircov {

/// Downward conical camera parameters shared by all agents.
struct SensingParams {
    double half_angle = 0.0;  // half the sensing-cone angle, radians
    double z_min = 0.0;       // meters
    double z_max = 0.0;       // meters

    SensingParams(double half_angle_rad, double zmin, double zmax)
        : half_angle(half_angle_rad), z_min(zmin), z_max(zmax) {
        if (!(half_angle > 0.0) || !(half_angle < std::numbers::pi / 2.0))
            throw std::invalid_argument("SensingParams: half angle must be in (0, pi/2)");
        if (!(z_min > 0.0) || !(z_min < z_max))
            throw std::invalid_argument("SensingParams: need 0 < z_min < z_max");
    }

    double tan_a() const { return std::tan(half_angle); }
    double span() const { return z_max - z_min; }
};

namespace qualitydetail {
inline void require_in_range(double z, const SensingParams& p, const char* who) {
    if (z < p.z_min || z > p.z_max)
        throw std::out_of_range(std::string(who) + ": altitude outside [z_min, z_max]");
}
}  // namespace qualitydetail

/// Coverage quality at altitude z: 1 at z_min, 0 at z_max, strictly decreasing.
/// Evaluated in factored form to avoid cancellation near z_max.
inline double coverage_quality(double z, const SensingParams& p) {
    qualitydetail::require_in_range(z, p, "coverage_quality");
    const double u = z - p.z_min;
    const double span = p.span();
    const double core = (u * u - span * span) / (span * span);
    return core * core;
}

/// d(coverage_quality)/dz; nonpositive on [z_min, z_max].
inline double coverage_quality_slope(double z, const SensingParams& p) {
    qualitydetail::require_in_range(z, p, "coverage_quality_slope");
    const double u = z - p.z_min;
    const double span = p.span();
    return 4.0 * u * (u * u - span * span) / (span * span * span * span);
}

/// Altitude where the quality slope is most negative: z_min + (sqrt(3)/3) * span.
inline double quality_slope_min_location(const SensingParams& p) {
    return p.z_min + std::numbers::sqrt3 / 3.0 * p.span();
}

/// Most negative value of the quality slope: -8*sqrt(3) / (9 * span).
inline double quality_slope_min_value(const SensingParams& p) {
    return -8.0 * std::numbers::sqrt3 / (9.0 * p.span());
}

/// Altitude drive of an isolated agent whose cell is its whole footprint
/// (unit gain): pi tan^2(a) z (2 f(z) + z f'(z)).
inline double isolated_altitude_rate(double z, const SensingParams& p) {
    qualitydetail::require_in_range(z, p, "isolated_altitude_rate");
    const double t = p.tan_a();
    return std::numbers::pi * t * t * z *
           (2.0 * coverage_quality(z, p) + z * coverage_quality_slope(z, p));
}

/// Slope of the isolated altitude drive at z_max: 8 pi tan^2(a) z_max^2 / span^2.
/// Always positive, which makes the z_max equilibrium unstable.
inline double isolated_rate_slope_at_zmax(const SensingParams& p) {
    const double t = p.tan_a();
    return 8.0 * std::numbers::pi * t * t * p.z_max * p.z_max / (p.span() * p.span());
}

/// The five real equilibria of the isolated altitude dynamics, in closed form.
struct AltitudeEquilibria {
    std::array<double, 5> roots{};  // {0, z_max, 2 z_min - z_max, (2 z_min -+ sqrt(Q))/3}
    double q_value = 0.0;           // Q = 3 z_max^2 - 6 z_max z_min + 4 z_min^2 = P + z_min^2
    double p_value = 0.0;           // P = 3 (z_max - z_min)^2
    double z_opt = 0.0;             // the unique stable root, inside (z_min, z_max)
};

inline AltitudeEquilibria altitude_equilibria(const SensingParams& p) {
    AltitudeEquilibria eq;
    eq.p_value = 3.0 * p.span() * p.span();
    eq.q_value = eq.p_value + p.z_min * p.z_min;
    const double sqrt_q = std::sqrt(eq.q_value);
    eq.roots = {0.0,
                p.z_max,
                2.0 * p.z_min - p.z_max,
                (2.0 * p.z_min - sqrt_q) / 3.0,
                (2.0 * p.z_min + sqrt_q) / 3.0};
    eq.z_opt = eq.roots[4];
    return eq;
}

/// Altitude an isolated, fully interior agent converges to.
inline double optimal_altitude(const SensingParams& p) { return altitude_equilibria(p).z_opt; }

}  // namespace aircov
