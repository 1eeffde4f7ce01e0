#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aircov/control.hpp"
#include "aircov/geometry.hpp"
#include "aircov/partition.hpp"
#include "aircov/quality.hpp"

namespace aircov {

/// Everything needed to reproduce a run. Angles are stored in radians; the
/// file format uses degrees (see config.hpp).
struct ScenarioConfig {
    std::vector<Point2> region_vertices;
    std::vector<AgentState> agents;  // ids are assigned from the array order

    double half_angle = 20.0 * std::numbers::pi / 180.0;
    double z_min = 0.5;
    double z_max = 2.5;

    double alpha_q = 1.0;
    double alpha_z = 1.0;

    double dt = 0.01;
    long steps = 1;
    int segments = kSegmentsDefault;
    double tie_eps = kTieEpsDefault;
    bool monotone_backtracking = false;
    std::uint64_t seed = 0;

    // optional random placement helper, used when `agents` is empty
    int random_agent_count = 0;
    double random_z_low = 0.0;
    double random_z_high = 0.0;
    double random_margin = 0.0;

    SensingParams sensing() const { return SensingParams(half_angle, z_min, z_max); }
    Gains gains() const { return Gains(alpha_q, alpha_z); }
};

/// Thrown when the closed loop produces a non-finite control; carries the
/// offending state snapshot for diagnostics.
struct SimulationAbort : std::runtime_error {
    SimulationAbort(std::string msg, std::vector<AgentState> snapshot)
        : std::runtime_error(std::move(msg)), states(std::move(snapshot)) {}
    std::vector<AgentState> states;
};

/// Quality-weighted covered area: sum over agents of f(z_i) * |W_i|.
inline double coverage_objective(const Partition& part, const std::vector<AgentState>& states,
                                 const SensingParams& p) {
    double total = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i)
        total += coverage_quality(states[i].z, p) * part.cells[i].area();
    return total;
}

/// Objective value when all n agents sit at the optimal altitude with
/// disjoint, fully interior footprints.
inline double optimal_objective(int n, const SensingParams& p) {
    if (n < 1) throw std::invalid_argument("optimal_objective: need n >= 1");
    const double z = optimal_altitude(p);
    const double r = z * p.tan_a();
    return n * std::numbers::pi * r * r * coverage_quality(z, p);
}

/// Runtime pieces shared by every step of a run.
struct Scenario {
    ConvexRegion region;
    SensingParams sensing;
    Gains gains;
    double dt;
    int segments;
    double tie_eps;
    bool monotone_backtracking;
};

inline Scenario make_scenario(const ScenarioConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("ScenarioConfig: dt must be positive");
    if (cfg.steps < 0) throw std::invalid_argument("ScenarioConfig: steps must be >= 0");
    if (cfg.segments < 8) throw std::invalid_argument("ScenarioConfig: segments must be >= 8");
    if (cfg.tie_eps < 0.0) throw std::invalid_argument("ScenarioConfig: tie_eps must be >= 0");
    return Scenario{ConvexRegion(cfg.region_vertices), cfg.sensing(), cfg.gains(),
                    cfg.dt,      cfg.segments,          cfg.tie_eps,  cfg.monotone_backtracking};
}

namespace simdetail {
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}
}  // namespace simdetail

/// Agents from the config, drawing random placements when requested.
inline std::vector<AgentState> materialize_agents(const ScenarioConfig& cfg,
                                                  const ConvexRegion& region) {
    std::vector<AgentState> agents = cfg.agents;
    if (agents.empty() && cfg.random_agent_count > 0) {
        if (!(cfg.random_z_low >= cfg.z_min) || !(cfg.random_z_high <= cfg.z_max) ||
            !(cfg.random_z_low <= cfg.random_z_high))
            throw std::invalid_argument("ScenarioConfig: random z range outside [z_min, z_max]");
        std::mt19937_64 gen(cfg.seed);
        const auto [lo, hi] = region.bounding_box();
        const auto& verts = region.vertices();
        auto boundary_clearance = [&](Point2 pt) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < verts.size(); ++k) {
                const Point2 a = verts[k];
                const Point2 b = verts[(k + 1) % verts.size()];
                best = std::min(best, cross(b - a, pt - a) / distance(a, b));
            }
            return best;
        };
        for (int k = 0; k < cfg.random_agent_count; ++k) {
            Point2 pt;
            int guard = 0;
            do {
                pt = {lo.x + (hi.x - lo.x) * simdetail::uniform01(gen),
                      lo.y + (hi.y - lo.y) * simdetail::uniform01(gen)};
                if (++guard > 100000)
                    throw std::runtime_error("materialize_agents: margin leaves no room");
            } while (!region.contains(pt) || boundary_clearance(pt) < cfg.random_margin);
            const double z =
                cfg.random_z_low + (cfg.random_z_high - cfg.random_z_low) * simdetail::uniform01(gen);
            agents.push_back({k, pt, z});
        }
    }
    for (std::size_t k = 0; k < agents.size(); ++k) agents[k].id = static_cast<int>(k);
    return agents;
}

struct StepResult {
    std::vector<AgentState> states;       // accepted new states
    Partition partition;                  // partition of the new states
    double objective = 0.0;               // objective of the new states
    double dt_used = 0.0;
    int backtrack_halvings = 0;
    std::vector<ControlInput> controls;   // controls applied, one per agent
};

/// One forward-Euler step of the closed loop. When a partition/objective of
/// the input states is already available, pass it to avoid a rebuild; with
/// monotone backtracking enabled, the step is re-taken with halved dt (at most
/// 20 times) whenever the objective drops by more than 1e-12.
inline StepResult step(const std::vector<AgentState>& states, const Scenario& sc,
                       const Partition* cached_partition = nullptr,
                       const double* cached_objective = nullptr) {
    Partition local;
    const Partition* part = cached_partition;
    if (!part) {
        local = build_partition(states, sc.region, sc.sensing, sc.segments, sc.tie_eps);
        part = &local;
    }
    const double h0 = cached_objective ? *cached_objective
                                       : coverage_objective(*part, states, sc.sensing);

    StepResult result;
    result.controls.resize(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        const ControlInput u =
            control_input(static_cast<int>(i), part->cells[i], states, sc.sensing, sc.gains);
        if (!std::isfinite(u.u_q.x) || !std::isfinite(u.u_q.y) || !std::isfinite(u.u_z))
            throw SimulationAbort("non-finite control for agent " + std::to_string(i), states);
        result.controls[i] = u;
    }

    double dt = sc.dt;
    int halvings = 0;
    for (;;) {
        std::vector<AgentState> proposal = states;
        for (std::size_t i = 0; i < states.size(); ++i) {
            const ControlInput& u = result.controls[i];
            proposal[i].q = sc.region.project(proposal[i].q + dt * u.u_q);
            proposal[i].z = std::clamp(proposal[i].z + dt * u.u_z, sc.sensing.z_min, sc.sensing.z_max);
        }
        Partition next = build_partition(proposal, sc.region, sc.sensing, sc.segments, sc.tie_eps);
        const double h1 = coverage_objective(next, proposal, sc.sensing);
        if (!sc.monotone_backtracking || h1 >= h0 - 1e-12 || halvings >= 20) {
            result.states = std::move(proposal);
            result.partition = std::move(next);
            result.objective = h1;
            result.dt_used = dt;
            result.backtrack_halvings = halvings;
            return result;
        }
        dt *= 0.5;
        ++halvings;
    }
}

/// Per-step diagnostics kept for the whole run.
struct StepRecord {
    long step = 0;
    double t = 0.0;
    double objective = 0.0;        // H
    double objective_ratio = 0.0;  // H / H_opt
    double covered_fraction = 0.0;
    double dt_used = 0.0;
    int backtrack_halvings = 0;
    std::vector<double> cell_areas;
};

struct SimulationLog {
    std::vector<std::vector<AgentState>> states;  // one snapshot per record
    std::vector<StepRecord> records;
    std::vector<std::pair<int, int>> initial_contained_pairs;
    std::vector<int> initial_empty_cells;
    double final_max_control = 0.0;  // max |u| component over agents at the end
    double h_opt = 0.0;
    double region_area = 0.0;
};

/// Run the closed loop for cfg.steps steps. Deterministic given the config,
/// including the seed of the random placement helper.
inline SimulationLog run(const ScenarioConfig& cfg) {
    const Scenario sc = make_scenario(cfg);
    std::vector<AgentState> states = materialize_agents(cfg, sc.region);
    if (states.empty()) throw std::invalid_argument("ScenarioConfig: no agents");
    for (const AgentState& s : states) {
        if (!(s.z >= cfg.z_min) || !(s.z < cfg.z_max))
            throw std::invalid_argument(
                "ScenarioConfig: initial altitudes must lie in [z_min, z_max)");
        if (!sc.region.contains(s.q))
            throw std::invalid_argument("ScenarioConfig: initial position outside the region");
    }

    SimulationLog log;
    log.h_opt = optimal_objective(static_cast<int>(states.size()), sc.sensing);
    log.region_area = sc.region.area();

    Partition part = build_partition(states, sc.region, sc.sensing, sc.segments, sc.tie_eps);
    double objective = coverage_objective(part, states, sc.sensing);
    log.initial_contained_pairs = part.contained_pairs;
    for (std::size_t i = 0; i < states.size(); ++i)
        if (part.cells[i].empty()) log.initial_empty_cells.push_back(static_cast<int>(i));

    auto record = [&](long k, double t, double dt_used, int halvings) {
        StepRecord rec;
        rec.step = k;
        rec.t = t;
        rec.objective = objective;
        rec.objective_ratio = objective / log.h_opt;
        rec.covered_fraction = covered_area(part) / log.region_area;
        rec.dt_used = dt_used;
        rec.backtrack_halvings = halvings;
        rec.cell_areas.reserve(states.size());
        for (const CellGeometry& cell : part.cells) rec.cell_areas.push_back(cell.area());
        log.records.push_back(std::move(rec));
        log.states.push_back(states);
    };
    record(0, 0.0, 0.0, 0);

    double t = 0.0;
    for (long k = 1; k <= cfg.steps; ++k) {
        StepResult res = step(states, sc, &part, &objective);
        states = std::move(res.states);
        part = std::move(res.partition);
        objective = res.objective;
        t += res.dt_used;
        record(k, t, res.dt_used, res.backtrack_halvings);
    }

    double max_u = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        const ControlInput u =
            control_input(static_cast<int>(i), part.cells[i], states, sc.sensing, sc.gains);
        max_u = std::max({max_u, std::abs(u.u_q.x), std::abs(u.u_q.y), std::abs(u.u_z)});
    }
    log.final_max_control = max_u;
    return log;
}

}  // namespace aircov
