#pragma once

#include <fstream>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "aircov/sim.hpp"

namespace aircov {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// JSON scenario format. Keys mirror ScenarioConfig; angles are written in
// degrees and converted to radians on load.
//
// {
//   "region": [[0,0],[10,0],[10,10],[0,10]],
//   "agents": [{"x":4.5,"y":5.0,"z":0.9}, ...],
//   "sensing": {"half_angle_deg":20.0, "z_min":0.5, "z_max":2.5},
//   "gains": {"alpha_q":1.0, "alpha_z":1.0},
//   "dt":0.01, "steps":1000, "segments":720, "tie_eps":1e-7,
//   "monotone_backtracking":false, "seed":0,
//   "random_agents": {"count":9, "z_low":0.6, "z_high":1.4, "margin":0.3}
// }
// "agents" and "random_agents" are alternatives; explicit agents win.

inline ScenarioConfig config_from_json(const nlohmann::json& j) {
    ScenarioConfig cfg;
    try {
        if (!j.contains("region") || !j.at("region").is_array() || j.at("region").size() < 3)
            throw config_error("config: 'region' must be an array of at least 3 [x,y] pairs");
        for (const auto& v : j.at("region")) {
            if (!v.is_array() || v.size() != 2)
                throw config_error("config: region vertices must be [x,y] pairs");
            cfg.region_vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
        }

        if (j.contains("sensing")) {
            const auto& s = j.at("sensing");
            cfg.half_angle = s.value("half_angle_deg", 20.0) * std::numbers::pi / 180.0;
            cfg.z_min = s.value("z_min", cfg.z_min);
            cfg.z_max = s.value("z_max", cfg.z_max);
        }
        if (j.contains("gains")) {
            const auto& g = j.at("gains");
            cfg.alpha_q = g.value("alpha_q", cfg.alpha_q);
            cfg.alpha_z = g.value("alpha_z", cfg.alpha_z);
        }
        cfg.dt = j.value("dt", cfg.dt);
        cfg.steps = j.value("steps", cfg.steps);
        cfg.segments = j.value("segments", cfg.segments);
        cfg.tie_eps = j.value("tie_eps", cfg.tie_eps);
        cfg.monotone_backtracking = j.value("monotone_backtracking", cfg.monotone_backtracking);
        cfg.seed = j.value("seed", cfg.seed);

        if (j.contains("agents")) {
            int id = 0;
            for (const auto& a : j.at("agents")) {
                if (!a.contains("x") || !a.contains("y") || !a.contains("z"))
                    throw config_error("config: each agent needs x, y and z");
                cfg.agents.push_back(
                    {id++, {a.at("x").get<double>(), a.at("y").get<double>()}, a.at("z").get<double>()});
            }
        }
        if (j.contains("random_agents")) {
            const auto& r = j.at("random_agents");
            cfg.random_agent_count = r.value("count", 0);
            cfg.random_z_low = r.value("z_low", cfg.z_min);
            cfg.random_z_high = r.value("z_high", cfg.z_max);
            cfg.random_margin = r.value("margin", 0.0);
        }
        if (cfg.agents.empty() && cfg.random_agent_count <= 0)
            throw config_error("config: need either 'agents' or 'random_agents'");

        // validate eagerly so parse errors surface with context
        cfg.sensing();
        cfg.gains();
        make_scenario(cfg);
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("config: ") + e.what());
    }
    return cfg;
}

inline ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("config: parse failure in '" + path + "': " + e.what());
    }
    return config_from_json(j);
}

/// Normalized JSON for a config; agents are written explicitly so the echoed
/// file reproduces the same scenario even when they were drawn randomly.
inline nlohmann::json config_to_json(const ScenarioConfig& cfg) {
    nlohmann::json j;
    j["region"] = nlohmann::json::array();
    for (const Point2& v : cfg.region_vertices) j["region"].push_back({v.x, v.y});
    j["sensing"] = {{"half_angle_deg", cfg.half_angle * 180.0 / std::numbers::pi},
                    {"z_min", cfg.z_min},
                    {"z_max", cfg.z_max}};
    j["gains"] = {{"alpha_q", cfg.alpha_q}, {"alpha_z", cfg.alpha_z}};
    j["dt"] = cfg.dt;
    j["steps"] = cfg.steps;
    j["segments"] = cfg.segments;
    j["tie_eps"] = cfg.tie_eps;
    j["monotone_backtracking"] = cfg.monotone_backtracking;
    j["seed"] = cfg.seed;
    j["agents"] = nlohmann::json::array();
    ConvexRegion region(cfg.region_vertices);
    for (const AgentState& a : materialize_agents(cfg, region))
        j["agents"].push_back({{"x", a.q.x}, {"y", a.q.y}, {"z", a.z}});
    return j;
}

}  // namespace aircov
