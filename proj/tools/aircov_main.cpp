// aircov: deterministic simulator and verification harness for visual area
// coverage by altitude-constrained aerial agents.
//
// Subcommands:
//   run        integrate a scenario and write trajectory/metrics CSV files
//   verify     cross-check the analytic control law against quadrature oracles
//   equilibria report the closed-form altitude equilibria for given parameters
//   sweep      run a family of scenarios and tabulate final metrics
//
// Exit codes: 0 success, 2 config error, 3 runtime error, 4 verification failure.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "aircov/aircov.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitVerification = 4;

struct RunOptions {
    std::string config_path;
    std::string out_dir = ".";
    double dt_override = -1.0;
    long steps_override = -1;
    bool backtrack = false;
    bool dump_config = false;
};

struct VerifyOptions {
    std::string config_path;
    int grid = 1500;
    double h = 1e-4;
};

struct EquilibriaOptions {
    double z_min = 0.5;
    double z_max = 2.5;
    double a_deg = 20.0;
};

struct SweepOptions {
    double z_min = 0.5;
    double z_max = 2.5;
    double a_deg = 20.0;
    double omega = 10.0;
    int n_from = 1;
    int n_to = 5;
    long steps = 2000;
    double dt = 0.01;
    std::uint64_t seed = 1;
    std::string out_file;
};

int cmd_run(const RunOptions& opt) {
    aircov::ScenarioConfig cfg;
    try {
        cfg = aircov::load_config(opt.config_path);
        if (opt.dt_override > 0.0) cfg.dt = opt.dt_override;
        if (opt.steps_override >= 0) cfg.steps = opt.steps_override;
        if (opt.backtrack) cfg.monotone_backtracking = true;
        aircov::make_scenario(cfg);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    if (opt.dump_config) {
        try {
            std::cout << aircov::config_to_json(cfg).dump(2) << "\n";
        } catch (const std::exception& e) {
            std::cerr << "config error: " << e.what() << "\n";
            return kExitConfig;
        }
        return kExitOk;
    }

    try {
        const aircov::SimulationLog log = aircov::run(cfg);
        const std::filesystem::path dir(opt.out_dir);
        std::filesystem::create_directories(dir);
        const auto traj_path = dir / "trajectory.csv";
        const auto metrics_path = dir / "metrics.csv";
        aircov::atomic_write_file(traj_path, aircov::trajectory_csv(log));
        aircov::atomic_write_file(metrics_path, aircov::metrics_csv(log));

        const aircov::StepRecord& last = log.records.back();
        std::cout << "steps: " << last.step << "  t: " << aircov::format_g17(last.t) << "\n";
        std::cout << "H: " << aircov::format_g17(last.objective)
                  << "  H/H_opt: " << aircov::format_g17(last.objective_ratio)
                  << "  covered_fraction: " << aircov::format_g17(last.covered_fraction) << "\n";
        std::cout << "convergence max|u|: " << aircov::format_g17(log.final_max_control) << "\n";
        if (!log.initial_contained_pairs.empty()) {
            std::cout << "note: contained footprints at t=0:";
            for (auto [inner, outer] : log.initial_contained_pairs)
                std::cout << " (" << inner << " inside " << outer << ")";
            std::cout << "\n";
        }
        if (!log.initial_empty_cells.empty()) {
            std::cout << "note: empty cells at t=0:";
            for (int id : log.initial_empty_cells) std::cout << " " << id;
            std::cout << "\n";
        }
        std::cout << "trajectory: " << traj_path.string() << "\n";
        std::cout << "metrics: " << metrics_path.string() << "\n";
        return kExitOk;
    } catch (const aircov::SimulationAbort& e) {
        const std::filesystem::path snap = std::filesystem::path(opt.out_dir) / "abort_snapshot.json";
        nlohmann::json j;
        j["error"] = e.what();
        j["agents"] = nlohmann::json::array();
        for (const aircov::AgentState& s : e.states)
            j["agents"].push_back({{"x", s.q.x}, {"y", s.q.y}, {"z", s.z}});
        try {
            std::filesystem::create_directories(snap.parent_path());
            aircov::atomic_write_file(snap, j.dump(2));
            std::cerr << "runtime abort: " << e.what() << " (snapshot: " << snap.string() << ")\n";
        } catch (...) {
            std::cerr << "runtime abort: " << e.what() << "\n";
        }
        return kExitRuntime;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int cmd_verify(const VerifyOptions& opt) {
    aircov::ScenarioConfig cfg;
    try {
        cfg = aircov::load_config(opt.config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        const aircov::ConvexRegion region(cfg.region_vertices);
        const aircov::SensingParams sensing = cfg.sensing();
        const std::vector<aircov::AgentState> states = aircov::materialize_agents(cfg, region);

        // skip gradient checks on configurations the law treats specially
        bool degenerate = false;
        std::string reason;
        for (std::size_t i = 0; i < states.size() && !degenerate; ++i) {
            for (std::size_t j = i + 1; j < states.size() && !degenerate; ++j) {
                if (std::abs(states[i].z - states[j].z) <= std::max(cfg.tie_eps, 1e-6)) {
                    degenerate = true;
                    reason = "altitude tie between agents " + std::to_string(i) + " and " +
                             std::to_string(j);
                }
                const aircov::Circle ci = aircov::footprint(states[i], sensing);
                const aircov::Circle cj = aircov::footprint(states[j], sensing);
                const double d = aircov::distance(ci.center, cj.center);
                if (d + std::min(ci.radius, cj.radius) <=
                    std::max(ci.radius, cj.radius) + aircov::kGeomEps) {
                    degenerate = true;
                    reason = "contained footprints " + std::to_string(i) + "/" + std::to_string(j);
                }
            }
        }

        const aircov::Partition part =
            aircov::build_partition(states, region, sensing, cfg.segments, cfg.tie_eps);
        const double h_partition = aircov::coverage_objective(part, states, sensing);
        aircov::QuadratureSpec spec;
        spec.mode = aircov::QuadratureSpec::Mode::grid;
        spec.resolution = opt.grid;
        const double h_oracle = aircov::oracle_H(states, region, sensing, spec);
        const double h_rel =
            std::abs(h_partition - h_oracle) / std::max(std::abs(h_oracle), 1e-300);
        std::cout << "objective (partition sum): " << aircov::format_g17(h_partition) << "\n";
        std::cout << "objective (oracle):        " << aircov::format_g17(h_oracle) << "\n";
        std::cout << "relative difference:       " << aircov::format_g17(h_rel) << "\n";
        bool ok = h_rel <= 5e-3;
        if (!ok) std::cout << "FAIL objective agreement exceeds 0.5%\n";

        if (degenerate) {
            std::cout << "degenerate configuration (" << reason
                      << "): gradient checks skipped\n";
            return kExitOk;
        }

        const aircov::Gains unit_gains;
        std::printf("%-6s %-4s %14s %14s %12s\n", "agent", "axis", "analytic", "finite-diff",
                    "abs diff");
        for (std::size_t i = 0; i < states.size(); ++i) {
            const aircov::ControlInput u = aircov::control_input(
                static_cast<int>(i), part.cells[i], states, sensing, unit_gains);
            const std::array<double, 3> fd =
                aircov::fd_gradient(states, region, sensing, spec, static_cast<int>(i), opt.h);
            const double analytic[3] = {u.u_q.x, u.u_q.y, u.u_z};
            const char* axes[3] = {"x", "y", "z"};
            // at z_max the true gradient is exactly zero; the one-sided
            // difference of the quadratic zero of f keeps an O(h) bias
            const bool at_zmax = states[i].z >= sensing.z_max - aircov::kAltGateEps;
            for (int c = 0; c < 3; ++c) {
                const double diff = std::abs(analytic[c] - fd[static_cast<std::size_t>(c)]);
                std::printf("%-6zu %-4s %14.8f %14.8f %12.3e\n", i, axes[c], analytic[c],
                            fd[static_cast<std::size_t>(c)], diff);
                const double tol = at_zmax ? 10.0 * opt.h
                                           : std::max(0.02 * std::abs(fd[static_cast<std::size_t>(c)]),
                                                      1e-4);
                if (diff > tol || (at_zmax && analytic[c] != 0.0)) {
                    std::printf("FAIL gradient mismatch on agent %zu axis %s\n", i, axes[c]);
                    ok = false;
                }
            }
        }
        std::cout << (ok ? "PASS\n" : "FAIL\n");
        return ok ? kExitOk : kExitVerification;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

int cmd_equilibria(const EquilibriaOptions& opt) {
    try {
        const aircov::SensingParams p(opt.a_deg * std::numbers::pi / 180.0, opt.z_min, opt.z_max);
        const aircov::AltitudeEquilibria eq = aircov::altitude_equilibria(p);
        std::cout << "Q: " << aircov::format_g17(eq.q_value)
                  << "  P: " << aircov::format_g17(eq.p_value) << "\n";
        std::cout << "z_opt: " << aircov::format_g17(eq.z_opt) << "\n";
        for (std::size_t k = 0; k < eq.roots.size(); ++k) {
            const double z = eq.roots[k];
            const bool in_range = z >= p.z_min && z <= p.z_max;
            const double residual =
                in_range ? std::abs(aircov::isolated_altitude_rate(z, p))
                         : std::numeric_limits<double>::quiet_NaN();
            std::cout << "root z" << (k + 1) << ": " << aircov::format_g17(z)
                      << (in_range ? "  [in range]  |rate| = " + aircov::format_g17(residual)
                                   : "  [outside range]")
                      << "\n";
        }
        std::cout << "rate samples (z, rate):\n";
        for (int k = 0; k <= 8; ++k) {
            const double z = p.z_min + (p.z_max - p.z_min) * k / 8.0;
            std::cout << "  " << aircov::format_g17(z) << "  "
                      << aircov::format_g17(aircov::isolated_altitude_rate(z, p)) << "\n";
        }
        std::cout << "sign: positive on [z_min, z_opt), negative on (z_opt, z_max)\n";
        return kExitOk;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
}

int cmd_sweep(const SweepOptions& opt) {
    try {
        std::string table = "n,omega,H,H_over_Hopt,covered_fraction,max_u\n";
        for (int n = opt.n_from; n <= opt.n_to; ++n) {
            aircov::ScenarioConfig cfg;
            cfg.region_vertices = {{0, 0}, {opt.omega, 0}, {opt.omega, opt.omega}, {0, opt.omega}};
            cfg.half_angle = opt.a_deg * std::numbers::pi / 180.0;
            cfg.z_min = opt.z_min;
            cfg.z_max = opt.z_max;
            cfg.dt = opt.dt;
            cfg.steps = opt.steps;
            cfg.seed = opt.seed + static_cast<std::uint64_t>(n);
            cfg.random_agent_count = n;
            cfg.random_z_low = opt.z_min + 0.05 * (opt.z_max - opt.z_min);
            cfg.random_z_high = opt.z_min + 0.6 * (opt.z_max - opt.z_min);
            cfg.random_margin = 0.02 * opt.omega;
            const aircov::SimulationLog log = aircov::run(cfg);
            const aircov::StepRecord& last = log.records.back();
            table += std::to_string(n) + "," + aircov::format_g17(opt.omega) + "," +
                     aircov::format_g17(last.objective) + "," +
                     aircov::format_g17(last.objective_ratio) + "," +
                     aircov::format_g17(last.covered_fraction) + "," +
                     aircov::format_g17(log.final_max_control) + "\n";
            std::cerr << "sweep: finished n=" << n << "\n";
        }
        if (opt.out_file.empty())
            std::cout << table;
        else
            aircov::atomic_write_file(opt.out_file, table);
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"visual area coverage simulator for altitude-constrained aerial agents"};
    app.require_subcommand(1);

    RunOptions run_opt;
    CLI::App* run = app.add_subcommand("run", "integrate a scenario and write CSV outputs");
    run->add_option("config", run_opt.config_path, "scenario JSON file")->required();
    run->add_option("--out", run_opt.out_dir, "output directory");
    run->add_option("--dt", run_opt.dt_override, "override the time step");
    run->add_option("--steps", run_opt.steps_override, "override the step count");
    run->add_flag("--backtrack", run_opt.backtrack, "enable monotone backtracking");
    run->add_flag("--dump-config", run_opt.dump_config, "print the normalized config and exit");

    VerifyOptions verify_opt;
    CLI::App* verify = app.add_subcommand("verify", "analytic-vs-oracle cross checks");
    verify->set_help_flag("--help", "print help");  // frees -h for the step option
    verify->add_option("config", verify_opt.config_path, "scenario JSON file")->required();
    verify->add_option("--grid", verify_opt.grid, "quadrature rows per axis");
    verify->add_option("--h", verify_opt.h, "finite difference step");

    EquilibriaOptions eq_opt;
    CLI::App* eq = app.add_subcommand("equilibria", "closed-form altitude equilibria");
    eq->add_option("--zmin", eq_opt.z_min, "minimum altitude");
    eq->add_option("--zmax", eq_opt.z_max, "maximum altitude");
    eq->add_option("--a-deg", eq_opt.a_deg, "half cone angle in degrees");

    SweepOptions sweep_opt;
    CLI::App* sweep = app.add_subcommand("sweep", "sweep the agent count and tabulate metrics");
    sweep->add_option("--zmin", sweep_opt.z_min, "minimum altitude");
    sweep->add_option("--zmax", sweep_opt.z_max, "maximum altitude");
    sweep->add_option("--a-deg", sweep_opt.a_deg, "half cone angle in degrees");
    sweep->add_option("--omega", sweep_opt.omega, "square region side length");
    sweep->add_option("--n-from", sweep_opt.n_from, "first agent count");
    sweep->add_option("--n-to", sweep_opt.n_to, "last agent count");
    sweep->add_option("--steps", sweep_opt.steps, "steps per run");
    sweep->add_option("--dt", sweep_opt.dt, "time step");
    sweep->add_option("--seed", sweep_opt.seed, "placement seed");
    sweep->add_option("--out", sweep_opt.out_file, "write the table to a file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    if (run->parsed()) return cmd_run(run_opt);
    if (verify->parsed()) return cmd_verify(verify_opt);
    if (eq->parsed()) return cmd_equilibria(eq_opt);
    if (sweep->parsed()) return cmd_sweep(sweep_opt);
    return kExitConfig;
}
