#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "aircov/sim.hpp"

namespace aircov {

/// Shortest rendering of a double that round-trips (17 significant digits).
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Write via a temp file plus rename so readers never observe partial output.
inline void atomic_write_file(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out) throw std::runtime_error("write failure on '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

/// step,t,x1,y1,z1,... one row per logged step, LF line endings.
inline std::string trajectory_csv(const SimulationLog& log) {
    const std::size_t n = log.states.empty() ? 0 : log.states.front().size();
    std::string out = "step,t";
    for (std::size_t i = 0; i < n; ++i) {
        const std::string k = std::to_string(i + 1);
        out += ",x" + k + ",y" + k + ",z" + k;
    }
    out += "\n";
    for (std::size_t row = 0; row < log.states.size(); ++row) {
        out += std::to_string(log.records[row].step) + "," + format_g17(log.records[row].t);
        for (const AgentState& s : log.states[row])
            out += "," + format_g17(s.q.x) + "," + format_g17(s.q.y) + "," + format_g17(s.z);
        out += "\n";
    }
    return out;
}

/// step,t,H,H_over_Hopt,covered_fraction per logged step.
inline std::string metrics_csv(const SimulationLog& log) {
    std::string out = "step,t,H,H_over_Hopt,covered_fraction\n";
    for (const StepRecord& rec : log.records) {
        out += std::to_string(rec.step) + "," + format_g17(rec.t) + "," +
               format_g17(rec.objective) + "," + format_g17(rec.objective_ratio) + "," +
               format_g17(rec.covered_fraction) + "\n";
    }
    return out;
}

}  // namespace aircov
