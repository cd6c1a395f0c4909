#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "thermoflow/trajectory.hpp"

namespace thermoflow::io {

/// Shortest form that round-trips a double: printf "%.17g".
inline std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// q, p column names for dimension n: "q", "p" for n = 1, else "q_1".."q_n", "p_1".."p_n".
inline std::vector<std::string> state_columns(int n)
{
    std::vector<std::string> cols;
    for (const char* base : {"q", "p"}) {
        for (int i = 1; i <= n; ++i) cols.push_back(n == 1 ? std::string(base) : base + ("_" + std::to_string(i)));
    }
    cols.push_back("S");
    return cols;
}

inline std::vector<std::string> trajectory_columns(int n)
{
    std::vector<std::string> cols = {"step", "t"};
    for (auto& c : state_columns(n)) cols.push_back(std::move(c));
    cols.push_back("H");
    cols.push_back("dS");
    return cols;
}

inline void write_header(std::ostream& out, const std::vector<std::string>& cols)
{
    for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
    out << '\n';
}

/// Row values for trajectory index k, in trajectory_columns order (without step).
inline std::vector<double> trajectory_row(const Trajectory& traj, std::size_t k)
{
    const ContactPoint& x = traj.states[k];
    std::vector<double> row = {traj.times[k]};
    for (Eigen::Index i = 0; i < x.q.size(); ++i) row.push_back(x.q[i]);
    for (Eigen::Index i = 0; i < x.p.size(); ++i) row.push_back(x.p[i]);
    row.push_back(x.S);
    row.push_back(traj.energy[k]);
    row.push_back(traj.entropy_increment[k]);
    return row;
}

inline void write_row(std::ostream& out, long long step, const std::vector<double>& values)
{
    out << step;
    for (double v : values) out << ',' << format_double(v);
    out << '\n';
}

/// Header `step,t,q...,p...,S,H,dS` followed by one row per state.
inline void write_trajectory(std::ostream& out, const Trajectory& traj)
{
    const int n = traj.empty() ? 1 : traj.states.front().dim();
    write_header(out, trajectory_columns(n));
    for (std::size_t k = 0; k < traj.size(); ++k) write_row(out, static_cast<long long>(k), trajectory_row(traj, k));
}

inline void write_failure_trailer(std::ostream& out, int step) { out << "# FAILED at step " << step << '\n'; }

} // namespace thermoflow::io
