#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "dsat/greedy.hpp"
#include "dsat/spectrum.hpp"

namespace dsat::io {

/// Shortest-safe round-trip text for a double (17 significant digits).
std::string fmt(double x);

inline constexpr std::string_view kTrajectoryHeader =
    "round,t,cell_i,cell_j,dt,m2,m3,m1,rho,total_var_mass,mass_residual";

void write_trajectory_csv(std::ostream& os, const ode::Trajectory& traj);
std::string trajectory_csv(const ode::Trajectory& traj);

/// {"h", "t", "m1", "m2", "m3", "n": [[...], ...]} with the full (h+1)^2 grid.
nlohmann::json state_to_json(const ode::SpectrumState& s);
ode::SpectrumState state_from_json(const nlohmann::json& j);

nlohmann::json config_to_json(const ode::OdeConfig& cfg);

std::string_view to_string(Backtracking b);
std::string_view to_string(RunStatus s);
std::string_view to_string(Verdict v);

/// {status, n, m, density, rule, polarity, backtracking, free_moves, forced_moves, seed}
nlohmann::json outcome_to_json(const RunOutcome& out, const Cnf& cnf, const SolverConfig& cfg);

/// Writes `content` to a sibling temp file and renames it over `path`, so a
/// failed run never leaves a partial file behind. Throws std::runtime_error.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace dsat::io
