#include "dsat/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <unistd.h>

namespace dsat::io {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_trajectory_csv(std::ostream& os, const ode::Trajectory& traj) {
    os << kTrajectoryHeader << '\n';
    for (const ode::TrajectoryRow& r : traj.rows) {
        os << r.round << ',' << fmt(r.t) << ',' << r.report.cell.pos << ',' << r.report.cell.neg << ','
           << fmt(r.report.dt) << ',' << fmt(r.m2) << ',' << fmt(r.m3) << ',' << fmt(r.report.m1) << ','
           << fmt(r.report.rho) << ',' << fmt(r.total_var_mass) << ',' << fmt(r.report.mass_residual) << '\n';
    }
}

std::string trajectory_csv(const ode::Trajectory& traj) {
    std::ostringstream os;
    write_trajectory_csv(os, traj);
    return os.str();
}

// nlohmann::json prints the shortest text that parses back to the same double.
nlohmann::json state_to_json(const ode::SpectrumState& s) {
    nlohmann::json grid = nlohmann::json::array();
    for (int i = 0; i <= s.h(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j <= s.h(); ++j) row.push_back(s.n(i, j));
        grid.push_back(std::move(row));
    }
    return {{"h", s.h()}, {"t", s.t}, {"m1", s.m1}, {"m2", s.m2}, {"m3", s.m3}, {"n", std::move(grid)}};
}

ode::SpectrumState state_from_json(const nlohmann::json& j) {
    const int h = j.at("h").get<int>();
    if (h < 1) throw std::invalid_argument("state_from_json: h must be positive");
    ode::SpectrumState s(h);
    s.t = j.at("t").get<double>();
    s.m1 = j.at("m1").get<double>();
    s.m2 = j.at("m2").get<double>();
    s.m3 = j.at("m3").get<double>();
    const auto& grid = j.at("n");
    if (grid.size() != static_cast<std::size_t>(h + 1))
        throw std::invalid_argument("state_from_json: grid has wrong row count");
    for (int i = 0; i <= h; ++i) {
        const auto& row = grid.at(static_cast<std::size_t>(i));
        if (row.size() != static_cast<std::size_t>(h + 1))
            throw std::invalid_argument("state_from_json: grid has wrong column count");
        for (int k = 0; k <= h; ++k) s.n(i, k) = row.at(static_cast<std::size_t>(k)).get<double>();
    }
    return s;
}

nlohmann::json config_to_json(const ode::OdeConfig& cfg) {
    return {{"h", cfg.h},
            {"delta", cfg.delta},
            {"clamp_eps", cfg.clamp_eps},
            {"rho_guard", cfg.rho_guard},
            {"end_mass", cfg.end_mass},
            {"mass_floor", cfg.mass_floor},
            {"balance_tol0", cfg.balance_tol0},
            {"balance_kappa", cfg.balance_kappa},
            {"max_round_fraction", cfg.max_round_fraction},
            {"max_rounds", cfg.max_rounds},
            {"pure", cfg.pure == PurePriority::MaxSum ? "max-sum" : "min-sum"},
            {"fill_rounds", cfg.fill_rounds}};
}

std::string_view to_string(Backtracking b) { return b == Backtracking::None ? "none" : "one-step"; }
std::string_view to_string(RunStatus s) { return s == RunStatus::Success ? "success" : "failure"; }

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Sat: return "SAT";
        case Verdict::Unsat: return "UNSAT";
        case Verdict::BudgetExceeded: return "BudgetExceeded";
    }
    return "?";
}

nlohmann::json outcome_to_json(const RunOutcome& out, const Cnf& cnf, const SolverConfig& cfg) {
    const double density = cnf.num_vars == 0 ? 0.0 : double(cnf.clauses.size()) / cnf.num_vars;
    return {{"status", to_string(out.status)},
            {"n", cnf.num_vars},
            {"m", cnf.clauses.size()},
            {"density", density},
            {"rule", to_string(cfg.selection)},
            {"polarity", to_string(cfg.polarity)},
            {"backtracking", to_string(cfg.backtracking)},
            {"free_moves", out.free_moves},
            {"forced_moves", out.forced_moves},
            {"seed", cfg.seed}};
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        os.flush();
        if (!os) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw std::runtime_error("write to " + tmp.string() + " failed");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw std::runtime_error("cannot rename onto " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace dsat::io
