// Command-line front end: gen, solve, mc-sweep, ode-run, threshold, xval.
//
// Exit codes: 0 ok, 1 usage or I/O error, 10 satisfiable / greedy success,
// 20 unsatisfiable, 30 heuristic failure (greedy failure, DPLL budget
// exhausted, or an ODE trajectory that did not reach the endgame).

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dsat/dimacs.hpp"
#include "dsat/generator.hpp"
#include "dsat/greedy.hpp"
#include "dsat/harness.hpp"
#include "dsat/io.hpp"
#include "dsat/threshold.hpp"

namespace {

using namespace dsat;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitSat = 10;
constexpr int kExitUnsat = 20;
constexpr int kExitFailure = 30;

// The option values are kept as names and resolved in the callbacks.
const std::vector<std::string> kRuleNames{"maxdiff-maxsum", "maxdiff-minsum", "maxratio", "maxmax"};
const std::vector<std::string> kPolarityNames{"majority", "paper"};
const std::vector<std::string> kBacktrackNames{"none", "one-step"};

struct Common {
    std::string rule_name = "maxdiff-maxsum";
    std::string polarity_name = "majority";
    std::string backtrack_name = "none";
    std::uint64_t seed = 1;
    int threads = 0;
    std::string out;

    SelectionRule rule() const { return *parse_selection_rule(rule_name); }
    PolarityRule polarity() const { return *parse_polarity_rule(polarity_name); }
    Backtracking backtrack() const { return backtrack_name == "one-step" ? Backtracking::OneStep : Backtracking::None; }
};

void add_rule(CLI::App* app, Common& c) {
    app->add_option("--rule", c.rule_name, "selection rule")->check(CLI::IsMember(kRuleNames));
    app->add_option("--polarity", c.polarity_name, "polarity rule")->check(CLI::IsMember(kPolarityNames));
}

void add_ode(CLI::App* app, ode::OdeConfig& cfg) {
    app->add_option("--h", cfg.h, "spectrum truncation index")->check(CLI::Range(1, 200));
    app->add_option("--delta", cfg.delta, "variable mass per round")->check(CLI::PositiveNumber);
    app->add_option("--end-mass", cfg.end_mass, "endgame active-mass threshold")->check(CLI::PositiveNumber);
    app->add_option("--rho-guard", cfg.rho_guard, "stop when rho >= 1 - rho_guard")->check(CLI::PositiveNumber);
}

// Writes to --out atomically, or to stdout when no path was given.
void emit(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-")
        std::cout << content << std::flush;
    else
        io::write_file_atomic(path, content);
}

std::string solver_settings(const SolverConfig& s) {
    return std::string(to_string(s.selection)) + "/" + std::string(to_string(s.polarity)) + "/" +
           std::string(io::to_string(s.backtracking));
}

nlohmann::json assignment_json(const Assignment& a) {
    nlohmann::json lits = nlohmann::json::array();
    for (std::size_t v = 1; v < a.size(); ++v) lits.push_back(a[v] == Value::True ? long(v) : -long(v));
    return lits;
}

int cmd_gen(Var n, double c, std::uint64_t seed, const std::string& out) {
    emit(out, emit_dimacs(generate_random(n, c, seed)));
    return kExitOk;
}

int cmd_solve(const std::string& path, const Common& com, const std::string& mode, std::uint64_t node_limit) {
    const Cnf cnf = parse_dimacs(io::read_file(path));
    SolverConfig cfg;
    cfg.selection = com.rule();
    cfg.polarity = com.polarity();
    cfg.backtracking = mode == "greedy+backtrack" ? Backtracking::OneStep : com.backtrack();
    cfg.seed = com.seed;

    nlohmann::json verdict;
    int code = kExitError;
    if (mode == "dpll") {
        const DpllResult r = dpll_solve(cnf, cfg, node_limit);
        verdict = {{"status", io::to_string(r.verdict)}, {"n", cnf.num_vars}, {"m", cnf.clauses.size()},
                   {"rule", to_string(cfg.selection)},   {"polarity", to_string(cfg.polarity)},
                   {"nodes", r.nodes},                   {"seed", cfg.seed}};
        if (r.verdict == Verdict::Sat) verdict["assignment"] = assignment_json(r.assignment);
        code = r.verdict == Verdict::Sat ? kExitSat : r.verdict == Verdict::Unsat ? kExitUnsat : kExitFailure;
    } else {
        const RunOutcome r = run_algorithm_a(cnf, cfg);
        verdict = io::outcome_to_json(r, cnf, cfg);
        if (r.status == RunStatus::Success) {
            verdict["assignment"] = assignment_json(r.assignment);
            code = kExitSat;
        } else {
            verdict["failure_depth"] = r.failure_depth;
            code = kExitFailure;
        }
    }
    emit(com.out, verdict.dump() + "\n");
    return code;
}

int cmd_mc_sweep(harness::SweepConfig cfg, const Common& com, bool timing) {
    cfg.base_seed = com.seed;
    cfg.threads = com.threads;
    cfg.solver.selection = com.rule();
    cfg.solver.polarity = com.polarity();
    cfg.solver.backtracking = com.backtrack();
    const auto rows = harness::mc_sweep(cfg);
    std::cerr << "mc-sweep " << solver_settings(cfg.solver) << " n=" << cfg.n << " trials=" << cfg.trials << '\n';
    emit(com.out, harness::sweep_csv(rows, timing));
    return kExitOk;
}

int cmd_ode_run(double c, const ode::OdeConfig& cfg, const Common& com, const std::string& state_out) {
    const ode::Trajectory traj = ode::run_trajectory(c, cfg, com.rule(), com.polarity());
    emit(com.out, io::trajectory_csv(traj));
    if (!state_out.empty()) io::write_file_atomic(state_out, io::state_to_json(traj.final_state).dump() + "\n");
    std::fprintf(stderr, "termination=%s rounds=%llu t=%.17g max_rho=%.17g\n",
                 std::string(ode::to_string(traj.termination)).c_str(),
                 static_cast<unsigned long long>(traj.rounds), traj.final_state.t, traj.max_rho);
    return traj.termination == ode::Termination::EndgameReached ? kExitOk : kExitFailure;
}

int cmd_threshold(const std::string& rule_name, const Common& com, const ode::OdeConfig& cfg, double lo, double hi,
                  double tol, const search::BisectOptions& opts) {
    std::vector<search::ThresholdResult> results;
    if (rule_name == "all") {
        results = search::compare_rules(com.polarity(), cfg, lo, hi, tol, opts, com.threads);
    } else {
        const auto rule = parse_selection_rule(rule_name);
        if (!rule) throw CLI::ValidationError("--rule", "unknown rule " + rule_name);
        results.push_back(search::bisect_threshold(*rule, com.polarity(), cfg, lo, hi, tol, opts));
    }
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : results) out.push_back(search::to_json(r));
    std::cerr << search::format_table(results);
    emit(com.out, (results.size() == 1 ? out[0] : out).dump(2) + "\n");
    return kExitOk;
}

int cmd_xval(harness::XvalConfig cfg, const Common& com) {
    cfg.base_seed = com.seed;
    cfg.threads = com.threads;
    cfg.solver.selection = com.rule();
    cfg.solver.polarity = com.polarity();
    if (cfg.n < harness::kXvalRecommendedN)
        std::cerr << "warning: n=" << cfg.n << " is below " << harness::kXvalRecommendedN
                  << "; spectra are noisy and the tolerance is widened\n";
    const harness::XvalReport report = harness::cross_validate(cfg);
    emit(com.out, harness::xval_csv(cfg, report));
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Degree-heuristic random 3-SAT toolkit"};
    app.set_help_flag("--help", "print this help and exit");  // --h is the truncation index
    app.require_subcommand(1);
    Common com;
    int code = kExitOk;

    auto* gen = app.add_subcommand("gen", "write a random 3-CNF formula in DIMACS");
    Var gen_n = 0;
    double gen_c = 0.0;
    gen->add_option("--n", gen_n, "variables")->required()->check(CLI::Range(Var{3}, Var{1u << 30}));
    gen->add_option("--density", gen_c, "clauses per variable")->required()->check(CLI::PositiveNumber);
    gen->add_option("--seed", com.seed, "generator seed");
    gen->add_option("--out", com.out, "output path (default stdout)");
    gen->callback([&] { code = cmd_gen(gen_n, gen_c, com.seed, com.out); });

    auto* solve = app.add_subcommand("solve", "run the greedy heuristic or DPLL on a DIMACS file");
    std::string solve_path, mode = "greedy";
    std::uint64_t node_limit = 10'000'000;
    solve->add_option("file", solve_path, "DIMACS input")->required();
    add_rule(solve, com);
    solve->add_option("--mode", mode, "greedy | greedy+backtrack | dpll")
        ->check(CLI::IsMember({"greedy", "greedy+backtrack", "dpll"}));
    solve->add_option("--backtrack", com.backtrack_name, "none | one-step")->check(CLI::IsMember(kBacktrackNames));
    solve->add_option("--seed", com.seed, "tie-breaking seed");
    solve->add_option("--node-limit", node_limit, "DPLL node budget")->check(CLI::PositiveNumber);
    solve->add_option("--out", com.out, "verdict JSON path (default stdout)");
    solve->callback([&] { code = cmd_solve(solve_path, com, mode, node_limit); });

    auto* sweep = app.add_subcommand("mc-sweep", "Monte-Carlo success rates of the greedy heuristic");
    harness::SweepConfig sweep_cfg;
    bool timing = false;
    sweep->add_option("--density", sweep_cfg.densities, "densities (comma separated)")
        ->required()
        ->delimiter(',')
        ->check(CLI::PositiveNumber);
    sweep->add_option("--n", sweep_cfg.n, "variables")->check(CLI::Range(Var{3}, Var{1u << 30}));
    sweep->add_option("--trials", sweep_cfg.trials, "trials per density")->check(CLI::PositiveNumber);
    sweep->add_option("--seed", com.seed, "base seed");
    add_rule(sweep, com);
    sweep->add_option("--backtrack", com.backtrack_name, "none | one-step")->check(CLI::IsMember(kBacktrackNames));
    sweep->add_option("--threads", com.threads, "worker threads (0: all)")->check(CLI::NonNegativeNumber);
    sweep->add_option("--out", com.out, "CSV path (default stdout)");
    sweep->add_flag("--timing", timing, "append a wall_seconds column (not reproducible)");
    sweep->callback([&] { code = cmd_mc_sweep(sweep_cfg, com, timing); });

    auto* ode_run = app.add_subcommand("ode-run", "integrate the degree-spectrum equations");
    double ode_c = 0.0;
    ode::OdeConfig ode_cfg;
    std::string state_out;
    ode_run->add_option("--density", ode_c, "clause density")->required()->check(CLI::PositiveNumber);
    add_rule(ode_run, com);
    add_ode(ode_run, ode_cfg);
    ode_run->add_option("--stride", ode_cfg.sample_stride, "rounds between CSV rows");
    ode_run->add_option("--out", com.out, "trajectory CSV path (default stdout)");
    ode_run->add_option("--state-out", state_out, "final spectrum JSON path");
    ode_run->callback([&] { code = cmd_ode_run(ode_c, ode_cfg, com, state_out); });

    auto* thr = app.add_subcommand("threshold", "bisect the largest density whose trajectory succeeds");
    std::string thr_rule = "maxdiff-maxsum";
    double lo = 3.0, hi = 4.0, tol = 0.005;
    ode::OdeConfig thr_cfg;
    search::BisectOptions opts;
    std::string run_dir;
    thr->add_option("--rule", thr_rule, "selection rule, or all");
    thr->add_option("--polarity", com.polarity_name, "polarity rule")->check(CLI::IsMember(kPolarityNames));
    add_ode(thr, thr_cfg);
    thr->add_option("--coarse-delta", opts.coarse_delta, "step size of the coarse phase (0: none)")
        ->check(CLI::NonNegativeNumber);
    thr->add_option("--lo", lo, "density expected to succeed")->check(CLI::PositiveNumber);
    thr->add_option("--hi", hi, "density expected to fail")->check(CLI::PositiveNumber);
    thr->add_option("--tol", tol, "bracket width")->check(CLI::PositiveNumber);
    thr->add_option("--run-dir", run_dir, "keep each probe's trajectory CSV here");
    thr->add_option("--threads", com.threads, "worker threads for --rule all")->check(CLI::NonNegativeNumber);
    thr->add_option("--out", com.out, "result JSON path (default stdout)");
    thr->callback([&] {
        if (!run_dir.empty()) opts.run_dir = run_dir;
        code = cmd_threshold(thr_rule, com, thr_cfg, lo, hi, tol, opts);
    });

    auto* xval = app.add_subcommand("xval", "compare greedy runs with the ODE spectrum");
    harness::XvalConfig xval_cfg;
    xval->add_option("--density", xval_cfg.c, "clause density")->check(CLI::PositiveNumber);
    xval->add_option("--n", xval_cfg.n, "variables")->check(CLI::Range(Var{3}, Var{1u << 30}));
    xval->add_option("--checkpoints", xval_cfg.checkpoints, "times t (comma separated)")
        ->delimiter(',')
        ->check(CLI::NonNegativeNumber);
    xval->add_option("--trials", xval_cfg.trials, "instances")->check(CLI::PositiveNumber);
    xval->add_option("--seed", com.seed, "base seed");
    add_rule(xval, com);
    add_ode(xval, xval_cfg.ode);
    xval->add_option("--threads", com.threads, "worker threads (0: all)")->check(CLI::NonNegativeNumber);
    xval->add_option("--out", com.out, "CSV path (default stdout)");
    xval->callback([&] { code = cmd_xval(xval_cfg, com); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitError;
    } catch (const DimacsError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kExitError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return code;
}
