#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "dsat/formula.hpp"
#include "dsat/rng.hpp"
#include "dsat/rules.hpp"

namespace dsat {

enum class Backtracking { None, OneStep };

struct SolverConfig {
    SelectionRule selection = SelectionRule::MaxDiffMaxSum;
    PolarityRule polarity = PolarityRule::SatisfyMajority;
    Backtracking backtracking = Backtracking::None;
    PurePriority pure = PurePriority::MaxSum;
    std::uint64_t seed = 0;  // tie-breaking among variables of the chosen pair
    bool record_trace = false;
    /// Recount the formula after every move and throw on mismatch. O(n + m) per move.
    bool check_consistency = false;
};

struct CellChoice {
    Cell cell;  // the chosen variable's own cell
    Var var = 0;
};

/// Rule-selected unordered pair {(i,j),(j,i)} (pure pairs first), then a
/// variable drawn uniformly from the union of the two cells. Returns nullopt
/// when no unset variable occurs in a live clause.
std::optional<CellChoice> try_select_cell(const DegreeTable& table, SelectionRule rule, PurePriority pure, Rng& rng);

/// As try_select_cell, but throws std::invalid_argument when nothing occurs.
CellChoice select_cell(const DegreeTable& table, SelectionRule rule, PurePriority pure, Rng& rng);

struct PropagationResult {
    std::size_t forced = 0;
    bool conflict = false;
};

/// Sets unit literals True in FIFO order until none remain or an empty clause
/// appears.
PropagationResult unit_propagate(Formula& f);

struct TraceStep {
    Cell cell;
    bool value = false;
    std::size_t units = 0;
    bool retried = false;  // opposite value after a one-step backtrack
};

enum class RunStatus { Success, Failure };

struct RunOutcome {
    RunStatus status = RunStatus::Failure;
    Assignment assignment;  // total on success, empty on failure
    std::size_t free_moves = 0;
    std::size_t forced_moves = 0;
    std::size_t backtracks = 0;
    std::size_t failure_depth = 0;  // variables set when the run failed
    std::vector<TraceStep> trace;
};

/// The greedy degree heuristic: a free move on the selected variable, then
/// exhaustive unit propagation, until every occurring variable is set.
/// Isolated variables are set True at the end. A success is always verified
/// against `cnf`; a failed verification throws std::logic_error.
RunOutcome run_algorithm_a(const Cnf& cnf, const SolverConfig& cfg);

enum class Verdict { Sat, Unsat, BudgetExceeded };

struct DpllResult {
    Verdict verdict = Verdict::BudgetExceeded;
    Assignment assignment;  // set when Sat
    std::uint64_t nodes = 0;
};

/// Complete backtracking search branching on the heuristic's variable, first
/// on its heuristic value, then the complement.
DpllResult dpll_solve(const Cnf& cnf, const SolverConfig& cfg, std::uint64_t node_limit);

/// Exhaustive search for n <= 25; returns the first model in lexicographic
/// order (x1 most significant, False before True), or nullopt.
std::optional<Assignment> brute_force_solve(const Cnf& cnf);

inline constexpr Var kBruteForceMaxVars = 25;

/// Cell-batched variant: choose the rule's pair, set up to `batch` of its
/// variables (propagating after each), re-select. `after_move` sees the
/// formula after every free move and its propagation; returning false stops.
/// Returns the number of free moves, or nullopt on conflict.
using BatchObserver = std::function<bool(const Formula&)>;
std::optional<std::size_t> run_cell_batched(Formula& f, const SolverConfig& cfg, std::size_t batch,
                                            const BatchObserver& after_move);

}  // namespace dsat
