#include "dsat/greedy.hpp"

#include <bit>

namespace dsat {

std::optional<CellChoice> try_select_cell(const DegreeTable& table, SelectionRule rule, PurePriority pure,
                                          Rng& rng) {
    CellChooser chooser(rule, pure);
    table.for_each_nonempty([&](Cell c, std::size_t) { chooser.offer(c); });
    const auto best = chooser.best();
    if (!best) return std::nullopt;

    // Both cells of the pair are indistinguishable to the heuristic.
    const auto first = table.members(*best);
    const auto second = best->pos == best->neg ? std::span<const std::uint32_t>{} : table.members(best->mirror());
    const std::uint64_t pick = uniform_below(rng, first.size() + second.size());
    if (pick < first.size()) return CellChoice{*best, first[pick]};
    return CellChoice{best->mirror(), second[pick - first.size()]};
}

CellChoice select_cell(const DegreeTable& table, SelectionRule rule, PurePriority pure, Rng& rng) {
    auto choice = try_select_cell(table, rule, pure, rng);
    if (!choice) throw std::invalid_argument("select_cell: no unset variable occurs in a live clause");
    return *choice;
}

PropagationResult unit_propagate(Formula& f) {
    PropagationResult result;
    if (f.has_empty_clause()) {
        result.conflict = true;
        return result;
    }
    while (const auto lit = f.next_unit_literal()) {
        const ReductionReport rep = f.set_variable(lit->var(), lit->positive());
        ++result.forced;
        if (rep.empty_clause_created) {
            result.conflict = true;
            break;
        }
    }
    return result;
}

namespace {

void check(const Formula& f, const SolverConfig& cfg) {
    if (!cfg.check_consistency) return;
    if (const std::string err = f.consistency_error(); !err.empty())
        throw std::logic_error("formula inconsistent: " + err);
}

// Free move plus propagation. Returns true on conflict.
bool move(Formula& f, Var v, bool value, std::size_t& forced) {
    const ReductionReport rep = f.set_variable(v, value);
    if (rep.empty_clause_created) return true;
    const PropagationResult prop = unit_propagate(f);
    forced += prop.forced;
    return prop.conflict;
}

}  // namespace

RunOutcome run_algorithm_a(const Cnf& cnf, const SolverConfig& cfg) {
    RunOutcome out;
    Formula f(cnf);
    Rng rng = make_rng(cfg.seed);

    const PropagationResult initial = unit_propagate(f);
    out.forced_moves += initial.forced;
    if (initial.conflict) {
        out.failure_depth = f.num_assigned();
        return out;
    }

    while (const auto choice = try_select_cell(f.degree_table(), cfg.selection, cfg.pure, rng)) {
        if (f.live_clauses_of_length(1) != 0) throw std::logic_error("free move with pending unit clauses");
        const bool value = choose_polarity(choice->cell.pos, choice->cell.neg, cfg.polarity);
        const Formula::Mark mark = f.checkpoint();
        std::size_t forced = 0;
        bool conflict = move(f, choice->var, value, forced);
        ++out.free_moves;
        bool retried = false;
        if (conflict && cfg.backtracking == Backtracking::OneStep) {
            f.rollback(mark);
            ++out.backtracks;
            forced = 0;
            retried = true;
            conflict = move(f, choice->var, !value, forced);
        }
        out.forced_moves += forced;
        if (cfg.record_trace) out.trace.push_back({choice->cell, retried ? !value : value, forced, retried});
        if (conflict) {
            out.failure_depth = f.num_assigned();
            return out;
        }
        check(f, cfg);
    }

    f.complete_assignment();
    if (!verify_assignment(cnf, f.assignment()))
        throw std::logic_error("run_algorithm_a: success verdict failed verification");
    out.status = RunStatus::Success;
    out.assignment = f.assignment();
    return out;
}

DpllResult dpll_solve(const Cnf& cnf, const SolverConfig& cfg, std::uint64_t node_limit) {
    struct Frame {
        Formula::Mark mark;
        Var var;
        bool value;
        bool flipped;
    };
    DpllResult result;
    Formula f(cnf);
    Rng rng = make_rng(cfg.seed);
    std::vector<Frame> stack;

    for (;;) {
        if (++result.nodes > node_limit) {
            result.verdict = Verdict::BudgetExceeded;
            return result;
        }
        bool conflict = unit_propagate(f).conflict;
        check(f, cfg);
        if (!conflict) {
            const auto choice = try_select_cell(f.degree_table(), cfg.selection, cfg.pure, rng);
            if (!choice) {
                f.complete_assignment();
                if (!verify_assignment(cnf, f.assignment()))
                    throw std::logic_error("dpll_solve: model failed verification");
                result.verdict = Verdict::Sat;
                result.assignment = f.assignment();
                return result;
            }
            const bool value = choose_polarity(choice->cell.pos, choice->cell.neg, cfg.polarity);
            stack.push_back({f.checkpoint(), choice->var, value, false});
            f.set_variable(choice->var, value);
            continue;
        }
        // Conflict: flip the deepest unflipped decision.
        while (!stack.empty()) {
            Frame& top = stack.back();
            f.rollback(top.mark);
            if (!top.flipped) {
                top.flipped = true;
                f.set_variable(top.var, !top.value);
                break;
            }
            stack.pop_back();
        }
        if (stack.empty()) {
            result.verdict = Verdict::Unsat;
            return result;
        }
    }
}

std::optional<Assignment> brute_force_solve(const Cnf& cnf) {
    const Var n = cnf.num_vars;
    if (n > kBruteForceMaxVars) throw std::invalid_argument("brute_force_solve: too many variables");
    validate(cnf);
    // Variable v <-> bit (n - v), so counting up the mask walks assignments in
    // lexicographic order with x1 most significant and False (0) first.
    struct Masks {
        std::uint32_t pos = 0, neg = 0;
    };
    std::vector<Masks> clauses;
    clauses.reserve(cnf.clauses.size());
    for (const auto& cl : cnf.clauses) {
        Masks m;
        for (const Literal lit : cl) (lit.positive() ? m.pos : m.neg) |= 1u << (n - lit.var());
        clauses.push_back(m);
    }
    const std::uint64_t limit = std::uint64_t{1} << n;
    for (std::uint64_t bits = 0; bits < limit; ++bits) {
        const auto mask = static_cast<std::uint32_t>(bits);
        bool ok = true;
        for (const Masks& m : clauses) {
            if (((mask & m.pos) | (~mask & m.neg)) == 0) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        Assignment a(std::size_t{n} + 1, Value::Unset);
        for (Var v = 1; v <= n; ++v) a[v] = to_value((mask >> (n - v)) & 1u);
        return a;
    }
    return std::nullopt;
}

std::optional<std::size_t> run_cell_batched(Formula& f, const SolverConfig& cfg, std::size_t batch,
                                            const BatchObserver& after_move) {
    if (batch == 0) throw std::invalid_argument("run_cell_batched: batch must be positive");
    Rng rng = make_rng(cfg.seed);
    std::size_t free_moves = 0;
    if (unit_propagate(f).conflict) return std::nullopt;
    for (;;) {
        CellChooser chooser(cfg.selection, cfg.pure);
        f.degree_table().for_each_nonempty([&](Cell c, std::size_t) { chooser.offer(c); });
        const auto pair = chooser.best();
        if (!pair) return free_moves;
        for (std::size_t k = 0; k < batch; ++k) {
            const auto a = f.degree_table().members(*pair);
            const auto b = pair->pos == pair->neg ? std::span<const std::uint32_t>{}
                                                  : f.degree_table().members(pair->mirror());
            if (a.empty() && b.empty()) break;
            const std::uint64_t pick = uniform_below(rng, a.size() + b.size());
            const Cell cell = pick < a.size() ? *pair : pair->mirror();
            const Var v = pick < a.size() ? a[pick] : b[pick - a.size()];
            std::size_t forced = 0;
            if (move(f, v, choose_polarity(cell.pos, cell.neg, cfg.polarity), forced)) return std::nullopt;
            ++free_moves;
            if (after_move && !after_move(f)) return free_moves;
        }
    }
}

}  // namespace dsat
