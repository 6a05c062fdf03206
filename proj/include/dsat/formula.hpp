#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dsat/degree_table.hpp"

namespace dsat {

using Var = std::uint32_t;  // 1-based variable index

/// A signed variable. Stored as code = 2*var + (negative ? 1 : 0) so that a
/// literal doubles as an index into per-literal arrays.
class Literal {
public:
    constexpr Literal() = default;
    constexpr Literal(Var var, bool positive) : code_{2 * var + (positive ? 0u : 1u)} {}

    static Literal from_dimacs(long value) {
        return value > 0 ? Literal{static_cast<Var>(value), true}
                         : Literal{static_cast<Var>(-value), false};
    }
    long to_dimacs() const { return positive() ? long(var()) : -long(var()); }

    constexpr Var var() const { return code_ >> 1; }
    constexpr bool positive() const { return (code_ & 1u) == 0; }
    constexpr std::uint32_t code() const { return code_; }
    constexpr Literal operator~() const { return from_code(code_ ^ 1u); }

    static constexpr Literal from_code(std::uint32_t code) {
        Literal l;
        l.code_ = code;
        return l;
    }

    friend constexpr bool operator==(Literal, Literal) = default;
    friend constexpr auto operator<=>(Literal, Literal) = default;

private:
    std::uint32_t code_ = 0;
};

enum class Value : std::uint8_t { Unset, True, False };

inline constexpr Value to_value(bool b) { return b ? Value::True : Value::False; }

/// Index 0 unused; entry v is the value of variable v.
using Assignment = std::vector<Value>;

/// Static 3-CNF description: what the parser, emitter and generator exchange.
struct Cnf {
    Var num_vars = 0;
    std::vector<std::vector<Literal>> clauses;

    friend bool operator==(const Cnf&, const Cnf&) = default;
};

/// Throws std::invalid_argument unless every clause has 1..3 literals over
/// distinct variables in [1, num_vars].
void validate(const Cnf& cnf);

/// True iff every clause of `cnf` has a true literal under `a`. Throws
/// std::invalid_argument if a variable occurring in a clause is unset.
bool verify_assignment(const Cnf& cnf, const Assignment& a);

/// Effects of one set_variable call.
struct ReductionReport {
    std::size_t satisfied_clauses = 0;
    std::size_t shrunk_clauses = 0;
    std::vector<Literal> new_unit_clauses;
    bool empty_clause_created = false;
};

/// Mutable working copy of a 3-CNF formula under a partial assignment.
///
/// Satisfied clauses are detached from every occurrence list at the moment
/// they become satisfied, and falsified literals are removed from their
/// clause, so the occurrence lists always hold exactly the live clauses and
/// the embedded DegreeTable always holds exact live degrees of the unset
/// variables. Every change is journaled; rollback() undoes changes back to a
/// mark returned by checkpoint().
class Formula {
public:
    explicit Formula(const Cnf& cnf);

    Var num_vars() const { return num_vars_; }
    std::size_t num_clauses() const { return clauses_.size(); }

    /// Original literals of clause `c`, regardless of state.
    std::span<const Literal> original_clause(std::size_t c) const;
    /// Live (not yet falsified) literals of clause `c`.
    std::span<const Literal> live_literals(std::size_t c) const;
    bool clause_satisfied(std::size_t c) const { return clauses_[c].satisfied; }

    Value value(Var v) const { return assignment_[v]; }
    const Assignment& assignment() const { return assignment_; }
    std::size_t num_assigned() const { return num_assigned_; }

    /// Live clauses containing `lit`.
    std::span<const std::uint32_t> occurrences(Literal lit) const { return occ_[lit.code()]; }
    std::uint32_t positive_degree(Var v) const { return static_cast<std::uint32_t>(occ_[2 * v].size()); }
    std::uint32_t negative_degree(Var v) const { return static_cast<std::uint32_t>(occ_[2 * v + 1].size()); }

    /// Number of unsatisfied clauses whose live length is `len` (0..3).
    std::size_t live_clauses_of_length(unsigned len) const { return live_by_len_[len]; }
    bool has_empty_clause() const { return live_by_len_[0] > 0; }

    const DegreeTable& degree_table() const { return table_; }

    /// Sets unset variable `v`, satisfying or shrinking every live clause it
    /// occurs in. Throws std::invalid_argument if `v` is already set.
    ReductionReport set_variable(Var v, bool value);

    /// Pops queued unit clauses (FIFO) until a live one is found; returns its
    /// literal, or nullopt when no unit clause remains.
    std::optional<Literal> next_unit_literal();

    using Mark = std::size_t;
    Mark checkpoint() const { return trail_.size(); }
    void rollback(Mark mark);

    /// Assigns True to every variable still unset. Journaled like set_variable.
    void complete_assignment();

    /// From-scratch recount of clause lengths, occurrence lists and the degree
    /// table. Returns an empty string when consistent, else a description of
    /// the first mismatch.
    std::string consistency_error() const;

    /// Reduced formula: live clauses only, as a Cnf over the same variables.
    Cnf residual() const;

private:
    struct ClauseState {
        std::array<Literal, 3> lits{};
        std::array<std::uint32_t, 3> occ_pos{};
        std::uint8_t size = 0;  // original length
        std::uint8_t len = 0;   // live length; lits[len..size) are falsified
        bool satisfied = false;
    };

    enum class Op : std::uint8_t { Assign, Satisfy, Shrink };
    struct TrailEntry {
        Op op;
        std::uint8_t slot;  // Shrink: where the falsified literal sat
        std::uint32_t index;
    };

    void attach(std::uint32_t c, unsigned slot);
    void detach(std::uint32_t c, unsigned slot);
    void satisfy(std::uint32_t c);
    void shrink(std::uint32_t c, Literal lit, ReductionReport& report);
    void refresh_degree(Var v);
    unsigned slot_of(const ClauseState& cl, Literal lit) const;

    Var num_vars_;
    std::vector<ClauseState> clauses_;
    std::vector<std::vector<std::uint32_t>> occ_;  // indexed by literal code
    Assignment assignment_;
    std::size_t num_assigned_ = 0;
    std::array<std::size_t, 4> live_by_len_{};
    DegreeTable table_;
    std::vector<TrailEntry> trail_;
    std::vector<std::uint32_t> unit_queue_;
    std::size_t unit_head_ = 0;
};

}  // namespace dsat
