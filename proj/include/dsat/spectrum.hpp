#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "dsat/rules.hpp"

namespace dsat::ode {

/// Mean-field state of the reduced formula, everything normalized by the
/// original variable count: n(i,j) is the density of unset variables with i
/// positive and j negative live occurrences (index h means "h or more" and is
/// treated as exactly h), m2/m3 the 2-/3-clause densities, m1 the transient
/// unit-clause density (zero between rounds), t the fraction of variables set.
class SpectrumState {
public:
    explicit SpectrumState(int h = 31) : h_{h}, cells_(static_cast<std::size_t>((h + 1) * (h + 1)), 0.0) {}

    int h() const { return h_; }
    double& n(int i, int j) { return cells_[static_cast<std::size_t>(i * (h_ + 1) + j)]; }
    double n(int i, int j) const { return cells_[static_cast<std::size_t>(i * (h_ + 1) + j)]; }
    std::vector<double>& cells() { return cells_; }
    const std::vector<double>& cells() const { return cells_; }

    double m1 = 0.0;
    double m2 = 0.0;
    double m3 = 0.0;
    double t = 0.0;

    /// 2*m2 + 3*m3: literal-occurrence density seen from the clause side.
    double sigma_m() const { return 2.0 * m2 + 3.0 * m3; }
    /// sum (i+j) n(i,j): literal-occurrence density seen from the variable side.
    double sigma_n() const;
    /// Density of unset variables that still occur somewhere (cell (0,0) excluded).
    double active_var_mass() const;
    double total_var_mass() const;
    /// |sigma_n - sigma_m|.
    double mass_residual() const;
    /// max |n(i,j) - n(j,i)|.
    double symmetry_drift() const;
    /// Mass held in row h and column h.
    double truncation_mass() const;

private:
    int h_;
    std::vector<double> cells_;
};

class OdeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct OdeConfig {
    int h = 31;
    double delta = 1e-6;
    double clamp_eps = 1e-12;
    double rho_guard = 1e-3;
    double end_mass = 1e-4;
    double mass_floor = 1e-14;
    /// Mass-balance bound: tol0 + kappa * truncation mass.
    double balance_tol0 = 1e-9;
    double balance_kappa = 1e3;
    /// Round budget is min(delta, max_round_fraction * active mass).
    double max_round_fraction = 0.01;
    std::uint64_t max_rounds = 50'000'000;
    /// Record every `stride`-th round in the trajectory (0: none).
    std::uint64_t sample_stride = 1000;
    PurePriority pure = PurePriority::MaxSum;
    /// Fill each round's delta budget from pairs in rule order (true), or
    /// spend a round on the single top-ranked pair only (false).
    bool fill_rounds = true;

    void validate() const;
};

/// Product-Poisson spectrum of F(n, cn): each side ~ Poisson(3c/2), tails
/// folded into index h. m3 = c, m2 = m1 = t = 0.
SpectrumState init_spectrum(double c, int h);

struct FreeMoveDelta {
    double d_m3 = 0.0;
    double d_m2 = 0.0;
    double d_m1 = 0.0;
    std::vector<double> d_n;  // (h+1)^2, row-major like SpectrumState
};

struct ForcedMoveDelta {
    double d_m3 = 0.0;
    double d_m2 = 0.0;
    std::vector<double> d_n;
};

/// Expected change from setting one (k,l)-variable to `value`. Setting it
/// False is the True formula with k and l exchanged, except that the variable
/// still leaves its own cell (k,l).
FreeMoveDelta free_move_delta(const SpectrumState& s, int k, int l, bool value);

/// Expected number of new unit clauses spawned by one forced move.
double malthus_rho(const SpectrumState& s);

/// Expected change from one forced move (the unit literal's variable drawn in
/// proportion to its occurrences). Separable O(h^2) evaluation.
ForcedMoveDelta forced_move_delta(const SpectrumState& s);

/// Same quantity by literal summation over every source cell, O(h^4).
/// Kept as the reference the factorized kernel is checked against.
ForcedMoveDelta forced_move_delta_naive(const SpectrumState& s);

struct RoundReport {
    Cell cell;              // canonical member of the processed pair
    double dt = 0.0;        // variable mass set by free moves this round
    double rho = 0.0;
    double m1 = 0.0;        // unit density generated by the free moves
    double forced = 0.0;    // expected forced-move mass m1 / (1 - rho)
    double mass_residual = 0.0;
};

/// One round on the unordered pair {cell, mirror(cell)}: dt = min(delta, pair
/// mass) split between the two cells in proportion to their masses, each cell
/// set per `polarity`; deltas evaluated at the frozen state; forced moves
/// weighted by m1 / (1 - rho). Updates `s` in place.
/// Throws OdeError on rho >= 1 - rho_guard, on an empty pair, or when a
/// non-selected entry falls below -clamp_eps.
RoundReport advance_round(SpectrumState& s, Cell cell, const OdeConfig& cfg, PolarityRule polarity);

/// Canonical cells (i >= j, i + j >= 1) from most to least preferred.
std::vector<Cell> rank_order(int h, SelectionRule rule, PurePriority pure);

/// Rule-selected pair on the current spectrum, ignoring cells below
/// mass_floor. Returns nullopt when no occurring variable is left.
std::optional<Cell> select_cell(const SpectrumState& s, SelectionRule rule, const OdeConfig& cfg);

enum class Termination { EndgameReached, RhoBlowup, MassExhausted, MaxRounds };
std::string_view to_string(Termination t);

/// Terminal success test standing in for an endgame satisfiability theorem.
/// Default: active mass < end_mass and m2 per active variable < 1.
using EndgamePredicate = std::function<bool(const SpectrumState&, const OdeConfig&)>;
bool default_endgame(const SpectrumState& s, const OdeConfig& cfg);

struct TrajectoryRow {
    std::uint64_t round = 0;
    double t = 0.0;
    RoundReport report;
    double m2 = 0.0;
    double m3 = 0.0;
    double total_var_mass = 0.0;
};

struct Trajectory {
    double density = 0.0;
    SelectionRule rule = SelectionRule::MaxDiffMaxSum;
    PolarityRule polarity = PolarityRule::SatisfyMajority;
    Termination termination = Termination::MaxRounds;
    std::uint64_t rounds = 0;
    double max_rho = 0.0;
    double max_symmetry_drift = 0.0;
    double max_balance_excess = 0.0;  // max(residual - bound), <= 0 when balanced
    std::vector<TrajectoryRow> rows;
    SpectrumState final_state;
};

/// Called after every round with the updated state.
using RoundObserver = std::function<void(const SpectrumState&, const RoundReport&, std::uint64_t round)>;

Trajectory run_trajectory(double c, const OdeConfig& cfg, SelectionRule rule, PolarityRule polarity,
                          const EndgamePredicate& endgame = default_endgame,
                          const RoundObserver& observer = {});

}  // namespace dsat::ode
