#include <gtest/gtest.h>

#include <cmath>

#include "dsat/harness.hpp"
#include "dsat/rng.hpp"
#include "dsat/spectrum.hpp"

namespace dsat::ode {
namespace {

double total(const std::vector<double>& v) {
    double acc = 0.0;
    for (const double x : v) acc += x;
    return acc;
}

// Random nonnegative spectrum with clause densities chosen to balance it.
SpectrumState random_state(Rng& rng, int h, bool with_m2 = true) {
    SpectrumState s(h);
    for (double& v : s.cells()) v = uniform_unit(rng) < 0.3 ? 0.0 : uniform_unit(rng);
    const double sigma = s.sigma_n();
    const double share = with_m2 ? uniform_unit(rng) : 0.0;
    s.m2 = share * sigma / 2.0;
    s.m3 = (1.0 - share) * sigma / 3.0;
    return s;
}

SpectrumState rho_one_state() {
    SpectrumState s(4);
    s.n(1, 1) = 1.0;
    s.m2 = 1.0;
    return s;
}

TEST(InitSpectrum, OriginCellAtDensityTwo) {
    const SpectrumState s = init_spectrum(2.0, 31);
    EXPECT_NEAR(s.n(0, 0), std::exp(-6.0), 1e-15);
    EXPECT_NEAR(s.n(0, 0), 2.4788e-3, 1e-7);
    EXPECT_EQ(s.m2, 0.0);
    EXPECT_EQ(s.m3, 2.0);
    EXPECT_EQ(malthus_rho(s), 0.0);
}

TEST(InitSpectrum, ProductPoissonAndNormalized) {
    for (const double c : {1.0, 3.52, 4.6}) {
        const SpectrumState s = init_spectrum(c, 31);
        EXPECT_NEAR(s.total_var_mass(), 1.0, 1e-12);
        const double lam = 1.5 * c;
        // Poisson(lam) pmf by recurrence, independent of the lgamma route.
        std::vector<double> p{std::exp(-lam)};
        for (int i = 1; i < 31; ++i) p.push_back(p.back() * lam / i);
        for (int i = 0; i < 31; i += 3)
            for (int j = 0; j < 31; j += 5) EXPECT_NEAR(s.n(i, j), p[i] * p[j], 1e-15 + 1e-12 * p[i] * p[j]);
        EXPECT_LT(s.truncation_mass(), 1e-9);
        EXPECT_LT(s.mass_residual(), 1e-12 * s.sigma_m());
    }
}

TEST(FreeMove, HandExample) {
    SpectrumState s(4);
    s.n(1, 2) = 1.0;
    s.n(2, 0) = 0.5;
    s.m3 = 1.0;
    s.m2 = 0.5;
    const FreeMoveDelta d = free_move_delta(s, 1, 2, true);
    EXPECT_NEAR(d.d_m3, -2.25, 1e-15);
    EXPECT_NEAR(d.d_m2, 0.75, 1e-15);
    EXPECT_NEAR(d.d_m1, 0.5, 1e-15);
}

TEST(FreeMove, IsolatedVariableOnlyLeavesItsCell) {
    Rng rng = make_rng(2);
    const SpectrumState s = random_state(rng, 5);
    for (const bool value : {true, false}) {
        const FreeMoveDelta d = free_move_delta(s, 0, 0, value);
        EXPECT_EQ(d.d_m3, 0.0);
        EXPECT_EQ(d.d_m2, 0.0);
        EXPECT_EQ(d.d_m1, 0.0);
        for (std::size_t k = 0; k < d.d_n.size(); ++k) EXPECT_EQ(d.d_n[k], k == 0 ? -1.0 : 0.0);
    }
}

TEST(FreeMove, NoTwoClausesNoUnits) {
    Rng rng = make_rng(3);
    const SpectrumState s = random_state(rng, 5, false);
    for (int k = 0; k <= 5; ++k)
        for (int l = 0; l <= 5; ++l) EXPECT_EQ(free_move_delta(s, k, l, true).d_m1, 0.0);
}

TEST(FreeMove, FalseIsTrueWithRolesSwapped) {
    Rng rng = make_rng(4);
    const SpectrumState s = random_state(rng, 6);
    const FreeMoveDelta f = free_move_delta(s, 2, 5, false);
    const FreeMoveDelta t = free_move_delta(s, 5, 2, true);
    EXPECT_DOUBLE_EQ(f.d_m3, t.d_m3);
    EXPECT_DOUBLE_EQ(f.d_m2, t.d_m2);
    EXPECT_DOUBLE_EQ(f.d_m1, t.d_m1);
    const int h = s.h();
    for (int i = 0; i <= h; ++i) {
        for (int j = 0; j <= h; ++j) {
            const auto k = static_cast<std::size_t>(i * (h + 1) + j);
            const double own_f = (i == 2 && j == 5) ? -1.0 : 0.0;
            const double own_t = (i == 5 && j == 2) ? -1.0 : 0.0;
            EXPECT_NEAR(f.d_n[k] - own_f, t.d_n[k] - own_t, 1e-14);
        }
    }
}

TEST(FreeMove, RequiresClauses) {
    SpectrumState s(3);
    s.n(1, 0) = 1.0;
    EXPECT_THROW(free_move_delta(s, 1, 0, true), OdeError);
}

TEST(Rho, CriticalStateIsOne) { EXPECT_NEAR(malthus_rho(rho_one_state()), 1.0, 1e-12); }

TEST(Rho, HalvedTwoClauseDensityIsSubcritical) {
    SpectrumState s = rho_one_state();
    s.m2 = 0.5;
    s.m3 = 1.0 / 3.0;  // keeps 2*m2 + 3*m3 = sigma_n = 2
    EXPECT_LT(s.mass_residual(), 1e-15);
    EXPECT_NEAR(malthus_rho(s), 0.5, 1e-12);
}

TEST(RhoProperty, ZeroWithoutTwoClauses) {
    Rng rng = make_rng(5);
    for (int k = 0; k < 200; ++k) {
        const SpectrumState s = random_state(rng, 2 + static_cast<int>(uniform_below(rng, 10)), false);
        EXPECT_EQ(malthus_rho(s), 0.0);
    }
}

TEST(RhoProperty, NonNegative) {
    Rng rng = make_rng(6);
    for (int k = 0; k < 200; ++k) EXPECT_GE(malthus_rho(random_state(rng, 6)), 0.0);
}

TEST(ForcedMove, CriticalStateConsumesOneVariable) {
    const ForcedMoveDelta d = forced_move_delta(rho_one_state());
    EXPECT_NEAR(total(d.d_n), -1.0, 1e-14);
    EXPECT_NEAR(d.d_n[1 * 5 + 1], -1.0, 1e-14);
}

TEST(ForcedMove, DefinedWithoutTwoClauses) {
    Rng rng = make_rng(8);
    const ForcedMoveDelta d = forced_move_delta(random_state(rng, 5, false));
    EXPECT_TRUE(std::isfinite(d.d_m3));
    EXPECT_LT(d.d_m3, 0.0);
}

void expect_same(const ForcedMoveDelta& a, const ForcedMoveDelta& b, double tol) {
    EXPECT_NEAR(a.d_m3, b.d_m3, tol);
    EXPECT_NEAR(a.d_m2, b.d_m2, tol);
    ASSERT_EQ(a.d_n.size(), b.d_n.size());
    for (std::size_t k = 0; k < a.d_n.size(); ++k) EXPECT_NEAR(a.d_n[k], b.d_n[k], tol) << "cell " << k;
}

TEST(ForcedMoveProperty, FactorizedMatchesNaive) {
    Rng rng = make_rng(9);
    for (const int h : {2, 4, 8})
        for (int k = 0; k < 100; ++k) {
            const SpectrumState s = random_state(rng, h);
            expect_same(forced_move_delta(s), forced_move_delta_naive(s), 1e-12);
        }
    const SpectrumState s = init_spectrum(3.52, 8);
    expect_same(forced_move_delta(s), forced_move_delta_naive(s), 1e-12);
}

OdeConfig quick(double delta = 1e-5) {
    OdeConfig cfg;
    cfg.delta = delta;
    return cfg;
}

TEST(AdvanceRound, NoTwoClausesMeansFreeDeltasOnly) {
    SpectrumState s = init_spectrum(3.0, 31);
    const SpectrumState before = s;
    const FreeMoveDelta d = free_move_delta(before, 4, 4, true);
    const RoundReport r = advance_round(s, {4, 4}, quick(1e-6), PolarityRule::SatisfyMajority);
    EXPECT_DOUBLE_EQ(r.dt, 1e-6);
    EXPECT_EQ(r.m1, 0.0);
    EXPECT_EQ(r.forced, 0.0);
    EXPECT_NEAR(s.m3, before.m3 + r.dt * d.d_m3, 1e-15);
    EXPECT_NEAR(s.m2, before.m2 + r.dt * d.d_m2, 1e-15);
    for (std::size_t k = 0; k < d.d_n.size(); ++k)
        EXPECT_NEAR(s.cells()[k], before.cells()[k] + r.dt * d.d_n[k], 1e-16);
    EXPECT_DOUBLE_EQ(s.t, 1e-6);
}

// The whole cell is set; what is left afterwards is inflow from the
// neighbouring cells during the round.
TEST(AdvanceRound, SmallCellIsConsumed) {
    SpectrumState s = init_spectrum(3.0, 31);
    s.n(0, 0) += s.n(3, 3) - 3e-7;  // keep total mass at 1
    s.n(3, 3) = 3e-7;
    s.m3 = s.sigma_n() / 3.0;
    const SpectrumState before = s;
    const RoundReport r = advance_round(s, {3, 3}, quick(1e-6), PolarityRule::SatisfyMajority);
    EXPECT_NEAR(r.dt, 3e-7, 1e-20);
    const FreeMoveDelta d = free_move_delta(before, 3, 3, true);
    EXPECT_NEAR(s.n(3, 3), before.n(3, 3) + r.dt * d.d_n[3 * 32 + 3], 1e-20);
    EXPECT_NEAR(s.n(3, 3), r.dt * (d.d_n[3 * 32 + 3] + 1.0), 1e-20);
}

TEST(AdvanceRound, MirrorPairSplitsInProportion) {
    SpectrumState s = init_spectrum(3.0, 31);
    s.n(5, 2) *= 2.0;  // asymmetric on purpose
    s.m3 = s.sigma_n() / 3.0;
    const double a = s.n(5, 2), b = s.n(2, 5);
    const SpectrumState before = s;
    const RoundReport r = advance_round(s, {2, 5}, quick(1e-6), PolarityRule::SatisfyMajority);
    EXPECT_EQ(r.cell, (Cell{5, 2}));
    const FreeMoveDelta da = free_move_delta(before, 5, 2, true);
    const FreeMoveDelta db = free_move_delta(before, 2, 5, false);
    const double dta = r.dt * a / (a + b), dtb = r.dt * b / (a + b);
    EXPECT_NEAR(s.m3, before.m3 + dta * da.d_m3 + dtb * db.d_m3, 1e-15);
    EXPECT_NEAR(s.n(5, 2), before.n(5, 2) + dta * da.d_n[5 * 32 + 2] + dtb * db.d_n[5 * 32 + 2], 1e-16);
}

TEST(AdvanceRound, BalanceResidualGrowsSlowly) {
    SpectrumState s = init_spectrum(3.52, 31);
    const double before = s.mass_residual();
    const auto cell = select_cell(s, SelectionRule::MaxDiffMaxSum, quick(1e-6));
    ASSERT_TRUE(cell.has_value());
    const RoundReport r = advance_round(s, *cell, quick(1e-6), PolarityRule::SatisfyMajority);
    EXPECT_LE(s.mass_residual() - before, 10 * r.dt);
}

TEST(AdvanceRound, RhoGuardAndEmptyPair) {
    SpectrumState s = rho_one_state();
    s.n(2, 0) = 1e-5;
    s.m3 = 2e-5 / 3.0;
    ASSERT_GE(malthus_rho(s), 1.0 - OdeConfig{}.rho_guard);
    EXPECT_THROW(advance_round(s, {2, 0}, quick(), PolarityRule::SatisfyMajority), OdeError);
    SpectrumState t = init_spectrum(3.0, 31);
    t.n(7, 1) = t.n(1, 7) = 0.0;
    EXPECT_THROW(advance_round(t, {7, 1}, quick(), PolarityRule::SatisfyMajority), OdeError);
}

TEST(SelectCell, PureFirstThenRule) {
    SpectrumState s(6);
    s.n(2, 5) = s.n(5, 2) = 0.1;
    s.n(1, 3) = 0.1;
    s.n(4, 4) = 0.1;
    EXPECT_EQ(select_cell(s, SelectionRule::MaxDiffMaxSum, quick()), (Cell{5, 2}));
    s.n(0, 2) = 1e-13;
    EXPECT_EQ(select_cell(s, SelectionRule::MaxDiffMaxSum, quick()), (Cell{2, 0}));
    s.n(0, 2) = 1e-15;  // below mass_floor
    EXPECT_EQ(select_cell(s, SelectionRule::MaxDiffMaxSum, quick()), (Cell{5, 2}));
}

TEST(SelectCellProperty, MaxMaxMaximizesLargestDegree) {
    Rng rng = make_rng(10);
    for (int k = 0; k < 200; ++k) {
        SpectrumState s(8);
        for (int i = 1; i <= 8; ++i)
            for (int j = 1; j <= 8; ++j)
                if (uniform_unit(rng) < 0.2) s.n(i, j) = uniform_unit(rng);
        const auto got = select_cell(s, SelectionRule::MaxMax, quick());
        int best = 0;
        for (int i = 1; i <= 8; ++i)
            for (int j = 1; j <= 8; ++j)
                if (s.n(i, j) > 0.0) best = std::max(best, std::max(i, j));
        if (best == 0) {
            EXPECT_FALSE(got.has_value());
            continue;
        }
        ASSERT_TRUE(got.has_value());
        EXPECT_EQ(static_cast<int>(std::max(got->pos, got->neg)), best);
    }
}

TEST(RankOrder, MatchesStreamingChooser) {
    for (const SelectionRule rule : kAllRules) {
        const std::vector<Cell> order = rank_order(10, rule, PurePriority::MaxSum);
        EXPECT_EQ(order.size(), 65u);  // i in 1..10, j in 0..i
        for (std::size_t a = 0; a + 1 < order.size(); ++a)
            EXPECT_FALSE(outranks(order[a + 1], order[a], rule, PurePriority::MaxSum));
    }
}

TEST(Trajectory, BelowThresholdReachesEndgame) {
    const Trajectory t = run_trajectory(3.0, quick(), SelectionRule::MaxDiffMaxSum, PolarityRule::SatisfyMajority);
    EXPECT_EQ(t.termination, Termination::EndgameReached);
    EXPECT_LT(t.max_rho, 0.9);
    EXPECT_LE(t.max_symmetry_drift, 1e-10);
    EXPECT_LE(t.max_balance_excess, 0.0);
    EXPECT_FALSE(t.rows.empty());
}

TEST(Trajectory, AboveThresholdBlowsUp) {
    const Trajectory t = run_trajectory(4.0, quick(), SelectionRule::MaxDiffMaxSum, PolarityRule::SatisfyMajority);
    EXPECT_EQ(t.termination, Termination::RhoBlowup);
}

TEST(Trajectory, RoundCap) {
    OdeConfig cfg = quick();
    cfg.max_rounds = 10;
    const Trajectory t = run_trajectory(3.0, cfg, SelectionRule::MaxMax, PolarityRule::SatisfyMajority);
    EXPECT_EQ(t.termination, Termination::MaxRounds);
    EXPECT_EQ(t.rounds, 10u);
}

TEST(Trajectory, CustomEndgame) {
    const auto early = [](const SpectrumState& s, const OdeConfig&) { return s.t > 0.05; };
    const Trajectory t =
        run_trajectory(3.0, quick(), SelectionRule::MaxRatio, PolarityRule::SatisfyMajority, early);
    EXPECT_EQ(t.termination, Termination::EndgameReached);
    EXPECT_LT(t.final_state.t, 0.051);
}

TEST(Trajectory, Deterministic) {
    const Trajectory a = run_trajectory(3.3, quick(), SelectionRule::MaxDiffMinSum, PolarityRule::SatisfyMajority);
    const Trajectory b = run_trajectory(3.3, quick(), SelectionRule::MaxDiffMinSum, PolarityRule::SatisfyMajority);
    EXPECT_EQ(a.rounds, b.rounds);
    EXPECT_EQ(a.final_state.cells(), b.final_state.cells());
    EXPECT_EQ(a.final_state.t, b.final_state.t);
}

TEST(Trajectory, LiteralPolarityCollapses) {
    const Trajectory t = run_trajectory(3.0, quick(), SelectionRule::MaxDiffMaxSum, PolarityRule::PaperLiteral);
    EXPECT_NE(t.termination, Termination::EndgameReached);
}

TEST(Trajectory, SymmetryUnderEveryRule) {
    for (const SelectionRule rule : kAllRules) {
        const auto stop = [](const SpectrumState& s, const OdeConfig&) { return s.t > 0.4; };
        const Trajectory t = run_trajectory(3.4, quick(), rule, PolarityRule::SatisfyMajority, stop);
        EXPECT_LE(t.max_symmetry_drift, 1e-10) << to_string(rule);
    }
}

TEST(Config, Validation) {
    OdeConfig cfg;
    cfg.h = 1;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.delta = 0.0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.rho_guard = 1.0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

double linf_distance(const SpectrumState& a, const SpectrumState& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.cells().size(); ++k) m = std::max(m, std::abs(a.cells()[k] - b.cells()[k]));
    return m;
}

TEST(TrajectoryProperty, FirstOrderInStepSize) {
    std::vector<SpectrumState> mid, last;
    for (const double d : {4e-5, 2e-5, 1e-5}) {
        OdeConfig cfg;
        cfg.delta = d;
        cfg.sample_stride = 0;
        mid.push_back(harness::ode_spectra_at(3.0, cfg, SelectionRule::MaxDiffMaxSum, PolarityRule::SatisfyMajority,
                                              {0.5})[0]);
        last.push_back(
            run_trajectory(3.0, cfg, SelectionRule::MaxDiffMaxSum, PolarityRule::SatisfyMajority).final_state);
    }
    const double coarse = linf_distance(mid[0], mid[1]), fine = linf_distance(mid[1], mid[2]);
    EXPECT_NEAR(coarse / fine, 2.0, 0.25);
    EXPECT_LE(fine, 1e-5);
    EXPECT_LE(linf_distance(last[1], last[2]), 2e-5);
    EXPECT_LE(linf_distance(last[0], last[1]), 4e-5);
}

}  // namespace
}  // namespace dsat::ode
