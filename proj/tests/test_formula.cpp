#include <gtest/gtest.h>

#include "dsat/formula.hpp"
#include "dsat/generator.hpp"
#include "dsat/rng.hpp"
#include "test_util.hpp"

namespace dsat {
namespace {

using testing::make_cnf;

TEST(Formula, DegreeTableSingleClause) {
    Formula f(make_cnf(3, {{1, 2, 3}}));
    for (Var v = 1; v <= 3; ++v) EXPECT_EQ(f.degree_table().cell_of(v), (Cell{1, 0}));
}

TEST(Formula, DegreeTableTwoClauses) {
    Formula f(make_cnf(3, {{1, 2, 3}, {-1, 2, -3}}));
    EXPECT_EQ(f.degree_table().cell_of(1), (Cell{1, 1}));
    EXPECT_EQ(f.degree_table().cell_of(2), (Cell{2, 0}));
    EXPECT_EQ(f.degree_table().cell_of(3), (Cell{1, 1}));
}

TEST(Formula, EmptyFormulaPutsEveryVariableInOrigin) {
    Formula f(make_cnf(4, {}));
    EXPECT_EQ(f.degree_table().count({0, 0}), 4u);
}

TEST(Formula, SettingSatisfiesClause) {
    Formula f(make_cnf(2, {{1, 2}}));
    const ReductionReport r = f.set_variable(1, true);
    EXPECT_EQ(r.satisfied_clauses, 1u);
    EXPECT_EQ(r.shrunk_clauses, 0u);
    EXPECT_EQ(f.degree_table().cell_of(2), (Cell{0, 0}));
    EXPECT_FALSE(f.degree_table().contains(1));
}

TEST(Formula, SettingShrinksClauseToUnit) {
    Formula f(make_cnf(2, {{-1, 2}}));
    const ReductionReport r = f.set_variable(1, true);
    EXPECT_EQ(r.shrunk_clauses, 1u);
    ASSERT_EQ(r.new_unit_clauses.size(), 1u);
    EXPECT_EQ(r.new_unit_clauses[0], Literal(2, true));
    EXPECT_EQ(f.live_clauses_of_length(1), 1u);
}

TEST(Formula, EmptyClauseWitness) {
    Formula f(make_cnf(1, {{-1}}));
    EXPECT_TRUE(f.set_variable(1, true).empty_clause_created);
    EXPECT_TRUE(f.has_empty_clause());
}

TEST(Formula, SettingTwiceThrows) {
    Formula f(make_cnf(2, {{1, 2}}));
    f.set_variable(1, false);
    EXPECT_THROW(f.set_variable(1, true), std::invalid_argument);
}

TEST(Formula, VerifyAssignment) {
    const Cnf a = make_cnf(2, {{1, 2}});
    EXPECT_TRUE(verify_assignment(a, {Value::Unset, Value::False, Value::True}));
    const Cnf b = make_cnf(1, {{1}, {-1}});
    EXPECT_FALSE(verify_assignment(b, {Value::Unset, Value::True}));
    EXPECT_FALSE(verify_assignment(b, {Value::Unset, Value::False}));
    EXPECT_THROW(verify_assignment(a, {Value::Unset, Value::False, Value::Unset}), std::invalid_argument);
}

TEST(Formula, UnitQueueIsFifo) {
    Formula f(make_cnf(6, {{-1, 3}, {-1, 2}, {-1, 4}, {-5, 6}}));
    const ReductionReport first = f.set_variable(1, true);
    const ReductionReport second = f.set_variable(5, true);
    std::vector<Literal> expected = first.new_unit_clauses;
    expected.insert(expected.end(), second.new_unit_clauses.begin(), second.new_unit_clauses.end());
    ASSERT_EQ(expected.size(), 4u);
    for (const Literal lit : expected) {
        EXPECT_EQ(f.next_unit_literal(), lit);
        f.set_variable(lit.var(), lit.positive());
    }
    EXPECT_FALSE(f.next_unit_literal().has_value());
}

TEST(Formula, RollbackRestoresLiteralOrder) {
    const Cnf cnf = make_cnf(3, {{1, -2, 3}});
    Formula f(cnf);
    f.set_variable(1, false);
    f.set_variable(2, true);
    EXPECT_EQ(f.live_literals(0).size(), 1u);
    f.rollback(0);
    EXPECT_EQ(f.residual(), cnf);
}

TEST(Formula, CompleteAssignmentSetsRestTrue) {
    Formula f(make_cnf(3, {{-1, 2}}));
    f.set_variable(1, false);
    f.complete_assignment();
    EXPECT_EQ(f.value(2), Value::True);
    EXPECT_EQ(f.value(3), Value::True);
    EXPECT_EQ(f.num_assigned(), 3u);
}

// Sum over unset variables of (i+j) equals total live clause length.
std::size_t occurrence_gap(const Formula& f) {
    std::size_t by_vars = 0, by_clauses = 0;
    f.degree_table().for_each_nonempty([&](Cell c, std::size_t n) { by_vars += c.sum() * n; });
    for (unsigned len = 1; len <= 3; ++len) by_clauses += len * f.live_clauses_of_length(len);
    return by_vars > by_clauses ? by_vars - by_clauses : by_clauses - by_vars;
}

// Random set/rollback walks, recounting from scratch after every step.
TEST(FormulaProperty, RecountConsistencyAndRollback) {
    Rng rng = make_rng(11);
    for (int instance = 0; instance < 40; ++instance) {
        const Var n = 20 + static_cast<Var>(uniform_below(rng, 200));
        const Cnf cnf = generate_random(n, 1.0 + 4.0 * uniform_unit(rng), rng());
        Formula f(cnf);
        ASSERT_EQ(f.consistency_error(), "");
        std::vector<std::pair<Formula::Mark, Cnf>> saved;
        for (int step = 0; step < 60 && f.num_assigned() < n; ++step) {
            if (uniform_below(rng, 4) == 0) saved.emplace_back(f.checkpoint(), f.residual());
            Var v;
            do v = static_cast<Var>(1 + uniform_below(rng, n));
            while (f.value(v) != Value::Unset);
            f.set_variable(v, uniform_below(rng, 2) == 0);
            ASSERT_EQ(f.consistency_error(), "") << "instance " << instance << " step " << step;
            ASSERT_EQ(occurrence_gap(f), 0u);
        }
        while (!saved.empty()) {
            f.rollback(saved.back().first);
            ASSERT_EQ(f.consistency_error(), "");
            ASSERT_EQ(f.residual(), saved.back().second);
            saved.pop_back();
        }
        f.rollback(0);
        EXPECT_EQ(f.residual(), cnf);
        EXPECT_EQ(f.num_assigned(), 0u);
    }
}

}  // namespace
}  // namespace dsat
