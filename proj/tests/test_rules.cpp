#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "dsat/rules.hpp"

namespace dsat {
namespace {

std::optional<Cell> choose(std::vector<Cell> cells, SelectionRule rule, PurePriority pure = PurePriority::MaxSum) {
    CellChooser ch(rule, pure);
    for (const Cell c : cells) ch.offer(c);
    return ch.best();
}

TEST(Rules, PureCellPreempts) {
    EXPECT_EQ(choose({{0, 3}, {4, 1}}, SelectionRule::MaxDiffMaxSum), (Cell{0, 3}));
    for (const SelectionRule r : kAllRules) EXPECT_EQ(choose({{9, 1}, {2, 0}}, r), (Cell{2, 0}));
}

TEST(Rules, PurePriorityAmongPureCells) {
    EXPECT_EQ(choose({{0, 3}, {5, 0}, {1, 0}}, SelectionRule::MaxMax), (Cell{5, 0}));
    EXPECT_EQ(choose({{0, 3}, {5, 0}, {1, 0}}, SelectionRule::MaxMax, PurePriority::MinSum), (Cell{1, 0}));
}

TEST(Rules, MaxDiffMaxSum) {
    EXPECT_EQ(choose({{2, 5}, {1, 3}, {4, 4}}, SelectionRule::MaxDiffMaxSum), (Cell{2, 5}));
    EXPECT_EQ(choose({{1, 4}, {3, 6}}, SelectionRule::MaxDiffMaxSum), (Cell{3, 6}));
}

TEST(Rules, MaxDiffMinSum) { EXPECT_EQ(choose({{1, 4}, {3, 6}}, SelectionRule::MaxDiffMinSum), (Cell{1, 4})); }

TEST(Rules, MaxRatio) {
    EXPECT_EQ(choose({{1, 3}, {2, 7}, {5, 1}}, SelectionRule::MaxRatio), (Cell{5, 1}));
    // 2/4 and 3/6 tie on ratio; larger sum wins.
    EXPECT_EQ(choose({{2, 4}, {3, 6}}, SelectionRule::MaxRatio), (Cell{3, 6}));
}

TEST(Rules, MaxMax) {
    EXPECT_EQ(choose({{1, 6}, {5, 5}, {2, 3}}, SelectionRule::MaxMax), (Cell{1, 6}));
    EXPECT_EQ(choose({{1, 6}, {6, 2}}, SelectionRule::MaxMax), (Cell{6, 2}));
}

TEST(Rules, OriginIgnored) { EXPECT_FALSE(choose({{0, 0}}, SelectionRule::MaxMax).has_value()); }

TEST(Rules, Polarity) {
    EXPECT_FALSE(choose_polarity(0, 5, PolarityRule::SatisfyMajority));
    EXPECT_TRUE(choose_polarity(0, 5, PolarityRule::PaperLiteral));
    EXPECT_TRUE(choose_polarity(4, 4, PolarityRule::SatisfyMajority));
    EXPECT_FALSE(choose_polarity(4, 4, PolarityRule::PaperLiteral));
    EXPECT_TRUE(choose_polarity(3, 1, PolarityRule::SatisfyMajority));
}

TEST(Rules, NamesRoundTrip) {
    for (const SelectionRule r : kAllRules) EXPECT_EQ(parse_selection_rule(to_string(r)), r);
    EXPECT_FALSE(parse_selection_rule("nope").has_value());
    EXPECT_EQ(parse_polarity_rule("paper"), PolarityRule::PaperLiteral);
}

// Each rule is a strict weak order: irreflexive, asymmetric, mirror-blind.
TEST(RulesProperty, RankingIsConsistent) {
    std::vector<Cell> cells;
    for (std::uint32_t i = 1; i <= 8; ++i)
        for (std::uint32_t j = 1; j <= 8; ++j) cells.push_back({i, j});
    for (const SelectionRule r : kAllRules) {
        for (const Cell a : cells) {
            EXPECT_FALSE(ranks_above(a, a, r));
            EXPECT_FALSE(ranks_above(a, a.mirror(), r));
            for (const Cell b : cells) {
                if (ranks_above(a, b, r)) {
                    EXPECT_FALSE(ranks_above(b, a, r));
                }
                EXPECT_EQ(ranks_above(a, b, r), ranks_above(a.mirror(), b, r));
                for (const Cell c : {Cell{2, 5}, Cell{7, 1}, Cell{3, 3}})
                    if (ranks_above(a, b, r) && ranks_above(b, c, r)) {
                        EXPECT_TRUE(ranks_above(a, c, r));
                    }
            }
        }
    }
}

// MaxMax always lands on a cell maximizing max(i,j).
TEST(RulesProperty, MaxMaxMaximizesLargestDegree) {
    std::uint32_t state = 12345;
    auto next = [&] { return (state = state * 1103515245u + 12345u) >> 16; };
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<Cell> cells;
        std::uint32_t best = 0;
        const int k = 1 + static_cast<int>(next() % 12);
        for (int q = 0; q < k; ++q) {
            const Cell c{1 + next() % 15, 1 + next() % 15};
            cells.push_back(c);
            best = std::max(best, std::max(c.pos, c.neg));
        }
        const Cell got = *choose(cells, SelectionRule::MaxMax);
        EXPECT_EQ(std::max(got.pos, got.neg), best);
    }
}

}  // namespace
}  // namespace dsat
