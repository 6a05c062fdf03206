#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "dsat/degree_table.hpp"

namespace dsat {

/// How the heuristic ranks non-pure degree cells (i,j).
enum class SelectionRule {
    MaxDiffMaxSum,  // max |i-j|, ties to max i+j
    MaxDiffMinSum,  // max |i-j|, ties to min i+j
    MaxRatio,       // max max(i,j)/min(i,j), ties to max i+j then max |i-j|
    MaxMax,         // max max(i,j), ties to max i+j
};

/// Truth value given to a chosen (i,j)-variable.
enum class PolarityRule {
    SatisfyMajority,  // True iff i > j; (k,k) -> True
    PaperLiteral,     // True iff i < j
};

/// Which pure cell wins when several are present.
enum class PurePriority { MaxSum, MinSum };

inline constexpr SelectionRule kAllRules[] = {SelectionRule::MaxDiffMaxSum, SelectionRule::MaxDiffMinSum,
                                              SelectionRule::MaxRatio, SelectionRule::MaxMax};

std::string_view to_string(SelectionRule rule);
std::string_view to_string(PolarityRule rule);
std::optional<SelectionRule> parse_selection_rule(std::string_view name);
std::optional<PolarityRule> parse_polarity_rule(std::string_view name);

bool choose_polarity(std::uint32_t pos, std::uint32_t neg, PolarityRule rule);

/// Strict ranking of two non-pure cells under `rule`. Mirror cells compare
/// equal (neither ranks above the other).
bool ranks_above(Cell a, Cell b, SelectionRule rule);

/// Full ranking used by CellChooser: pure cells first, then `rule`.
bool outranks(Cell a, Cell b, SelectionRule rule, PurePriority pure);

/// Streaming arg-max over candidate cells with pure-cell preemption: any pure
/// cell (exactly one coordinate zero) beats every non-pure cell; pure cells
/// compete on i+j per PurePriority. The isolated cell (0,0) is ignored.
class CellChooser {
public:
    CellChooser(SelectionRule rule, PurePriority pure = PurePriority::MaxSum) : rule_{rule}, pure_{pure} {}

    void offer(Cell c);
    std::optional<Cell> best() const { return found_ ? std::optional<Cell>{best_} : std::nullopt; }

private:
    SelectionRule rule_;
    PurePriority pure_;
    bool found_ = false;
    Cell best_{};
};

}  // namespace dsat
