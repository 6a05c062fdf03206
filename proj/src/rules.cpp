#include "dsat/rules.hpp"

#include <algorithm>
#include <cstdint>

namespace dsat {

std::string_view to_string(SelectionRule rule) {
    switch (rule) {
        case SelectionRule::MaxDiffMaxSum: return "maxdiff-maxsum";
        case SelectionRule::MaxDiffMinSum: return "maxdiff-minsum";
        case SelectionRule::MaxRatio: return "maxratio";
        case SelectionRule::MaxMax: return "maxmax";
    }
    return "?";
}

std::string_view to_string(PolarityRule rule) {
    return rule == PolarityRule::SatisfyMajority ? "majority" : "paper";
}

std::optional<SelectionRule> parse_selection_rule(std::string_view name) {
    for (const SelectionRule r : kAllRules)
        if (to_string(r) == name) return r;
    return std::nullopt;
}

std::optional<PolarityRule> parse_polarity_rule(std::string_view name) {
    if (name == "majority") return PolarityRule::SatisfyMajority;
    if (name == "paper") return PolarityRule::PaperLiteral;
    return std::nullopt;
}

bool choose_polarity(std::uint32_t pos, std::uint32_t neg, PolarityRule rule) {
    if (rule == PolarityRule::PaperLiteral) return pos < neg;
    return pos >= neg;
}

bool ranks_above(Cell a, Cell b, SelectionRule rule) {
    const std::uint64_t hi_a = std::max(a.pos, a.neg), lo_a = std::min(a.pos, a.neg);
    const std::uint64_t hi_b = std::max(b.pos, b.neg), lo_b = std::min(b.pos, b.neg);
    switch (rule) {
        case SelectionRule::MaxDiffMaxSum:
            if (a.diff() != b.diff()) return a.diff() > b.diff();
            return a.sum() > b.sum();
        case SelectionRule::MaxDiffMinSum:
            if (a.diff() != b.diff()) return a.diff() > b.diff();
            return a.sum() < b.sum();
        case SelectionRule::MaxRatio: {
            // hi_a/lo_a vs hi_b/lo_b without division
            const std::uint64_t lhs = hi_a * lo_b, rhs = hi_b * lo_a;
            if (lhs != rhs) return lhs > rhs;
            if (a.sum() != b.sum()) return a.sum() > b.sum();
            return a.diff() > b.diff();
        }
        case SelectionRule::MaxMax:
            if (hi_a != hi_b) return hi_a > hi_b;
            return a.sum() > b.sum();
    }
    return false;
}

bool outranks(Cell a, Cell b, SelectionRule rule, PurePriority pure) {
    if (a.pure() != b.pure()) return a.pure();
    if (a.pure()) return pure == PurePriority::MaxSum ? a.sum() > b.sum() : a.sum() < b.sum();
    return ranks_above(a, b, rule);
}

void CellChooser::offer(Cell c) {
    if (c.sum() == 0) return;
    if (!found_ || outranks(c, best_, rule_, pure_)) {
        best_ = c;
        found_ = true;
    }
}

}  // namespace dsat
