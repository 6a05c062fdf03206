#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

#include "dsat/formula.hpp"

namespace dsat {

class DimacsError : public std::runtime_error {
public:
    enum class Kind {
        MalformedHeader,
        MissingHeader,
        LiteralOutOfRange,
        BadClauseLength,
        DuplicateVariable,
        MissingTerminator,
        ClauseCountMismatch,
        BadToken,
    };

    DimacsError(Kind kind, std::size_t line, const std::string& what);

    Kind kind() const { return kind_; }
    std::size_t line() const { return line_; }

private:
    Kind kind_;
    std::size_t line_;
};

/// Parses DIMACS CNF restricted to clauses of 1..3 distinct variables.
/// A line starting with '%' ends the input (SATLIB convention).
Cnf parse_dimacs(std::string_view text);

std::string emit_dimacs(const Cnf& cnf);

/// Live reduced clauses only, preceded by a comment line listing the
/// variables already set ("c assigned 3 -7 ...").
std::string emit_dimacs(const Formula& f);

}  // namespace dsat
