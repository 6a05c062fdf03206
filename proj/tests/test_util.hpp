#pragma once

#include <initializer_list>

#include "dsat/formula.hpp"

namespace dsat::testing {

/// Cnf from DIMACS-style integer literals.
inline Cnf make_cnf(Var n, std::initializer_list<std::initializer_list<long>> clauses) {
    Cnf cnf;
    cnf.num_vars = n;
    for (const auto& cl : clauses) {
        std::vector<Literal> lits;
        for (const long x : cl) lits.push_back(Literal::from_dimacs(x));
        cnf.clauses.push_back(std::move(lits));
    }
    return cnf;
}

}  // namespace dsat::testing
