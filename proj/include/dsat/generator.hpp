#pragma once

#include <cstdint>

#include "dsat/formula.hpp"

namespace dsat {

/// Random 3-CNF with m = round(density * n) clauses drawn independently and
/// uniformly, with replacement, from the 8 * C(n,3) proper 3-clauses.
///
/// Per clause: three distinct variables by rejection sampling (each draw
/// uniform_below(n) + 1, redrawn on collision), then one 64-bit word whose
/// top three bits give the signs (bit set = negative). The stream is
/// make_rng(seed), i.e. std::mt19937_64 seeded with mix64(seed).
/// Throws std::invalid_argument for n < 3 or density <= 0.
Cnf generate_random(Var n, double density, std::uint64_t seed);

}  // namespace dsat
