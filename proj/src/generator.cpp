#include "dsat/generator.hpp"

#include <cmath>
#include <stdexcept>

#include "dsat/rng.hpp"

namespace dsat {

Cnf generate_random(Var n, double density, std::uint64_t seed) {
    if (n < 3) throw std::invalid_argument("generate_random: need n >= 3");
    if (!(density > 0.0) || !std::isfinite(density))
        throw std::invalid_argument("generate_random: density must be positive");
    const auto m = static_cast<std::size_t>(std::llround(density * n));

    Rng rng = make_rng(seed);
    Cnf cnf;
    cnf.num_vars = n;
    cnf.clauses.reserve(m);
    for (std::size_t c = 0; c < m; ++c) {
        Var v[3];
        v[0] = static_cast<Var>(uniform_below(rng, n)) + 1;
        do v[1] = static_cast<Var>(uniform_below(rng, n)) + 1;
        while (v[1] == v[0]);
        do v[2] = static_cast<Var>(uniform_below(rng, n)) + 1;
        while (v[2] == v[0] || v[2] == v[1]);
        const std::uint64_t signs = rng();
        cnf.clauses.push_back({Literal{v[0], (signs >> 63 & 1u) == 0},
                               Literal{v[1], (signs >> 62 & 1u) == 0},
                               Literal{v[2], (signs >> 61 & 1u) == 0}});
    }
    return cnf;
}

}  // namespace dsat
