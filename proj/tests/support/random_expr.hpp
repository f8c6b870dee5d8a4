#pragma once

// Random lattice expressions for property tests: small integer scalars,
// bounded depth, every node kind represented.

#include <random>
#include <string>
#include <vector>

#include "fbl/expr.hpp"

namespace fbl::testing {

inline LatticeExpr random_expr(std::mt19937_64& rng, const std::vector<std::string>& gens, int depth) {
    std::uniform_int_distribution<int> pick_gen(0, static_cast<int>(gens.size()) - 1);
    std::uniform_int_distribution<int> pick_kind(0, 4);
    std::uniform_int_distribution<int> pick_coef(-3, 3);
    if (depth <= 0) return LatticeExpr::gen(gens[static_cast<std::size_t>(pick_gen(rng))]);
    switch (pick_kind(rng)) {
        case 0: return LatticeExpr::gen(gens[static_cast<std::size_t>(pick_gen(rng))]);
        case 1: {
            int c = pick_coef(rng);
            if (c == 0) c = 2;
            return LatticeExpr::scale(c, random_expr(rng, gens, depth - 1));
        }
        case 2: return random_expr(rng, gens, depth - 1) + random_expr(rng, gens, depth - 1);
        case 3: return LatticeExpr::join(random_expr(rng, gens, depth - 1), random_expr(rng, gens, depth - 1));
        default: return LatticeExpr::meet(random_expr(rng, gens, depth - 1), random_expr(rng, gens, depth - 1));
    }
}

/// Draws until the max-min form stays within `max_functionals`.
inline LatticeExpr random_small_expr(std::mt19937_64& rng, const std::vector<std::string>& gens, int depth,
                                     std::size_t max_functionals = 40) {
    while (true) {
        LatticeExpr e = random_expr(rng, gens, depth);
        if (to_maxmin<double>(e).functional_count() <= max_functionals) return e;
    }
}

inline Point random_point(std::mt19937_64& rng, const std::vector<std::string>& gens) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Point p;
    for (const auto& g : gens) p[g] = u(rng);
    return p;
}

}  // namespace fbl::testing
