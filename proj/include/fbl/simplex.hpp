#pragma once

// Dense two-phase primal simplex with Bland's rule.
//
// Variables carry optional lower/upper bounds and are rewritten internally
// into nonnegative standard form. The same code runs over double (sign
// decisions with a pivot tolerance) and over exact rationals (no tolerance),
// so a floating solve can be refereed by an exact one.

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fbl/scalar.hpp"

namespace fbl {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

std::string to_string(LpStatus s);

enum class Relation { LessEqual, GreaterEqual, Equal };

template <class T>
struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    T objective{};
    std::vector<T> values;  // one per variable, in insertion order
    std::size_t iterations = 0;
};

template <class T>
class LinearProgram {
public:
    using Term = std::pair<std::size_t, T>;

    std::size_t add_variable(std::optional<T> lower = T(0), std::optional<T> upper = std::nullopt);
    void add_constraint(std::vector<Term> terms, Relation rel, T rhs);
    void set_objective_coefficient(std::size_t var, T coeff);

    std::size_t variable_count() const { return lower_.size(); }
    std::size_t constraint_count() const { return rows_.size(); }

    LpResult<T> maximize(std::size_t max_iterations = 0) const;

private:
    struct Row {
        std::vector<Term> terms;
        Relation rel;
        T rhs;
    };
    std::vector<std::optional<T>> lower_;
    std::vector<std::optional<T>> upper_;
    std::vector<T> objective_;
    std::vector<Row> rows_;
};

extern template class LinearProgram<double>;
extern template class LinearProgram<Rational>;

}  // namespace fbl
