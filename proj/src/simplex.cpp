#include "fbl/simplex.hpp"

#include <stdexcept>

namespace fbl {

std::string to_string(LpStatus s) {
    switch (s) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
        case LpStatus::IterationLimit: return "iteration_limit";
    }
    return "unknown";
}

template <class T>
std::size_t LinearProgram<T>::add_variable(std::optional<T> lower, std::optional<T> upper) {
    if (lower && upper && *upper < *lower) throw std::invalid_argument("LinearProgram: empty variable range");
    lower_.push_back(std::move(lower));
    upper_.push_back(std::move(upper));
    objective_.push_back(T(0));
    return lower_.size() - 1;
}

template <class T>
void LinearProgram<T>::add_constraint(std::vector<Term> terms, Relation rel, T rhs) {
    for (const auto& [var, coeff] : terms) {
        if (var >= lower_.size()) throw std::out_of_range("LinearProgram: unknown variable in constraint");
    }
    rows_.push_back(Row{std::move(terms), rel, std::move(rhs)});
}

template <class T>
void LinearProgram<T>::set_objective_coefficient(std::size_t var, T coeff) {
    if (var >= objective_.size()) throw std::out_of_range("LinearProgram: unknown variable in objective");
    objective_[var] = std::move(coeff);
}

namespace {

// How an original variable maps onto nonnegative standard-form columns.
enum class VarMap { Shifted, Negated, Split };

template <class T>
class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), a_(rows, std::vector<T>(cols, T(0))), rhs_(rows, T(0)), basis_(rows, 0) {}

    std::vector<std::vector<T>>& a() { return a_; }
    std::vector<T>& rhs() { return rhs_; }
    std::vector<std::size_t>& basis() { return basis_; }
    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }

    // Runs Bland's-rule simplex maximizing cost over columns with allowed[j].
    // Returns Optimal, Unbounded or IterationLimit.
    LpStatus optimize(const std::vector<T>& cost, const std::vector<bool>& allowed, std::size_t max_iter, std::size_t& iterations) {
        const T tol = ScalarTraits<T>::pivot_tol();
        std::vector<T> reduced(n_);
        while (true) {
            // Reduced costs d_j = c_j - c_B . column_j
            std::size_t entering = n_;
            for (std::size_t j = 0; j < n_; ++j) {
                if (!allowed[j]) continue;
                T d = cost[j];
                for (std::size_t i = 0; i < m_; ++i) {
                    if (a_[i][j] != 0) d -= cost[basis_[i]] * a_[i][j];
                }
                if (d > tol) {
                    entering = j;
                    break;
                }
            }
            if (entering == n_) return LpStatus::Optimal;
            if (iterations >= max_iter) return LpStatus::IterationLimit;

            std::size_t leaving = m_;
            T best_ratio{};
            for (std::size_t i = 0; i < m_; ++i) {
                if (!(a_[i][entering] > tol)) continue;
                T ratio = rhs_[i] / a_[i][entering];
                if (leaving == m_ || ratio < best_ratio || (ratio == best_ratio && basis_[i] < basis_[leaving])) {
                    leaving = i;
                    best_ratio = ratio;
                }
            }
            if (leaving == m_) return LpStatus::Unbounded;
            pivot(leaving, entering);
            ++iterations;
        }
    }

    void pivot(std::size_t r, std::size_t c) {
        const T p = a_[r][c];
        for (std::size_t j = 0; j < n_; ++j) a_[r][j] /= p;
        rhs_[r] /= p;
        a_[r][c] = T(1);
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) continue;
            const T f = a_[i][c];
            if (f == 0) continue;
            for (std::size_t j = 0; j < n_; ++j) {
                if (a_[r][j] != 0) a_[i][j] -= f * a_[r][j];
            }
            rhs_[i] -= f * rhs_[r];
            a_[i][c] = T(0);
            if constexpr (!ScalarTraits<T>::exact) {
                // Keep round-off from turning into spurious pivots.
                for (std::size_t j = 0; j < n_; ++j) {
                    if (std::fabs(a_[i][j]) < 1e-14) a_[i][j] = 0.0;
                }
                if (std::fabs(rhs_[i]) < 1e-14) rhs_[i] = 0.0;
            }
        }
        basis_[r] = c;
    }

    void drop_row(std::size_t r) {
        a_.erase(a_.begin() + static_cast<std::ptrdiff_t>(r));
        rhs_.erase(rhs_.begin() + static_cast<std::ptrdiff_t>(r));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
        --m_;
    }

private:
    std::size_t m_;
    std::size_t n_;
    std::vector<std::vector<T>> a_;
    std::vector<T> rhs_;
    std::vector<std::size_t> basis_;
};

}  // namespace

template <class T>
LpResult<T> LinearProgram<T>::maximize(std::size_t max_iterations) const {
    const T tol = ScalarTraits<T>::pivot_tol();
    const std::size_t nvar = lower_.size();

    // Column layout: structural columns first.
    std::vector<VarMap> map(nvar);
    std::vector<std::size_t> col(nvar);
    std::size_t ncols = 0;
    std::vector<std::pair<std::size_t, T>> bound_rows;  // (column, upper) rows y <= u - l
    for (std::size_t j = 0; j < nvar; ++j) {
        col[j] = ncols;
        if (lower_[j]) {
            map[j] = VarMap::Shifted;
            ncols += 1;
            if (upper_[j]) bound_rows.emplace_back(col[j], *upper_[j] - *lower_[j]);
        } else if (upper_[j]) {
            map[j] = VarMap::Negated;
            ncols += 1;
        } else {
            map[j] = VarMap::Split;
            ncols += 2;
        }
    }
    const std::size_t nstruct = ncols;

    struct StdRow {
        std::vector<std::pair<std::size_t, T>> terms;
        Relation rel;
        T rhs;
    };
    std::vector<StdRow> std_rows;
    std_rows.reserve(rows_.size() + bound_rows.size());
    for (const Row& row : rows_) {
        StdRow s{{}, row.rel, row.rhs};
        for (const auto& [var, coeff] : row.terms) {
            switch (map[var]) {
                case VarMap::Shifted:
                    s.terms.emplace_back(col[var], coeff);
                    s.rhs -= coeff * *lower_[var];
                    break;
                case VarMap::Negated:
                    s.terms.emplace_back(col[var], -coeff);
                    s.rhs -= coeff * *upper_[var];
                    break;
                case VarMap::Split:
                    s.terms.emplace_back(col[var], coeff);
                    s.terms.emplace_back(col[var] + 1, -coeff);
                    break;
            }
        }
        std_rows.push_back(std::move(s));
    }
    for (auto& [c, ub] : bound_rows) std_rows.push_back(StdRow{{{c, T(1)}}, Relation::LessEqual, ub});

    // Normalize to nonnegative right-hand sides.
    for (auto& s : std_rows) {
        if (s.rhs < 0) {
            s.rhs = -s.rhs;
            for (auto& t : s.terms) t.second = -t.second;
            if (s.rel == Relation::LessEqual)
                s.rel = Relation::GreaterEqual;
            else if (s.rel == Relation::GreaterEqual)
                s.rel = Relation::LessEqual;
        }
    }

    const std::size_t m = std_rows.size();
    std::size_t nslack = 0, nart = 0;
    for (const auto& s : std_rows) {
        if (s.rel != Relation::Equal) ++nslack;
        if (s.rel != Relation::LessEqual) ++nart;
    }
    const std::size_t total = nstruct + nslack + nart;
    Tableau<T> tab(m, total);
    std::vector<bool> is_art(total, false);
    {
        std::size_t next_slack = nstruct, next_art = nstruct + nslack;
        for (std::size_t i = 0; i < m; ++i) {
            const auto& s = std_rows[i];
            for (const auto& [c, v] : s.terms) tab.a()[i][c] += v;
            tab.rhs()[i] = s.rhs;
            if (s.rel == Relation::LessEqual) {
                tab.a()[i][next_slack] = T(1);
                tab.basis()[i] = next_slack++;
            } else if (s.rel == Relation::GreaterEqual) {
                tab.a()[i][next_slack++] = T(-1);
                tab.a()[i][next_art] = T(1);
                is_art[next_art] = true;
                tab.basis()[i] = next_art++;
            } else {
                tab.a()[i][next_art] = T(1);
                is_art[next_art] = true;
                tab.basis()[i] = next_art++;
            }
        }
    }

    if (max_iterations == 0) max_iterations = 100000 + 50 * (m + total);
    LpResult<T> result;
    std::size_t iterations = 0;

    if (nart > 0) {
        std::vector<T> cost1(total, T(0));
        for (std::size_t j = 0; j < total; ++j)
            if (is_art[j]) cost1[j] = T(-1);
        std::vector<bool> allowed(total, true);
        LpStatus st = tab.optimize(cost1, allowed, max_iterations, iterations);
        if (st == LpStatus::IterationLimit) {
            result.status = st;
            result.iterations = iterations;
            return result;
        }
        T infeas(0);
        for (std::size_t i = 0; i < tab.rows(); ++i)
            if (is_art[tab.basis()[i]]) infeas += tab.rhs()[i];
        const T feas_tol = ScalarTraits<T>::exact ? T(0) : T(1e-9);
        if (infeas > feas_tol) {
            result.status = LpStatus::Infeasible;
            result.iterations = iterations;
            return result;
        }
        // Drive remaining (zero-level) artificials out of the basis.
        for (std::size_t i = 0; i < tab.rows();) {
            if (!is_art[tab.basis()[i]]) {
                ++i;
                continue;
            }
            std::size_t c = total;
            for (std::size_t j = 0; j < total; ++j) {
                if (!is_art[j] && abs_value(tab.a()[i][j]) > tol) {
                    c = j;
                    break;
                }
            }
            if (c == total) {
                tab.drop_row(i);
            } else {
                tab.pivot(i, c);
                ++i;
            }
        }
    }

    std::vector<T> cost2(total, T(0));
    for (std::size_t j = 0; j < nvar; ++j) {
        const T& cj = objective_[j];
        switch (map[j]) {
            case VarMap::Shifted: cost2[col[j]] = cj; break;
            case VarMap::Negated: cost2[col[j]] = -cj; break;
            case VarMap::Split:
                cost2[col[j]] = cj;
                cost2[col[j] + 1] = -cj;
                break;
        }
    }
    std::vector<bool> allowed(total, true);
    for (std::size_t j = 0; j < total; ++j)
        if (is_art[j]) allowed[j] = false;
    LpStatus st = tab.optimize(cost2, allowed, max_iterations, iterations);
    result.status = st;
    result.iterations = iterations;
    if (st != LpStatus::Optimal) return result;

    std::vector<T> y(total, T(0));
    for (std::size_t i = 0; i < tab.rows(); ++i) y[tab.basis()[i]] = tab.rhs()[i];
    result.values.assign(nvar, T(0));
    T obj(0);
    for (std::size_t j = 0; j < nvar; ++j) {
        T x(0);
        switch (map[j]) {
            case VarMap::Shifted: x = *lower_[j] + y[col[j]]; break;
            case VarMap::Negated: x = *upper_[j] - y[col[j]]; break;
            case VarMap::Split: x = y[col[j]] - y[col[j] + 1]; break;
        }
        obj += objective_[j] * x;
        result.values[j] = std::move(x);
    }
    result.objective = obj;
    return result;
}

template class LinearProgram<double>;
template class LinearProgram<Rational>;

}  // namespace fbl
