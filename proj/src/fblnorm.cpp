#include "fbl/fblnorm.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <stdexcept>

namespace fbl {

// ---------------------------------------------------------------------------
// Spaces and configurations
// ---------------------------------------------------------------------------

void AdmissibilitySpace::validate() const {
    const std::size_t n = generators.size();
    if (n == 0) throw std::invalid_argument("admissibility space has no generators");
    if (ball_vertices.empty()) throw std::invalid_argument("admissibility space has no ball vertices");
    for (const auto& v : ball_vertices) {
        if (v.size() != n) throw std::invalid_argument("ball vertex dimension does not match generator count");
        std::vector<double> neg(v.size());
        for (std::size_t i = 0; i < n; ++i) neg[i] = -v[i];
        if (std::find(ball_vertices.begin(), ball_vertices.end(), neg) == ball_vertices.end())
            throw std::invalid_argument("ball vertex list is not symmetric");
    }
    // Spanning: exact rank over the rationals.
    std::vector<Vector<Rational>> rows;
    for (const auto& v : ball_vertices) {
        Vector<Rational> r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = Rational(v[i]);
        rows.push_back(std::move(r));
    }
    std::size_t rank = 0;
    for (std::size_t col = 0; col < n && rank < rows.size(); ++col) {
        std::size_t piv = rank;
        while (piv < rows.size() && rows[piv][col] == 0) ++piv;
        if (piv == rows.size()) continue;
        std::swap(rows[piv], rows[rank]);
        for (std::size_t i = rank + 1; i < rows.size(); ++i) {
            if (rows[i][col] == 0) continue;
            const Rational f = rows[i][col] / rows[rank][col];
            for (std::size_t j = col; j < n; ++j) rows[i][j] -= f * rows[rank][j];
        }
        ++rank;
    }
    if (rank != n) throw std::invalid_argument("ball vertices do not span the generator space");
}

AdmissibilitySpace fbl_space(std::vector<GeneratorId> generators) {
    AdmissibilitySpace s;
    const std::size_t n = generators.size();
    s.generators = std::move(generators);
    for (std::size_t i = 0; i < n; ++i) {
        for (double sign : {1.0, -1.0}) {
            std::vector<double> v(n, 0.0);
            v[i] = sign;
            s.ball_vertices.push_back(std::move(v));
        }
    }
    return s;
}

AdmissibilitySpace l1_space(std::vector<GeneratorId> generators) {
    // The unit ball of l1(n) is the cross-polytope; its vertices are +-e_i.
    return fbl_space(std::move(generators));
}

AdmissibilitySpace linf_space(std::vector<GeneratorId> generators) {
    const std::size_t n = generators.size();
    if (n > 20) throw std::invalid_argument("l-infinity vertex list limited to 20 generators");
    AdmissibilitySpace s;
    s.generators = std::move(generators);
    for (std::size_t m = 0; m < (std::size_t{1} << n); ++m) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = (m >> i) & 1 ? -1.0 : 1.0;
        s.ball_vertices.push_back(std::move(v));
    }
    return s;
}

double config_value(const Evaluator& F, const DualConfig& c) {
    double total = 0.0;
    for (const auto& x : c.points) total += std::fabs(F(x));
    return total;
}

template <class T>
T max_vertex_sum(const std::vector<Vector<T>>& points, const AdmissibilitySpace& s) {
    T worst(0);
    for (const auto& v : s.ball_vertices) {
        T sum(0);
        for (const auto& x : points) {
            if (x.size() != v.size()) throw std::invalid_argument("dual point dimension does not match the space");
            T dotv(0);
            for (std::size_t i = 0; i < v.size(); ++i)
                if (v[i] != 0.0) dotv += x[i] * from_double<T>(v[i]);
            sum += abs_value(dotv);
        }
        if (sum > worst) worst = sum;
    }
    return worst;
}

AdmissibilityReport admissible(const DualConfig& c, const AdmissibilitySpace& s) {
    AdmissibilityReport rep;
    for (std::size_t k = 0; k < s.ball_vertices.size(); ++k) {
        const auto& v = s.ball_vertices[k];
        double sum = 0.0;
        for (const auto& x : c.points) {
            if (x.size() != v.size()) throw std::invalid_argument("dual point dimension does not match the space");
            double d = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i) d += x[i] * v[i];
            sum += std::fabs(d);
        }
        if (k == 0 || sum > rep.worst_sum) {
            rep.worst_sum = sum;
            rep.worst_vertex = k;
        }
    }
    rep.admissible = rep.worst_sum <= 1.0 + kAdmissibilityTol;
    return rep;
}

NormBracket to_double(const NormResult<Rational>& r) {
    NormBracket b;
    b.lower = fbl::to_double(r.lower);
    b.upper = r.upper_finite ? fbl::to_double(r.upper) : std::numeric_limits<double>::infinity();
    b.upper_finite = r.upper_finite;
    b.exact = r.exact;
    b.diagnostics = r.diagnostics;
    for (const auto& p : r.certificate) {
        std::vector<double> q(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) q[i] = fbl::to_double(p[i]);
        b.certificate.push_back(std::move(q));
    }
    return b;
}

// ---------------------------------------------------------------------------
// Exact norm
// ---------------------------------------------------------------------------

namespace {

template <class T>
bool negligible(const T& x) {
    if constexpr (ScalarTraits<T>::exact)
        return x == 0;
    else
        return std::fabs(x) <= 1e-12;
}

// Direction spanning the null space of `rows` (each of length n) when the
// rows have rank n - 1; nullopt otherwise.
template <class T>
std::optional<Vector<T>> null_direction(std::vector<Vector<T>> rows, std::size_t n) {
    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    for (std::size_t col = 0; col < n && r < rows.size(); ++col) {
        std::size_t piv = rows.size();
        if constexpr (ScalarTraits<T>::exact) {
            for (std::size_t i = r; i < rows.size(); ++i)
                if (rows[i][col] != 0) {
                    piv = i;
                    break;
                }
        } else {
            double best = 1e-10;
            for (std::size_t i = r; i < rows.size(); ++i)
                if (std::fabs(rows[i][col]) > best) {
                    best = std::fabs(rows[i][col]);
                    piv = i;
                }
        }
        if (piv == rows.size()) continue;
        std::swap(rows[piv], rows[r]);
        const T p = rows[r][col];
        for (std::size_t j = 0; j < n; ++j) rows[r][j] /= p;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][col] == 0) continue;
            const T f = rows[i][col];
            for (std::size_t j = 0; j < n; ++j) rows[i][j] -= f * rows[r][j];
        }
        pivot_col.push_back(col);
        ++r;
    }
    if (r != n - 1) return std::nullopt;
    std::size_t free_col = 0;
    for (std::size_t col = 0; col < n; ++col)
        if (std::find(pivot_col.begin(), pivot_col.end(), col) == pivot_col.end()) {
            free_col = col;
            break;
        }
    Vector<T> d(n, T(0));
    d[free_col] = T(1);
    for (std::size_t i = 0; i < r; ++i) d[pivot_col[i]] = -rows[i][free_col];
    // Unit max-norm so certificate points stay inside the cube.
    T m(0);
    for (const auto& x : d)
        if (abs_value(x) > m) m = abs_value(x);
    for (auto& x : d) {
        x /= m;
        if (negligible(x)) x = T(0);
    }
    return d;
}

template <class T>
std::vector<Vector<T>> vertex_normals(const AdmissibilitySpace& s) {
    std::vector<Vector<T>> out;
    for (const auto& v : s.ball_vertices) {
        Vector<T> h(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) h[i] = from_double<T>(v[i]);
        out.push_back(std::move(h));
    }
    return out;
}

// One representative per +-pair of vertices.
template <class T>
std::vector<Vector<T>> vertex_rows(const AdmissibilitySpace& s) {
    std::vector<Vector<T>> out;
    for (auto& v : vertex_normals<T>(s)) {
        Vector<T> neg = v;
        for (auto& x : neg) x = -x;
        if (std::find(out.begin(), out.end(), v) == out.end() && std::find(out.begin(), out.end(), neg) == out.end())
            out.push_back(std::move(v));
    }
    return out;
}

template <class T>
void check_space(const PLFunction<T>& f, const AdmissibilitySpace& s) {
    s.validate();
    if (f.dimension() != s.generators) throw std::invalid_argument("PL function and space have different generators");
}

// Canonical key for deduplicating rays in floating mode.
std::vector<long long> ray_key(const Vector<double>& r) {
    std::vector<long long> k(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) k[i] = std::llround(r[i] * 1e9);
    return k;
}

template <class T>
std::vector<Vector<T>> candidate_rays(const std::vector<Vector<T>>& hyperplanes, std::size_t n, std::size_t cap) {
    std::vector<Vector<T>> rays;
    if (n == 1) {
        rays.push_back(Vector<T>{T(1)});
        rays.push_back(Vector<T>{T(-1)});
        return rays;
    }
    const std::size_t k = n - 1;
    const std::size_t h = hyperplanes.size();
    if (h < k) throw InternalError("too few hyperplanes to determine rays");
    std::set<Vector<T>> seen_exact;
    std::set<std::vector<long long>> seen_float;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    std::vector<Vector<T>> rows(k);
    while (true) {
        for (std::size_t i = 0; i < k; ++i) rows[i] = hyperplanes[idx[i]];
        if (auto d = null_direction(rows, n)) {
            for (int sign : {1, -1}) {
                Vector<T> r = *d;
                if (sign < 0)
                    for (auto& x : r) x = -x;
                bool fresh;
                if constexpr (ScalarTraits<T>::exact)
                    fresh = seen_exact.insert(r).second;
                else
                    fresh = seen_float.insert(ray_key(r)).second;
                if (fresh) {
                    rays.push_back(std::move(r));
                    if (rays.size() > cap) throw CapExceeded("candidate rays", rays.size(), cap);
                }
            }
        }
        // Next k-subset in lexicographic order.
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == h - k + (i - 1)) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return rays;
}

template <class T>
void finish_certificate(NormResult<T>& out, const PLFunction<T>& f, const AdmissibilitySpace& s) {
    if constexpr (!ScalarTraits<T>::exact) {
        const double worst = max_vertex_sum(out.certificate, s);
        if (worst > 1.0) {
            for (auto& p : out.certificate)
                for (auto& x : p) x /= worst;
        }
    }
    T lower(0);
    for (const auto& p : out.certificate) lower += abs_value(f.evaluate(p));
    out.lower = lower;
}

}  // namespace

template <class T>
NormResult<T> exact_fbl_norm(const PLFunction<T>& f, const AdmissibilitySpace& s, std::size_t ray_cap) {
    check_space(f, s);
    const std::size_t n = s.dimension();
    std::vector<Vector<T>> hyperplanes = breakpoint_hyperplanes(f);
    merge_hyperplanes(hyperplanes, vertex_normals<T>(s));
    const std::vector<Vector<T>> rays = candidate_rays(hyperplanes, n, ray_cap);
    const std::vector<Vector<T>> rows = vertex_rows<T>(s);

    NormResult<T> out;
    out.diagnostics.method = "ray-lp";
    out.diagnostics.hyperplanes = hyperplanes.size();
    out.diagnostics.rays = rays.size();
    out.diagnostics.cells = f.fan.cells.size();

    LinearProgram<T> lp;
    std::vector<std::size_t> used;  // ray index per LP variable
    std::vector<std::vector<typename LinearProgram<T>::Term>> row_terms(rows.size());
    for (std::size_t r = 0; r < rays.size(); ++r) {
        const T value = abs_value(f.evaluate(rays[r]));
        if (value == 0) continue;
        const std::size_t var = lp.add_variable();
        lp.set_objective_coefficient(var, value);
        used.push_back(r);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const T c = abs_value(dot<T>(rows[k], rays[r]));
            if (c != 0) row_terms[k].emplace_back(var, c);
        }
    }
    for (auto& terms : row_terms) lp.add_constraint(std::move(terms), Relation::LessEqual, T(1));

    LpResult<T> res = lp.maximize();
    out.diagnostics.lp_status = to_string(res.status);
    out.diagnostics.lp_iterations = res.iterations;
    if (res.status == LpStatus::Unbounded) throw InternalError("norm LP is unbounded");
    if (res.status != LpStatus::Optimal) throw InternalError("norm LP ended with status " + to_string(res.status));

    out.upper = res.objective;
    out.exact = true;
    for (std::size_t j = 0; j < used.size(); ++j) {
        const T& mu = res.values[j];
        if (!(mu > 0) || negligible(mu)) continue;
        Vector<T> p = rays[used[j]];
        for (auto& x : p) x *= mu;
        out.certificate.push_back(std::move(p));
    }
    finish_certificate(out, f, s);
    return out;
}

template <class T>
NormResult<T> exact_fbl_norm_cells(const PLFunction<T>& f, const AdmissibilitySpace& s, std::size_t cell_cap) {
    check_space(f, s);
    const std::size_t n = s.dimension();
    const PLFunction<T> g = refine_with_hyperplanes(refine_by_zero_set(f, cell_cap), vertex_normals<T>(s), cell_cap);
    const std::vector<Vector<T>> rows = vertex_rows<T>(s);

    NormResult<T> out;
    out.diagnostics.method = "cell-lp";
    out.diagnostics.hyperplanes = g.fan.hyperplanes.size();
    out.diagnostics.cells = g.fan.cells.size();

    LinearProgram<T> lp;
    std::vector<std::vector<std::size_t>> vars(g.fan.cells.size());
    std::vector<std::vector<typename LinearProgram<T>::Term>> row_terms(rows.size());
    for (std::size_t c = 0; c < g.fan.cells.size(); ++c) {
        const auto& cell = g.fan.cells[c];
        const int fsign = sign_of(dot<T>(g.pieces[c], cell.witness));
        for (std::size_t i = 0; i < n; ++i) vars[c].push_back(lp.add_variable(std::nullopt, std::nullopt));
        // Closed cell membership.
        for (std::size_t k = 0; k < g.fan.hyperplanes.size(); ++k) {
            const T sg = cell.signs[k] == '+' ? T(1) : T(-1);
            std::vector<typename LinearProgram<T>::Term> terms;
            for (std::size_t i = 0; i < n; ++i)
                if (g.fan.hyperplanes[k][i] != 0) terms.emplace_back(vars[c][i], sg * g.fan.hyperplanes[k][i]);
            lp.add_constraint(std::move(terms), Relation::GreaterEqual, T(0));
        }
        for (std::size_t i = 0; i < n; ++i)
            if (fsign != 0 && g.pieces[c][i] != 0) lp.set_objective_coefficient(vars[c][i], T(fsign) * g.pieces[c][i]);
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const T sg = T(sign_of(dot<T>(rows[k], cell.witness)));
            for (std::size_t i = 0; i < n; ++i)
                if (rows[k][i] != 0) row_terms[k].emplace_back(vars[c][i], sg * rows[k][i]);
        }
    }
    for (auto& terms : row_terms) lp.add_constraint(std::move(terms), Relation::LessEqual, T(1));

    LpResult<T> res = lp.maximize();
    out.diagnostics.lp_status = to_string(res.status);
    out.diagnostics.lp_iterations = res.iterations;
    if (res.status == LpStatus::Unbounded) throw InternalError("cell norm LP is unbounded");
    if (res.status != LpStatus::Optimal) throw InternalError("cell norm LP ended with status " + to_string(res.status));
    out.upper = res.objective;
    out.exact = true;
    for (std::size_t c = 0; c < vars.size(); ++c) {
        Vector<T> p(n);
        bool nonzero = false;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = res.values[vars[c][i]];
            if (negligible(p[i]))
                p[i] = T(0);
            else
                nonzero = true;
        }
        if (nonzero) out.certificate.push_back(std::move(p));
    }
    finish_certificate(out, f, s);
    return out;
}

// ---------------------------------------------------------------------------
// product bound f·|d_a| <= sup|f| and the polyhedral comparison
// ---------------------------------------------------------------------------

ProductBoundReport check_lemma34(const Evaluator& f, double sup_norm, std::size_t a_index, const AdmissibilitySpace& s,
                            const OracleOptions& opt) {
    if (a_index >= s.dimension()) throw std::invalid_argument("product generator is not in the space");
    Evaluator product = [f, a_index](std::span<const double> x) { return f(x) * std::fabs(x[a_index]); };
    OracleOptions o = opt;
    o.degree = 2;
    ProductBoundReport rep;
    rep.sup_norm = sup_norm;
    rep.oracle = oracle_lower_bound(product, s, o);
    rep.pass = rep.oracle.lower <= sup_norm + 1e-9;
    return rep;
}

ProductBoundReport check_lemma34(const LatticeExpr& f, const GeneratorId& a, const AdmissibilitySpace& s,
                            const OracleOptions& opt) {
    auto pos = std::find(s.generators.begin(), s.generators.end(), a);
    if (pos == s.generators.end()) throw std::invalid_argument("generator '" + a + "' is not in the space");
    const double sup = sup_norm_on_cube(pl_from_expr<double>(f, s.generators));
    auto compiled = std::make_shared<CompiledExpr>(f, s.generators);
    Evaluator fe = [compiled](std::span<const double> x) { return (*compiled)(x); };
    return check_lemma34(fe, sup, static_cast<std::size_t>(pos - s.generators.begin()), s, opt);
}

PolyhedralReport fbl_vs_polyhedral_check(const LatticeExpr& e, std::size_t n, const OracleOptions& opt) {
    std::vector<GeneratorId> gens = support_list(e);
    if (gens.size() != n)
        throw std::invalid_argument("expression has " + std::to_string(gens.size()) + " generators, expected " +
                                    std::to_string(n));
    const auto f = pl_from_expr<double>(e, gens);
    PolyhedralReport rep;
    rep.fbl_norm = exact_fbl_norm(f, fbl_space(gens)).upper;
    rep.l1_norm = exact_fbl_norm(f, l1_space(gens)).upper;
    const auto linf = linf_space(gens);
    rep.linf_norm = exact_fbl_norm(f, linf).upper;
    auto compiled = std::make_shared<CompiledExpr>(e, gens);
    rep.linf_oracle =
        oracle_lower_bound([compiled](std::span<const double> x) { return (*compiled)(x); }, linf, opt).lower;
    rep.l1_identity = std::fabs(rep.fbl_norm - rep.l1_norm) <= 1e-9;
    rep.linf_agreement = rep.linf_oracle <= rep.linf_norm + 1e-9 && rep.linf_oracle >= rep.linf_norm - 1e-3;
    return rep;
}

template NormResult<double> exact_fbl_norm<double>(const PLFunction<double>&, const AdmissibilitySpace&, std::size_t);
template NormResult<Rational> exact_fbl_norm<Rational>(const PLFunction<Rational>&, const AdmissibilitySpace&,
                                                       std::size_t);
template NormResult<double> exact_fbl_norm_cells<double>(const PLFunction<double>&, const AdmissibilitySpace&,
                                                         std::size_t);
template NormResult<Rational> exact_fbl_norm_cells<Rational>(const PLFunction<Rational>&, const AdmissibilitySpace&,
                                                             std::size_t);
template double max_vertex_sum<double>(const std::vector<Vector<double>>&, const AdmissibilitySpace&);
template Rational max_vertex_sum<Rational>(const std::vector<Vector<Rational>>&, const AdmissibilitySpace&);

}  // namespace fbl
