#include "fbl/plfan.hpp"

#include <algorithm>
#include <optional>

#include "fbl/simplex.hpp"

namespace fbl {

namespace {

// Margin a candidate cell must admit inside the unit cube before it counts as
// full-dimensional. Witnesses are the LP optimum halved, so they clear the
// sign tolerance with room to spare.
template <class T>
T feasibility_margin() {
    if constexpr (ScalarTraits<T>::exact)
        return T(0);
    else
        return 1e-8;
}

// Threshold below which a witness is considered too close to a new
// hyperplane to decide its side without an LP.
template <class T>
T near_threshold() {
    if constexpr (ScalarTraits<T>::exact)
        return T(0);
    else
        return 1e-7;
}

template <class T>
bool approx_equal(const Vector<T>& a, const Vector<T>& b) {
    if (a.size() != b.size()) return false;
    if constexpr (ScalarTraits<T>::exact) {
        return a == b;
    } else {
        for (std::size_t i = 0; i < a.size(); ++i)
            if (std::fabs(a[i] - b[i]) > 1e-12 * std::max(1.0, std::fabs(a[i]))) return false;
        return true;
    }
}

template <class T>
bool coefficients_equal(const Vector<T>& a, const Vector<T>& b) {
    if constexpr (ScalarTraits<T>::exact) {
        return a == b;
    } else {
        for (std::size_t i = 0; i < a.size(); ++i)
            if (std::fabs(a[i] - b[i]) > 1e-9) return false;
        return true;
    }
}

template <class T>
bool is_zero(const Vector<T>& v) {
    return std::all_of(v.begin(), v.end(), [](const T& x) { return sign_of(x) == 0; });
}

// Adds the cell's sign constraints (over the first signs.size() hyperplanes)
// for variables x[0..n).
template <class T>
void add_cell_constraints(LinearProgram<T>& lp, const std::vector<Vector<T>>& hyperplanes, const std::string& signs,
                          const std::vector<std::size_t>& x, std::optional<std::size_t> margin_var) {
    const std::size_t n = x.size();
    for (std::size_t k = 0; k < signs.size(); ++k) {
        const T s = signs[k] == '+' ? T(1) : T(-1);
        std::vector<typename LinearProgram<T>::Term> terms;
        for (std::size_t i = 0; i < n; ++i)
            if (hyperplanes[k][i] != 0) terms.emplace_back(x[i], s * hyperplanes[k][i]);
        if (margin_var) terms.emplace_back(*margin_var, T(-1));
        lp.add_constraint(std::move(terms), Relation::GreaterEqual, T(0));
    }
}

// Interior point of the cell described by `signs`, or nullopt when the cell
// is not full-dimensional.
template <class T>
std::optional<Vector<T>> cell_witness(const std::vector<Vector<T>>& hyperplanes, const std::string& signs, std::size_t n) {
    LinearProgram<T> lp;
    std::vector<std::size_t> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = lp.add_variable(T(-1), T(1));
    const std::size_t t = lp.add_variable(std::nullopt, T(1));
    add_cell_constraints(lp, hyperplanes, signs, x, t);
    lp.set_objective_coefficient(t, T(1));
    LpResult<T> r = lp.maximize();
    if (r.status != LpStatus::Optimal) throw InternalError("cell feasibility LP did not reach optimality: " + to_string(r.status));
    if (!(r.objective > feasibility_margin<T>())) return std::nullopt;
    Vector<T> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = r.values[x[i]] / T(2);
    return w;
}

template <class T>
struct Extension {
    Fan<T> fan;
    std::vector<std::size_t> parent;  // index of the source cell each new cell refines
};

template <class T>
Extension<T> extend_fan(const Fan<T>& base, const std::vector<Vector<T>>& extra, std::size_t cell_cap) {
    const std::size_t n = base.dimension.size();
    Extension<T> out;
    out.fan.dimension = base.dimension;
    out.fan.hyperplanes = base.hyperplanes;
    std::vector<Cone<T>> cells = base.cells;
    std::vector<std::size_t> parent(cells.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;

    for (const auto& raw : extra) {
        if (raw.size() != n) throw std::invalid_argument("hyperplane dimension mismatch");
        out.fan.hyperplanes.push_back(normalize_hyperplane(raw));
        const Vector<T>& h = out.fan.hyperplanes.back();
        std::vector<Cone<T>> next;
        std::vector<std::size_t> next_parent;
        next.reserve(cells.size() * 2);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const T v = dot<T>(h, cells[c].witness);
            const T near = near_threshold<T>();
            for (char side : {'+', '-'}) {
                const bool witness_here = side == '+' ? v > near : v < -near;
                std::string signs = cells[c].signs + side;
                if (witness_here) {
                    next.push_back(Cone<T>{std::move(signs), cells[c].witness});
                    next_parent.push_back(parent[c]);
                } else if (auto w = cell_witness(out.fan.hyperplanes, signs, n)) {
                    next.push_back(Cone<T>{std::move(signs), std::move(*w)});
                    next_parent.push_back(parent[c]);
                }
            }
        }
        if (next.size() > cell_cap) throw CapExceeded("arrangement cells", next.size(), cell_cap);
        cells = std::move(next);
        parent = std::move(next_parent);
    }
    out.fan.cells = std::move(cells);
    out.fan.rebuild_index();
    out.parent = std::move(parent);
    return out;
}

template <class T>
Fan<T> trivial_fan(const std::vector<GeneratorId>& dimension) {
    Fan<T> f;
    f.dimension = dimension;
    f.cells.push_back(Cone<T>{"", Vector<T>(dimension.size(), T(0))});
    f.rebuild_index();
    return f;
}

template <class T>
std::vector<Vector<T>> new_hyperplanes(const std::vector<Vector<T>>& existing, const std::vector<Vector<T>>& candidates) {
    std::vector<Vector<T>> all = existing;
    const std::size_t before = all.size();
    merge_hyperplanes(all, candidates);
    return {all.begin() + static_cast<std::ptrdiff_t>(before), all.end()};
}

// Common refinement of f's and g's fans, with each final cell mapped back to
// its cell in f and in g.
template <class T>
struct Overlay {
    Fan<T> fan;
    std::vector<std::size_t> in_f;
    std::vector<std::size_t> in_g;
};

template <class T>
Overlay<T> overlay(const PLFunction<T>& f, const PLFunction<T>& g, std::size_t cell_cap) {
    if (f.dimension() != g.dimension()) throw std::invalid_argument("PL functions have different dimensions");
    Extension<T> ext = extend_fan(f.fan, new_hyperplanes(f.fan.hyperplanes, g.fan.hyperplanes), cell_cap);
    Overlay<T> o;
    o.in_f = std::move(ext.parent);
    o.in_g.reserve(ext.fan.cells.size());
    for (const auto& cell : ext.fan.cells) o.in_g.push_back(g.fan.locate(cell.witness));
    o.fan = std::move(ext.fan);
    return o;
}

}  // namespace

// ---------------------------------------------------------------------------

template <class T>
T dot(std::span<const T> a, std::span<const T> b) {
    T acc(0);
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0 && b[i] != 0) acc += a[i] * b[i];
    return acc;
}

template <class T>
Vector<T> normalize_hyperplane(const Vector<T>& normal) {
    auto it = std::find_if(normal.begin(), normal.end(), [](const T& x) { return sign_of(x) != 0; });
    if (it == normal.end()) throw DegenerateHyperplane("hyperplane normal is zero");
    const T lead = *it;
    Vector<T> out(normal.size());
    for (std::size_t i = 0; i < normal.size(); ++i) out[i] = normal[i] / lead;
    // Entries before the lead are below tolerance; make them exact zeros.
    for (auto jt = out.begin(); jt != out.begin() + (it - normal.begin()); ++jt) *jt = T(0);
    out[static_cast<std::size_t>(it - normal.begin())] = T(1);
    return out;
}

template <class T>
Vector<T> dense(const LinearFunctional<T>& f, const std::vector<GeneratorId>& dimension) {
    Vector<T> out(dimension.size(), T(0));
    std::size_t matched = 0;
    for (std::size_t i = 0; i < dimension.size(); ++i) {
        auto it = f.coeffs.find(dimension[i]);
        if (it != f.coeffs.end()) {
            out[i] = it->second;
            ++matched;
        }
    }
    if (matched != f.coeffs.size()) throw std::invalid_argument("functional support is not contained in the dimension");
    return out;
}

template <class T>
LinearFunctional<T> sparse(const Vector<T>& coeffs, const std::vector<GeneratorId>& dimension) {
    LinearFunctional<T> f;
    for (std::size_t i = 0; i < dimension.size(); ++i)
        if (coeffs[i] != 0) f.coeffs.emplace(dimension[i], coeffs[i]);
    return f;
}

template <class T>
void merge_hyperplanes(std::vector<Vector<T>>& base, const std::vector<Vector<T>>& extra) {
    for (const auto& raw : extra) {
        Vector<T> h = normalize_hyperplane(raw);
        bool present = std::any_of(base.begin(), base.end(), [&](const Vector<T>& b) { return approx_equal(b, h); });
        if (!present) base.push_back(std::move(h));
    }
}

template <class T>
std::string Fan<T>::sign_vector(std::span<const T> x) const {
    std::string s(hyperplanes.size(), '0');
    for (std::size_t k = 0; k < hyperplanes.size(); ++k) {
        const int sg = sign_of(dot<T>(hyperplanes[k], x));
        s[k] = sg > 0 ? '+' : (sg < 0 ? '-' : '0');
    }
    return s;
}

template <class T>
void Fan<T>::rebuild_index() {
    index.clear();
    for (std::size_t i = 0; i < cells.size(); ++i) index.emplace(cells[i].signs, i);
}

template <class T>
std::size_t Fan<T>::index_of(const std::string& signs) const {
    auto it = index.find(signs);
    if (it == index.end()) throw InternalError("no cell with sign vector '" + signs + "'");
    return it->second;
}

template <class T>
std::size_t Fan<T>::locate(std::span<const T> x) const {
    const std::string s = sign_vector(x);
    if (s.find('0') == std::string::npos) {
        auto it = index.find(s);
        if (it != index.end()) return it->second;
    } else {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const std::string& c = cells[i].signs;
            bool ok = true;
            for (std::size_t k = 0; k < s.size() && ok; ++k) ok = s[k] == '0' || s[k] == c[k];
            if (ok) return i;
        }
    }
    throw InternalError("point is not covered by any cell of the fan");
}

template <class T>
T PLFunction<T>::evaluate(std::span<const T> x) const {
    if (x.size() != fan.dimension.size()) throw EvaluationError("point dimension does not match PL function");
    return dot<T>(pieces[fan.locate(x)], x);
}

template <class T>
Fan<T> arrangement_fan(const std::vector<Vector<T>>& hyperplanes, const std::vector<GeneratorId>& dimension,
                       std::size_t cell_cap) {
    if (dimension.empty()) throw std::invalid_argument("arrangement needs a nonempty dimension");
    std::vector<Vector<T>> unique;
    merge_hyperplanes(unique, hyperplanes);
    return extend_fan(trivial_fan<T>(dimension), unique, cell_cap).fan;
}

template <class T>
Fan<T> arrangement_fan(const std::vector<LinearFunctional<T>>& hyperplanes, const std::vector<GeneratorId>& dimension,
                       std::size_t cell_cap) {
    std::vector<Vector<T>> normals;
    for (const auto& h : hyperplanes) normals.push_back(dense(h, dimension));
    return arrangement_fan(normals, dimension, cell_cap);
}

template <class T>
PLFunction<T> pl_from_maxmin(const MaxMinForm<T>& m, const std::vector<GeneratorId>& dimension, std::size_t cell_cap) {
    const auto distinct = m.distinct_functionals();
    std::vector<Vector<T>> fs;
    for (const auto& f : distinct) fs.push_back(dense(f, dimension));
    std::vector<Vector<T>> diffs;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        for (std::size_t j = i + 1; j < fs.size(); ++j) {
            Vector<T> d(dimension.size());
            for (std::size_t k = 0; k < d.size(); ++k) d[k] = fs[i][k] - fs[j][k];
            if (!is_zero(d)) diffs.push_back(std::move(d));
        }
    }
    // group -> indices into fs
    std::vector<std::vector<std::size_t>> groups;
    for (const auto& g : m.groups) {
        std::vector<std::size_t> idx;
        for (const auto& f : g) idx.push_back(static_cast<std::size_t>(std::lower_bound(distinct.begin(), distinct.end(), f) - distinct.begin()));
        groups.push_back(std::move(idx));
    }

    PLFunction<T> out;
    out.fan = arrangement_fan(diffs, dimension, cell_cap);
    out.pieces.reserve(out.fan.cells.size());
    std::vector<T> vals(fs.size());
    for (const auto& cell : out.fan.cells) {
        for (std::size_t i = 0; i < fs.size(); ++i) vals[i] = dot<T>(fs[i], cell.witness);
        std::size_t best = fs.size();
        for (const auto& g : groups) {
            std::size_t lo = g.front();
            for (std::size_t i : g)
                if (vals[i] < vals[lo]) lo = i;
            if (best == fs.size() || vals[lo] > vals[best]) best = lo;
        }
        out.pieces.push_back(fs[best]);
    }
    return out;
}

template <class T>
PLFunction<T> pl_from_expr(const LatticeExpr& e, std::vector<GeneratorId> dimension, std::size_t cell_cap) {
    if (dimension.empty()) dimension = support_list(e);
    return pl_from_maxmin(to_maxmin<T>(e), dimension, cell_cap);
}

template <class T>
T sup_norm_on_cube(const PLFunction<T>& f) {
    const std::size_t n = f.dimension().size();
    T best(0);
    for (std::size_t c = 0; c < f.fan.cells.size(); ++c) {
        const Vector<T>& piece = f.pieces[c];
        if (is_zero(piece)) continue;
        for (const T& s : {T(1), T(-1)}) {
            LinearProgram<T> lp;
            std::vector<std::size_t> x(n);
            for (std::size_t i = 0; i < n; ++i) x[i] = lp.add_variable(T(-1), T(1));
            add_cell_constraints(lp, f.fan.hyperplanes, f.fan.cells[c].signs, x, std::nullopt);
            for (std::size_t i = 0; i < n; ++i) lp.set_objective_coefficient(x[i], s * piece[i]);
            LpResult<T> r = lp.maximize();
            if (r.status != LpStatus::Optimal)
                throw InternalError("sup-norm LP over cell '" + f.fan.cells[c].signs + "' returned " + to_string(r.status));
            if (r.objective > best) best = r.objective;
        }
    }
    return best;
}

template <class T>
PLFunction<T> refine_with_hyperplanes(const PLFunction<T>& f, const std::vector<Vector<T>>& extra, std::size_t cell_cap) {
    auto add = new_hyperplanes(f.fan.hyperplanes, extra);
    if (add.empty()) return f;
    Extension<T> ext = extend_fan(f.fan, add, cell_cap);
    PLFunction<T> out;
    out.fan = std::move(ext.fan);
    out.pieces.reserve(ext.parent.size());
    for (std::size_t p : ext.parent) out.pieces.push_back(f.pieces[p]);
    return out;
}

template <class T>
PLFunction<T> refine_by_zero_set(const PLFunction<T>& f, std::size_t cell_cap) {
    std::vector<Vector<T>> zero_sets;
    for (const auto& p : f.pieces)
        if (!is_zero(p)) zero_sets.push_back(p);
    return refine_with_hyperplanes(f, zero_sets, cell_cap);
}

template <class T>
std::vector<Vector<T>> breakpoint_hyperplanes(const PLFunction<T>& f) {
    std::vector<Vector<T>> out = f.fan.hyperplanes;
    std::vector<Vector<T>> zero_sets;
    for (const auto& p : f.pieces)
        if (!is_zero(p)) zero_sets.push_back(p);
    merge_hyperplanes(out, zero_sets);
    return out;
}

template <class T>
bool pl_equal(const PLFunction<T>& f, const PLFunction<T>& g) {
    if (f.dimension() != g.dimension()) return false;
    Overlay<T> o = overlay(f, g, kDefaultCellCap);
    for (std::size_t c = 0; c < o.fan.cells.size(); ++c) {
        const Vector<T>& pf = f.pieces[o.in_f[c]];
        const Vector<T>& pg = g.pieces[o.in_g[c]];
        const auto& w = o.fan.cells[c].witness;
        if (sign_of(T(dot<T>(pf, w) - dot<T>(pg, w))) != 0) return false;
        if (!coefficients_equal(pf, pg)) return false;
    }
    return true;
}

template <class T>
PLFunction<T> pl_combine(const PLFunction<T>& f, const PLFunction<T>& g, PLOp op, std::size_t cell_cap) {
    Overlay<T> o = overlay(f, g, cell_cap);
    const std::size_t n = f.dimension().size();
    auto piece_sum = [&](std::size_t c) {
        Vector<T> s(n);
        for (std::size_t i = 0; i < n; ++i) s[i] = f.pieces[o.in_f[c]][i] + g.pieces[o.in_g[c]][i];
        return s;
    };
    PLFunction<T> out;
    if (op == PLOp::Sum) {
        for (std::size_t c = 0; c < o.fan.cells.size(); ++c) out.pieces.push_back(piece_sum(c));
        out.fan = std::move(o.fan);
        return out;
    }
    // Max/min: split every overlay cell where the two pieces cross.
    std::vector<Vector<T>> crossings;
    for (std::size_t c = 0; c < o.fan.cells.size(); ++c) {
        Vector<T> d(n);
        for (std::size_t i = 0; i < n; ++i) d[i] = f.pieces[o.in_f[c]][i] - g.pieces[o.in_g[c]][i];
        if (!is_zero(d)) crossings.push_back(std::move(d));
    }
    Extension<T> ext = extend_fan(o.fan, new_hyperplanes(o.fan.hyperplanes, crossings), cell_cap);
    for (std::size_t c = 0; c < ext.fan.cells.size(); ++c) {
        const std::size_t oc = ext.parent[c];
        const Vector<T>& pf = f.pieces[o.in_f[oc]];
        const Vector<T>& pg = g.pieces[o.in_g[oc]];
        const auto& w = ext.fan.cells[c].witness;
        const T vf = dot<T>(pf, w), vg = dot<T>(pg, w);
        const bool take_f = op == PLOp::Max ? !(vg > vf) : !(vg < vf);
        out.pieces.push_back(take_f ? pf : pg);
    }
    out.fan = std::move(ext.fan);
    return out;
}

template <class T>
PLFunction<T> pl_scale(const PLFunction<T>& f, const T& c) {
    PLFunction<T> out = f;
    for (auto& p : out.pieces)
        for (auto& x : p) x *= c;
    return out;
}

PLFunction<double> to_double(const PLFunction<Rational>& f) {
    auto conv = [](const Vector<Rational>& v) {
        Vector<double> o(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) o[i] = fbl::to_double(v[i]);
        return o;
    };
    PLFunction<double> out;
    out.fan.dimension = f.fan.dimension;
    for (const auto& h : f.fan.hyperplanes) out.fan.hyperplanes.push_back(conv(h));
    for (const auto& c : f.fan.cells) out.fan.cells.push_back(Cone<double>{c.signs, conv(c.witness)});
    for (const auto& p : f.pieces) out.pieces.push_back(conv(p));
    out.fan.rebuild_index();
    return out;
}

nlohmann::json to_json(const PLFunction<double>& f) {
    using nlohmann::json;
    const auto& dim = f.dimension();
    auto coeff_map = [&](const Vector<double>& v) {
        json m = json::object();
        for (std::size_t i = 0; i < dim.size(); ++i)
            if (v[i] != 0.0) m[dim[i]] = v[i];
        return m;
    };
    json j;
    j["dimension"] = dim;
    j["hyperplanes"] = json::array();
    for (const auto& h : f.fan.hyperplanes) j["hyperplanes"].push_back(coeff_map(h));
    j["cells"] = json::array();
    for (const auto& c : f.fan.cells) j["cells"].push_back(json{{"signs", c.signs}, {"witness", c.witness}});
    j["pieces"] = json::array();
    for (const auto& p : f.pieces) j["pieces"].push_back(coeff_map(p));
    return j;
}

PLFunction<double> pl_from_json(const nlohmann::json& j) {
    PLFunction<double> f;
    f.fan.dimension = j.at("dimension").get<std::vector<GeneratorId>>();
    const auto& dim = f.fan.dimension;
    auto from_map = [&](const nlohmann::json& m) {
        Vector<double> v(dim.size(), 0.0);
        for (auto it = m.begin(); it != m.end(); ++it) {
            auto pos = std::find(dim.begin(), dim.end(), it.key());
            if (pos == dim.end()) throw std::invalid_argument("coefficient for unknown generator '" + it.key() + "'");
            v[static_cast<std::size_t>(pos - dim.begin())] = it.value().get<double>();
        }
        return v;
    };
    for (const auto& h : j.at("hyperplanes")) f.fan.hyperplanes.push_back(from_map(h));
    for (const auto& c : j.at("cells")) {
        Cone<double> cone{c.at("signs").get<std::string>(), c.at("witness").get<Vector<double>>()};
        if (cone.signs.size() != f.fan.hyperplanes.size() || cone.witness.size() != dim.size())
            throw std::invalid_argument("malformed cell in PL function JSON");
        f.fan.cells.push_back(std::move(cone));
    }
    for (const auto& p : j.at("pieces")) f.pieces.push_back(from_map(p));
    if (f.pieces.size() != f.fan.cells.size()) throw std::invalid_argument("PL function JSON needs one piece per cell");
    f.fan.rebuild_index();
    return f;
}

#define FBL_PLFAN_INSTANTIATE(T)                                                                                    \
    template struct Fan<T>;                                                                                         \
    template struct PLFunction<T>;                                                                                  \
    template Vector<T> normalize_hyperplane<T>(const Vector<T>&);                                                   \
    template Vector<T> dense<T>(const LinearFunctional<T>&, const std::vector<GeneratorId>&);                       \
    template LinearFunctional<T> sparse<T>(const Vector<T>&, const std::vector<GeneratorId>&);                      \
    template T dot<T>(std::span<const T>, std::span<const T>);                                                      \
    template Fan<T> arrangement_fan<T>(const std::vector<Vector<T>>&, const std::vector<GeneratorId>&, std::size_t); \
    template Fan<T> arrangement_fan<T>(const std::vector<LinearFunctional<T>>&, const std::vector<GeneratorId>&,     \
                                       std::size_t);                                                                \
    template PLFunction<T> pl_from_maxmin<T>(const MaxMinForm<T>&, const std::vector<GeneratorId>&, std::size_t);   \
    template PLFunction<T> pl_from_expr<T>(const LatticeExpr&, std::vector<GeneratorId>, std::size_t);              \
    template T sup_norm_on_cube<T>(const PLFunction<T>&);                                                           \
    template PLFunction<T> refine_with_hyperplanes<T>(const PLFunction<T>&, const std::vector<Vector<T>>&,          \
                                                      std::size_t);                                                 \
    template PLFunction<T> refine_by_zero_set<T>(const PLFunction<T>&, std::size_t);                                \
    template bool pl_equal<T>(const PLFunction<T>&, const PLFunction<T>&);                                          \
    template PLFunction<T> pl_combine<T>(const PLFunction<T>&, const PLFunction<T>&, PLOp, std::size_t);            \
    template PLFunction<T> pl_scale<T>(const PLFunction<T>&, const T&);                                             \
    template std::vector<Vector<T>> breakpoint_hyperplanes<T>(const PLFunction<T>&);                                \
    template void merge_hyperplanes<T>(std::vector<Vector<T>>&, const std::vector<Vector<T>>&);

FBL_PLFAN_INSTANTIATE(double)
FBL_PLFAN_INSTANTIATE(Rational)

}  // namespace fbl
