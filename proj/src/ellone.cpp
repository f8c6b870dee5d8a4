#include "fbl/ellone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fbl/homs.hpp"

namespace fbl {

EpsilonSchedule::EpsilonSchedule(double eps) : eps_(eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
}

double EpsilonSchedule::operator()(std::size_t i, std::size_t j) const {
    if (i == 0 || j == 0) throw std::invalid_argument("schedule indices start at 1");
    return std::ldexp(eps_, -static_cast<int>(i + j));
}

EpsilonSchedule schedule(double eps) { return EpsilonSchedule(eps); }

DecayOracle tail_scan_oracle() {
    return [](const DecayQuery& q, const DecayExcess& excess) -> std::optional<std::size_t> {
        if (q.first > q.last || q.first == 0) return std::nullopt;
        std::optional<std::size_t> best;
        for (std::size_t k = q.last; k >= q.first; --k) {
            if (excess(k) > 0.0) break;
            best = k;
        }
        return best;
    };
}

namespace {

void validate(const ExtractionInput& inp) {
    if (inp.n_max == 0) throw std::invalid_argument("n_max must be positive");
    if (inp.xs.size() < inp.n_max) throw std::invalid_argument("fewer points than n_max");
    if (!inp.f) throw std::invalid_argument("missing evaluator family");
    if (!inp.decay_oracle) throw std::invalid_argument("missing decay oracle");
    for (std::size_t n = 0; n < inp.n_max; ++n) {
        if (inp.xs[n].size() != inp.L.size()) throw std::invalid_argument("point dimension differs from |L|");
        for (double v : inp.xs[n])
            if (!(v >= -1.0 && v <= 1.0)) throw std::invalid_argument("point lies outside the cube");
    }
}

bool vanishes_on(const std::vector<double>& x, const std::vector<std::size_t>& F) {
    return std::all_of(F.begin(), F.end(), [&](std::size_t c) { return x[c] == 0.0; });
}

// Grows F over the coordinates of x outside F_prev, largest |x| first, until
// f lands within tol of 1. Returns nullopt when even the full support fails.
std::optional<ExtractionTerm> grow_F(const ExtractionInput& inp, std::size_t n, const std::vector<std::size_t>& F_prev,
                                     double tol) {
    const auto& x = inp.xs[n - 1];
    std::vector<std::size_t> order;
    for (std::size_t c = 0; c < x.size(); ++c)
        if (x[c] != 0.0 && !std::binary_search(F_prev.begin(), F_prev.end(), c)) order.push_back(c);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return std::fabs(x[a]) > std::fabs(x[b]); });

    ExtractionTerm t;
    t.n = n;
    t.tolerance = tol;
    t.y.assign(x.size(), 0.0);
    std::vector<std::size_t> added;
    for (std::size_t i = 0;; ++i) {
        const double v = inp.f(n, t.y);
        if (std::fabs(v - 1.0) <= tol) {
            t.diagonal = v;
            break;
        }
        if (i == order.size()) return std::nullopt;
        t.y[order[i]] = x[order[i]];
        added.push_back(order[i]);
    }
    t.F = F_prev;
    t.F.insert(t.F.end(), added.begin(), added.end());
    std::sort(t.F.begin(), t.F.end());
    return t;
}

}  // namespace

ExtractionResult extract(const ExtractionInput& inp, const EpsilonSchedule& sched, std::size_t length) {
    validate(inp);
    ExtractionResult res;
    res.epsilon = sched.total();
    res.requested = length;
    res.status = "ok";

    // pass (a): m_1 = 1, then the next index whose point vanishes on F
    std::vector<std::size_t> F;
    for (std::size_t n = 1; n <= inp.n_max; ++n) {
        if (!res.terms.empty() && !vanishes_on(inp.xs[n - 1], F)) continue;
        const double fx = inp.f(n, inp.xs[n - 1]);
        if (!(std::fabs(fx - 1.0) <= kHypothesisTol)) {
            res.status = "hypothesis-violation";
            res.message = "f_" + std::to_string(n) + "(x_" + std::to_string(n) + ") = " + std::to_string(fx);
            return res;
        }
        const std::size_t k = res.terms.size() + 1;
        auto t = grow_F(inp, n, F, sched(k, k));
        if (!t) {
            res.message = "pass (a) stage " + std::to_string(k) + ": no truncation of x_" + std::to_string(n) +
                          " within eps_kk";
            break;
        }
        F = t->F;
        res.terms.push_back(std::move(*t));
    }

    // pass (b): diagonal selection through the decay oracle
    const std::size_t K = res.terms.size();
    if (K > 0) res.nu.push_back(1);
    while (res.nu.size() < (length ? length : K) && K > 0) {
        const std::size_t p = res.nu.size();
        DecayQuery q{p + 1, res.nu.back() + 1, K};
        TranscriptEntry entry{q, std::nullopt, 0};
        DecayExcess excess = [&](std::size_t k) {
            if (k < q.first || k > q.last) throw std::out_of_range("decay oracle probed outside its range");
            double worst = -std::numeric_limits<double>::infinity();
            const auto& tk = res.terms[k - 1];
            for (std::size_t j = 1; j <= p; ++j) {
                const auto& tj = res.terms[res.nu[j - 1] - 1];
                const double bound = sched(j, p + 1);
                worst = std::max(worst, std::fabs(inp.f(tk.n, tj.y)) - bound);
                worst = std::max(worst, std::fabs(inp.f(tj.n, tk.y)) - bound);
                entry.evaluations += 2;
            }
            return worst;
        };
        entry.result = inp.decay_oracle(q, excess);
        res.transcript.push_back(entry);
        if (!entry.result) {
            if (res.message.empty())
                res.message = "pass (b) stage " + std::to_string(p + 1) + ": no position in [" +
                              std::to_string(q.first) + ", " + std::to_string(q.last) + "] with decayed tail";
            break;
        }
        if (*entry.result < q.first || *entry.result > q.last)
            throw std::logic_error("decay oracle returned a position outside its range");
        res.nu.push_back(*entry.result);
    }
    for (std::size_t v : res.nu) res.selected.push_back(res.terms[v - 1].n);

    if (res.nu.empty() || (length && res.nu.size() < length)) {
        res.status = "exhausted";
        if (res.message.empty()) res.message = "truncation n_max = " + std::to_string(inp.n_max) + " too small";
    }
    return res;
}

LowerBoundReport verify_lower_bound(const ExtractionResult& res, const IndexedEvaluator& f,
                                    const std::vector<double>& lambdas) {
    if (lambdas.size() > res.nu.size()) throw std::invalid_argument("more coefficients than selected terms");
    LowerBoundReport rep;
    double l1 = 0.0;
    for (double l : lambdas) l1 += std::fabs(l);
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const auto& y = res.selected_term(i).y;
        double s = 0.0;
        for (std::size_t k = 0; k < lambdas.size(); ++k)
            if (lambdas[k] != 0.0) s += lambdas[k] * f(res.selected[k], y);
        rep.certified_value += std::fabs(s);
    }
    rep.bound = (1.0 - res.epsilon) * l1;
    rep.pass = rep.certified_value >= rep.bound - 1e-9;
    return rep;
}

double max_column_sum(const ExtractionResult& res) {
    if (res.nu.empty()) return 0.0;
    std::vector<double> col(res.selected_term(0).y.size(), 0.0);
    for (std::size_t k = 0; k < res.nu.size(); ++k) {
        const auto& y = res.selected_term(k).y;
        for (std::size_t c = 0; c < y.size(); ++c) col[c] += std::fabs(y[c]);
    }
    return *std::max_element(col.begin(), col.end());
}

bool supports_disjoint(const ExtractionResult& res) {
    if (res.nu.empty()) return true;
    std::vector<int> owners(res.selected_term(0).y.size(), 0);
    for (std::size_t k = 0; k < res.nu.size(); ++k) {
        const auto& y = res.selected_term(k).y;
        for (std::size_t c = 0; c < y.size(); ++c)
            if (y[c] != 0.0 && ++owners[c] > 1) return false;
    }
    return true;
}

namespace {

std::size_t singleton(std::size_t n) { return (std::size_t{1} << (n - 1)) - 1; }
std::size_t initial_segment(std::size_t n) { return (std::size_t{1} << n) - 2; }

std::vector<int> one_to(std::size_t n) {
    std::vector<int> s(n);
    std::iota(s.begin(), s.end(), 1);
    return s;
}

ExtractionInput phi_instance(int N, std::string name) {
    auto phi = build_phi(N);
    ExtractionInput inp;
    inp.L = phi.generators;
    inp.xs = phi.chi_points;
    inp.n_max = static_cast<std::size_t>(N);
    inp.name = std::move(name);
    return inp;
}

}  // namespace

ExtractionInput disjoint_instance(int N) {
    auto inp = phi_instance(N, "disjoint");
    inp.f = [N](std::size_t n, std::span<const double> x) {
        if (n < 1 || n > static_cast<std::size_t>(N)) throw std::out_of_range("family index out of range");
        return x[singleton(n)];
    };
    inp.expr = [](std::size_t n) { return LatticeExpr::gen(subset_generator({static_cast<int>(n)})); };
    return inp;
}

ExtractionInput perturbed_instance(int N) {
    auto inp = phi_instance(N, "perturbed");
    inp.f = [N](std::size_t n, std::span<const double> x) {
        if (n < 1 || n > static_cast<std::size_t>(N)) throw std::out_of_range("family index out of range");
        const double w = std::ldexp(1.0, -static_cast<int>(n));
        return (x[singleton(n)] + w * x[initial_segment(n)]) / (1.0 + w);
    };
    inp.expr = [](std::size_t n) {
        const double w = std::ldexp(1.0, -static_cast<int>(n));
        const double c = 1.0 / (1.0 + w);
        return LatticeExpr::scale(c, LatticeExpr::gen(subset_generator({static_cast<int>(n)}))) +
               LatticeExpr::scale(c * w, LatticeExpr::gen(subset_generator(one_to(n))));
    };
    return inp;
}

nlohmann::json to_json(const ExtractionResult& res, const std::vector<GeneratorId>& L) {
    nlohmann::json j;
    j["status"] = res.status;
    if (!res.message.empty()) j["message"] = res.message;
    j["epsilon"] = res.epsilon;
    j["f_search"] = res.f_search;
    j["requested_length"] = res.requested;
    j["selected"] = res.selected;
    j["nu"] = res.nu;
    auto& terms = j["terms"] = nlohmann::json::array();
    for (std::size_t k = 0; k < res.terms.size(); ++k) {
        const auto& t = res.terms[k];
        nlohmann::json F = nlohmann::json::array(), y = nlohmann::json::object();
        for (std::size_t c : t.F) F.push_back(L[c]);
        for (std::size_t c = 0; c < t.y.size(); ++c)
            if (t.y[c] != 0.0) y[L[c]] = t.y[c];
        terms.push_back({{"k", k + 1}, {"m", t.n}, {"F", F}, {"y", y}, {"diagonal", t.diagonal},
                         {"eps_kk", t.tolerance}});
    }
    auto& tr = j["transcript"] = nlohmann::json::array();
    for (const auto& e : res.transcript) {
        nlohmann::json r = e.result ? nlohmann::json(*e.result) : nlohmann::json(nullptr);
        tr.push_back({{"stage", e.query.stage}, {"first", e.query.first}, {"last", e.query.last},
                      {"result", r}, {"evaluations", e.evaluations}});
    }
    return j;
}

}  // namespace fbl
