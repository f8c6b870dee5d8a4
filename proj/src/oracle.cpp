#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "fbl/fblnorm.hpp"
#include "fbl/simplex.hpp"

namespace fbl {

namespace {

using Config = std::vector<std::vector<double>>;

class Climber {
public:
    Climber(const Evaluator& F, const AdmissibilitySpace& s, int degree, std::size_t budget)
        : F_(F), s_(s), degree_(degree), budget_(budget) {}

    bool exhausted() const { return used_ >= budget_; }
    std::size_t used() const { return used_; }

    // Value of the configuration rescaled onto the constraint boundary.
    double score(const Config& c) {
        ++used_;
        const double worst = max_vertex_sum(c, s_);
        if (!(worst > 0.0)) return 0.0;
        double total = 0.0;
        for (const auto& p : c) total += std::fabs(F_(p));
        return total / std::pow(worst, degree_);
    }

    static void rescale(Config& c, const AdmissibilitySpace& s) {
        const double worst = max_vertex_sum(c, s);
        if (!(worst > 0.0)) return;
        for (auto& p : c)
            for (auto& x : p) x /= worst;
    }

private:
    const Evaluator& F_;
    const AdmissibilitySpace& s_;
    int degree_;
    std::size_t budget_;
    std::size_t used_ = 0;
};

struct RestartResult {
    Config config;
    double value = 0.0;
    std::size_t evaluations = 0;
};

RestartResult climb(const Evaluator& F, const AdmissibilitySpace& s, int degree, std::size_t budget,
                    std::size_t points, std::mt19937_64& rng) {
    const std::size_t n = s.dimension();
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Climber climber(F, s, degree, budget);

    Config cur(points, std::vector<double>(n));
    for (auto& p : cur)
        for (auto& x : p) x = unit(rng);
    Climber::rescale(cur, s);
    double cur_val = climber.score(cur);
    Config best = cur;
    double best_val = cur_val;

    double step = 0.5;
    auto try_move = [&](Config cand) {
        if (climber.exhausted()) return false;
        const double v = climber.score(cand);
        if (v > cur_val) {
            Climber::rescale(cand, s);
            cur = std::move(cand);
            cur_val = v;
            if (v > best_val) {
                best_val = v;
                best = cur;
            }
            return true;
        }
        return false;
    };

    while (!climber.exhausted()) {
        bool improved = false;
        // Coordinate moves.
        for (std::size_t i = 0; i < points; ++i)
            for (std::size_t j = 0; j < n; ++j)
                for (double dir : {1.0, -1.0}) {
                    Config cand = cur;
                    cand[i][j] += dir * step;
                    improved |= try_move(std::move(cand));
                }
        // Mass transfer between two points along one coordinate.
        for (std::size_t i = 0; i < points; ++i)
            for (std::size_t k = i + 1; k < points; ++k)
                for (std::size_t j = 0; j < n; ++j)
                    for (double dir : {1.0, -1.0}) {
                        Config cand = cur;
                        cand[i][j] += dir * step;
                        cand[k][j] -= dir * step;
                        improved |= try_move(std::move(cand));
                    }
        // Random directions escape ridges that are not axis-aligned.
        for (std::size_t r = 0; r < n * points; ++r) {
            Config cand = cur;
            const std::size_t i = static_cast<std::size_t>(rng() % points);
            double norm = 0.0;
            std::vector<double> d(n);
            for (auto& x : d) {
                x = gauss(rng);
                norm += x * x;
            }
            norm = std::sqrt(norm);
            if (norm == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) cand[i][j] += step * d[j] / norm;
            improved |= try_move(std::move(cand));
        }
        if (!improved) {
            step /= 2;
            if (step < 1e-9) {
                // Converged: re-seed the weakest point and keep climbing.
                std::size_t weakest = 0;
                double wv = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < points; ++i) {
                    const double v = std::fabs(F(cur[i]));
                    if (v < wv) {
                        wv = v;
                        weakest = i;
                    }
                }
                for (auto& x : cur[weakest]) x = unit(rng);
                Climber::rescale(cur, s);
                if (climber.exhausted()) break;
                cur_val = climber.score(cur);
                step = 0.5;
            }
        }
    }
    RestartResult out;
    Climber::rescale(best, s);
    out.config = std::move(best);
    out.value = config_value(F, DualConfig{out.config});
    out.evaluations = climber.used();
    return out;
}

// Degree-1 search. For fixed directions d_j the objective sum_j mu_j |F(d_j)|
// and every vertex sum are linear in the magnitudes mu_j >= 0, so the best
// weights for a pool of directions solve a small LP. New directions are
// found by hill climbing on the reduced cost |F(d)| - sum_v y_v |<d, v>|,
// where y are the vertex prices of the current pool.
class ColumnSearch {
public:
    ColumnSearch(const Evaluator& F, const AdmissibilitySpace& s, std::size_t budget, std::mt19937_64& rng)
        : F_(F), n_(s.dimension()), budget_(budget), rng_(rng) {
        for (const auto& v : s.ball_vertices) {
            std::vector<double> neg(v.size());
            for (std::size_t i = 0; i < v.size(); ++i) neg[i] = -v[i];
            if (std::find(rows_.begin(), rows_.end(), neg) == rows_.end()) rows_.push_back(v);
        }
        prices_.assign(rows_.size(), 0.0);
    }

    RestartResult run(const AdmissibilitySpace& s) {
        seed_pool();
        solve();
        std::size_t idle = 0;
        while (used_ < budget_ && idle < 40) {
            if (price())
                idle = 0;
            else
                ++idle;
            solve();
        }
        RestartResult out;
        for (std::size_t j = 0; j < pool_.size(); ++j) {
            if (!(weights_[j] > 1e-12)) continue;
            std::vector<double> p = pool_[j];
            for (auto& x : p) x *= weights_[j];
            out.config.push_back(std::move(p));
        }
        Climber::rescale(out.config, s);
        out.value = config_value(F_, DualConfig{out.config});
        out.evaluations = used_;
        return out;
    }

private:
    double eval(const std::vector<double>& d) {
        ++used_;
        return std::fabs(F_(d));
    }

    double cost(const std::vector<double>& d) const {
        double c = 0.0;
        for (std::size_t k = 0; k < rows_.size(); ++k) {
            if (prices_[k] == 0.0) continue;
            double dv = 0.0;
            for (std::size_t i = 0; i < n_; ++i) dv += d[i] * rows_[k][i];
            c += prices_[k] * std::fabs(dv);
        }
        return c;
    }

    void add(std::vector<double> d, double fval) {
        double m = 0.0;
        for (double x : d) m = std::max(m, std::fabs(x));
        if (m == 0.0) return;
        for (auto& x : d) x /= m;
        pool_.push_back(std::move(d));
        values_.push_back(fval / m);
    }

    void seed_pool() {
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        for (std::size_t i = 0; i < n_ && used_ < budget_; ++i)
            for (double sg : {1.0, -1.0}) {
                if (used_ >= budget_) break;
                std::vector<double> d(n_, 0.0);
                d[i] = sg;
                const double f = eval(d);
                add(std::move(d), f);
            }
        for (std::size_t k = 0; k < 2 * n_ && used_ < budget_; ++k) {
            std::vector<double> d(n_);
            for (auto& x : d) x = unit(rng_);
            const double f = eval(d);
            add(std::move(d), f);
        }
    }

    void solve() {
        const std::size_t m = rows_.size();
        std::vector<std::vector<double>> c(pool_.size(), std::vector<double>(m));
        for (std::size_t j = 0; j < pool_.size(); ++j)
            for (std::size_t k = 0; k < m; ++k) {
                double dv = 0.0;
                for (std::size_t i = 0; i < n_; ++i) dv += pool_[j][i] * rows_[k][i];
                c[j][k] = std::fabs(dv);
            }
        LinearProgram<double> primal;
        std::vector<std::vector<LinearProgram<double>::Term>> terms(m);
        for (std::size_t j = 0; j < pool_.size(); ++j) {
            const std::size_t var = primal.add_variable();
            primal.set_objective_coefficient(var, values_[j]);
            for (std::size_t k = 0; k < m; ++k)
                if (c[j][k] != 0.0) terms[k].emplace_back(var, c[j][k]);
        }
        for (auto& t : terms) primal.add_constraint(std::move(t), Relation::LessEqual, 1.0);
        auto pr = primal.maximize();
        weights_.assign(pool_.size(), 0.0);
        if (pr.status == LpStatus::Optimal) weights_ = pr.values;

        LinearProgram<double> dual;
        std::vector<std::size_t> y(m);
        for (std::size_t k = 0; k < m; ++k) {
            y[k] = dual.add_variable();
            dual.set_objective_coefficient(y[k], -1.0);
        }
        for (std::size_t j = 0; j < pool_.size(); ++j) {
            std::vector<LinearProgram<double>::Term> t;
            for (std::size_t k = 0; k < m; ++k)
                if (c[j][k] != 0.0) t.emplace_back(y[k], c[j][k]);
            dual.add_constraint(std::move(t), Relation::GreaterEqual, values_[j]);
        }
        auto dr = dual.maximize();
        if (dr.status == LpStatus::Optimal) prices_ = dr.values;
    }

    // One pricing round: climbs from the active directions and one random
    // start; adds every end point with positive reduced cost.
    bool price() {
        std::uniform_real_distribution<double> unit(-1.0, 1.0);
        std::vector<std::vector<double>> starts;
        for (std::size_t j = 0; j < pool_.size(); ++j)
            if (weights_[j] > 1e-15) starts.push_back(pool_[j]);
        std::vector<double> r(n_);
        for (auto& x : r) x = unit(rng_);
        starts.push_back(std::move(r));
        bool added = false;
        for (auto& d : starts) {
            if (used_ >= budget_) break;
            double fd = eval(d);
            double best = fd - cost(d);
            climb(d, fd, best);
            if (best > 1e-12) {
                add(d, fd);
                added = true;
            }
        }
        return added;
    }

    void climb(std::vector<double>& d, double& fd, double& best) {
        std::normal_distribution<double> gauss(0.0, 1.0);
        double step = 0.25;
        auto attempt = [&](std::vector<double> cand) {
            if (used_ >= budget_) return false;
            for (auto& x : cand) x = std::clamp(x, -1.0, 1.0);
            const double f = eval(cand);
            const double v = f - cost(cand);
            if (v > best) {
                best = v;
                fd = f;
                d = std::move(cand);
                return true;
            }
            return false;
        };
        while (step > 1e-7 && used_ < budget_) {
            bool improved = false;
            for (std::size_t i = 0; i < n_ && used_ < budget_; ++i)
                for (double dir : {1.0, -1.0}) {
                    std::vector<double> cand = d;
                    cand[i] += dir * step;
                    if (attempt(std::move(cand))) improved = true;
                }
            for (std::size_t k = 0; k < 2 * n_ && used_ < budget_; ++k) {
                std::vector<double> g(n_);
                double norm = 0.0;
                for (auto& x : g) {
                    x = gauss(rng_);
                    norm += x * x;
                }
                norm = std::sqrt(norm);
                if (norm == 0.0) continue;
                std::vector<double> cand = d;
                for (std::size_t i = 0; i < n_; ++i) cand[i] += step * g[i] / norm;
                if (attempt(std::move(cand))) improved = true;
            }
            if (!improved) step /= 2;
        }
    }

    const Evaluator& F_;
    std::size_t n_;
    std::size_t budget_;
    std::mt19937_64& rng_;
    std::size_t used_ = 0;
    std::vector<std::vector<double>> rows_;
    std::vector<double> prices_;
    std::vector<std::vector<double>> pool_;
    std::vector<double> values_;
    std::vector<double> weights_;
};

}  // namespace

void check_homogeneity(const Evaluator& F, std::size_t dimension, int degree, std::uint64_t seed) {
    std::seed_seq seq{seed, std::uint64_t{0x686f6d6f}};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(-1.0, 1.0), lam(0.0, 1.0);
    std::vector<double> p(dimension), q(dimension);
    for (int k = 0; k < 32; ++k) {
        for (auto& x : p) x = unit(rng);
        const double l = 1.0 - lam(rng);
        for (std::size_t i = 0; i < dimension; ++i) q[i] = l * p[i];
        const double fp = F(p), fq = F(q);
        const double expect = std::pow(l, degree) * fp;
        if (std::fabs(fq - expect) > 1e-9 * std::max(1.0, std::fabs(fp)))
            throw HomogeneityError("evaluator is not positively homogeneous of degree " + std::to_string(degree));
    }
}

NormBracket oracle_lower_bound(const Evaluator& F, const AdmissibilitySpace& s, const OracleOptions& opt) {
    s.validate();
    if (opt.degree < 1) throw std::invalid_argument("homogeneity degree must be positive");
    check_homogeneity(F, s.dimension(), opt.degree, opt.seed);

    std::size_t pairs = 0;
    {
        std::vector<std::vector<double>> seen;
        for (const auto& v : s.ball_vertices) {
            std::vector<double> neg(v.size());
            for (std::size_t i = 0; i < v.size(); ++i) neg[i] = -v[i];
            if (std::find(seen.begin(), seen.end(), neg) == seen.end()) seen.push_back(v);
        }
        pairs = seen.size();
    }

    const std::size_t restarts = std::max<std::size_t>(1, std::min(opt.restarts, opt.budget));
    NormBracket out;
    out.upper = std::numeric_limits<double>::infinity();
    out.upper_finite = false;
    out.exact = false;
    out.diagnostics.method = "oracle";
    out.diagnostics.restarts = restarts;

    RestartResult winner;
    bool have = false;
    for (std::size_t r = 0; r < restarts; ++r) {
        const std::size_t share = opt.budget / restarts + (r < opt.budget % restarts ? 1 : 0);
        std::seed_seq seq{opt.seed, static_cast<std::uint64_t>(r)};
        std::mt19937_64 rng(seq);
        RestartResult res;
        if (opt.degree == 1) {
            res = ColumnSearch(F, s, share, rng).run(s);
        } else {
            const std::size_t points = r % (pairs + 1) + 1;
            res = climb(F, s, opt.degree, share, points, rng);
        }
        out.diagnostics.evaluations += res.evaluations;
        if (!have || res.value > winner.value) {
            winner = std::move(res);
            have = true;
        }
    }
    for (auto& p : winner.config) {
        if (std::any_of(p.begin(), p.end(), [](double x) { return x != 0.0; })) out.certificate.push_back(p);
    }
    out.lower = config_value(F, DualConfig{out.certificate});
    return out;
}

}  // namespace fbl
