// Acceptance run: one PASS/FAIL line per criterion. Usage:
//   acceptance <path to fbl executable> <certificate directory>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "fbl/certificate.hpp"
#include "fbl/ckretract.hpp"
#include "fbl/ellone.hpp"
#include "fbl/fblnorm.hpp"
#include "fbl/homs.hpp"
#include "support/random_expr.hpp"

using namespace fbl;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

struct Emitted {
    fs::path path;
    json value;
};

std::vector<Emitted> g_certs;
fs::path g_cert_dir;

void emit(const std::string& name, const json& cert) {
    const fs::path p = g_cert_dir / (name + ".json");
    std::ofstream f(p);
    f << cert.dump() << '\n';
    g_certs.push_back({p, cert.at("value")});
}

std::string num(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

// 1. exact norm of sum l_i d(a_i) is sum |l_i|
Outcome crit_isometry() {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    const std::vector<GeneratorId> all{"a", "b", "c", "d"};
    Outcome o;
    double worst = 0.0;
    int ok = 0;
    for (int i = 0; i < 50; ++i) {
        const std::size_t n = 1 + static_cast<std::size_t>(i % 4);
        std::vector<GeneratorId> gens(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(n));
        LatticeExpr e = LatticeExpr::scale(u(rng), LatticeExpr::gen(gens[0]));
        double l1 = std::fabs(e.coefficient());
        for (std::size_t k = 1; k < n; ++k) {
            const double l = u(rng);
            l1 += std::fabs(l);
            e = e + LatticeExpr::scale(l, LatticeExpr::gen(gens[k]));
        }
        const auto s = fbl_space(gens);
        const auto r = exact_fbl_norm(pl_from_expr<double>(e, gens), s);
        const double diff = std::fabs(r.upper - l1);
        worst = std::max(worst, diff);
        ok += diff <= 1e-9;
        emit("c1_" + std::to_string(i), make_certificate(s, expr_function(e), r.certificate, r.upper, "exact"));
    }
    o.pass = ok == 50;
    o.detail = std::to_string(ok) + "/50 within 1e-9, worst |norm - sum|l|| = " + num(worst);
    return o;
}

// 2. oracle bracketed by the exact norm
Outcome crit_oracle() {
    std::mt19937_64 rng(202);
    const std::vector<GeneratorId> all{"a", "b", "c"};
    int ok = 0;
    double worst_gap = 0.0, worst_excess = -1.0;
    for (int i = 0; i < 50; ++i) {
        std::vector<GeneratorId> gens(all.begin(), all.begin() + 1 + i % 3);
        const auto e = testing::random_small_expr(rng, gens, 3, 24);
        const auto s = fbl_space(gens);
        const double exact = exact_fbl_norm(pl_from_expr<double>(e, gens), s).upper;
        const auto fn = expr_function(e);
        const auto r = oracle_lower_bound(make_evaluator(fn, gens), s, OracleOptions{20000, static_cast<std::uint64_t>(i), 1, 4});
        const bool in = r.lower >= exact - 1e-3 && r.lower <= exact + 1e-9;
        ok += in;
        worst_gap = std::max(worst_gap, exact - r.lower);
        worst_excess = std::max(worst_excess, r.lower - exact);
        emit("c2_" + std::to_string(i), make_certificate(s, fn, r.certificate, r.lower, "lower"));
    }
    return {ok == 50, std::to_string(ok) + "/50 in [exact - 1e-3, exact + 1e-9], worst gap " + num(worst_gap) +
                          ", worst excess " + num(worst_excess)};
}

// 3. ||f |d_a| || <= ||f||_inf
Outcome crit_product() {
    std::mt19937_64 rng(303);
    const std::vector<GeneratorId> gens{"a", "b", "c"};
    std::uniform_int_distribution<std::size_t> pick(0, 2);
    int ok = 0;
    double worst = -1e300;
    for (int i = 0; i < 100; ++i) {
        const auto f = testing::random_small_expr(rng, gens, 3, 24);
        const GeneratorId a = gens[pick(rng)];
        const auto s = fbl_space(gens);
        const auto r = check_lemma34(f, a, s, OracleOptions{20000, static_cast<std::uint64_t>(i), 2, 4});
        ok += r.pass;
        worst = std::max(worst, r.oracle.lower - r.sup_norm);
        emit("c3_" + std::to_string(i),
             make_certificate(s, product_function(f, a), r.oracle.certificate, r.oracle.lower, "lower"));
    }
    return {ok == 100, std::to_string(ok) + "/100 below sup norm + 1e-9, worst lower - sup = " + num(worst)};
}

// 4. Phi maps d({n}) onto the n-th unit vector
Outcome crit_phi() {
    int ok = 0, total = 0;
    for (int N = 1; N <= 8; ++N) {
        const auto p = build_phi(N);
        for (int n = 1; n <= N; ++n) {
            ++total;
            const auto e = LatticeExpr::gen(subset_generator({n}));
            const auto img = apply_hom(p.hom, e);
            bool exact = true;
            for (int j = 1; j <= N; ++j) exact = exact && img[static_cast<std::size_t>(j - 1)] == (j == n ? 1.0 : 0.0);
            ok += exact;
            if (n == N)  // one-point certificate: |d({n})(chi_n)| = 1
                emit("c4_" + std::to_string(N),
                     make_certificate(fbl_space(p.generators), expr_function(e), {p.chi_points[static_cast<std::size_t>(n - 1)]},
                                      1.0, "exact"));
        }
    }
    return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " lifts exact"};
}

// 5. extraction lower bound, admissibility, disjointness
Outcome crit_extraction() {
    std::mt19937_64 rng(505);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    int runs = 0, ok_runs = 0, trials = 0, ok_trials = 0;
    double worst_margin = 1e300;
    for (const std::string kind : {"disjoint", "perturbed"}) {
        for (double eps : {0.05, 0.1, 0.2}) {
            ++runs;
            const auto inp = kind == "disjoint" ? disjoint_instance(8) : perturbed_instance(8);
            const auto res = extract(inp, schedule(eps), 4);
            if (!res.ok()) continue;
            DualConfig c;
            for (std::size_t k = 0; k < res.nu.size(); ++k) c.points.push_back(res.selected_term(k).y);
            const auto space = fbl_space(inp.L);
            const bool adm = admissible(c, space).admissible, disj = supports_disjoint(res);
            bool all = adm && disj;
            std::vector<double> first;
            for (int t = 0; t < 100; ++t) {
                std::vector<double> l(res.selected.size());
                for (auto& v : l) v = u(rng);
                if (t == 0) first = l;
                const auto v = verify_lower_bound(res, inp.f, l);
                ++trials;
                ok_trials += v.pass;
                all = all && v.pass;
                worst_margin = std::min(worst_margin, v.certified_value - v.bound);
            }
            ok_runs += all;
            LatticeExpr sum = LatticeExpr::scale(first[0], inp.expr(res.selected[0]));
            for (std::size_t k = 1; k < first.size(); ++k) sum = sum + LatticeExpr::scale(first[k], inp.expr(res.selected[k]));
            std::ostringstream name;
            name << "c5_" << kind << "_" << eps;
            emit(name.str(), make_certificate(space, expr_function(sum), c.points,
                                              verify_lower_bound(res, inp.f, first).bound, "lower"));
        }
    }
    return {ok_runs == runs, std::to_string(ok_runs) + "/" + std::to_string(runs) + " runs clean, " +
                                 std::to_string(ok_trials) + "/" + std::to_string(trials) +
                                 " coefficient vectors verified, worst margin " + num(worst_margin)};
}

TargetFunction random_target(std::mt19937_64& rng, const KSpec& K) {
    std::uniform_int_distribution<int> val(-12, 12), cnt(0, 5), num(1, 127);
    TargetFunction h;
    for (const auto& I : K.intervals) {
        std::vector<Rational> ks{I.lo, I.hi};
        for (int i = cnt(rng); i > 0; --i) ks.push_back(I.lo + (I.hi - I.lo) * Rational(num(rng), 128));
        std::sort(ks.begin(), ks.end());
        ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
        for (const auto& k : ks) {
            h.breakpoints.push_back(k);
            h.values.push_back(Rational(val(rng), 4));
        }
    }
    return h;
}

std::vector<SectionBundle> g_bundles;

// 6. section identity, norm bound, join commutation
Outcome crit_section() {
    std::mt19937_64 rng(606);
    int ok_id = 0, ok_norm = 0, ok_laws = 0, total = 0;
    double worst_id = 0.0, worst_norm = -1e300;
    for (const auto& K : {KSpec::interval01(), KSpec::two_points()}) {
        std::vector<TargetFunction> hs;
        for (int i = 0; i < 20; ++i) {
            ++total;
            hs.push_back(random_target(rng, K));
            const auto b = build_section(K, hs.back());
            const auto sec = verify_section(b, 1000, static_cast<std::uint64_t>(i));
            ok_id += sec.pass();
            worst_id = std::max(worst_id, sec.worst);
            const auto nb = verify_norm_bound(b);
            ok_norm += nb.pass;
            worst_norm = std::max(worst_norm, nb.norm - nb.h_sup);
            emit("c6_" + K.label() + "_" + std::to_string(i),
                 make_certificate(fbl_space(kSectionGenerators), pl_function(b.Sh), nb.certificate, nb.norm, "exact"));
            g_bundles.push_back(b);
        }
        std::vector<std::pair<TargetFunction, TargetFunction>> pairs;
        for (int i = 0; i < 10; ++i) pairs.emplace_back(hs[static_cast<std::size_t>(2 * i)], hs[static_cast<std::size_t>(2 * i + 1)]);
        ok_laws += verify_hom_laws(K, pairs, 10000, 7).pass();
    }
    return {ok_id == total && ok_norm == total && ok_laws == 2,
            "identity " + std::to_string(ok_id) + "/" + std::to_string(total) + " (worst " + num(worst_id) +
                "), norm bound " + std::to_string(ok_norm) + "/" + std::to_string(total) + " (worst norm - sup " +
                num(worst_norm) + "), join laws " + std::to_string(ok_laws) + "/2 K"};
}

// 7. homogeneity and continuity at s = 0
Outcome crit_homogeneity() {
    int ok = 0;
    double worst = 0.0;
    std::uint64_t seed = 0;
    for (const auto& b : g_bundles) {
        const auto r = verify_homogeneity(b, 1000, seed++);
        ok += r.pass();
        worst = std::max(worst, r.worst);
    }
    return {ok == static_cast<int>(g_bundles.size()) && !g_bundles.empty(),
            std::to_string(ok) + "/" + std::to_string(g_bundles.size()) + " sections, worst residual " + num(worst)};
}

// 8. every certificate above replays through the CLI
Outcome crit_replay(const std::string& exe) {
    int ok = 0;
    std::string first_failure;
    for (const auto& c : g_certs) {
        const std::string cmd = "'" + exe + "' replay-cert --json-only '" + c.path.string() + "'";
        FILE* pipe = popen(cmd.c_str(), "r");
        std::string out;
        if (pipe) {
            std::array<char, 4096> buf;
            while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
        }
        const int status = pipe ? pclose(pipe) : -1;
        bool pass = false;
        try {
            const auto rep = json::parse(out);
            pass = WIFEXITED(status) && WEXITSTATUS(status) == 0 && rep.at("results").at("pass") == true &&
                   rep.at("results").at("value") == c.value;
        } catch (const std::exception&) {
        }
        ok += pass;
        if (!pass && first_failure.empty()) first_failure = c.path.filename().string();
    }
    std::string d = std::to_string(ok) + "/" + std::to_string(g_certs.size()) + " replayed with identical values";
    if (!first_failure.empty()) d += ", first failure " + first_failure;
    return {ok == static_cast<int>(g_certs.size()) && !g_certs.empty(), d};
}

// 9. rational and floating exact norms agree
LatticeExpr random_rational_expr(std::mt19937_64& rng, int depth) {
    static const std::vector<GeneratorId> gens{"a", "b"};
    std::uniform_int_distribution<int> kind(0, 4), gen(0, 1), coef(-12, 12);
    if (depth == 0) return LatticeExpr::gen(gens[static_cast<std::size_t>(gen(rng))]);
    switch (kind(rng)) {
        case 0: return LatticeExpr::gen(gens[static_cast<std::size_t>(gen(rng))]);
        case 1: {
            int c = coef(rng);
            if (c == 0) c = 3;
            return LatticeExpr::scale(c / 8.0, random_rational_expr(rng, depth - 1));
        }
        case 2: return random_rational_expr(rng, depth - 1) + random_rational_expr(rng, depth - 1);
        case 3: return LatticeExpr::join(random_rational_expr(rng, depth - 1), random_rational_expr(rng, depth - 1));
        default: return LatticeExpr::meet(random_rational_expr(rng, depth - 1), random_rational_expr(rng, depth - 1));
    }
}

Outcome crit_rational() {
    std::mt19937_64 rng(909);
    int ok = 0;
    double worst = 0.0;
    const auto s = fbl_space({"a", "b"});
    for (int i = 0; i < 10; ++i) {
        const auto e = random_rational_expr(rng, 4);
        const auto q = exact_fbl_norm(pl_from_expr<Rational>(e, s.generators), s);
        const auto d = exact_fbl_norm(pl_from_expr<double>(e, s.generators), s);
        const double diff = std::fabs(q.upper.convert_to<double>() - d.upper);
        worst = std::max(worst, diff);
        ok += diff <= 1e-9 && q.exact;
    }
    return {ok == 10, std::to_string(ok) + "/10 agree within 1e-9, worst " + num(worst)};
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: acceptance <fbl executable> <certificate directory>\n";
        return 2;
    }
    const std::string exe = argv[1];
    g_cert_dir = argv[2];
    fs::create_directories(g_cert_dir);

    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"1 generator l1-isometry", crit_isometry},
        {"2 oracle/exact agreement", crit_oracle},
        {"3 product bound ||f |d_a| || <= ||f||_inf", crit_product},
        {"4 Phi basis lift", crit_phi},
        {"5 l1 extraction lower bound", crit_extraction},
        {"6 C(K) section", crit_section},
        {"7 section homogeneity and continuity at 0", crit_homogeneity},
        {"8 certificate replay", [&] { return crit_replay(exe); }},
        {"9 rational vs floating norm", crit_rational},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failed += !o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << " (" << num(secs) << " s)" << std::endl;
    }
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
    return failed ? 1 : 0;
}
