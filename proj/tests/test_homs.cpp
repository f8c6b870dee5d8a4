#include <doctest.h>

#include <cmath>
#include <random>

#include "fbl/fblnorm.hpp"
#include "fbl/homs.hpp"
#include "support/random_expr.hpp"

using namespace fbl;

TEST_CASE("build_phi small levels") {
    auto p1 = build_phi(1);
    CHECK(p1.generators == std::vector<GeneratorId>{"s1"});
    CHECK(p1.chi_points == std::vector<std::vector<double>>{{1}});

    auto p2 = build_phi(2);
    CHECK(p2.subsets == std::vector<std::vector<int>>{{1}, {2}, {1, 2}});
    CHECK(p2.generators == std::vector<GeneratorId>{"s1", "s2", "s1_2"});
    CHECK(p2.chi_points[0] == std::vector<double>{1, 0, 1});
    CHECK(p2.chi_points[1] == std::vector<double>{0, 1, 1});

    CHECK(build_phi(3).generators.size() == 7);
    CHECK(build_phi(12).generators.size() == 4095);
    CHECK_THROWS_AS(build_phi(0), std::invalid_argument);
    CHECK_THROWS_AS(build_phi(13), std::invalid_argument);
}

TEST_CASE("chi points are 0/1 membership indicators") {
    auto p = build_phi(5);
    for (int n = 1; n <= 5; ++n)
        for (std::size_t a = 0; a < p.subsets.size(); ++a) {
            const auto& s = p.subsets[a];
            const bool in = std::find(s.begin(), s.end(), n) != s.end();
            CHECK(p.chi_points[static_cast<std::size_t>(n - 1)][a] == (in ? 1.0 : 0.0));
        }
    for (std::size_t a = 0; a < p.subsets.size(); ++a) CHECK(subset_index(p.subsets[a]) == a);
}

TEST_CASE("basis lift") {
    for (int N = 1; N <= 8; ++N) {
        auto p = build_phi(N);
        for (int n = 1; n <= N; ++n) {
            auto img = apply_hom(p.hom, LatticeExpr::gen(subset_generator({n})));
            std::vector<double> e(static_cast<std::size_t>(N), 0.0);
            e[static_cast<std::size_t>(n - 1)] = 1.0;
            CHECK(img == e);
        }
    }
    auto p = build_phi(4);
    CHECK(apply_hom(p.hom, LatticeExpr::gen("s1_2")) == std::vector<double>{1, 1, 0, 0});
}

TEST_CASE("apply_hom on absolute values and errors") {
    auto p = build_phi(3);
    auto e = parse_expr("d(s1) - 2*d(s2_3)");
    auto he = apply_hom(p.hom, e);
    auto ha = apply_hom(p.hom, LatticeExpr::abs(e));
    for (std::size_t j = 0; j < he.size(); ++j) CHECK(ha[j] == std::fabs(he[j]));
    CHECK_THROWS_AS(apply_hom(p.hom, parse_expr("d(s4)")), std::invalid_argument);
}

TEST_CASE("EvalHom validation") {
    CHECK_THROWS_AS(EvalHom({"a"}, {EvalTarget{-1.0, {0.5}}}, "R^1"), std::invalid_argument);
    CHECK_THROWS_AS(EvalHom({"a"}, {EvalTarget{1.0, {1.5}}}, "R^1"), std::invalid_argument);
    CHECK_THROWS_AS(EvalHom({"a", "b"}, {EvalTarget{1.0, {0.5}}}, "R^1"), std::invalid_argument);
    EvalHom h({"a", "b"}, {EvalTarget{2.0, {0.5, -1.0}}, EvalTarget{0.0, {1.0, 1.0}}}, "R^2");
    CHECK(apply_hom(h, parse_expr("d(a) v d(b)")) == std::vector<double>{1.0, 0.0});
}

TEST_CASE("hom laws") {
    auto p2 = build_phi(2);
    auto r = check_hom_laws(p2.hom, {{parse_expr("d(s1)"), parse_expr("d(s2)")}});
    CHECK(r.pass());
    CHECK(r.checks == 2 * 6);

    auto e = parse_expr("d(s1) ^ d(s1_2)");
    CHECK(check_hom_laws(p2.hom, {{e, e}}).pass());

    std::mt19937_64 rng(11);
    std::vector<GeneratorId> gens{"a", "b", "c"};
    std::uniform_real_distribution<double> u(-1, 1), w(0, 3);
    std::vector<EvalTarget> targets;
    for (int j = 0; j < 5; ++j) targets.push_back({w(rng), {u(rng), u(rng), u(rng)}});
    EvalHom h(gens, targets, "R^5");
    std::vector<std::pair<LatticeExpr, LatticeExpr>> pairs;
    for (int i = 0; i < 100; ++i)
        pairs.emplace_back(testing::random_expr(rng, gens, 4), testing::random_expr(rng, gens, 4));
    auto rep = check_hom_laws(h, pairs);
    CHECK(rep.pass());
    CHECK(rep.worst_residual <= 1e-12 * 100);
}

TEST_CASE("phi components bounded by the norm") {
    auto p = build_phi(3);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 20; ++i) {
        auto e = testing::random_small_expr(rng, {"s1", "s2", "s1_2", "s3"}, 3, 20);
        auto img = apply_hom(p.hom, e);
        double worst = 0.0;
        for (double v : img) worst = std::max(worst, std::fabs(v));
        auto s = fbl_space(support_list(e));
        auto norm = exact_fbl_norm(pl_from_expr<double>(e, s.generators), s);
        CHECK(worst <= norm.upper + 1e-9);
    }
}
