#include <doctest.h>

#include <cmath>
#include <random>

#include "fbl/expr.hpp"
#include "support/random_expr.hpp"

using namespace fbl;

namespace {

LatticeExpr g(const char* n) { return LatticeExpr::gen(n); }

std::map<GeneratorId, double> as_map(const Point& p) { return {p.begin(), p.end()}; }

}  // namespace

TEST_CASE("parse: grammar readings") {
    CHECK(structurally_equal(parse_expr("d(a)"), g("a")));
    CHECK(structurally_equal(parse_expr("0.5*d(a) + (d(b) v -d(c))"),
                             LatticeExpr::sum(LatticeExpr::scale(0.5, g("a")),
                                              LatticeExpr::join(g("b"), LatticeExpr::scale(-1, g("c"))))));
    CHECK(structurally_equal(parse_expr("|d(a)| ^ d(b)"),
                             LatticeExpr::meet(LatticeExpr::join(g("a"), LatticeExpr::scale(-1, g("a"))), g("b"))));
}

TEST_CASE("parse: precedence and associativity") {
    // '*' binds tighter than '+', which binds tighter than 'v'.
    CHECK(structurally_equal(parse_expr("d(a) + 2*d(b) v d(c)"),
                             LatticeExpr::join(g("a") + LatticeExpr::scale(2, g("b")), g("c"))));
    CHECK(structurally_equal(parse_expr("d(a) v d(b) v d(c)"),
                             LatticeExpr::join(LatticeExpr::join(g("a"), g("b")), g("c"))));
    CHECK(structurally_equal(parse_expr("2*3*d(a)"), LatticeExpr::scale(6, g("a"))));
    CHECK(structurally_equal(parse_expr("d(a)*2"), LatticeExpr::scale(2, g("a"))));
    CHECK(structurally_equal(parse_expr("1e-1*d(x_1)"), LatticeExpr::scale(0.1, g("x_1"))));
}

TEST_CASE("parse: errors carry positions") {
    auto position_of = [](const char* text) -> long {
        try {
            parse_expr(text);
        } catch (const ParseError& e) {
            return static_cast<long>(e.position());
        }
        return -1;
    };
    CHECK(position_of("d(a) v d(b) ^ d(c)") == 12);
    CHECK(position_of("d(a) +") >= 0);
    CHECK(position_of("d(a) # d(b)") == 5);
    CHECK(position_of("d()") == 2);
    CHECK(position_of("d(a) * d(b)") >= 0);
    CHECK(position_of("d(a) + 1") >= 0);
    CHECK(position_of("3") >= 0);
    CHECK(position_of("(d(a)") >= 0);
}

TEST_CASE("parse: printing round-trips") {
    std::mt19937_64 rng(11);
    const std::vector<std::string> gens{"a", "b", "c"};
    for (int i = 0; i < 200; ++i) {
        LatticeExpr e = testing::random_expr(rng, gens, 4);
        CHECK(structurally_equal(parse_expr(to_string(e)), e));
        CHECK(structurally_equal(expr_from_json(to_json(e)), e));
    }
    LatticeExpr odd = LatticeExpr::scale(0.1 + 0.2, g("a"));
    CHECK(structurally_equal(parse_expr(to_string(odd)), odd));
}

TEST_CASE("evaluate: basic values") {
    CHECK(evaluate(g("a"), {{"a", 0.7}}) == 0.7);
    CHECK(evaluate(parse_expr("d(a) v d(b)"), {{"a", 1}, {"b", -1}}) == 1);
    CHECK(evaluate(parse_expr("|d(a)| + |d(b)|"), {{"a", -0.5}, {"b", 0.25}}) == 0.75);
    CHECK_THROWS_AS(evaluate(parse_expr("d(a) + d(b)"), {{"a", 1}}), EvaluationError);
}

TEST_CASE("support is syntactic") {
    CHECK(support(g("a")) == std::set<GeneratorId>{"a"});
    CHECK(support(parse_expr("d(a) + 0*d(b)")) == std::set<GeneratorId>{"a", "b"});
    CHECK(support(parse_expr("|d(a)| ^ d(a)")) == std::set<GeneratorId>{"a"});
}

TEST_CASE("to_maxmin: small forms") {
    auto m = to_maxmin<double>(g("a"));
    REQUIRE(m.groups.size() == 1);
    CHECK(m.groups[0].size() == 1);
    CHECK(m.groups[0][0].coeffs == std::map<GeneratorId, double>{{"a", 1.0}});

    auto j = to_maxmin<double>(parse_expr("d(a) v d(b)"));
    CHECK(j.groups.size() == 2);
    CHECK(j.functional_count() == 2);

    auto a = to_maxmin<double>(parse_expr("|d(a)|"));
    CHECK(a.distinct_functionals().size() == 2);
    CHECK(a.value({{"a", -0.3}}) == doctest::Approx(0.3));
}

TEST_CASE("to_maxmin: cap is enforced") {
    LatticeExpr e = parse_expr("|d(a)| + |d(b)|");
    for (int i = 0; i < 5; ++i) e = e + LatticeExpr::abs(e + g("c"));
    CHECK_THROWS_AS(to_maxmin<double>(e, 100), CapExceeded);
}

TEST_CASE("property: positive homogeneity") {
    std::mt19937_64 rng(1);
    const std::vector<std::string> gens{"a", "b", "c"};
    std::uniform_real_distribution<double> lam(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        LatticeExpr e = testing::random_expr(rng, gens, 4);
        Point p = testing::random_point(rng, gens);
        const double l = 1.0 - lam(rng);
        Point q = p;
        for (auto& [k, v] : q) v *= l;
        CHECK(std::fabs(evaluate(e, q) - l * evaluate(e, p)) <= 1e-12);
    }
}

TEST_CASE("property: max-min form agrees with evaluation") {
    std::mt19937_64 rng(2);
    const std::vector<std::string> gens{"a", "b", "c"};
    for (int i = 0; i < 100; ++i) {
        LatticeExpr e = testing::random_expr(rng, gens, 4);
        auto m = to_maxmin<double>(e);
        CompiledExpr c(e, gens);
        for (int k = 0; k < 100; ++k) {
            Point p = testing::random_point(rng, gens);
            const double v = evaluate(e, p);
            CHECK(std::fabs(m.value(as_map(p)) - v) <= 1e-12);
            const double xs[3] = {p["a"], p["b"], p["c"]};
            CHECK(c(xs) == v);
        }
    }
}

TEST_CASE("property: lattice laws at evaluation level") {
    std::mt19937_64 rng(3);
    const std::vector<std::string> gens{"a", "b"};
    for (int i = 0; i < 100; ++i) {
        LatticeExpr e = testing::random_expr(rng, gens, 3);
        LatticeExpr f = testing::random_expr(rng, gens, 3);
        Point p = testing::random_point(rng, gens);
        const double ve = evaluate(e, p), vf = evaluate(f, p);
        CHECK(evaluate(LatticeExpr::join(e, f), p) == std::max(ve, vf));
        CHECK(evaluate(LatticeExpr::meet(e, f), p) == std::min(ve, vf));
        CHECK(evaluate(LatticeExpr::abs(e), p) == std::fabs(ve));
    }
}
