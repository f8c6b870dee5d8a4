#include <doctest.h>

#include <random>

#include "fbl/certificate.hpp"
#include "fbl/ckretract.hpp"
#include "support/random_expr.hpp"

using namespace fbl;

namespace {

nlohmann::json round_trip(const nlohmann::json& j) { return nlohmann::json::parse(j.dump()); }

}  // namespace

TEST_CASE("expr certificate from the exact norm replays") {
    std::mt19937_64 rng(1);
    const std::vector<GeneratorId> gens{"a", "b", "c"};
    for (int i = 0; i < 20; ++i) {
        auto e = testing::random_small_expr(rng, gens, 3, 20);
        for (const auto& s : {fbl_space(gens), linf_space(gens)}) {
            auto r = exact_fbl_norm(pl_from_expr<double>(e, gens), s);
            auto cert = make_certificate(s, expr_function(e), r.certificate, r.upper, "exact");
            CHECK(cert["value"].get<double>() == doctest::Approx(r.lower).epsilon(1e-12));
            auto rep = replay_certificate(round_trip(cert));
            CHECK_MESSAGE(rep.pass, rep.message);
        }
    }
}

TEST_CASE("space encoding") {
    auto s = fbl_space({"a", "b"});
    CHECK(space_to_json(s).at("ball") == "fbl");
    CHECK(space_from_json(space_to_json(s)).ball_vertices == s.ball_vertices);
    auto l = linf_space({"a", "b"});
    CHECK(space_to_json(l).contains("ball_vertices"));
    CHECK(space_from_json(space_to_json(l)).ball_vertices == l.ball_vertices);
}

TEST_CASE("product and pl certificates") {
    auto s = fbl_space({"a", "b"});
    auto cert = make_certificate(s, product_function(parse_expr("d(b)"), "a"), {{0.5, 0.5}, {0.5, -0.5}}, 1.0, "lower");
    CHECK(cert["value"] == 0.5);
    CHECK(replay_certificate(round_trip(cert)).pass);

    auto b = build_section(KSpec::two_points(), parse_target("0:3,1:-2"));
    auto n = verify_norm_bound(b);
    auto sc = make_certificate(fbl_space(kSectionGenerators), pl_function(b.Sh), n.certificate, n.norm, "exact");
    CHECK(sc["value"].get<double>() == doctest::Approx(n.norm));
    CHECK(replay_certificate(round_trip(sc)).pass);
}

TEST_CASE("exact certificates") {
    auto s = fbl_space({"a", "b"});
    auto e = parse_expr("d(a) v d(b)");
    auto r = exact_fbl_norm(pl_from_expr<Rational>(e, s.generators), s);
    auto cert = make_exact_certificate(s, e, r.certificate, r.upper, "exact");
    CHECK(cert["value"] == "2");
    CHECK(cert["claimed_norm"] == "2");
    auto rep = replay_certificate(round_trip(cert));
    CHECK(rep.pass);
    CHECK(rep.arithmetic == "exact");

    auto third = make_exact_certificate(s, e, {{Rational(1, 3), Rational(-2, 3)}}, Rational(2), "lower");
    CHECK(third["value"] == "1/3");
    CHECK(replay_certificate(third).pass);
}

TEST_CASE("replay rejects tampering") {
    auto s = fbl_space({"a", "b"});
    auto cert = make_certificate(s, expr_function(parse_expr("d(a) v d(b)")), {{1, 0}, {0, 1}}, 2.0, "exact");
    CHECK(replay_certificate(cert).pass);

    auto bad_value = cert;
    bad_value["value"] = 2.0000000000000004;
    auto r = replay_certificate(bad_value);
    CHECK_FALSE(r.pass);
    CHECK(r.admissible);
    CHECK_FALSE(r.value_match);

    auto bad_points = cert;
    bad_points["points"] = {{1, 0}, {0.5, 1}};
    bad_points["value"] = 2.0;
    r = replay_certificate(bad_points);
    CHECK_FALSE(r.admissible);
    CHECK_FALSE(r.pass);

    auto bad_schema = cert;
    bad_schema["schema"] = 2;
    CHECK_FALSE(replay_certificate(bad_schema).pass);

    auto bad_gen = cert;
    bad_gen["function"] = expr_function(parse_expr("d(z)"));
    r = replay_certificate(bad_gen);
    CHECK_FALSE(r.pass);
    CHECK(r.message.find("'z'") != std::string::npos);

    auto exact = make_exact_certificate(s, parse_expr("d(a)"), {{Rational(1), Rational(0)}, {Rational(1, 2), Rational(0)}},
                                        Rational(1), "lower");
    CHECK_FALSE(replay_certificate(exact).admissible);
}
