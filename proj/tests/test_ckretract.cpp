#include <doctest.h>

#include <cmath>
#include <random>

#include "fbl/ckretract.hpp"

using namespace fbl;

namespace {

double sh(const SectionBundle& b, double s, double t) {
    const double x[2] = {s, t};
    return b.Sh.evaluate(x);
}

TargetFunction random_target(std::mt19937_64& rng, const KSpec& K) {
    std::uniform_int_distribution<int> val(-8, 8), cnt(1, 4), num(0, 64);
    TargetFunction h;
    for (const auto& I : K.intervals) {
        std::vector<Rational> ks{I.lo, I.hi};
        for (int i = cnt(rng); i > 0; --i) ks.push_back(I.lo + (I.hi - I.lo) * Rational(num(rng), 64));
        std::sort(ks.begin(), ks.end());
        ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
        for (const auto& k : ks) {
            h.breakpoints.push_back(k);
            h.values.push_back(Rational(val(rng), 4));
        }
    }
    return h;
}

}  // namespace

TEST_CASE("parse_rational") {
    CHECK(parse_rational("3") == 3);
    CHECK(parse_rational("-0.25") == Rational(-1, 4));
    CHECK(parse_rational("1/3") == Rational(1, 3));
    CHECK(parse_rational(".5") == Rational(1, 2));
    CHECK(parse_rational("0.1") == Rational(1, 10));
    CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational("abc"), std::invalid_argument);
    CHECK_THROWS_AS(parse_rational(""), std::invalid_argument);
}

TEST_CASE("KSpec parsing and validation") {
    CHECK(parse_kspec("interval").kind == KSpec::Kind::Interval01);
    CHECK(parse_kspec("twopoints").intervals.size() == 2);
    auto u = parse_kspec("union:0,1/4;1/2,3/4");
    CHECK(u.intervals.size() == 2);
    CHECK(u.label() == "union:0,1/4;1/2,3/4");
    CHECK_THROWS_AS(parse_kspec("union:0,1/2;1/4,1"), std::invalid_argument);
    CHECK_THROWS_AS(parse_kspec("union:0,2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_kspec("circle"), std::invalid_argument);
    CHECK_THROWS_AS(build_section(KSpec::two_points(), parse_target("0.5:1,1:2")), std::invalid_argument);
    CHECK_THROWS_AS(build_section(KSpec::two_points(), parse_target("0:1")), std::invalid_argument);
}

TEST_CASE("interval, identity target") {
    auto b = build_section(KSpec::interval01(), parse_target("0:0,1:1"));
    CHECK(sh(b, 1, 0.25) == 0.25);
    for (double k : {0.0, 0.1, 0.5, 0.9, 1.0}) CHECK(sh(b, 1, k) == doctest::Approx(k).epsilon(1e-15));
    // outside K the clip takes over
    CHECK(sh(b, 1, -0.5) == 0.0);
    CHECK(sh(b, 0.5, 1.0) == 0.5);
    CHECK(sh(b, -1, -0.5) == 0.5);  // tau = t/s = 0.5
    CHECK(sh(b, -1, 0.5) == 0.0);
    auto n = verify_norm_bound(b);
    CHECK(n.pass);
    CHECK(n.norm == doctest::Approx(1.0));
    CHECK(std::fabs(sh(b, 1, 1)) == 1.0);  // single admissible point (1,1)
}

TEST_CASE("two points, (0,1) target") {
    auto b = build_section(KSpec::two_points(), parse_target("0:0,1:1"));
    // s > 0: 0 for t <= s/2, 2t - s up to t = s, then s
    for (double s : {0.25, 0.5, 1.0}) {
        for (double r : {-1.0, -0.3, 0.0, 0.2, 0.5}) CHECK(sh(b, s, r * s) == doctest::Approx(0.0));
        for (double r : {0.5, 0.6, 0.75, 0.9, 1.0}) CHECK(sh(b, s, r * s) == doctest::Approx(2 * r * s - s));
        CHECK(sh(b, s, 1.0) == doctest::Approx(s));
    }
    // pointwise pipeline on a grid before trusting the assembly
    for (int i = -20; i <= 20; ++i)
        for (int j = -20; j <= 20; ++j) {
            const double s = i / 20.0, t = j / 20.0;
            CHECK(sh(b, s, t) == doctest::Approx(b.pipeline(s, t)).epsilon(1e-14));
        }
    CHECK(b.u(0.5) == 0.0);
    CHECK(b.u(0.25) == 0.5);
    CHECK(b.phi(0.49) == 0.0);
    CHECK(b.phi(0.5) == 1.0);
}

TEST_CASE("two points, (3,-2) target") {
    auto b = build_section(KSpec::two_points(), parse_target("0:3,1:-2"));
    CHECK(sh(b, 1, 0) == 3.0);
    CHECK(sh(b, 1, 1) == -2.0);
    auto r = verify_section(b, 200);
    CHECK(r.pass());
    auto n = verify_norm_bound(b);
    CHECK(n.pass);
    CHECK(n.norm <= 3.0 + 1e-9);
}

TEST_CASE("zero target gives the zero section") {
    for (const auto& K : {KSpec::interval01(), KSpec::two_points(), parse_kspec("union:0,1/3;2/3,1")}) {
        TargetFunction h;
        for (const auto& I : K.intervals) {
            h.breakpoints.push_back(I.lo);
            h.values.push_back(0);
        }
        auto b = build_section(K, h);
        for (const auto& p : b.Sh_exact.pieces) CHECK((p[0] == 0 && p[1] == 0));
        auto r = verify_section(b, 100);
        CHECK(r.pass());
        CHECK(r.worst <= 1e-15);  // only the ratio in v rounds
        CHECK(verify_norm_bound(b).norm == 0.0);
    }
}

TEST_CASE("two points, constant one") {
    auto b = build_section(KSpec::two_points(), parse_target("0:1,1:1"));
    auto n = verify_norm_bound(b);
    CHECK(n.pass);
    CHECK(n.norm <= 1.0 + 1e-9);
}

TEST_CASE("random targets: section identity, homogeneity, norm bound") {
    std::mt19937_64 rng(21);
    for (const auto& K : {KSpec::interval01(), KSpec::two_points(), parse_kspec("union:0,1/4;1/2,1/2;3/5,1")}) {
        for (int i = 0; i < 10; ++i) {
            auto h = random_target(rng, K);
            auto b = build_section(K, h);
            auto s = verify_section(b, 1000, static_cast<std::uint64_t>(i));
            CHECK_MESSAGE(s.pass(), K.label(), " ", s.failures.front());
            CHECK(verify_homogeneity(b, 1000, static_cast<std::uint64_t>(i)).pass());
            auto n = verify_norm_bound(b);
            CHECK(n.pass);
            CHECK(n.f_slice_sup <= n.h_sup + 1e-12);
        }
    }
}

TEST_CASE("lattice homomorphism laws") {
    auto K = KSpec::interval01();
    auto id = parse_target("0:0,1:1"), one_minus = parse_target("0:1,1:0");
    auto r = verify_hom_laws(K, {{id, one_minus}}, 10000);
    CHECK(r.pass());

    auto b = build_section(K, parse_target("0:-1,1/3:2,1:1/2"));
    CHECK(verify_hom_laws(K, {{b.h, b.h}}).pass());
    // S(h v -h) = |S(h)|
    auto neg = target_scale(b.h, -1);
    auto abs_section = build_section(K, target_join(K, b.h, neg));
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 1000; ++i) {
        const double s = u(rng), t = u(rng);
        CHECK(sh(abs_section, s, t) == doctest::Approx(std::fabs(sh(b, s, t))).epsilon(1e-14));
    }

    std::mt19937_64 rng2(9);
    for (const auto& KK : {KSpec::two_points(), parse_kspec("union:0,1/3;1/2,1")}) {
        std::vector<std::pair<TargetFunction, TargetFunction>> pairs;
        // exact overlays of union sections are slow (one rational LP per split), so keep this small
        const int count = KK.kind == KSpec::Kind::TwoPoints ? 5 : 1;
        for (int i = 0; i < count; ++i) pairs.emplace_back(random_target(rng2, KK), random_target(rng2, KK));
        CHECK(verify_hom_laws(KK, pairs, 2000).pass());
    }
}

TEST_CASE("finite-coordinate approximants") {
    auto affine = [](std::span<const double> y) { return 0.5 - 2.0 * y[0]; };
    auto a = finite_coordinate_approximant(affine, 1, {0}, 2);
    CHECK(a.deviation <= 1e-15);

    auto constant = [](std::span<const double>) { return 0.7; };
    for (std::size_t g : {2u, 5u, 33u}) CHECK(finite_coordinate_approximant(constant, 1, {0}, g).deviation == 0.0);

    auto b = build_section(KSpec::two_points(), parse_target("0:0,1:1"));
    auto slice = [&b](std::span<const double> y) { return b.f_slice(y[0]); };
    const double d32 = finite_coordinate_approximant(slice, 1, {0}, 32).deviation;
    const double d64 = finite_coordinate_approximant(slice, 1, {0}, 64).deviation;
    CHECK(d64 <= d32);
    CHECK(d64 > 0.0);

    // pullback is constant along rays
    auto ap = finite_coordinate_approximant(slice, 1, {0}, 16);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1, 1), l(0, 1);
    for (int i = 0; i < 1000; ++i) {
        const double s = u(rng), t = u(rng), lam = 1.0 - l(rng);
        const double x[2] = {s, t}, y[2] = {lam * s, lam * t};
        CHECK(ap.f_n(y) == doctest::Approx(ap.f_n(x)).epsilon(1e-12));
    }

    // two slice coordinates, only the first used: the second is frozen at 0
    auto two = [](std::span<const double> y) { return y[0] + y[1]; };
    auto ap2 = finite_coordinate_approximant(two, 2, {0}, 3);
    const double p[2] = {0.5, 0.9};
    CHECK(ap2.f_plus(p) == doctest::Approx(0.5));
    CHECK_THROWS_AS(finite_coordinate_approximant(two, 2, {2}, 3), std::invalid_argument);
    CHECK_THROWS_AS(finite_coordinate_approximant(two, 2, {0}, 1), std::invalid_argument);
}
