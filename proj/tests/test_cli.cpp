#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fbl/cli.hpp"
#include "fbl/scalar.hpp"
#include <json.hpp>

using nlohmann::json;

namespace {

struct Run {
    int code;
    json report;
    std::string err;
};

Run run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "fbl");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = fbl::run(static_cast<int>(argv.size()), argv.data(), out, err);
    json j = out.str().empty() ? json() : json::parse(out.str());
    return {code, j, err.str()};
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("fbl_test_" + name)).string();
}

}  // namespace

TEST_CASE("norm subcommand") {
    auto r = run_cli({"norm", "--expr", "d(a) v d(b)", "--space", "l1"});
    CHECK(r.code == 0);
    CHECK(r.report["schema"] == 1);
    CHECK(r.report["subcommand"] == "norm");
    CHECK(r.report["results"]["upper"] == 2.0);
    CHECK(r.report["arithmetic_mode"] == "float");

    auto x = run_cli({"norm", "--expr", "d(a) - 2*d(b) + 3*d(c)", "--exact", "--json-only"});
    CHECK(x.code == 0);
    CHECK(x.report["results"]["upper_exact"] == "6");
    CHECK(x.report["arithmetic_mode"] == "exact");
    CHECK(x.err.empty());
}

TEST_CASE("phi-demo subcommand") {
    auto r = run_cli({"phi-demo", "--n", "2"});
    CHECK(r.code == 0);
    CHECK(r.report["results"]["chi_points"] == json::parse("[[1.0,0.0,1.0],[0.0,1.0,1.0]]"));
    CHECK(r.err.find("s1_2") != std::string::npos);
    CHECK(run_cli({"phi-demo", "--n", "13"}).code == 2);
}

TEST_CASE("usage errors") {
    CHECK(run_cli({}).code == 2);
    CHECK(run_cli({"frobnicate"}).code == 2);
    CHECK(run_cli({"norm"}).code == 2);
    CHECK(run_cli({"norm", "--expr", "d(a"}).code == 2);
    CHECK(run_cli({"norm", "--expr", "d(a)", "--space", "l7"}).code == 2);
    CHECK(run_cli({"oracle", "--expr", "d(a)", "--exact"}).code == 2);
    CHECK(run_cli({"extract-l1", "--instance", "other"}).code == 2);
    CHECK(run_cli({"extract-l1", "--eps", "0"}).code == 2);
    CHECK(run_cli({"ck-section", "--k", "twopoints", "--h", "0.5:1"}).code == 2);
    CHECK(run_cli({"replay-cert", "/nonexistent/cert.json"}).code == 2);
}

TEST_CASE("determinism and certificate replay") {
    const std::vector<std::vector<std::string>> cases{
        {"oracle", "--expr", "(d(a) ^ d(b)) - d(c)", "--budget", "3000", "--seed", "7"},
        {"lemma34-check", "--expr", "d(b) v -d(c)", "--a", "a", "--budget", "3000", "--seed", "3"},
        {"extract-l1", "--instance", "perturbed", "--n", "8", "--eps", "0.1", "--len", "3", "--seed", "5"},
        {"ck-section", "--k", "twopoints", "--h", "0:3,1:-2", "--samples", "200"},
        {"norm", "--expr", "d(a) v d(b)", "--space", "linf"},
        {"norm", "--expr", "0.5*d(a) ^ d(b)", "--exact"},
    };
    int i = 0;
    for (auto args : cases) {
        const auto path = temp_path("cert" + std::to_string(i++) + ".json");
        args.push_back("--cert-out");
        args.push_back(path);
        auto a = run_cli(args), b = run_cli(args);
        REQUIRE(a.code == 0);
        CHECK(a.report["results"] == b.report["results"]);
        auto rep = run_cli({"replay-cert", path});
        CHECK_MESSAGE(rep.code == 0, args[0]);
        CHECK(rep.report["results"]["value"] == a.report["results"]["certificate_value"]);
        std::remove(path.c_str());
    }
}

TEST_CASE("replay of a tampered certificate fails with exit 1") {
    const auto path = temp_path("tampered.json");
    REQUIRE(run_cli({"norm", "--expr", "d(a) v d(b)", "--cert-out", path}).code == 0);
    json cert;
    {
        std::ifstream f(path);
        cert = json::parse(f);
    }
    cert["points"][0][0] = 0.75;
    {
        std::ofstream f(path);
        f << cert.dump();
    }
    auto r = run_cli({"replay-cert", path});
    CHECK(r.code == 1);
    CHECK(r.report["results"]["pass"] == false);
    std::remove(path.c_str());
}
