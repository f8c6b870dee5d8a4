#include "fbl/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "fbl/certificate.hpp"
#include "fbl/ckretract.hpp"
#include "fbl/ellone.hpp"
#include "fbl/fblnorm.hpp"
#include "fbl/homs.hpp"

namespace fbl {

namespace {

using nlohmann::json;

// Exit codes
constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Common {
    std::uint64_t seed = 0;
    std::size_t budget = 20000;
    double tol = 1e-9;
    bool exact = false;
    bool json_only = false;
};

struct Outcome {
    json results;
    bool pass = true;
    std::string summary;
};

std::vector<GeneratorId> split_list(const std::string& s) {
    std::vector<GeneratorId> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

AdmissibilitySpace make_space(const std::string& kind, std::vector<GeneratorId> gens) {
    if (kind == "fbl") return fbl_space(std::move(gens));
    if (kind == "l1") return l1_space(std::move(gens));
    if (kind == "linf") return linf_space(std::move(gens));
    throw UsageError("unknown space '" + kind + "' (expected fbl, l1 or linf)");
}

std::vector<GeneratorId> generators_for(const LatticeExpr& e, const std::string& listed) {
    if (listed.empty()) return support_list(e);
    auto gens = split_list(listed);
    for (const auto& g : support(e))
        if (std::find(gens.begin(), gens.end(), g) == gens.end())
            throw UsageError("expression uses '" + g + "' which is not in --generators");
    return gens;
}

void write_certificate(const std::string& path, const json& cert) {
    if (path.empty()) return;
    std::ofstream f(path);
    if (!f) throw UsageError("cannot write certificate to '" + path + "'");
    f << cert.dump(2) << '\n';
}

std::string fmt(double v, const Common& c) {
    const int digits = std::clamp(static_cast<int>(std::ceil(-std::log10(c.tol))), 1, 17);
    std::ostringstream os;
    os << std::setprecision(digits) << v;
    return os.str();
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json diagnostics_json(const NormDiagnostics& d) {
    return {{"method", d.method}, {"hyperplanes", d.hyperplanes}, {"rays", d.rays}, {"cells", d.cells},
            {"lp_status", d.lp_status}, {"lp_iterations", d.lp_iterations}, {"evaluations", d.evaluations},
            {"restarts", d.restarts}};
}

json bracket_json(const NormBracket& b) {
    return {{"lower", b.lower}, {"upper", b.upper_finite ? json(b.upper) : json(nullptr)}, {"exact", b.exact},
            {"certificate", b.certificate}, {"diagnostics", diagnostics_json(b.diagnostics)}};
}

// ---------------------------------------------------------------------------

struct NormArgs {
    std::string expr, space = "fbl", generators, method = "ray", cert_out;
};

Outcome cmd_norm(const NormArgs& a, const Common& c) {
    const auto e = parse_expr(a.expr);
    const auto s = make_space(a.space, generators_for(e, a.generators));
    if (a.method != "ray" && a.method != "cells") throw UsageError("--method must be ray or cells");
    Outcome o;
    if (c.exact) {
        const auto f = pl_from_expr<Rational>(e, s.generators);
        const auto r = a.method == "ray" ? exact_fbl_norm(f, s) : exact_fbl_norm_cells(f, s);
        auto b = to_double(r);
        o.results = bracket_json(b);
        o.results["lower_exact"] = r.lower.str();
        o.results["upper_exact"] = r.upper.str();
        auto cert = make_exact_certificate(s, e, r.certificate, r.upper, r.exact ? "exact" : "lower");
        o.results["certificate_value"] = cert["value"];
        write_certificate(a.cert_out, cert);
        o.summary = "norm = " + r.upper.str() + " (exact rational)";
    } else {
        const auto f = pl_from_expr<double>(e, s.generators);
        const auto r = a.method == "ray" ? exact_fbl_norm(f, s) : exact_fbl_norm_cells(f, s);
        o.results = bracket_json(r);
        auto cert = make_certificate(s, expr_function(e), r.certificate, r.upper, r.exact ? "exact" : "lower");
        o.results["certificate_value"] = cert["value"];
        write_certificate(a.cert_out, cert);
        o.summary = "norm = " + fmt(r.upper, c) + " (lower " + fmt(r.lower, c) + ")";
    }
    o.results["space"] = space_to_json(s);
    return o;
}

struct OracleArgs {
    std::string expr, space = "fbl", generators, abs_gen, cert_out;
    std::size_t restarts = 4;
};

Outcome cmd_oracle(const OracleArgs& a, const Common& c) {
    if (c.exact) throw UsageError("the oracle runs in floating point only");
    const auto e = parse_expr(a.expr);
    auto gens = generators_for(e, a.generators);
    if (!a.abs_gen.empty() && std::find(gens.begin(), gens.end(), a.abs_gen) == gens.end()) gens.push_back(a.abs_gen);
    const auto s = make_space(a.space, gens);
    const json fn = a.abs_gen.empty() ? expr_function(e) : product_function(e, a.abs_gen);
    const auto F = make_evaluator(fn, s.generators);
    OracleOptions opt{c.budget, c.seed, a.abs_gen.empty() ? 1 : 2, a.restarts};
    const auto r = oracle_lower_bound(F, s, opt);
    Outcome o;
    o.results = bracket_json(r);
    o.results["function"] = fn;
    auto cert = make_certificate(s, fn, r.certificate, r.lower, "lower");
    o.results["certificate_value"] = cert["value"];
    write_certificate(a.cert_out, cert);
    o.summary = "oracle lower bound = " + fmt(r.lower, c) + " after " + std::to_string(r.diagnostics.evaluations) +
                " evaluations";
    return o;
}

struct ProductArgs {
    std::string expr, a, space = "fbl", generators, cert_out;
    std::size_t restarts = 4;
};

Outcome cmd_product(const ProductArgs& a, const Common& c) {
    if (c.exact) throw UsageError("the product check runs in floating point only");
    const auto e = parse_expr(a.expr);
    auto gens = generators_for(e, a.generators);
    if (std::find(gens.begin(), gens.end(), a.a) == gens.end()) gens.push_back(a.a);
    const auto s = make_space(a.space, gens);
    OracleOptions opt{c.budget, c.seed, 2, a.restarts};
    const auto r = check_lemma34(e, a.a, s, opt);
    Outcome o;
    o.pass = r.pass;
    o.results = {{"sup_norm", r.sup_norm}, {"best_lower", r.oracle.lower}, {"pass", r.pass},
                 {"oracle", bracket_json(r.oracle)}};
    auto cert = make_certificate(s, product_function(e, a.a), r.oracle.certificate, r.oracle.lower, "lower");
    o.results["certificate_value"] = cert["value"];
    write_certificate(a.cert_out, cert);
    o.summary = "||f |d_" + a.a + "| || >= " + fmt(r.oracle.lower, c) + ", ||f||_inf = " + fmt(r.sup_norm, c) +
                (r.pass ? "  PASS" : "  FAIL");
    return o;
}

Outcome cmd_phi(int n) {
    const auto p = build_phi(n);
    Outcome o;
    json images = json::array();
    bool ok = true;
    std::ostringstream table;
    table << std::left << std::setw(14) << "A";
    for (int m = 1; m <= n; ++m) table << " x" << m;
    table << '\n';
    for (std::size_t a = 0; a < p.subsets.size(); ++a) {
        table << std::setw(14) << p.generators[a];
        for (int m = 1; m <= n; ++m) table << "  " << p.chi_points[static_cast<std::size_t>(m - 1)][a];
        table << '\n';
    }
    table << "lift images:\n";
    for (int m = 1; m <= n; ++m) {
        const auto img = apply_hom(p.hom, LatticeExpr::gen(subset_generator({m})));
        for (int j = 1; j <= n; ++j) ok = ok && img[static_cast<std::size_t>(j - 1)] == (j == m ? 1.0 : 0.0);
        images.push_back(img);
        table << "  Phi(d(" << p.generators[subset_index({m})] << ")) =";
        for (double v : img) table << ' ' << v;
        table << '\n';
    }
    o.pass = ok;
    o.results = {{"N", n}, {"subsets", p.subsets}, {"generators", p.generators}, {"chi_points", p.chi_points},
                 {"lift_images", images}, {"basis_lift_ok", ok}};
    o.summary = table.str() + (ok ? "basis lift exact" : "basis lift FAILED");
    return o;
}

struct ExtractArgs {
    std::string instance = "disjoint", cert_out;
    int n = 8;
    double eps = 0.1;
    std::size_t len = 4, lambdas = 100;
};

Outcome cmd_extract(const ExtractArgs& a, const Common& c) {
    if (c.exact) throw UsageError("extraction runs in floating point only");
    ExtractionInput inp;
    if (a.instance == "disjoint")
        inp = disjoint_instance(a.n);
    else if (a.instance == "perturbed")
        inp = perturbed_instance(a.n);
    else
        throw UsageError("unknown instance '" + a.instance + "' (expected disjoint or perturbed)");
    const auto res = extract(inp, schedule(a.eps), a.len);
    Outcome o;
    o.results["extraction"] = to_json(res, inp.L);
    o.results["instance"] = a.instance;
    std::ostringstream table;
    table << "status " << res.status << (res.message.empty() ? "" : ": " + res.message) << "\nselected:";
    for (auto n : res.selected) table << ' ' << n;
    table << '\n';
    o.pass = res.ok();
    if (res.ok()) {
        std::mt19937_64 rng(c.seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::size_t passed = 0;
        double worst_margin = std::numeric_limits<double>::infinity();
        json rows = json::array();
        std::vector<double> first;
        for (std::size_t t = 0; t < a.lambdas; ++t) {
            std::vector<double> l(res.selected.size());
            for (auto& v : l) v = u(rng);
            if (t == 0) first = l;
            const auto v = verify_lower_bound(res, inp.f, l);
            passed += v.pass;
            worst_margin = std::min(worst_margin, v.certified_value - v.bound);
            if (t < 5) rows.push_back({{"lambda", l}, {"certified_value", v.certified_value}, {"bound", v.bound}, {"pass", v.pass}});
        }
        const bool adm = max_column_sum(res) <= 1.0, disj = supports_disjoint(res);
        o.pass = passed == a.lambdas && adm && disj;
        o.results["verification"] = {{"trials", a.lambdas}, {"passed", passed}, {"worst_margin", finite_or_null(worst_margin)},
                                     {"admissible", adm}, {"disjoint", disj}, {"sample", rows}};
        table << "lower bound verified on " << passed << "/" << a.lambdas << " coefficient vectors, worst margin "
              << fmt(worst_margin, c) << "\nadmissible " << adm << ", disjoint " << disj;
        if (!first.empty()) {
            LatticeExpr sum = LatticeExpr::scale(first[0], inp.expr(res.selected[0]));
            for (std::size_t k = 1; k < first.size(); ++k) sum = sum + LatticeExpr::scale(first[k], inp.expr(res.selected[k]));
            std::vector<std::vector<double>> pts;
            for (std::size_t k = 0; k < res.nu.size(); ++k) pts.push_back(res.selected_term(k).y);
            auto cert = make_certificate(fbl_space(inp.L), expr_function(sum), pts, verify_lower_bound(res, inp.f, first).bound, "lower");
            o.results["certificate_value"] = cert["value"];
            write_certificate(a.cert_out, cert);
        }
    }
    o.summary = table.str();
    return o;
}

struct SectionArgs {
    std::string k = "interval", h, cert_out;
    std::size_t samples = 1000;
};

json section_report_json(const SectionReport& r) {
    json f = json::array();
    for (std::size_t i = 0; i < std::min<std::size_t>(r.failures.size(), 20); ++i) f.push_back(r.failures[i]);
    return {{"checks", r.checks}, {"worst", r.worst}, {"pass", r.pass()}, {"failures", f},
            {"failure_count", r.failures.size()}};
}

Outcome cmd_section(const SectionArgs& a, const Common& c) {
    const auto K = parse_kspec(a.k);
    const auto h = parse_target(a.h);
    const auto b = build_section(K, h);
    const auto sec = verify_section(b, a.samples, c.seed);
    const auto hom = verify_homogeneity(b, a.samples, c.seed);
    const auto nb = verify_norm_bound(b);
    Outcome o;
    o.pass = sec.pass() && hom.pass() && nb.pass;
    o.results["bundle"] = to_json(b);
    o.results["section"] = section_report_json(sec);
    o.results["homogeneity"] = section_report_json(hom);
    o.results["norm_bound"] = {{"norm", nb.norm}, {"h_sup", nb.h_sup}, {"f_slice_sup", nb.f_slice_sup},
                               {"certificate", nb.certificate}, {"pass", nb.pass}, {"scope", nb.scope}};
    auto cert = make_certificate(fbl_space(kSectionGenerators), pl_function(b.Sh), nb.certificate, nb.norm, "exact");
    o.results["certificate_value"] = cert["value"];
    write_certificate(a.cert_out, cert);
    std::ostringstream t;
    t << std::left << std::setw(24) << "check" << std::setw(10) << "count" << std::setw(18) << "worst" << "status\n";
    t << std::setw(24) << "section identity" << std::setw(10) << sec.checks << std::setw(18) << fmt(sec.worst, c)
      << (sec.pass() ? "pass" : "FAIL") << '\n';
    t << std::setw(24) << "homogeneity/continuity" << std::setw(10) << hom.checks << std::setw(18) << fmt(hom.worst, c)
      << (hom.pass() ? "pass" : "FAIL") << '\n';
    t << "||Sh|| = " << fmt(nb.norm, c) << " <= ||h||_inf = " << fmt(nb.h_sup, c) << (nb.pass ? "  pass" : "  FAIL")
      << "  (norm over the two generators {one, id})";
    o.summary = t.str();
    return o;
}

Outcome cmd_replay(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot read '" + path + "'");
    json cert;
    try {
        cert = json::parse(f);
    } catch (const json::parse_error& e) {
        throw UsageError("'" + path + "' is not valid JSON: " + e.what());
    }
    const auto r = replay_certificate(cert);
    Outcome o;
    o.pass = r.pass;
    o.results = {{"file", path}, {"pass", r.pass}, {"admissible", r.admissible}, {"value_match", r.value_match},
                 {"worst_sum", r.worst_sum}, {"value", r.value}, {"recorded", r.recorded},
                 {"arithmetic", r.arithmetic}, {"message", r.message}};
    o.summary = std::string(r.pass ? "certificate replays" : "certificate REJECTED") +
                (r.message.empty() ? "" : ": " + r.message);
    return o;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Free Banach lattice workbench"};
    app.require_subcommand(1);
    app.fallthrough();
    Common c;
    app.add_option("--seed", c.seed, "random seed")->capture_default_str();
    app.add_option("--budget", c.budget, "oracle evaluation budget")->capture_default_str();
    app.add_option("--tol", c.tol, "display tolerance (internal tolerances are fixed)")->capture_default_str();
    app.add_flag("--exact", c.exact, "rational arithmetic");
    app.add_flag("--json-only", c.json_only, "suppress the human summary");

    NormArgs na;
    auto* norm = app.add_subcommand("norm", "exact norm of a lattice expression");
    norm->add_option("--expr", na.expr)->required();
    norm->add_option("--space", na.space, "fbl, l1 or linf")->capture_default_str();
    norm->add_option("--generators", na.generators, "comma-separated generator order");
    norm->add_option("--method", na.method, "ray or cells")->capture_default_str();
    norm->add_option("--cert-out", na.cert_out, "write the certificate here");

    OracleArgs oa;
    auto* oracle = app.add_subcommand("oracle", "randomized lower bound");
    oracle->add_option("--expr", oa.expr)->required();
    oracle->add_option("--space", oa.space)->capture_default_str();
    oracle->add_option("--generators", oa.generators);
    oracle->add_option("--times-abs", oa.abs_gen, "multiply by |x_a| (degree 2)");
    oracle->add_option("--restarts", oa.restarts)->capture_default_str();
    oracle->add_option("--cert-out", oa.cert_out);

    ProductArgs pa;
    auto* product = app.add_subcommand("lemma34-check", "oracle bound of ||f |d_a| || against ||f||_inf");
    product->add_option("--expr", pa.expr)->required();
    product->add_option("--a", pa.a, "generator a")->required();
    product->add_option("--space", pa.space)->capture_default_str();
    product->add_option("--generators", pa.generators);
    product->add_option("--restarts", pa.restarts)->capture_default_str();
    product->add_option("--cert-out", pa.cert_out);

    int phi_n = 0;
    auto* phi = app.add_subcommand("phi-demo", "the map Phi on L_N");
    phi->add_option("--n", phi_n, "truncation level")->required();

    ExtractArgs ea;
    auto* ext = app.add_subcommand("extract-l1", "subsequence extraction with l1 lower bound");
    ext->add_option("--instance", ea.instance, "disjoint or perturbed")->capture_default_str();
    ext->add_option("--n", ea.n, "truncation level of L")->capture_default_str();
    ext->add_option("--eps", ea.eps)->capture_default_str();
    ext->add_option("--len", ea.len, "requested length")->capture_default_str();
    ext->add_option("--lambdas", ea.lambdas, "random coefficient vectors to verify")->capture_default_str();
    ext->add_option("--cert-out", ea.cert_out);

    SectionArgs sa;
    auto* sec = app.add_subcommand("ck-section", "lattice section for C(K)");
    sec->set_help_flag("--help", "print this help message and exit");  // frees -h for --h
    sec->add_option("--k", sa.k, "interval, twopoints or union:a1,b1;a2,b2")->capture_default_str();
    sec->add_option("--h", sa.h, "breakpoints k1:v1,k2:v2,...")->required();
    sec->add_option("--samples", sa.samples)->capture_default_str();
    sec->add_option("--cert-out", sa.cert_out);

    std::string cert_path;
    auto* replay = app.add_subcommand("replay-cert", "replay a certificate file");
    replay->add_option("file", cert_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, err, err) == 0 ? kPass : kUsage;
    }

    const auto start = std::chrono::steady_clock::now();
    auto* sub = app.get_subcommands().front();
    Outcome o;
    try {
        if (sub == norm) o = cmd_norm(na, c);
        else if (sub == oracle) o = cmd_oracle(oa, c);
        else if (sub == product) o = cmd_product(pa, c);
        else if (sub == phi) o = cmd_phi(phi_n);
        else if (sub == ext) o = cmd_extract(ea, c);
        else if (sub == sec) o = cmd_section(sa, c);
        else o = cmd_replay(cert_path);
    } catch (const std::invalid_argument& e) {  // includes parse and usage errors
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    json config = json::object();
    auto echo = [&](const CLI::Option* opt) {
        std::string name = opt->get_lnames().empty() ? opt->get_name() : opt->get_lnames().front();
        if (name.empty() || name == "help" || name == "--help") return;
        if (opt->get_expected_max() == 0)
            config[name] = opt->count() > 0;
        else
            config[name] = opt->as<std::string>();
    };
    for (const auto* opt : app.get_options()) echo(opt);
    for (const auto* opt : sub->get_options()) echo(opt);
    json report{{"schema", kSchemaVersion},
                {"subcommand", sub->get_name()},
                {"config", config},
                {"seed", c.seed},
                {"results", o.results},
                {"pass", o.pass},
                {"wall_time_s", wall},
                {"arithmetic_mode", c.exact ? "exact" : "float"}};
    out << report.dump(2) << '\n';
    if (!c.json_only) err << o.summary << '\n';
    return o.pass ? kPass : kFail;
}

}  // namespace fbl
