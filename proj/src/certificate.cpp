#include "fbl/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

namespace fbl {

namespace {

bool is_fbl_ball(const AdmissibilitySpace& s) {
    const auto ref = fbl_space(s.generators);
    return s.ball_vertices == ref.ball_vertices;
}

std::size_t generator_position(const std::vector<GeneratorId>& gens, const GeneratorId& g) {
    auto it = std::find(gens.begin(), gens.end(), g);
    if (it == gens.end()) throw std::invalid_argument("generator '" + g + "' is not in the space");
    return static_cast<std::size_t>(it - gens.begin());
}

Rational rational_from_string(const std::string& s) { return Rational(s); }

}  // namespace

nlohmann::json space_to_json(const AdmissibilitySpace& s) {
    nlohmann::json j;
    j["generators"] = s.generators;
    if (is_fbl_ball(s))
        j["ball"] = "fbl";
    else
        j["ball_vertices"] = s.ball_vertices;
    return j;
}

AdmissibilitySpace space_from_json(const nlohmann::json& j) {
    auto gens = j.at("generators").get<std::vector<GeneratorId>>();
    if (j.contains("ball")) {
        if (j.at("ball") != "fbl") throw std::invalid_argument("unknown ball kind");
        return fbl_space(std::move(gens));
    }
    AdmissibilitySpace s{std::move(gens), j.at("ball_vertices").get<std::vector<std::vector<double>>>()};
    s.validate();
    return s;
}

nlohmann::json expr_function(const LatticeExpr& e) {
    return {{"kind", "expr"}, {"expr", to_json(e)}, {"text", to_string(e)}};
}

nlohmann::json pl_function(const PLFunction<double>& f) { return {{"kind", "pl"}, {"pl", to_json(f)}}; }

nlohmann::json product_function(const LatticeExpr& e, const GeneratorId& abs_gen) {
    return {{"kind", "product"}, {"expr", to_json(e)}, {"text", to_string(e)}, {"abs_gen", abs_gen}};
}

Evaluator make_evaluator(const nlohmann::json& function, const std::vector<GeneratorId>& generators) {
    const std::string kind = function.at("kind");
    if (kind == "expr") {
        auto e = expr_from_json(function.at("expr"));
        for (const auto& g : support(e)) generator_position(generators, g);
        auto c = std::make_shared<CompiledExpr>(e, generators);
        return [c](std::span<const double> x) { return (*c)(x); };
    }
    if (kind == "product") {
        auto e = expr_from_json(function.at("expr"));
        for (const auto& g : support(e)) generator_position(generators, g);
        const std::size_t a = generator_position(generators, function.at("abs_gen").get<std::string>());
        auto c = std::make_shared<CompiledExpr>(e, generators);
        return [c, a](std::span<const double> x) { return (*c)(x) * std::fabs(x[a]); };
    }
    if (kind == "pl") {
        auto f = std::make_shared<PLFunction<double>>(pl_from_json(function.at("pl")));
        if (f->dimension() != generators) throw std::invalid_argument("PL function dimension differs from the space");
        return [f](std::span<const double> x) { return f->evaluate(x); };
    }
    throw std::invalid_argument("unknown function kind '" + kind + "'");
}

nlohmann::json make_certificate(const AdmissibilitySpace& s, const nlohmann::json& function,
                                const std::vector<std::vector<double>>& points, double claimed_norm,
                                const std::string& mode) {
    const auto F = make_evaluator(function, s.generators);
    nlohmann::json j;
    j["schema"] = kSchemaVersion;
    j["space"] = space_to_json(s);
    j["function"] = function;
    j["points"] = points;
    j["value"] = config_value(F, DualConfig{points});
    j["claimed_norm"] = claimed_norm;
    j["mode"] = mode;
    j["arithmetic"] = "float";
    return j;
}

Rational exact_config_value(const LatticeExpr& e, const std::vector<GeneratorId>& generators,
                            const std::vector<Vector<Rational>>& points) {
    const auto f = pl_from_expr<Rational>(e, generators);
    Rational total = 0;
    for (const auto& p : points) {
        if (p.size() != generators.size()) throw std::invalid_argument("point dimension differs from the space");
        const Rational v = f.evaluate(p);
        total += v < 0 ? Rational(-v) : v;
    }
    return total;
}

nlohmann::json make_exact_certificate(const AdmissibilitySpace& s, const LatticeExpr& e,
                                      const std::vector<Vector<Rational>>& points, const Rational& claimed_norm,
                                      const std::string& mode) {
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : points) {
        nlohmann::json row = nlohmann::json::array();
        for (const auto& v : p) row.push_back(v.str());
        pts.push_back(row);
    }
    nlohmann::json j;
    j["schema"] = kSchemaVersion;
    j["space"] = space_to_json(s);
    j["function"] = expr_function(e);
    j["points"] = pts;
    j["value"] = exact_config_value(e, s.generators, points).str();
    j["claimed_norm"] = claimed_norm.str();
    j["mode"] = mode;
    j["arithmetic"] = "exact";
    return j;
}

ReplayReport replay_certificate(const nlohmann::json& cert) {
    ReplayReport rep;
    try {
        if (cert.at("schema").get<int>() != kSchemaVersion)
            throw std::invalid_argument("unsupported schema version");
        const auto s = space_from_json(cert.at("space"));
        const std::string mode = cert.at("mode");
        if (mode != "lower" && mode != "exact") throw std::invalid_argument("mode must be 'lower' or 'exact'");
        rep.arithmetic = cert.value("arithmetic", "float");
        rep.recorded = cert.at("value");
        if (rep.arithmetic == "exact") {
            if (cert.at("function").at("kind") != "expr")
                throw std::invalid_argument("exact certificates need an expr function");
            const auto e = expr_from_json(cert.at("function").at("expr"));
            std::vector<Vector<Rational>> pts;
            for (const auto& row : cert.at("points")) {
                Vector<Rational> p;
                for (const auto& v : row) p.push_back(rational_from_string(v.get<std::string>()));
                pts.push_back(std::move(p));
            }
            const Rational worst = max_vertex_sum<Rational>(pts, s);
            rep.worst_sum = worst.convert_to<double>();
            rep.admissible = worst <= 1;
            rep.value = exact_config_value(e, s.generators, pts).str();
        } else if (rep.arithmetic == "float") {
            const auto F = make_evaluator(cert.at("function"), s.generators);
            DualConfig c{cert.at("points").get<std::vector<std::vector<double>>>()};
            for (const auto& p : c.points)
                if (p.size() != s.dimension()) throw std::invalid_argument("point dimension differs from the space");
            const auto adm = admissible(c, s);
            rep.admissible = adm.admissible;
            rep.worst_sum = adm.worst_sum;
            rep.value = config_value(F, c);
        } else {
            throw std::invalid_argument("arithmetic must be 'float' or 'exact'");
        }
        rep.value_match = rep.value == rep.recorded;
        rep.pass = rep.admissible && rep.value_match;
        if (!rep.admissible) rep.message = "configuration is not admissible";
        else if (!rep.value_match) rep.message = "recomputed value differs from the recorded value";
    } catch (const std::exception& ex) {
        rep.pass = false;
        rep.message = ex.what();
    }
    return rep;
}

}  // namespace fbl
