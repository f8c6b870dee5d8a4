#pragma once

// Replayable lower-bound certificates: a space, a function, a list of dual
// points and the value sum_i |F(x_i)| they achieve. Emission and replay go
// through the same evaluator, so a replayed value is bit-identical.
//
//   {"schema": 1,
//    "space": {"generators": [...], "ball": "fbl"} or {"generators": [...], "ball_vertices": [[...]]},
//    "function": {"kind": "expr", "expr": <tree>, "text": "..."}
//              | {"kind": "pl", "pl": <PLFunction>}
//              | {"kind": "product", "expr": <tree>, "text": "...", "abs_gen": "a"},
//    "points": [[...]], "value": v, "claimed_norm": c, "mode": "lower" | "exact",
//    "arithmetic": "float" | "exact"}
//
// Exact certificates (expr functions only) store points, value and
// claimed_norm as "p/q" strings.

#include <string>
#include <vector>

#include <json.hpp>

#include "fbl/fblnorm.hpp"

namespace fbl {

inline constexpr int kSchemaVersion = 1;

nlohmann::json space_to_json(const AdmissibilitySpace& s);
AdmissibilitySpace space_from_json(const nlohmann::json& j);

nlohmann::json expr_function(const LatticeExpr& e);
nlohmann::json pl_function(const PLFunction<double>& f);
nlohmann::json product_function(const LatticeExpr& e, const GeneratorId& abs_gen);

/// Evaluator over the space's generator order. Throws std::invalid_argument
/// on an unknown kind or a generator outside the space.
Evaluator make_evaluator(const nlohmann::json& function, const std::vector<GeneratorId>& generators);

nlohmann::json make_certificate(const AdmissibilitySpace& s, const nlohmann::json& function,
                                const std::vector<std::vector<double>>& points, double claimed_norm,
                                const std::string& mode);

/// Exact sum_i |e(x_i)| in rational arithmetic.
Rational exact_config_value(const LatticeExpr& e, const std::vector<GeneratorId>& generators,
                            const std::vector<Vector<Rational>>& points);

nlohmann::json make_exact_certificate(const AdmissibilitySpace& s, const LatticeExpr& e,
                                      const std::vector<Vector<Rational>>& points, const Rational& claimed_norm,
                                      const std::string& mode);

struct ReplayReport {
    bool pass = false;
    bool admissible = false;
    bool value_match = false;
    std::string arithmetic;
    double worst_sum = 0.0;
    nlohmann::json value;       // recomputed, same encoding as the file
    nlohmann::json recorded;    // value field of the file
    std::string message;
};

/// Checks schema, admissibility (<= 1 + 1e-12, exactly <= 1 for exact
/// certificates) and that the recomputed value equals the recorded one bit for bit.
ReplayReport replay_certificate(const nlohmann::json& cert);

}  // namespace fbl
