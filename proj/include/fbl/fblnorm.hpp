#pragma once

// Free Banach lattice norm over a finite generator set:
//
//   ||f|| = sup { sum_i |f(x_i)| : sum_i |<x_i, v>| <= 1 for every ball vertex v }
//
// The ball vertices V describe a polyhedral predual ball; V = {+-e_a} gives
// the free Banach lattice over the generator set itself.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fbl/expr.hpp"
#include "fbl/plfan.hpp"
#include "fbl/scalar.hpp"
#include "fbl/simplex.hpp"

namespace fbl {

struct AdmissibilitySpace {
    std::vector<GeneratorId> generators;
    std::vector<std::vector<double>> ball_vertices;

    std::size_t dimension() const { return generators.size(); }
    /// Throws std::invalid_argument unless V is nonempty, symmetric and spanning.
    void validate() const;
};

AdmissibilitySpace fbl_space(std::vector<GeneratorId> generators);
/// Vertex list of the l1 ball; the same constraint set as fbl_space.
AdmissibilitySpace l1_space(std::vector<GeneratorId> generators);
/// Vertices {+-1}^n of the l-infinity ball.
AdmissibilitySpace linf_space(std::vector<GeneratorId> generators);

struct DualConfig {
    std::vector<std::vector<double>> points;
};

using Evaluator = std::function<double(std::span<const double>)>;

/// sum_i |F(x_i)|, accumulated in point order.
double config_value(const Evaluator& F, const DualConfig& c);

struct AdmissibilityReport {
    bool admissible = true;
    double worst_sum = 0.0;         // max over vertices of sum_i |<x_i, v>|
    std::size_t worst_vertex = 0;   // index into ball_vertices
};

inline constexpr double kAdmissibilityTol = 1e-12;

AdmissibilityReport admissible(const DualConfig& c, const AdmissibilitySpace& s);

template <class T>
T max_vertex_sum(const std::vector<Vector<T>>& points, const AdmissibilitySpace& s);

struct NormDiagnostics {
    std::string method;  // "ray-lp", "cell-lp" or "oracle"
    std::size_t hyperplanes = 0;
    std::size_t rays = 0;
    std::size_t cells = 0;
    std::string lp_status;
    std::size_t lp_iterations = 0;
    std::size_t evaluations = 0;
    std::size_t restarts = 0;
};

template <class T>
struct NormResult {
    T lower{};
    std::vector<Vector<T>> certificate;
    T upper{};
    bool upper_finite = true;  // false: upper is +infinity
    bool exact = false;
    NormDiagnostics diagnostics;
};

using NormBracket = NormResult<double>;

NormBracket to_double(const NormResult<Rational>& r);

inline constexpr std::size_t kDefaultRayCap = 50000;

/// Exact norm of a PL function. Every linearity region of |f| that also fixes
/// the sign of each <v, .> is a pointed cone, so optimal configurations can be
/// taken on the extreme rays of that common refinement; the norm is then one
/// LP with a weight per candidate ray and a row per vertex pair.
template <class T>
NormResult<T> exact_fbl_norm(const PLFunction<T>& f, const AdmissibilitySpace& s, std::size_t ray_cap = kDefaultRayCap);

/// Same norm via one free vector variable per cell of the refinement of |f|
/// by the vertex hyperplanes. Larger LP; kept as an independent cross-check.
template <class T>
NormResult<T> exact_fbl_norm_cells(const PLFunction<T>& f, const AdmissibilitySpace& s,
                                   std::size_t cell_cap = kDefaultCellCap);

class HomogeneityError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct OracleOptions {
    std::size_t budget = 20000;  // over all restarts
    std::uint64_t seed = 0;
    int degree = 1;              // F(l x) = l^degree F(x) for l >= 0
    std::size_t restarts = 4;
};

/// Randomized lower bound from independent restarts. Degree 1: a pool of
/// directions weighted by an LP (the rescaling onto the constraint boundary)
/// and grown by coordinate hill climbing on the reduced cost. Other degrees:
/// coordinate and pair hill climbing on whole configurations, each scored
/// after rescaling. Budget counts evaluations of F (degree 1) or of candidate
/// configurations. The best restart wins, ties going to the lowest index.
NormBracket oracle_lower_bound(const Evaluator& F, const AdmissibilitySpace& s, const OracleOptions& opt = {});

/// Rejects F (HomogeneityError) unless F(l x) = l^degree F(x) on random samples.
void check_homogeneity(const Evaluator& F, std::size_t dimension, int degree, std::uint64_t seed);

struct ProductBoundReport {
    double sup_norm = 0.0;
    NormBracket oracle;
    bool pass = false;
};

/// Bounds the norm of x -> f(x) |x_a| from below by the oracle and compares
/// with the sup norm of f on the cube.
ProductBoundReport check_lemma34(const LatticeExpr& f, const GeneratorId& a, const AdmissibilitySpace& s,
                            const OracleOptions& opt = {});
/// Black-box form; the caller supplies ||f||_inf.
ProductBoundReport check_lemma34(const Evaluator& f, double sup_norm, std::size_t a_index, const AdmissibilitySpace& s,
                            const OracleOptions& opt = {});

struct PolyhedralReport {
    double fbl_norm = 0.0;      // V = {+-e_a}
    double l1_norm = 0.0;       // l1 ball vertex list
    double linf_norm = 0.0;     // V = {+-1}^n
    double linf_oracle = 0.0;   // oracle on the l-infinity space
    bool l1_identity = false;   // fbl_norm == l1_norm within 1e-9
    bool linf_agreement = false;
};

PolyhedralReport fbl_vs_polyhedral_check(const LatticeExpr& e, std::size_t n, const OracleOptions& opt = {});

extern template NormResult<double> exact_fbl_norm<double>(const PLFunction<double>&, const AdmissibilitySpace&,
                                                          std::size_t);
extern template NormResult<Rational> exact_fbl_norm<Rational>(const PLFunction<Rational>&,
                                                               const AdmissibilitySpace&, std::size_t);
extern template NormResult<double> exact_fbl_norm_cells<double>(const PLFunction<double>&,
                                                                const AdmissibilitySpace&, std::size_t);
extern template NormResult<Rational> exact_fbl_norm_cells<Rational>(const PLFunction<Rational>&,
                                                                    const AdmissibilitySpace&, std::size_t);
extern template double max_vertex_sum<double>(const std::vector<Vector<double>>&, const AdmissibilitySpace&);
extern template Rational max_vertex_sum<Rational>(const std::vector<Vector<Rational>>&, const AdmissibilitySpace&);

}  // namespace fbl
