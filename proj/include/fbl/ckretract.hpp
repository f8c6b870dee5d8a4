#pragma once

// Lattice section S : C(K) -> FBL({one, id}) for compact K in [0,1] made of
// finitely many closed intervals. With s = x_one, t = x_id,
//
//   v(s, t) = (1, clip(t/s, -1, 1)),   Sh(s, t) = |s| * u(tau) * h(phi(tau)),  tau = clip(t/s, -1, 1)
//
// where u, phi on the slice {s = 1} are explicit: phi retracts the slice onto
// K, and u vanishes wherever phi jumps. Sh is assembled exactly as a PL
// function on the cones cut out by s = 0 and t = beta*s, beta a breakpoint of
// the slice function.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbl/fblnorm.hpp"
#include "fbl/plfan.hpp"
#include "fbl/scalar.hpp"

namespace fbl {

/// Accepts integers, decimals ("-0.25") and fractions ("1/3"), exactly.
Rational parse_rational(const std::string& text);

struct ClosedInterval {
    Rational lo, hi;
};

struct KSpec {
    enum class Kind { Interval01, TwoPoints, UnionOfIntervals };
    Kind kind = Kind::Interval01;
    std::vector<ClosedInterval> intervals;  // ordered, disjoint, inside [0,1]

    static KSpec interval01();
    static KSpec two_points();
    static KSpec union_of(std::vector<ClosedInterval> intervals);

    /// Throws std::invalid_argument unless nonempty, ordered, disjoint, in [0,1].
    void validate() const;
    bool contains(const Rational& k) const;
    std::string label() const;
};

/// "interval", "twopoints" or "union:a1,b1;a2,b2".
KSpec parse_kspec(const std::string& text);

/// Piecewise-linear h on K: on each interval of K, linear interpolation
/// between the breakpoints inside it, constant beyond the outermost ones.
struct TargetFunction {
    std::vector<Rational> breakpoints;  // increasing
    std::vector<Rational> values;

    /// Throws std::invalid_argument unless every breakpoint lies in K and every
    /// interval of K holds at least one breakpoint.
    void validate(const KSpec& K) const;
    Rational evaluate(const KSpec& K, const Rational& k) const;
    double evaluate(const KSpec& K, double k) const;
    Rational sup_norm() const;
};

/// "k1:v1,k2:v2,..." with rational k and v.
TargetFunction parse_target(const std::string& text);

inline const std::vector<GeneratorId> kSectionGenerators{"one", "id"};

struct SectionBundle {
    KSpec K;
    TargetFunction h;
    std::vector<Rational> slice_breaks;  // breakpoints of tau -> u(tau) h(phi(tau)) on [-1,1]
    std::vector<Rational> slice_values;
    PLFunction<Rational> Sh_exact;
    PLFunction<double> Sh;

    /// Slice maps, tau in [-1,1].
    double u(double tau) const;
    double phi(double tau) const;
    /// f on the slice: u(tau) h(phi(tau)), 0 where u = 0.
    double f_slice(double tau) const;
    std::array<double, 2> v(double s, double t) const;
    /// |s| f(v(s,t)) evaluated straight from u, phi, v and h; Sh must agree.
    double pipeline(double s, double t) const;
};

SectionBundle build_section(const KSpec& K, const TargetFunction& h);

struct SectionReport {
    std::size_t checks = 0;
    double worst = 0.0;
    std::vector<std::string> failures;
    bool pass() const { return failures.empty(); }
};

/// Sh(1, k) = h(k), u(k) = 1, phi(k) = k at every breakpoint and `samples`
/// random k in K; exact for two points, 1e-12 otherwise. Also v(l x) = v(x).
SectionReport verify_section(const SectionBundle& b, std::size_t samples, std::uint64_t seed = 0);

/// Sh(l s, l t) = l Sh(s, t) and |Sh(s,t)| <= ||h||_inf |s| on random points, 1e-12.
SectionReport verify_homogeneity(const SectionBundle& b, std::size_t samples, std::uint64_t seed = 0);

struct NormBoundReport {
    double norm = 0.0;           // exact FBL({one, id}) norm of Sh
    double h_sup = 0.0;
    double f_slice_sup = 0.0;    // sampled
    std::vector<std::vector<double>> certificate;
    bool pass = false;           // norm <= h_sup + 1e-9
    std::string scope = "two-generator";
};

NormBoundReport verify_norm_bound(const SectionBundle& b);

/// h1 v h2, h1 + h2 and c*h1 as target functions on K, with crossing points added.
TargetFunction target_join(const KSpec& K, const TargetFunction& a, const TargetFunction& b);
TargetFunction target_sum(const KSpec& K, const TargetFunction& a, const TargetFunction& b);
TargetFunction target_scale(const TargetFunction& a, const Rational& c);

/// S(h1 v h2) = S(h1) v S(h2), S(h1 + h2) = S(h1) + S(h2), S(c h1) = c S(h1),
/// compared exactly with pl_equal and at `samples` random points.
SectionReport verify_hom_laws(const KSpec& K, const std::vector<std::pair<TargetFunction, TargetFunction>>& pairs,
                              std::size_t samples = 10000, std::uint64_t seed = 0);

struct Approximant {
    std::function<double(std::span<const double>)> f_plus;  // on slice coordinates
    std::function<double(std::span<const double>)> f_n;     // x -> f_plus(v(x)), x = (s, slice coords)
    double deviation = 0.0;                                  // max |f_slice - f_plus| over samples
};

/// Multilinear interpolation of a slice function on a uniform grid over the
/// chosen coordinates of [-1,1]^d; other coordinates are frozen at 0. The
/// slice coordinates of a section bundle are just {id}.
Approximant finite_coordinate_approximant(const std::function<double(std::span<const double>)>& f_slice,
                                          std::size_t slice_dimension, const std::vector<std::size_t>& coords,
                                          std::size_t grid, std::uint64_t seed = 0);

nlohmann::json to_json(const SectionBundle& b);

}  // namespace fbl
