#pragma once

// Finite-rank lattice homomorphisms out of FBL(A), represented as weighted
// point evaluations f -> (c_j f(x_j))_j, and the quotient map Phi_N onto a
// truncation of c0.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "fbl/expr.hpp"

namespace fbl {

struct EvalTarget {
    double weight = 1.0;
    std::vector<double> point;  // coordinates in the homomorphism's generator order
};

class EvalHom {
public:
    /// Throws std::invalid_argument on a negative weight, a point outside the
    /// cube, or a dimension mismatch.
    EvalHom(std::vector<GeneratorId> generators, std::vector<EvalTarget> targets, std::string codomain);

    const std::vector<GeneratorId>& generators() const { return generators_; }
    const std::vector<EvalTarget>& targets() const { return targets_; }
    const std::string& codomain() const { return codomain_; }
    std::size_t rank() const { return targets_.size(); }

private:
    std::vector<GeneratorId> generators_;
    std::vector<EvalTarget> targets_;
    std::string codomain_;
};

/// Component j is c_j * e(x_j). Throws std::invalid_argument when e uses a
/// generator outside h's generator list.
std::vector<double> apply_hom(const EvalHom& h, const LatticeExpr& e);

struct PhiInstance {
    int N = 0;
    std::vector<std::vector<int>> subsets;       // L_N in bitmask order: {1}, {2}, {1,2}, {3}, ...
    std::vector<GeneratorId> generators;         // one name per subset, e.g. "s1_3"
    std::vector<std::vector<double>> chi_points; // chi_points[n-1][A] = 1 iff n in A
    EvalHom hom;
};

inline constexpr int kMaxPhiN = 12;

/// Generator name of a finite subset, e.g. {1,3} -> "s1_3".
GeneratorId subset_generator(const std::vector<int>& subset);
/// Position of a subset in L_N (bitmask order); the subset must be nonempty.
std::size_t subset_index(const std::vector<int>& subset);

PhiInstance build_phi(int N);

struct HomLawReport {
    std::size_t checks = 0;
    double worst_residual = 0.0;
    std::vector<std::string> failures;  // "<law> pair <i> component <j>: residual r"
    bool pass() const { return failures.empty(); }
};

/// Checks h(e v g) = h(e) v h(g), h(e ^ g) = h(e) ^ h(g), h(e + g) = h(e) + h(g)
/// and h(l e) = l h(e) for a few scalars l, componentwise within
/// 1e-12 * max(1, |value|).
HomLawReport check_hom_laws(const EvalHom& h, const std::vector<std::pair<LatticeExpr, LatticeExpr>>& pairs);

}  // namespace fbl
