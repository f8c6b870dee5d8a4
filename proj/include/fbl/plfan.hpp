#pragma once

// Positively homogeneous piecewise-linear functions on R^n, stored as a
// complete central hyperplane arrangement (the fan) with one linear piece per
// full-dimensional cell.
//
// Cells are identified by sign strings over the ordered hyperplane list, e.g.
// "+-+". Every cell carries a witness: a point of the open cube that satisfies
// each of its sign constraints strictly.

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbl/expr.hpp"
#include "fbl/scalar.hpp"

namespace fbl {

template <class T>
using Vector = std::vector<T>;

class DegenerateHyperplane : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when an invariant of the construction itself breaks (e.g. an LP over
/// a cell that should be feasible is not).
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

inline constexpr std::size_t kDefaultCellCap = 100000;

template <class T>
struct Cone {
    std::string signs;
    Vector<T> witness;
};

template <class T>
struct Fan {
    std::vector<GeneratorId> dimension;
    std::vector<Vector<T>> hyperplanes;  // normals, first nonzero entry is +1
    std::vector<Cone<T>> cells;

    /// '+', '-' or '0' per hyperplane.
    std::string sign_vector(std::span<const T> x) const;
    /// Index of a cell whose closure contains x; zero signs act as wildcards.
    std::size_t locate(std::span<const T> x) const;
    std::size_t index_of(const std::string& signs) const;
    void rebuild_index();

    std::map<std::string, std::size_t> index;  // sign string -> cell
};

template <class T>
struct PLFunction {
    Fan<T> fan;
    std::vector<Vector<T>> pieces;  // one dense linear functional per cell

    const std::vector<GeneratorId>& dimension() const { return fan.dimension; }
    T evaluate(std::span<const T> x) const;
};

/// Scales a normal so its first nonzero coordinate is +1. Throws
/// DegenerateHyperplane when every coordinate is zero.
template <class T>
Vector<T> normalize_hyperplane(const Vector<T>& normal);

template <class T>
Vector<T> dense(const LinearFunctional<T>& f, const std::vector<GeneratorId>& dimension);
template <class T>
LinearFunctional<T> sparse(const Vector<T>& coeffs, const std::vector<GeneratorId>& dimension);

template <class T>
T dot(std::span<const T> a, std::span<const T> b);

/// Full-dimensional cells of the central arrangement, found by splitting cells
/// hyperplane by hyperplane and confirming each candidate side with a
/// max-margin feasibility LP. Deterministic; complete for every input size.
template <class T>
Fan<T> arrangement_fan(const std::vector<Vector<T>>& hyperplanes, const std::vector<GeneratorId>& dimension,
                       std::size_t cell_cap = kDefaultCellCap);
template <class T>
Fan<T> arrangement_fan(const std::vector<LinearFunctional<T>>& hyperplanes, const std::vector<GeneratorId>& dimension,
                       std::size_t cell_cap = kDefaultCellCap);

template <class T>
PLFunction<T> pl_from_maxmin(const MaxMinForm<T>& m, const std::vector<GeneratorId>& dimension,
                             std::size_t cell_cap = kDefaultCellCap);

/// Convenience: parse-free path from an expression to its PL function over
/// `dimension` (defaults to the expression's support).
template <class T>
PLFunction<T> pl_from_expr(const LatticeExpr& e, std::vector<GeneratorId> dimension = {},
                           std::size_t cell_cap = kDefaultCellCap);

/// max over the cube [-1,1]^n of |f|, one pair of LPs per cell.
template <class T>
T sup_norm_on_cube(const PLFunction<T>& f);

/// Refines the fan by additional hyperplanes; pieces are inherited.
template <class T>
PLFunction<T> refine_with_hyperplanes(const PLFunction<T>& f, const std::vector<Vector<T>>& extra,
                                      std::size_t cell_cap = kDefaultCellCap);

/// Refinement in which f has constant sign on every cell.
template <class T>
PLFunction<T> refine_by_zero_set(const PLFunction<T>& f, std::size_t cell_cap = kDefaultCellCap);

template <class T>
bool pl_equal(const PLFunction<T>& f, const PLFunction<T>& g);

enum class PLOp { Max, Min, Sum };

template <class T>
PLFunction<T> pl_combine(const PLFunction<T>& f, const PLFunction<T>& g, PLOp op,
                         std::size_t cell_cap = kDefaultCellCap);
template <class T>
PLFunction<T> pl_scale(const PLFunction<T>& f, const T& c);

/// Every distinct hyperplane on which f may change slope or sign: the fan's
/// hyperplanes plus the zero sets of the nonzero pieces.
template <class T>
std::vector<Vector<T>> breakpoint_hyperplanes(const PLFunction<T>& f);

/// Appends `extra` to `base` skipping hyperplanes already present.
template <class T>
void merge_hyperplanes(std::vector<Vector<T>>& base, const std::vector<Vector<T>>& extra);

PLFunction<double> to_double(const PLFunction<Rational>& f);

nlohmann::json to_json(const PLFunction<double>& f);
PLFunction<double> pl_from_json(const nlohmann::json& j);

#define FBL_PLFAN_EXTERN(T)                                                                                         \
    extern template struct Fan<T>;                                                                                  \
    extern template struct PLFunction<T>;                                                                           \
    extern template Vector<T> normalize_hyperplane<T>(const Vector<T>&);                                            \
    extern template Vector<T> dense<T>(const LinearFunctional<T>&, const std::vector<GeneratorId>&);                \
    extern template LinearFunctional<T> sparse<T>(const Vector<T>&, const std::vector<GeneratorId>&);               \
    extern template T dot<T>(std::span<const T>, std::span<const T>);                                               \
    extern template Fan<T> arrangement_fan<T>(const std::vector<Vector<T>>&, const std::vector<GeneratorId>&,       \
                                              std::size_t);                                                         \
    extern template Fan<T> arrangement_fan<T>(const std::vector<LinearFunctional<T>>&,                              \
                                              const std::vector<GeneratorId>&, std::size_t);                        \
    extern template PLFunction<T> pl_from_maxmin<T>(const MaxMinForm<T>&, const std::vector<GeneratorId>&,          \
                                                    std::size_t);                                                   \
    extern template PLFunction<T> pl_from_expr<T>(const LatticeExpr&, std::vector<GeneratorId>, std::size_t);       \
    extern template T sup_norm_on_cube<T>(const PLFunction<T>&);                                                    \
    extern template PLFunction<T> refine_with_hyperplanes<T>(const PLFunction<T>&, const std::vector<Vector<T>>&,   \
                                                             std::size_t);                                          \
    extern template PLFunction<T> refine_by_zero_set<T>(const PLFunction<T>&, std::size_t);                         \
    extern template bool pl_equal<T>(const PLFunction<T>&, const PLFunction<T>&);                                   \
    extern template PLFunction<T> pl_combine<T>(const PLFunction<T>&, const PLFunction<T>&, PLOp, std::size_t);     \
    extern template PLFunction<T> pl_scale<T>(const PLFunction<T>&, const T&);                                      \
    extern template std::vector<Vector<T>> breakpoint_hyperplanes<T>(const PLFunction<T>&);                         \
    extern template void merge_hyperplanes<T>(std::vector<Vector<T>>&, const std::vector<Vector<T>>&);

FBL_PLFAN_EXTERN(double)
FBL_PLFAN_EXTERN(Rational)
#undef FBL_PLFAN_EXTERN

}  // namespace fbl
