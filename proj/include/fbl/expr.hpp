#pragma once

// Lattice expressions over evaluation generators d(a): sums, real scalings,
// joins (v) and meets (^). Trees are immutable and may share subterms, which
// is how |e| = e v (-1*e) is represented without copying e.

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fbl/scalar.hpp"

namespace fbl {

using GeneratorId = std::string;
using Point = std::map<GeneratorId, double>;

bool is_valid_generator_name(std::string_view name);

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t position)
        : std::runtime_error(what + " at position " + std::to_string(position)), position_(position) {}
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CapExceeded : public std::runtime_error {
public:
    CapExceeded(const std::string& what, std::size_t size, std::size_t cap)
        : std::runtime_error(what + ": size " + std::to_string(size) + " exceeds cap " + std::to_string(cap)),
          size_(size),
          cap_(cap) {}
    std::size_t size() const { return size_; }
    std::size_t cap() const { return cap_; }

private:
    std::size_t size_;
    std::size_t cap_;
};

class LatticeExpr {
public:
    enum class Kind { Gen, Scale, Sum, Join, Meet };

    static LatticeExpr gen(GeneratorId name);
    static LatticeExpr scale(double c, const LatticeExpr& child);
    static LatticeExpr sum(const LatticeExpr& l, const LatticeExpr& r);
    static LatticeExpr join(const LatticeExpr& l, const LatticeExpr& r);
    static LatticeExpr meet(const LatticeExpr& l, const LatticeExpr& r);
    static LatticeExpr abs(const LatticeExpr& e);  // e v (-1*e)
    static LatticeExpr neg(const LatticeExpr& e);  // -1*e

    Kind kind() const;
    const GeneratorId& name() const;   // Gen only
    double coefficient() const;        // Scale only
    const LatticeExpr& child() const;  // Scale only
    const LatticeExpr& left() const;   // Sum/Join/Meet
    const LatticeExpr& right() const;  // Sum/Join/Meet

    // Identity of the underlying node; shared subterms compare equal.
    const void* node_id() const { return node_.get(); }

private:
    struct Node;
    explicit LatticeExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

LatticeExpr operator+(const LatticeExpr& l, const LatticeExpr& r);
LatticeExpr operator-(const LatticeExpr& l, const LatticeExpr& r);
LatticeExpr operator-(const LatticeExpr& e);
LatticeExpr operator*(double c, const LatticeExpr& e);

bool structurally_equal(const LatticeExpr& a, const LatticeExpr& b);

/// Parses the expression grammar: 'v'/'^' bind loosest and may not be mixed
/// without parentheses, then '+'/'-', then '*', then atoms d(name), numbers,
/// |expr| and (expr).
LatticeExpr parse_expr(std::string_view text);

/// Fully parenthesized text that parses back to a structurally equal tree.
std::string to_string(const LatticeExpr& e);

nlohmann::json to_json(const LatticeExpr& e);
LatticeExpr expr_from_json(const nlohmann::json& j);

/// Syntactic support: every generator that occurs in the tree.
std::set<GeneratorId> support(const LatticeExpr& e);
std::vector<GeneratorId> support_list(const LatticeExpr& e);

double evaluate(const LatticeExpr& e, const Point& p);

/// Expression flattened into a DAG program over a fixed coordinate order.
/// Shared subterms are evaluated once per call.
class CompiledExpr {
public:
    CompiledExpr(const LatticeExpr& e, std::vector<GeneratorId> dimension);

    double operator()(std::span<const double> x) const;
    const std::vector<GeneratorId>& dimension() const { return dimension_; }

private:
    struct Op {
        LatticeExpr::Kind kind;
        std::size_t a = 0;  // coordinate index for Gen, operand slot otherwise
        std::size_t b = 0;
        double c = 0.0;
    };
    std::vector<GeneratorId> dimension_;
    std::vector<Op> program_;
};

template <class T>
struct LinearFunctional {
    std::map<GeneratorId, T> coeffs;  // zero coefficients are never stored

    T value(const std::map<GeneratorId, T>& p) const;
    bool operator==(const LinearFunctional& o) const { return coeffs == o.coeffs; }
    bool operator<(const LinearFunctional& o) const { return coeffs < o.coeffs; }
};

/// max over groups of (min over the group's functionals).
template <class T>
struct MaxMinForm {
    std::vector<std::vector<LinearFunctional<T>>> groups;

    std::size_t functional_count() const;
    std::vector<LinearFunctional<T>> distinct_functionals() const;
    T value(const std::map<GeneratorId, T>& p) const;
};

inline constexpr std::size_t kDefaultMaxMinCap = 10000;

/// Distributes +, scalars and v/^ down to a max-min combination of linear
/// functionals. Throws CapExceeded when the form would exceed `cap`
/// functionals in total.
template <class T>
MaxMinForm<T> to_maxmin(const LatticeExpr& e, std::size_t cap = kDefaultMaxMinCap);

extern template struct LinearFunctional<double>;
extern template struct LinearFunctional<Rational>;
extern template struct MaxMinForm<double>;
extern template struct MaxMinForm<Rational>;
extern template MaxMinForm<double> to_maxmin<double>(const LatticeExpr&, std::size_t);
extern template MaxMinForm<Rational> to_maxmin<Rational>(const LatticeExpr&, std::size_t);

}  // namespace fbl
