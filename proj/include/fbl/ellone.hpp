#pragma once

// Subsequence extraction with an l1 lower bound. Given functions f_n with
// f_n(x_n) = 1 that tend to zero pointwise, pick indices n_1 < n_2 < ... and
// disjointly supported truncations y_k of x_{n_k} such that
//
//   || sum_k l_k f_{n_k} || >= sum_i | sum_k l_k f_{n_k}(y_i) | >= (1 - eps) sum_k |l_k|.
//
// Pointwise decay cannot be observed at a finite truncation; it is queried
// through a DecayOracle and running out of indices is an ordinary outcome.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fbl/expr.hpp"

namespace fbl {

class EpsilonSchedule {
public:
    /// Throws std::invalid_argument unless 0 < eps < 1.
    explicit EpsilonSchedule(double eps);
    double total() const { return eps_; }
    /// eps * 2^-(i+j), i, j >= 1.
    double operator()(std::size_t i, std::size_t j) const;

private:
    double eps_;
};

EpsilonSchedule schedule(double eps);

/// f(n, x) for 1 <= n <= n_max.
using IndexedEvaluator = std::function<double(std::size_t, std::span<const double>)>;

struct DecayQuery {
    std::size_t stage = 0;  // p: which selected term is being chosen
    std::size_t first = 0;  // smallest admissible position in the m-sequence
    std::size_t last = 0;   // largest built position
};

/// excess(k) = max over the requested evaluations at position k of |value| - bound.
using DecayExcess = std::function<double(std::size_t)>;
/// Returns q in [first, last] with excess(k) <= 0 for every k in [q, last],
/// or nullopt when the truncation gives no such q.
using DecayOracle = std::function<std::optional<std::size_t>(const DecayQuery&, const DecayExcess&)>;

/// Smallest valid q, found by scanning down from the last position.
DecayOracle tail_scan_oracle();

struct ExtractionInput {
    std::vector<GeneratorId> L;
    IndexedEvaluator f;
    std::vector<std::vector<double>> xs;  // xs[n-1] = x_n
    std::size_t n_max = 0;
    DecayOracle decay_oracle = tail_scan_oracle();
    /// Optional symbolic form of f_n, used for norm cross-checks and certificates.
    std::function<LatticeExpr(std::size_t)> expr;
    std::string name;
};

inline constexpr double kHypothesisTol = 1e-9;

struct ExtractionTerm {
    std::size_t n = 0;                // index into the family (m_k)
    std::vector<std::size_t> F;       // coordinate positions into L, sorted
    std::vector<double> y;            // x_n on F, zero elsewhere
    double diagonal = 0.0;            // f_n(y)
    double tolerance = 0.0;           // eps_kk
};

struct TranscriptEntry {
    DecayQuery query;
    std::optional<std::size_t> result;
    std::size_t evaluations = 0;
};

struct ExtractionResult {
    std::string status;              // "ok", "exhausted" or "hypothesis-violation"
    std::string message;
    double epsilon = 0.0;
    std::string f_search = "greedy";
    std::vector<ExtractionTerm> terms;   // pass (a): m_1, m_2, ...
    std::vector<std::size_t> nu;         // pass (b): 1-based positions into terms
    std::vector<std::size_t> selected;   // n_k = m_{nu_k}
    std::vector<TranscriptEntry> transcript;
    std::size_t requested = 0;

    bool ok() const { return status == "ok"; }
    const ExtractionTerm& selected_term(std::size_t k) const { return terms[nu[k] - 1]; }
};

/// Runs both passes. length = 0 selects as many terms as the truncation allows.
/// Throws std::invalid_argument on malformed input (sizes, points outside the cube).
ExtractionResult extract(const ExtractionInput& inp, const EpsilonSchedule& sched, std::size_t length);

struct LowerBoundReport {
    double certified_value = 0.0;
    double bound = 0.0;
    bool pass = false;
};

/// lambdas[k] weights f_{n_k}; lambdas.size() must not exceed the selection.
LowerBoundReport verify_lower_bound(const ExtractionResult& res, const IndexedEvaluator& f,
                                    const std::vector<double>& lambdas);

/// Largest per-coordinate absolute column sum of the selected y's.
double max_column_sum(const ExtractionResult& res);
/// True when no coordinate is nonzero in two selected y's.
bool supports_disjoint(const ExtractionResult& res);

/// f_n = d({n}) on L_N with x_n = chi point n.
ExtractionInput disjoint_instance(int N);
/// f_n = (d({n}) + 2^-n d({1..n})) / (1 + 2^-n) on L_N, so that f_n(x_n) = 1.
ExtractionInput perturbed_instance(int N);

nlohmann::json to_json(const ExtractionResult& res, const std::vector<GeneratorId>& L);

}  // namespace fbl
