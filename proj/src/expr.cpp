#include "fbl/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <functional>
#include <optional>
#include <unordered_map>

namespace fbl {

struct LatticeExpr::Node {
    Kind kind;
    GeneratorId name;
    double c = 0.0;
    std::optional<LatticeExpr> a;
    std::optional<LatticeExpr> b;
};

bool is_valid_generator_name(std::string_view name) {
    if (name.empty()) return false;
    return std::all_of(name.begin(), name.end(), [](char ch) {
        return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_';
    });
}

LatticeExpr LatticeExpr::gen(GeneratorId name) {
    if (!is_valid_generator_name(name)) throw std::invalid_argument("invalid generator name '" + name + "'");
    return LatticeExpr(std::make_shared<const Node>(Node{Kind::Gen, std::move(name), 0.0, std::nullopt, std::nullopt}));
}

LatticeExpr LatticeExpr::scale(double c, const LatticeExpr& child) {
    if (!std::isfinite(c)) throw std::invalid_argument("scalar must be finite");
    return LatticeExpr(std::make_shared<const Node>(Node{Kind::Scale, {}, c, child, std::nullopt}));
}

LatticeExpr LatticeExpr::sum(const LatticeExpr& l, const LatticeExpr& r) {
    return LatticeExpr(std::make_shared<const Node>(Node{Kind::Sum, {}, 0.0, l, r}));
}

LatticeExpr LatticeExpr::join(const LatticeExpr& l, const LatticeExpr& r) {
    return LatticeExpr(std::make_shared<const Node>(Node{Kind::Join, {}, 0.0, l, r}));
}

LatticeExpr LatticeExpr::meet(const LatticeExpr& l, const LatticeExpr& r) {
    return LatticeExpr(std::make_shared<const Node>(Node{Kind::Meet, {}, 0.0, l, r}));
}

LatticeExpr LatticeExpr::abs(const LatticeExpr& e) { return join(e, scale(-1.0, e)); }
LatticeExpr LatticeExpr::neg(const LatticeExpr& e) { return scale(-1.0, e); }

LatticeExpr::Kind LatticeExpr::kind() const { return node_->kind; }

const GeneratorId& LatticeExpr::name() const {
    if (node_->kind != Kind::Gen) throw std::logic_error("name() on non-generator node");
    return node_->name;
}

double LatticeExpr::coefficient() const {
    if (node_->kind != Kind::Scale) throw std::logic_error("coefficient() on non-scale node");
    return node_->c;
}

const LatticeExpr& LatticeExpr::child() const {
    if (node_->kind != Kind::Scale) throw std::logic_error("child() on non-scale node");
    return *node_->a;
}

const LatticeExpr& LatticeExpr::left() const {
    if (!node_->b) throw std::logic_error("left() on non-binary node");
    return *node_->a;
}

const LatticeExpr& LatticeExpr::right() const {
    if (!node_->b) throw std::logic_error("right() on non-binary node");
    return *node_->b;
}

LatticeExpr operator+(const LatticeExpr& l, const LatticeExpr& r) { return LatticeExpr::sum(l, r); }
LatticeExpr operator-(const LatticeExpr& l, const LatticeExpr& r) { return LatticeExpr::sum(l, LatticeExpr::neg(r)); }
LatticeExpr operator-(const LatticeExpr& e) { return LatticeExpr::neg(e); }
LatticeExpr operator*(double c, const LatticeExpr& e) { return LatticeExpr::scale(c, e); }

bool structurally_equal(const LatticeExpr& a, const LatticeExpr& b) {
    if (a.node_id() == b.node_id()) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case LatticeExpr::Kind::Gen: return a.name() == b.name();
        case LatticeExpr::Kind::Scale:
            return a.coefficient() == b.coefficient() && structurally_equal(a.child(), b.child());
        default: return structurally_equal(a.left(), b.left()) && structurally_equal(a.right(), b.right());
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    LatticeExpr parse() {
        Operand v = lattice();
        skip_ws();
        if (pos_ != s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
        return as_expr(v, 0, "expression is a bare number");
    }

private:
    // A parsed operand is either a numeric literal or an expression; numbers
    // only ever meet expressions through '*'.
    struct Operand {
        std::optional<double> number;
        std::optional<LatticeExpr> expr;
        std::size_t pos = 0;
    };

    static LatticeExpr as_expr(const Operand& o, std::size_t pos, const char* msg) {
        if (!o.expr) throw ParseError(msg, pos);
        return *o.expr;
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    void expect(char ch) {
        if (peek() != ch) {
            if (pos_ >= s_.size()) throw ParseError(std::string("expected '") + ch + "' but reached end of input", pos_);
            throw ParseError(std::string("expected '") + ch + "'", pos_);
        }
        ++pos_;
    }

    Operand lattice() {
        peek();
        const std::size_t start = pos_;
        Operand lhs = additive();
        char op = '\0';
        while (true) {
            const char ch = peek();
            if (ch != 'v' && ch != '^') break;
            const std::size_t op_pos = pos_;
            if (op != '\0' && ch != op)
                throw ParseError("mixing 'v' and '^' requires parentheses", op_pos);
            op = ch;
            ++pos_;
            Operand rhs = additive();
            LatticeExpr l = as_expr(lhs, lhs.pos, "lattice operand is a bare number");
            LatticeExpr r = as_expr(rhs, rhs.pos, "lattice operand is a bare number");
            lhs = Operand{std::nullopt, op == 'v' ? LatticeExpr::join(l, r) : LatticeExpr::meet(l, r), start};
        }
        return lhs;
    }

    Operand additive() {
        Operand lhs = term();
        while (true) {
            const char ch = peek();
            if (ch != '+' && ch != '-') break;
            const std::size_t op_pos = pos_;
            ++pos_;
            Operand rhs = term();
            if (!lhs.expr || !rhs.expr) throw ParseError("constant terms are not allowed in sums", op_pos);
            lhs = Operand{std::nullopt,
                          ch == '+' ? LatticeExpr::sum(*lhs.expr, *rhs.expr)
                                    : LatticeExpr::sum(*lhs.expr, LatticeExpr::neg(*rhs.expr)),
                          lhs.pos};
        }
        return lhs;
    }

    Operand term() {
        Operand lhs = unary();
        while (peek() == '*') {
            const std::size_t op_pos = pos_;
            ++pos_;
            Operand rhs = unary();
            if (lhs.number && rhs.number) {
                lhs.number = *lhs.number * *rhs.number;
            } else if (lhs.number) {
                lhs = Operand{std::nullopt, LatticeExpr::scale(*lhs.number, *rhs.expr), lhs.pos};
            } else if (rhs.number) {
                lhs = Operand{std::nullopt, LatticeExpr::scale(*rhs.number, *lhs.expr), lhs.pos};
            } else {
                throw ParseError("product of two expressions is not supported", op_pos);
            }
        }
        return lhs;
    }

    Operand unary() {
        if (peek() == '-') {
            const std::size_t p = pos_;
            ++pos_;
            Operand o = unary();
            if (o.number) return Operand{-*o.number, std::nullopt, p};
            return Operand{std::nullopt, LatticeExpr::neg(*o.expr), p};
        }
        return primary();
    }

    Operand primary() {
        const char ch = peek();
        const std::size_t p = pos_;
        if (ch == '\0') throw ParseError("unexpected end of input", p);
        if (ch == '(') {
            ++pos_;
            Operand inner = lattice();
            expect(')');
            inner.pos = p;
            return inner;
        }
        if (ch == '|') {
            ++pos_;
            Operand inner = lattice();
            expect('|');
            if (inner.number) return Operand{std::fabs(*inner.number), std::nullopt, p};
            return Operand{std::nullopt, LatticeExpr::abs(*inner.expr), p};
        }
        if (ch == 'd') {
            ++pos_;
            expect('(');
            skip_ws();
            const std::size_t name_start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            if (pos_ == name_start) throw ParseError("expected generator name", name_start);
            std::string name(s_.substr(name_start, pos_ - name_start));
            expect(')');
            return Operand{std::nullopt, LatticeExpr::gen(std::move(name)), p};
        }
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') return number();
        throw ParseError(std::string("unknown token '") + ch + "'", p);
    }

    Operand number() {
        const std::size_t p = pos_;
        std::size_t end = pos_;
        while (end < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.')) ++end;
        if (end < s_.size() && (s_[end] == 'e' || s_[end] == 'E')) {
            std::size_t e = end + 1;
            if (e < s_.size() && (s_[e] == '+' || s_[e] == '-')) ++e;
            if (e < s_.size() && std::isdigit(static_cast<unsigned char>(s_[e]))) {
                while (e < s_.size() && std::isdigit(static_cast<unsigned char>(s_[e]))) ++e;
                end = e;
            }
        }
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(s_.data() + p, s_.data() + end, value);
        if (ec != std::errc() || ptr != s_.data() + end) throw ParseError("malformed number", p);
        pos_ = end;
        return Operand{value, std::nullopt, p};
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

}  // namespace

LatticeExpr parse_expr(std::string_view text) { return Parser(text).parse(); }

std::string to_string(const LatticeExpr& e) {
    switch (e.kind()) {
        case LatticeExpr::Kind::Gen: return "d(" + e.name() + ")";
        case LatticeExpr::Kind::Scale: return format_double(e.coefficient()) + "*(" + to_string(e.child()) + ")";
        case LatticeExpr::Kind::Sum: return "(" + to_string(e.left()) + ") + (" + to_string(e.right()) + ")";
        case LatticeExpr::Kind::Join: return "(" + to_string(e.left()) + ") v (" + to_string(e.right()) + ")";
        case LatticeExpr::Kind::Meet: return "(" + to_string(e.left()) + ") ^ (" + to_string(e.right()) + ")";
    }
    return {};
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

nlohmann::json to_json(const LatticeExpr& e) {
    using nlohmann::json;
    switch (e.kind()) {
        case LatticeExpr::Kind::Gen: return json{{"kind", "gen"}, {"name", e.name()}};
        case LatticeExpr::Kind::Scale: return json{{"kind", "scale"}, {"c", e.coefficient()}, {"child", to_json(e.child())}};
        case LatticeExpr::Kind::Sum: return json{{"kind", "sum"}, {"left", to_json(e.left())}, {"right", to_json(e.right())}};
        case LatticeExpr::Kind::Join: return json{{"kind", "join"}, {"left", to_json(e.left())}, {"right", to_json(e.right())}};
        case LatticeExpr::Kind::Meet: return json{{"kind", "meet"}, {"left", to_json(e.left())}, {"right", to_json(e.right())}};
    }
    return {};
}

LatticeExpr expr_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "gen") return LatticeExpr::gen(j.at("name").get<std::string>());
    if (kind == "scale") return LatticeExpr::scale(j.at("c").get<double>(), expr_from_json(j.at("child")));
    if (kind == "sum") return LatticeExpr::sum(expr_from_json(j.at("left")), expr_from_json(j.at("right")));
    if (kind == "join") return LatticeExpr::join(expr_from_json(j.at("left")), expr_from_json(j.at("right")));
    if (kind == "meet") return LatticeExpr::meet(expr_from_json(j.at("left")), expr_from_json(j.at("right")));
    throw std::invalid_argument("unknown expression node kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Support and evaluation
// ---------------------------------------------------------------------------

std::set<GeneratorId> support(const LatticeExpr& e) {
    std::set<GeneratorId> out;
    std::set<const void*> seen;
    std::function<void(const LatticeExpr&)> walk = [&](const LatticeExpr& x) {
        if (!seen.insert(x.node_id()).second) return;
        switch (x.kind()) {
            case LatticeExpr::Kind::Gen: out.insert(x.name()); break;
            case LatticeExpr::Kind::Scale: walk(x.child()); break;
            default:
                walk(x.left());
                walk(x.right());
        }
    };
    walk(e);
    return out;
}

std::vector<GeneratorId> support_list(const LatticeExpr& e) {
    auto s = support(e);
    return {s.begin(), s.end()};
}

CompiledExpr::CompiledExpr(const LatticeExpr& e, std::vector<GeneratorId> dimension) : dimension_(std::move(dimension)) {
    std::map<GeneratorId, std::size_t> index;
    for (std::size_t i = 0; i < dimension_.size(); ++i) index.emplace(dimension_[i], i);
    std::unordered_map<const void*, std::size_t> slot;
    std::function<std::size_t(const LatticeExpr&)> emit = [&](const LatticeExpr& x) -> std::size_t {
        if (auto it = slot.find(x.node_id()); it != slot.end()) return it->second;
        Op op{x.kind()};
        switch (x.kind()) {
            case LatticeExpr::Kind::Gen: {
                auto it = index.find(x.name());
                if (it == index.end()) throw EvaluationError("missing coordinate for generator '" + x.name() + "'");
                op.a = it->second;
                break;
            }
            case LatticeExpr::Kind::Scale:
                op.a = emit(x.child());
                op.c = x.coefficient();
                break;
            default:
                op.a = emit(x.left());
                op.b = emit(x.right());
        }
        program_.push_back(op);
        slot.emplace(x.node_id(), program_.size() - 1);
        return program_.size() - 1;
    };
    emit(e);
}

double CompiledExpr::operator()(std::span<const double> x) const {
    if (x.size() != dimension_.size()) throw EvaluationError("point dimension does not match compiled expression");
    // Small programs dominate; keep them on the stack.
    constexpr std::size_t kInline = 64;
    double inline_buf[kInline];
    std::vector<double> heap;
    double* v = inline_buf;
    if (program_.size() > kInline) {
        heap.resize(program_.size());
        v = heap.data();
    }
    for (std::size_t i = 0; i < program_.size(); ++i) {
        const Op& op = program_[i];
        switch (op.kind) {
            case LatticeExpr::Kind::Gen: v[i] = x[op.a]; break;
            case LatticeExpr::Kind::Scale: v[i] = op.c * v[op.a]; break;
            case LatticeExpr::Kind::Sum: v[i] = v[op.a] + v[op.b]; break;
            case LatticeExpr::Kind::Join: v[i] = std::max(v[op.a], v[op.b]); break;
            case LatticeExpr::Kind::Meet: v[i] = std::min(v[op.a], v[op.b]); break;
        }
    }
    return v[program_.size() - 1];
}

double evaluate(const LatticeExpr& e, const Point& p) {
    std::vector<GeneratorId> dim = support_list(e);
    std::vector<double> x;
    x.reserve(dim.size());
    for (const auto& g : dim) {
        auto it = p.find(g);
        if (it == p.end()) throw EvaluationError("missing coordinate for generator '" + g + "'");
        x.push_back(it->second);
    }
    return CompiledExpr(e, std::move(dim))(x);
}

// ---------------------------------------------------------------------------
// Max-min normal form
// ---------------------------------------------------------------------------

template <class T>
T LinearFunctional<T>::value(const std::map<GeneratorId, T>& p) const {
    T acc(0);
    for (const auto& [g, c] : coeffs) {
        auto it = p.find(g);
        if (it == p.end()) throw EvaluationError("missing coordinate for generator '" + g + "'");
        acc += c * it->second;
    }
    return acc;
}

template <class T>
std::size_t MaxMinForm<T>::functional_count() const {
    std::size_t n = 0;
    for (const auto& g : groups) n += g.size();
    return n;
}

template <class T>
std::vector<LinearFunctional<T>> MaxMinForm<T>::distinct_functionals() const {
    std::vector<LinearFunctional<T>> out;
    for (const auto& g : groups) out.insert(out.end(), g.begin(), g.end());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

template <class T>
T MaxMinForm<T>::value(const std::map<GeneratorId, T>& p) const {
    std::optional<T> best;
    for (const auto& g : groups) {
        std::optional<T> lo;
        for (const auto& f : g) {
            T v = f.value(p);
            if (!lo || v < *lo) lo = std::move(v);
        }
        if (!best || *lo > *best) best = std::move(*lo);
    }
    if (!best) throw EvaluationError("empty max-min form");
    return *best;
}

namespace {

template <class T>
using Group = std::vector<LinearFunctional<T>>;

template <class T>
LinearFunctional<T> scaled(const LinearFunctional<T>& f, const T& c) {
    LinearFunctional<T> out;
    if (c == 0) return out;
    for (const auto& [g, v] : f.coeffs) out.coeffs.emplace(g, v * c);
    return out;
}

template <class T>
LinearFunctional<T> added(const LinearFunctional<T>& a, const LinearFunctional<T>& b) {
    LinearFunctional<T> out = a;
    for (const auto& [g, v] : b.coeffs) {
        auto [it, inserted] = out.coeffs.emplace(g, v);
        if (!inserted) {
            it->second += v;
            if (it->second == 0) out.coeffs.erase(it);
        }
    }
    return out;
}

// Canonical form: sorted unique groups of sorted unique functionals, with any
// group that contains another group dropped (its min can never be the max).
template <class T>
MaxMinForm<T> reduced(std::vector<Group<T>> groups) {
    for (auto& g : groups) {
        std::sort(g.begin(), g.end());
        g.erase(std::unique(g.begin(), g.end()), g.end());
    }
    std::sort(groups.begin(), groups.end(), [](const Group<T>& a, const Group<T>& b) {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    });
    groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
    std::vector<Group<T>> kept;
    for (auto& g : groups) {
        bool dominated = false;
        for (const auto& k : kept) {
            if (std::includes(g.begin(), g.end(), k.begin(), k.end())) {
                dominated = true;
                break;
            }
        }
        if (!dominated) kept.push_back(std::move(g));
    }
    return MaxMinForm<T>{std::move(kept)};
}

std::size_t checked_mul(std::size_t a, std::size_t b, std::size_t cap) {
    if (a != 0 && b > cap / a + 1) return cap + 1;
    return a * b;
}

template <class T>
class MaxMinBuilder {
public:
    explicit MaxMinBuilder(std::size_t cap) : cap_(cap) {}

    const MaxMinForm<T>& build(const LatticeExpr& e) {
        if (auto it = memo_.find(e.node_id()); it != memo_.end()) return it->second;
        MaxMinForm<T> out;
        switch (e.kind()) {
            case LatticeExpr::Kind::Gen: {
                LinearFunctional<T> f;
                f.coeffs.emplace(e.name(), T(1));
                out.groups = {{f}};
                break;
            }
            case LatticeExpr::Kind::Scale: out = scale(build(e.child()), from_double<T>(e.coefficient())); break;
            case LatticeExpr::Kind::Sum: out = sum(build(e.left()), build(e.right())); break;
            case LatticeExpr::Kind::Join: {
                std::vector<Group<T>> gs = build(e.left()).groups;
                const auto& r = build(e.right()).groups;
                gs.insert(gs.end(), r.begin(), r.end());
                check(total(gs));
                out = reduced(std::move(gs));
                break;
            }
            case LatticeExpr::Kind::Meet: out = meet(build(e.left()), build(e.right())); break;
        }
        check(out.functional_count());
        return memo_.emplace(e.node_id(), std::move(out)).first->second;
    }

private:
    static std::size_t total(const std::vector<Group<T>>& gs) {
        std::size_t n = 0;
        for (const auto& g : gs) n += g.size();
        return n;
    }

    void check(std::size_t n) const {
        if (n > cap_) throw CapExceeded("max-min form", n, cap_);
    }

    MaxMinForm<T> scale(const MaxMinForm<T>& m, const T& c) {
        if (c == 0) return MaxMinForm<T>{{{LinearFunctional<T>{}}}};
        if (c > 0) {
            std::vector<Group<T>> gs;
            for (const auto& g : m.groups) {
                Group<T> ng;
                for (const auto& f : g) ng.push_back(scaled(f, c));
                gs.push_back(std::move(ng));
            }
            return reduced(std::move(gs));
        }
        // -max_i min_j l_ij = min_i max_j (-l_ij) = max over selections s of min_i (-l_{i,s(i)})
        std::size_t selections = 1;
        for (const auto& g : m.groups) selections = checked_mul(selections, g.size(), cap_);
        check(checked_mul(selections, m.groups.size(), cap_));
        std::vector<Group<T>> gs;
        std::vector<std::size_t> choice(m.groups.size(), 0);
        while (true) {
            Group<T> ng;
            for (std::size_t i = 0; i < m.groups.size(); ++i) ng.push_back(scaled(m.groups[i][choice[i]], c));
            gs.push_back(std::move(ng));
            std::size_t i = 0;
            while (i < choice.size() && ++choice[i] == m.groups[i].size()) choice[i++] = 0;
            if (i == choice.size()) break;
        }
        return reduced(std::move(gs));
    }

    MaxMinForm<T> sum(const MaxMinForm<T>& a, const MaxMinForm<T>& b) {
        std::size_t n = 0;
        for (const auto& ga : a.groups)
            for (const auto& gb : b.groups) n += checked_mul(ga.size(), gb.size(), cap_);
        check(n);
        std::vector<Group<T>> gs;
        for (const auto& ga : a.groups) {
            for (const auto& gb : b.groups) {
                Group<T> ng;
                for (const auto& fa : ga)
                    for (const auto& fb : gb) ng.push_back(added(fa, fb));
                gs.push_back(std::move(ng));
            }
        }
        return reduced(std::move(gs));
    }

    MaxMinForm<T> meet(const MaxMinForm<T>& a, const MaxMinForm<T>& b) {
        std::size_t n = 0;
        for (const auto& ga : a.groups)
            for (const auto& gb : b.groups) n += ga.size() + gb.size();
        check(n);
        std::vector<Group<T>> gs;
        for (const auto& ga : a.groups) {
            for (const auto& gb : b.groups) {
                Group<T> ng = ga;
                ng.insert(ng.end(), gb.begin(), gb.end());
                gs.push_back(std::move(ng));
            }
        }
        return reduced(std::move(gs));
    }

    std::size_t cap_;
    std::unordered_map<const void*, MaxMinForm<T>> memo_;
};

}  // namespace

template <class T>
MaxMinForm<T> to_maxmin(const LatticeExpr& e, std::size_t cap) {
    MaxMinBuilder<T> builder(cap);
    return builder.build(e);
}

template struct LinearFunctional<double>;
template struct LinearFunctional<Rational>;
template struct MaxMinForm<double>;
template struct MaxMinForm<Rational>;
template MaxMinForm<double> to_maxmin<double>(const LatticeExpr&, std::size_t);
template MaxMinForm<Rational> to_maxmin<Rational>(const LatticeExpr&, std::size_t);

}  // namespace fbl
