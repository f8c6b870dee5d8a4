#include "fbl/ckretract.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace fbl {

Rational parse_rational(const std::string& text) {
    std::string s = text;
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    if (s.empty()) throw std::invalid_argument("empty number");
    bool neg = false;
    std::size_t i = 0;
    if (s[0] == '+' || s[0] == '-') {
        neg = s[0] == '-';
        i = 1;
    }
    const std::string body = s.substr(i);
    // mpz_int reads a leading 0 as an octal prefix
    auto decimal = [](const std::string& d) {
        const auto nz = d.find_first_not_of('0');
        return nz == std::string::npos ? std::string("0") : d.substr(nz);
    };
    auto digits = [](const std::string& d) {
        return !d.empty() && std::all_of(d.begin(), d.end(), [](unsigned char c) { return std::isdigit(c); });
    };
    Rational r;
    if (auto slash = body.find('/'); slash != std::string::npos) {
        const std::string p = body.substr(0, slash), q = body.substr(slash + 1);
        if (!digits(p) || !digits(q)) throw std::invalid_argument("malformed fraction '" + text + "'");
        boost::multiprecision::mpz_int den(decimal(q));
        if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
        r = Rational(boost::multiprecision::mpz_int(decimal(p)), den);
    } else {
        const auto dot = body.find('.');
        std::string whole = body.substr(0, dot), frac = dot == std::string::npos ? "" : body.substr(dot + 1);
        if (whole.empty()) whole = "0";
        if (!digits(whole) || (dot != std::string::npos && !digits(frac)))
            throw std::invalid_argument("malformed number '" + text + "'");
        boost::multiprecision::mpz_int scale = 1;
        for (std::size_t k = 0; k < frac.size(); ++k) scale *= 10;
        r = Rational(boost::multiprecision::mpz_int(decimal(whole + frac)), scale);
    }
    return neg ? Rational(-r) : r;
}

namespace {

std::string rat_string(const Rational& r) { return r.str(); }
double dbl(const Rational& r) { return r.convert_to<double>(); }

}  // namespace

// ---------------------------------------------------------------------------
// K and h
// ---------------------------------------------------------------------------

KSpec KSpec::interval01() { return KSpec{Kind::Interval01, {{Rational(0), Rational(1)}}}; }
KSpec KSpec::two_points() { return KSpec{Kind::TwoPoints, {{Rational(0), Rational(0)}, {Rational(1), Rational(1)}}}; }

KSpec KSpec::union_of(std::vector<ClosedInterval> intervals) {
    KSpec k{Kind::UnionOfIntervals, std::move(intervals)};
    k.validate();
    return k;
}

void KSpec::validate() const {
    if (intervals.empty()) throw std::invalid_argument("K must be nonempty");
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        const auto& I = intervals[i];
        if (I.lo > I.hi) throw std::invalid_argument("interval endpoints out of order");
        if (I.lo < 0 || I.hi > 1) throw std::invalid_argument("K must lie in [0,1]");
        if (i > 0 && !(intervals[i - 1].hi < I.lo)) throw std::invalid_argument("intervals must be disjoint and ordered");
    }
}

bool KSpec::contains(const Rational& k) const {
    return std::any_of(intervals.begin(), intervals.end(), [&](const auto& I) { return I.lo <= k && k <= I.hi; });
}

std::string KSpec::label() const {
    switch (kind) {
        case Kind::Interval01: return "interval";
        case Kind::TwoPoints: return "twopoints";
        default: break;
    }
    std::string s = "union:";
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        if (i) s += ';';
        s += rat_string(intervals[i].lo) + "," + rat_string(intervals[i].hi);
    }
    return s;
}

KSpec parse_kspec(const std::string& text) {
    if (text == "interval") return KSpec::interval01();
    if (text == "twopoints") return KSpec::two_points();
    if (text.rfind("union:", 0) != 0) throw std::invalid_argument("unsupported K '" + text + "'");
    std::vector<ClosedInterval> iv;
    std::stringstream ss(text.substr(6));
    std::string item;
    while (std::getline(ss, item, ';')) {
        const auto comma = item.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("interval needs 'a,b': '" + item + "'");
        iv.push_back({parse_rational(item.substr(0, comma)), parse_rational(item.substr(comma + 1))});
    }
    return KSpec::union_of(std::move(iv));
}

void TargetFunction::validate(const KSpec& K) const {
    if (breakpoints.size() != values.size()) throw std::invalid_argument("breakpoints and values differ in length");
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        if (!K.contains(breakpoints[i])) throw std::invalid_argument("breakpoint " + rat_string(breakpoints[i]) + " lies outside K");
        if (i > 0 && !(breakpoints[i - 1] < breakpoints[i])) throw std::invalid_argument("breakpoints must increase");
    }
    for (const auto& I : K.intervals)
        if (std::none_of(breakpoints.begin(), breakpoints.end(), [&](const Rational& b) { return I.lo <= b && b <= I.hi; }))
            throw std::invalid_argument("interval [" + rat_string(I.lo) + "," + rat_string(I.hi) + "] has no breakpoint");
}

Rational TargetFunction::evaluate(const KSpec& K, const Rational& k) const {
    for (const auto& I : K.intervals) {
        if (k < I.lo || k > I.hi) continue;
        std::size_t first = breakpoints.size(), last = 0;
        for (std::size_t i = 0; i < breakpoints.size(); ++i)
            if (I.lo <= breakpoints[i] && breakpoints[i] <= I.hi) {
                first = std::min(first, i);
                last = i;
            }
        if (first == breakpoints.size()) throw std::invalid_argument("interval without breakpoint");
        if (k <= breakpoints[first]) return values[first];
        if (k >= breakpoints[last]) return values[last];
        for (std::size_t i = first; i < last; ++i)
            if (k <= breakpoints[i + 1])
                return values[i] + (values[i + 1] - values[i]) * (k - breakpoints[i]) / (breakpoints[i + 1] - breakpoints[i]);
    }
    throw std::invalid_argument("point " + rat_string(k) + " lies outside K");
}

double TargetFunction::evaluate(const KSpec& K, double k) const {
    for (const auto& I : K.intervals) {
        if (k < dbl(I.lo) || k > dbl(I.hi)) continue;
        std::size_t first = breakpoints.size(), last = 0;
        for (std::size_t i = 0; i < breakpoints.size(); ++i)
            if (I.lo <= breakpoints[i] && breakpoints[i] <= I.hi) {
                first = std::min(first, i);
                last = i;
            }
        if (first == breakpoints.size()) throw std::invalid_argument("interval without breakpoint");
        if (k <= dbl(breakpoints[first])) return dbl(values[first]);
        if (k >= dbl(breakpoints[last])) return dbl(values[last]);
        for (std::size_t i = first; i < last; ++i) {
            const double b0 = dbl(breakpoints[i]), b1 = dbl(breakpoints[i + 1]);
            if (k == b1) return dbl(values[i + 1]);
            if (k < b1) {
                const double v0 = dbl(values[i]), v1 = dbl(values[i + 1]);
                return v0 + (v1 - v0) * ((k - b0) / (b1 - b0));
            }
        }
    }
    throw std::invalid_argument("point lies outside K");
}

Rational TargetFunction::sup_norm() const {
    Rational m = 0;
    for (const auto& v : values) m = std::max(m, Rational(abs(v)));
    return m;
}

TargetFunction parse_target(const std::string& text) {
    std::vector<std::pair<Rational, Rational>> pts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) throw std::invalid_argument("breakpoint needs 'k:value': '" + item + "'");
        pts.emplace_back(parse_rational(item.substr(0, colon)), parse_rational(item.substr(colon + 1)));
    }
    if (pts.empty()) throw std::invalid_argument("target function needs at least one breakpoint");
    std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    TargetFunction h;
    for (auto& [k, v] : pts) {
        h.breakpoints.push_back(k);
        h.values.push_back(v);
    }
    return h;
}

// ---------------------------------------------------------------------------
// slice maps
// ---------------------------------------------------------------------------

namespace {

// Position of tau relative to K: inside interval i, below/above K, or in the
// gap after interval i.
struct Where {
    enum { Inside, Below, Above, Gap } kind;
    std::size_t i = 0;
};

template <class T, class Conv>
Where locate_tau(const KSpec& K, const T& tau, Conv conv) {
    const auto& iv = K.intervals;
    if (tau < conv(iv.front().lo)) return {Where::Below, 0};
    if (tau > conv(iv.back().hi)) return {Where::Above, 0};
    for (std::size_t i = 0; i < iv.size(); ++i) {
        if (tau <= conv(iv[i].hi)) return tau >= conv(iv[i].lo) ? Where{Where::Inside, i} : Where{Where::Gap, i - 1};
    }
    return {Where::Above, 0};
}

template <class T, class Conv>
T u_of(const KSpec& K, const T& tau, Conv conv) {
    auto w = locate_tau(K, tau, conv);
    if (w.kind != Where::Gap) return T(1);
    const T b = conv(K.intervals[w.i].hi), a = conv(K.intervals[w.i + 1].lo);
    const T mid = (a + b) / 2, half = (a - b) / 2;
    const T d = tau - mid;
    return (d < 0 ? T(-d) : d) / half;
}

template <class T, class Conv>
T phi_of(const KSpec& K, const T& tau, Conv conv) {
    auto w = locate_tau(K, tau, conv);
    switch (w.kind) {
        case Where::Inside: return tau;
        case Where::Below: return conv(K.intervals.front().lo);
        case Where::Above: return conv(K.intervals.back().hi);
        default: break;
    }
    const T b = conv(K.intervals[w.i].hi), a = conv(K.intervals[w.i + 1].lo);
    return tau < (a + b) / 2 ? b : a;
}

const auto rat_id = [](const Rational& r) { return r; };
const auto to_dbl = [](const Rational& r) { return dbl(r); };

Rational slice_value(const KSpec& K, const TargetFunction& h, const Rational& tau) {
    const Rational u = u_of(K, tau, rat_id);
    if (u == 0) return Rational(0);
    return u * h.evaluate(K, phi_of(K, tau, rat_id));
}

double clip(double x, double lo, double hi) { return std::min(hi, std::max(lo, x)); }

}  // namespace

double SectionBundle::u(double tau) const { return u_of(K, tau, to_dbl); }
double SectionBundle::phi(double tau) const { return phi_of(K, tau, to_dbl); }

double SectionBundle::f_slice(double tau) const {
    const double uu = u(tau);
    if (uu == 0.0) return 0.0;
    return uu * h.evaluate(K, phi(tau));
}

std::array<double, 2> SectionBundle::v(double s, double t) const {
    if (s == 0.0) return {1.0, 0.0};  // unused: Sh vanishes on s = 0
    return {1.0, clip(t / s, -1.0, 1.0)};
}

double SectionBundle::pipeline(double s, double t) const {
    if (s == 0.0) return 0.0;
    return std::fabs(s) * f_slice(v(s, t)[1]);
}

SectionBundle build_section(const KSpec& K, const TargetFunction& h) {
    K.validate();
    h.validate(K);
    SectionBundle b{K, h, {}, {}, {}, {}};

    std::vector<Rational> B{Rational(-1), Rational(1)};
    for (const auto& I : K.intervals) {
        B.push_back(I.lo);
        B.push_back(I.hi);
    }
    for (std::size_t i = 0; i + 1 < K.intervals.size(); ++i)
        B.push_back((K.intervals[i].hi + K.intervals[i + 1].lo) / 2);
    B.insert(B.end(), h.breakpoints.begin(), h.breakpoints.end());
    std::sort(B.begin(), B.end());
    B.erase(std::unique(B.begin(), B.end()), B.end());
    b.slice_breaks = B;
    for (const auto& beta : B) b.slice_values.push_back(slice_value(K, h, beta));

    std::vector<Vector<Rational>> planes{{Rational(1), Rational(0)}};
    for (const auto& beta : B) planes.push_back(normalize_hyperplane<Rational>({Rational(-beta), Rational(1)}));
    b.Sh_exact.fan = arrangement_fan<Rational>(planes, kSectionGenerators);

    const auto& g = b.slice_values;
    for (const auto& cell : b.Sh_exact.fan.cells) {
        const Rational& s = cell.witness[0];
        const Rational tau = cell.witness[1] / s;
        const Rational sg = s > 0 ? Rational(1) : Rational(-1);
        Rational c0, c1;
        if (tau > 1) {
            c0 = g.back();
        } else if (tau < -1) {
            c0 = g.front();
        } else {
            std::size_t i = 0;
            while (!(tau < B[i + 1])) ++i;
            const Rational m = (g[i + 1] - g[i]) / (B[i + 1] - B[i]);
            c0 = g[i] - m * B[i];
            c1 = m;
        }
        b.Sh_exact.pieces.push_back({sg * c0, sg * c1});
    }
    b.Sh = to_double(b.Sh_exact);
    return b;
}

// ---------------------------------------------------------------------------
// verification
// ---------------------------------------------------------------------------

namespace {

void record(SectionReport& rep, const std::string& what, double residual, double tol) {
    ++rep.checks;
    rep.worst = std::max(rep.worst, residual);
    if (!(residual <= tol)) {
        std::ostringstream os;
        os << what << ": residual " << residual;
        rep.failures.push_back(os.str());
    }
}

double sh_at(const PLFunction<double>& f, double s, double t) {
    const double x[2] = {s, t};
    return f.evaluate(x);
}

}  // namespace

SectionReport verify_section(const SectionBundle& b, std::size_t samples, std::uint64_t seed) {
    SectionReport rep;
    const double tol = b.K.kind == KSpec::Kind::TwoPoints ? 0.0 : 1e-12;
    std::vector<double> ks;
    for (const auto& I : b.K.intervals) {
        ks.push_back(dbl(I.lo));
        ks.push_back(dbl(I.hi));
    }
    for (const auto& k : b.h.breakpoints) ks.push_back(dbl(k));
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, b.K.intervals.size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0), lam(0.0, 1.0), cube(-1.0, 1.0);
    for (std::size_t i = 0; i < samples; ++i) {
        const auto& I = b.K.intervals[pick(rng)];
        const double lo = dbl(I.lo), hi = dbl(I.hi);
        ks.push_back(std::min(hi, lo + (hi - lo) * unit(rng)));
    }
    for (double k : ks) {
        const std::string at = "k = " + std::to_string(k);
        const double hk = b.h.evaluate(b.K, k);
        record(rep, "Sh(1,k) = h(k) at " + at, std::fabs(sh_at(b.Sh, 1.0, k) - hk), tol * std::max(1.0, std::fabs(hk)));
        record(rep, "u(k) = 1 at " + at, std::fabs(b.u(k) - 1.0), tol);
        record(rep, "phi(k) = k at " + at, std::fabs(b.phi(k) - k), tol);
        const double l = 1.0 - lam(rng);  // (0, 1]
        const auto v1 = b.v(l, l * k), v0 = b.v(1.0, k);
        record(rep, "v(l x) = v(x) at " + at, std::max(std::fabs(v1[0] - v0[0]), std::fabs(v1[1] - v0[1])), 1e-12);
    }
    // the symbolic assembly against the composed maps
    for (std::size_t i = 0; i < samples; ++i) {
        const double s = cube(rng), t = cube(rng);
        const double p = b.pipeline(s, t);
        record(rep, "Sh = |s| f(v(x)) at (" + std::to_string(s) + ", " + std::to_string(t) + ")",
               std::fabs(sh_at(b.Sh, s, t) - p), 1e-12 * std::max(1.0, std::fabs(p)));
    }
    return rep;
}

SectionReport verify_homogeneity(const SectionBundle& b, std::size_t samples, std::uint64_t seed) {
    SectionReport rep;
    const double hs = dbl(b.h.sup_norm());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> cube(-1.0, 1.0), unit(0.0, 1.0);
    for (std::size_t i = 0; i < samples; ++i) {
        const double s = cube(rng), t = cube(rng), l = 1.0 - unit(rng);
        const double f = sh_at(b.Sh, s, t);
        const std::string at = "(" + std::to_string(s) + ", " + std::to_string(t) + ")";
        record(rep, "homogeneity at " + at + " l = " + std::to_string(l), std::fabs(sh_at(b.Sh, l * s, l * t) - l * f),
               1e-12 * std::max(1.0, std::fabs(f)));
        record(rep, "|Sh| <= |h|_inf |s| at " + at, std::max(0.0, std::fabs(f) - hs * std::fabs(s)), 1e-12);
    }
    return rep;
}

NormBoundReport verify_norm_bound(const SectionBundle& b) {
    NormBoundReport rep;
    auto r = exact_fbl_norm<Rational>(b.Sh_exact, fbl_space(kSectionGenerators));
    rep.norm = dbl(r.upper);
    rep.h_sup = dbl(b.h.sup_norm());
    for (const auto& p : r.certificate) rep.certificate.push_back({dbl(p[0]), dbl(p[1])});
    for (int i = 0; i <= 10000; ++i) rep.f_slice_sup = std::max(rep.f_slice_sup, std::fabs(b.f_slice(-1.0 + i / 5000.0)));
    for (const auto& beta : b.slice_values) rep.f_slice_sup = std::max(rep.f_slice_sup, std::fabs(dbl(beta)));
    rep.pass = rep.norm <= rep.h_sup + 1e-9;
    return rep;
}

namespace {

TargetFunction combine_targets(const KSpec& K, const TargetFunction& a, const TargetFunction& b, bool join) {
    TargetFunction out;
    for (const auto& I : K.intervals) {
        std::vector<Rational> pts{I.lo, I.hi};
        for (const auto* h : {&a, &b})
            for (const auto& k : h->breakpoints)
                if (I.lo <= k && k <= I.hi) pts.push_back(k);
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        if (join) {
            std::vector<Rational> extra;
            for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
                const Rational d0 = a.evaluate(K, pts[i]) - b.evaluate(K, pts[i]);
                const Rational d1 = a.evaluate(K, pts[i + 1]) - b.evaluate(K, pts[i + 1]);
                if ((d0 < 0 && d1 > 0) || (d0 > 0 && d1 < 0)) extra.push_back(pts[i] + (pts[i + 1] - pts[i]) * d0 / (d0 - d1));
            }
            pts.insert(pts.end(), extra.begin(), extra.end());
            std::sort(pts.begin(), pts.end());
        }
        for (const auto& k : pts) {
            const Rational va = a.evaluate(K, k), vb = b.evaluate(K, k);
            out.breakpoints.push_back(k);
            out.values.push_back(join ? std::max(va, vb) : Rational(va + vb));
        }
    }
    return out;
}

}  // namespace

TargetFunction target_join(const KSpec& K, const TargetFunction& a, const TargetFunction& b) {
    return combine_targets(K, a, b, true);
}

TargetFunction target_sum(const KSpec& K, const TargetFunction& a, const TargetFunction& b) {
    return combine_targets(K, a, b, false);
}

TargetFunction target_scale(const TargetFunction& a, const Rational& c) {
    TargetFunction out = a;
    for (auto& v : out.values) v *= c;
    return out;
}

SectionReport verify_hom_laws(const KSpec& K, const std::vector<std::pair<TargetFunction, TargetFunction>>& pairs,
                              std::size_t samples, std::uint64_t seed) {
    SectionReport rep;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> cube(-1.0, 1.0);
    auto compare = [&](const std::string& law, const PLFunction<Rational>& lhs, const PLFunction<Rational>& rhs) {
        ++rep.checks;
        if (!pl_equal(lhs, rhs)) rep.failures.push_back(law + ": PL functions differ");
        const auto l = to_double(lhs), r = to_double(rhs);
        double worst = 0.0;
        for (std::size_t i = 0; i < samples; ++i) {
            const double s = cube(rng), t = cube(rng);
            worst = std::max(worst, std::fabs(sh_at(l, s, t) - sh_at(r, s, t)));
        }
        record(rep, law + " (sampled)", worst, 1e-12);
    };
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& [a, b] = pairs[i];
        const auto Sa = build_section(K, a), Sb = build_section(K, b);
        const std::string tag = " pair " + std::to_string(i);
        compare("join" + tag, build_section(K, target_join(K, a, b)).Sh_exact,
                pl_combine(Sa.Sh_exact, Sb.Sh_exact, PLOp::Max));
        compare("sum" + tag, build_section(K, target_sum(K, a, b)).Sh_exact,
                pl_combine(Sa.Sh_exact, Sb.Sh_exact, PLOp::Sum));
        const Rational c(-3, 2);
        compare("scale" + tag, build_section(K, target_scale(a, c)).Sh_exact, pl_scale(Sa.Sh_exact, c));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// finite-coordinate approximants
// ---------------------------------------------------------------------------

Approximant finite_coordinate_approximant(const std::function<double(std::span<const double>)>& f_slice,
                                          std::size_t slice_dimension, const std::vector<std::size_t>& coords,
                                          std::size_t grid, std::uint64_t seed) {
    if (grid < 2) throw std::invalid_argument("grid must have at least 2 nodes");
    for (std::size_t c : coords)
        if (c >= slice_dimension) throw std::invalid_argument("approximant coordinate out of range");
    const std::size_t d = coords.size();
    std::size_t nodes = 1;
    for (std::size_t i = 0; i < d; ++i) nodes *= grid;
    const double h = 2.0 / static_cast<double>(grid - 1);

    auto table = std::make_shared<std::vector<double>>(nodes);
    std::vector<double> x(slice_dimension, 0.0);
    for (std::size_t idx = 0; idx < nodes; ++idx) {
        std::size_t r = idx;
        for (std::size_t i = 0; i < d; ++i) {
            x[coords[i]] = -1.0 + h * static_cast<double>(r % grid);
            r /= grid;
        }
        (*table)[idx] = f_slice(x);
    }

    Approximant out;
    out.f_plus = [table, coords, grid, h, d](std::span<const double> y) {
        std::vector<std::size_t> cell(d);
        std::vector<double> frac(d);
        for (std::size_t i = 0; i < d; ++i) {
            const double p = (std::clamp(y[coords[i]], -1.0, 1.0) + 1.0) / h;
            std::size_t c = std::min(static_cast<std::size_t>(p), grid - 2);
            cell[i] = c;
            frac[i] = p - static_cast<double>(c);
        }
        // reduce one axis at a time with v0 + f (v1 - v0), exact on constants
        std::vector<double> vals(std::size_t{1} << d);
        for (std::size_t corner = 0; corner < vals.size(); ++corner) {
            std::size_t idx = 0, stride = 1;
            for (std::size_t i = 0; i < d; ++i) {
                idx += (cell[i] + (corner >> i & 1)) * stride;
                stride *= grid;
            }
            vals[corner] = (*table)[idx];
        }
        for (std::size_t i = d; i-- > 0;) {
            const std::size_t half = std::size_t{1} << i;
            for (std::size_t c = 0; c < half; ++c) vals[c] += frac[i] * (vals[c + half] - vals[c]);
        }
        const double acc = vals[0];
        return acc;
    };
    auto fp = out.f_plus;
    out.f_n = [fp, slice_dimension](std::span<const double> x) {
        const double s = x[0];
        std::vector<double> y(slice_dimension, 0.0);
        if (s != 0.0)
            for (std::size_t i = 0; i < slice_dimension; ++i) y[i] = clip(x[i + 1] / s, -1.0, 1.0);
        return fp(y);
    };

    // deviation: a fine uniform scan in one dimension, random points otherwise
    std::vector<double> y(slice_dimension, 0.0);
    auto probe = [&] { out.deviation = std::max(out.deviation, std::fabs(f_slice(y) - out.f_plus(y))); };
    if (slice_dimension == 1) {
        for (int i = 0; i <= 20000; ++i) {
            y[0] = -1.0 + i / 10000.0;
            probe();
        }
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> cube(-1.0, 1.0);
        for (int i = 0; i < 10000; ++i) {
            for (auto& v : y) v = cube(rng);
            probe();
        }
    }
    return out;
}

nlohmann::json to_json(const SectionBundle& b) {
    nlohmann::json j;
    j["K"] = b.K.label();
    j["generators"] = kSectionGenerators;
    auto& h = j["h"] = nlohmann::json::array();
    for (std::size_t i = 0; i < b.h.breakpoints.size(); ++i)
        h.push_back({{"k", rat_string(b.h.breakpoints[i])}, {"value", rat_string(b.h.values[i])}});
    auto& sl = j["slice"] = nlohmann::json::array();
    for (std::size_t i = 0; i < b.slice_breaks.size(); ++i)
        sl.push_back({{"tau", rat_string(b.slice_breaks[i])}, {"value", rat_string(b.slice_values[i])}});
    j["Sh"] = to_json(b.Sh);
    return j;
}

}  // namespace fbl
