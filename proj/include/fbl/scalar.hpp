#pragma once

#include <cmath>
#include <string>

#include <boost/multiprecision/gmp.hpp>

namespace fbl {

using Rational = boost::multiprecision::mpq_rational;

enum class ArithmeticMode { Floating, Exact };

inline const char* to_string(ArithmeticMode m) {
    return m == ArithmeticMode::Exact ? "exact" : "float";
}

// Per-scalar policy for sign decisions. Floating mode decides signs with a
// fixed absolute tolerance; exact mode decides them without one.
template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
    static constexpr bool exact = false;
    static double sign_tol() { return 1e-9; }
    static double pivot_tol() { return 1e-11; }
    static double to_double(double x) { return x; }
    static double from_double(double x) { return x; }
    static double abs(double x) { return std::fabs(x); }
};

template <>
struct ScalarTraits<Rational> {
    static constexpr bool exact = true;
    static Rational sign_tol() { return Rational(0); }
    static Rational pivot_tol() { return Rational(0); }
    static double to_double(const Rational& x) { return x.convert_to<double>(); }
    // Every finite double is a dyadic rational, so this conversion is exact.
    static Rational from_double(double x) { return Rational(x); }
    static Rational abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }
};

template <class T>
int sign_of(const T& x) {
    const T tol = ScalarTraits<T>::sign_tol();
    if (x > tol) return 1;
    if (x < -tol) return -1;
    return 0;
}

template <class T>
double to_double(const T& x) {
    return ScalarTraits<T>::to_double(x);
}

template <class T>
T from_double(double x) {
    return ScalarTraits<T>::from_double(x);
}

template <class T>
T abs_value(const T& x) {
    return ScalarTraits<T>::abs(x);
}

}  // namespace fbl
