#pragma once

// Forward-mode dual numbers: v + d·ε with ε² = 0.
// Only the functions the chart algebra needs are provided.

#include <cmath>
#include <type_traits>

namespace quake {

template <class T>
struct Dual {
    T v{};
    T d{};

    constexpr Dual() = default;
    constexpr Dual(T value) : v(value) {}
    constexpr Dual(T value, T deriv) : v(value), d(deriv) {}

    Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
    Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
    Dual& operator*=(const Dual& o) { d = d * o.v + v * o.d; v *= o.v; return *this; }
    Dual& operator/=(const Dual& o) { d = (d * o.v - v * o.d) / (o.v * o.v); v /= o.v; return *this; }
};

template <class T> Dual<T> operator-(const Dual<T>& a) { return {-a.v, -a.d}; }
template <class T> Dual<T> operator+(Dual<T> a, const Dual<T>& b) { return a += b; }
template <class T> Dual<T> operator-(Dual<T> a, const Dual<T>& b) { return a -= b; }
template <class T> Dual<T> operator*(Dual<T> a, const Dual<T>& b) { return a *= b; }
template <class T> Dual<T> operator/(Dual<T> a, const Dual<T>& b) { return a /= b; }
template <class U> concept Scalar = std::is_arithmetic_v<U>;

template <class T, Scalar U> Dual<T> operator+(Dual<T> a, U b) { a.v += b; return a; }
template <class T, Scalar U> Dual<T> operator+(U b, Dual<T> a) { a.v += b; return a; }
template <class T, Scalar U> Dual<T> operator-(Dual<T> a, U b) { a.v -= b; return a; }
template <class T, Scalar U> Dual<T> operator-(U b, const Dual<T>& a) { return {T(b) - a.v, -a.d}; }
template <class T, Scalar U> Dual<T> operator*(Dual<T> a, U b) { return {a.v * b, a.d * b}; }
template <class T, Scalar U> Dual<T> operator*(U b, Dual<T> a) { return {a.v * b, a.d * b}; }
template <class T, Scalar U> Dual<T> operator/(Dual<T> a, U b) { return {a.v / b, a.d / b}; }
template <class T, Scalar U> Dual<T> operator/(U b, const Dual<T>& a) { return {T(b) / a.v, -T(b) * a.d / (a.v * a.v)}; }

template <class T> bool operator<(const Dual<T>& a, const Dual<T>& b) { return a.v < b.v; }
template <class T> bool operator>(const Dual<T>& a, const Dual<T>& b) { return a.v > b.v; }
template <class T, Scalar U> bool operator<(const Dual<T>& a, U b) { return a.v < b; }
template <class T, Scalar U> bool operator>(const Dual<T>& a, U b) { return a.v > b; }

template <class T> Dual<T> sqrt(const Dual<T>& a) { using std::sqrt; T s = sqrt(a.v); return {s, a.d / (2 * s)}; }
template <class T> Dual<T> exp(const Dual<T>& a) { using std::exp; T e = exp(a.v); return {e, a.d * e}; }
template <class T> Dual<T> expm1(const Dual<T>& a) { using std::expm1; using std::exp; return {expm1(a.v), a.d * exp(a.v)}; }
template <class T> Dual<T> log(const Dual<T>& a) { using std::log; return {log(a.v), a.d / a.v}; }
template <class T> Dual<T> log1p(const Dual<T>& a) { using std::log1p; return {log1p(a.v), a.d / (1 + a.v)}; }
template <class T> Dual<T> sinh(const Dual<T>& a) { using std::sinh; using std::cosh; return {sinh(a.v), a.d * cosh(a.v)}; }
template <class T> Dual<T> cosh(const Dual<T>& a) { using std::sinh; using std::cosh; return {cosh(a.v), a.d * sinh(a.v)}; }
template <class T> Dual<T> tanh(const Dual<T>& a) { using std::tanh; T t = tanh(a.v); return {t, a.d * (1 - t * t)}; }
template <class T> Dual<T> asinh(const Dual<T>& a) { using std::asinh; using std::sqrt; return {asinh(a.v), a.d / sqrt(1 + a.v * a.v)}; }
template <class T> Dual<T> abs(const Dual<T>& a) { return a.v < 0 ? -a : a; }

inline double value_of(double x) { return x; }
inline long double value_of(long double x) { return x; }
template <class T> T value_of(const Dual<T>& x) { return x.v; }

}  // namespace quake
