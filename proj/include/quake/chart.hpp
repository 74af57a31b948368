#pragma once

// Fenchel–Nielsen charts of a marked once-punctured torus and the moves
// relating the charts of different bases.
//
// A basis (X, Y) of π₁ with tr[X,Y] = −2 has chart (ℓ, σ):
//     tr X  = 2 cosh(ℓ/2)
//     tr Y  = 2 coth(ℓ/2) cosh(σ/2)
//     tr XY = 2 coth(ℓ/2) cosh((σ+ℓ)/2)
// Moves (right multiplication of the homology matrix):
//     T : (X, Y) -> (X, XY)      (ℓ, σ) -> (ℓ, σ + ℓ)
//     S : (X, Y) -> (Y, X⁻¹)     cosh(ℓ'/2) = coth(ℓ/2) cosh(σ/2)
//                                sinh(σ'/2) = −sinh(ℓ/2) tanh(σ/2)
// S² = −I acts trivially on charts.
//
// Everything is written in log space so that very short and very long
// curves keep full relative precision; the templates also run on Dual.

#include <cmath>
#include <cstdint>
#include <vector>

#include "quake/dual.hpp"

namespace quake::chart {

inline constexpr long double kLn2 = 0.693147180559945309417232121458176568L;

template <class T>
struct Fn {
    T ell;
    T sigma;
};

struct Move {
    enum Kind : std::uint8_t { T, S } kind;
    std::int64_t k = 0;  // power for T moves
};
using Word = std::vector<Move>;

template <class T>
T log_coth(const T& a) {
    using std::exp; using std::expm1; using std::log; using std::log1p;
    return log1p(exp(-2.0 * a)) - log(-expm1(-2.0 * a));
}

template <class T>
T log_cosh(const T& b) {
    using std::abs; using std::exp; using std::log1p; using std::sinh;
    T ab = abs(b);
    if (value_of(ab) < 1.0) {
        T sh = sinh(0.5 * b);
        return log1p(2.0 * sh * sh);
    }
    return ab + log1p(exp(-2.0 * ab)) - kLn2;
}

// log sinh(b) for b > 0
template <class T>
T log_sinh(const T& b) {
    using std::expm1; using std::log; using std::sinh;
    if (value_of(b) < 1.0) return log(sinh(b));
    return b + log(-expm1(-2.0 * b)) - kLn2;
}

// asinh(e^w)
template <class T>
T asinh_exp(const T& w) {
    using std::asinh; using std::exp; using std::log1p; using std::sqrt;
    if (value_of(w) > 0.0) return w + log1p(sqrt(1.0 + exp(-2.0 * w)));
    return asinh(exp(w));
}

// acosh(e^u) for u > 0
template <class T>
T acosh_exp(const T& u) {
    using std::expm1; using std::log1p; using std::sqrt;
    return u + log1p(sqrt(-expm1(-2.0 * u)));
}

template <class T>
Fn<T> move_T(const Fn<T>& f, std::int64_t k) {
    return {f.ell, f.sigma + static_cast<double>(k) * f.ell};
}

template <class T>
Fn<T> move_S(const Fn<T>& f) {
    using std::asinh; using std::sinh; using std::tanh;
    T half_l = 0.5 * f.ell;
    T half_s = 0.5 * f.sigma;
    T u = log_coth(half_l) + log_cosh(half_s);
    T ell2 = 2.0 * acosh_exp(u);
    T sigma2;
    if (value_of(half_l) < 300.0) {
        sigma2 = -2.0 * asinh(sinh(half_l) * tanh(half_s));
    } else {
        double sv = value_of(f.sigma);
        if (sv == 0.0) {
            sigma2 = -2.0 * asinh(sinh(half_l) * tanh(half_s));
        } else {
            // |sinh(σ'/2)| = sinh(ℓ/2)·|tanh(σ/2)|, |tanh x| = 1/coth|x|
            T w = log_sinh(half_l) - log_coth(sv > 0 ? half_s : -half_s);
            sigma2 = (sv > 0 ? -2.0 : 2.0) * asinh_exp(w);
        }
    }
    return {ell2, sigma2};
}

template <class T>
Fn<T> apply(const Fn<T>& f, const Move& m) {
    return m.kind == Move::T ? move_T(f, m.k) : move_S(f);
}

template <class T>
Fn<T> apply_word(Fn<T> f, const Word& w) {
    for (const Move& m : w) f = apply(f, m);
    return f;
}

// Inverse of apply_word: T^k -> T^-k in reverse order; S is an involution on charts.
template <class T>
Fn<T> apply_word_inverse(Fn<T> f, const Word& w) {
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
        if (it->kind == Move::T) f = move_T(f, -it->k);
        else f = move_S(f);
    }
    return f;
}

}  // namespace quake::chart
