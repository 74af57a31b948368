#pragma once

// Teichmüller space of the once-punctured torus.
//
// A point is stored as the Fenchel–Nielsen chart (ℓ, σ) of the marking basis
// (A, B); see chart.hpp. Slope p/q is the homology class p[A] + q[B]:
// 1/0 = A, 0/1 = B, 1/1 = AB, −1/1 = A⁻¹B.
//
// Tangent vectors and covectors are expressed in the coordinates (ℓ_A, τ_A),
// where τ_A increases along left earthquakes about A.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "quake/chart.hpp"
#include "quake/hyp2.hpp"

namespace quake {

// Sign relating the chart twist σ to the left earthquake: a left earthquake of
// displacement t about X moves σ_(X,Y) by kLeftTwist·t. Pinned by the
// cosine-formula test.
inline constexpr double kLeftTwist = -1.0;

struct Slope {
    std::int64_t p = 1, q = 0;

    // Reduces and normalizes (q ≥ 0, and 1/0 for the point at infinity).
    static Slope make(std::int64_t p, std::int64_t q);
    bool operator==(const Slope& o) const { return p == o.p && q == o.q; }
    bool operator!=(const Slope& o) const { return !(*this == o); }
    std::string str() const;
    static Slope parse(const std::string& text);
};

struct WeightedCurve {
    Slope slope;
    double weight = 1;
};

// Integer matrix acting on homology columns.
struct IMat2 {
    std::int64_t a = 1, b = 0, c = 0, d = 1;
    IMat2 operator*(const IMat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    IMat2 inverse() const { return {d, -b, -c, a}; }  // det = 1
    std::int64_t det() const { return a * d - b * c; }
    Slope apply(const Slope& s) const { return Slope::make(a * s.p + b * s.q, c * s.p + d * s.q); }
};

enum class Branch { Lower, Upper };

struct TraceChart {
    double x, y;
    Branch branch;
};

struct MarkedSurface {
    double ell = 1;    // ℓ_A
    double sigma = 0;  // chart twist of (A, B)

    static MarkedSurface from_fn(double ell, double tau);
    chart::Fn<double> fn() const { return {ell, sigma}; }
    double tau() const { return kLeftTwist * sigma; }

    double x() const;  // tr A
    double y() const;  // tr B
    double z() const;  // tr AB
    Branch branch() const { return sigma < 0 ? Branch::Lower : Branch::Upper; }
    TraceChart trace_chart() const { return {x(), y(), branch()}; }
    // Canonical gauge: A diagonal, B symmetric with positive off-diagonal.
    std::pair<Mat2, Mat2> matrices() const;

    std::string to_json() const;
    static MarkedSurface from_json(const std::string& text);
};

struct InvalidSurface : std::domain_error {
    using std::domain_error::domain_error;
};

MarkedSurface from_traces(double x, double y, Branch branch);
MarkedSurface from_markov_triple(double x, double y, double z);

struct TangentVector {
    MarkedSurface base;
    double dl = 0, dtau = 0;

    TangentVector operator*(double c) const { return {base, dl * c, dtau * c}; }
    TangentVector operator+(const TangentVector& o) const { return {base, dl + o.dl, dtau + o.dtau}; }
    TangentVector operator-() const { return {base, -dl, -dtau}; }
};

struct Covector {
    double dl = 0, dtau = 0;
    double operator()(const TangentVector& v) const { return dl * v.dl + dtau * v.dtau; }
};

// Slope words and markings.
chart::Word word_for(const Slope& s);
IMat2 word_matrix(const chart::Word& w);
chart::Word word_for_matrix(const IMat2& m);
Slope dual_slope(const Slope& s);  // second basis element attached to word_for(s)

// Same point, marking changed so that the new A is `alpha` and new B its dual.
MarkedSurface remark(const MarkedSurface& s, const Slope& alpha);
// Mapping class action: trace_of_slope(act(m, s), γ) = trace_of_slope(s, m⁻¹γ).
MarkedSurface act(const IMat2& m, const MarkedSurface& s);
// Homology image of δ under the displacement-ℓ_γ left earthquake, m times.
Slope dehn_twist_slope(const Slope& gamma, const Slope& delta, std::int64_t m = 1);

double trace_of_slope(const MarkedSurface& s, const Slope& g);
double length_of_slope(const MarkedSurface& s, const Slope& g);
double length_of(const MarkedSurface& s, const WeightedCurve& c);
std::int64_t intersection_number(const Slope& a, const Slope& b);
std::int64_t det(const Slope& a, const Slope& b);

// Reduced slopes with Stern–Brocot depth ≤ depth together with 0/1 and 1/0,
// in circular order p/q from +∞ down to −∞.
std::vector<Slope> enumerate_slopes(int depth);
int stern_brocot_depth(const Slope& s);  // −1 for 0/1 and 1/0

MarkedSurface twist(const MarkedSurface& s, const Slope& g, double t);

enum class Backend { Analytic, FiniteDifference };

struct FdOptions {
    double h0 = 0.05;
    double rel_tol = 1e-9;
    int max_levels = 12;
};

struct ConvergenceFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

TangentVector earthquake_vector(const MarkedSurface& s, const WeightedCurve& c,
                                Backend backend = Backend::Analytic, const FdOptions& fd = {});
Covector length_differential(const MarkedSurface& s, const Slope& g);
double pair(const Covector& w, const TangentVector& v);

// Richardson-extrapolated central difference of a vector-valued function.
struct FdResult {
    std::vector<double> value;
    double error = 0;
};
FdResult richardson(const std::function<std::vector<double>(double)>& f, const FdOptions& opt);

struct CosineTerms {
    std::vector<double> angles;  // anticlockwise from α to β at each crossing
    double sum = 0;              // Σ cos θ
};
CosineTerms cosine_terms(const MarkedSurface& s, const Slope& alpha, const Slope& beta);
double cosine_pairing(const MarkedSurface& s, const Slope& alpha, const Slope& beta);

// Holonomy of slope β' (in the basis (X, Y)) as a word with positive Y letters.
std::vector<int> christoffel_word(std::int64_t p, std::int64_t q);  // letters: +1 X, −1 X⁻¹, 2 Y

struct SystoleResult {
    Slope slope;
    double length;
    std::int64_t visited = 0;
};
struct CertificationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
SystoleResult systole(const MarkedSurface& s, int depth = 40);

struct FnCoordinates {
    double ell, tau;
    Slope dual;
};
FnCoordinates fn_coordinates(const MarkedSurface& s, const Slope& alpha);

struct TaylorFit {
    double exponent;
    double phi1;
    std::vector<double> ts, remainders;
};
TaylorFit taylor_remainder_check(const MarkedSurface& s, const Slope& gamma, const Slope& delta, double weight = 1);

}  // namespace quake
