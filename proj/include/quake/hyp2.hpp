#pragma once

// Upper half-plane primitives: Möbius actions, axes, angles, collar width,
// horocyclic segments.

#include <stdexcept>
#include <string>
#include <vector>

namespace quake {

struct Mat2 {
    double a = 1, b = 0, c = 0, d = 1;

    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }
    Mat2 inverse() const { return {d, -b, -c, a}; }  // assumes det = 1
    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    // Rescale to unit determinant; throws if det <= 0 or non-finite.
    Mat2 normalized() const;
    bool finite() const;

    static Mat2 identity() { return {}; }
    static Mat2 diag(double lambda) { return {lambda, 0, 0, 1 / lambda}; }
    static Mat2 translation(double t) { return {1, t, 0, 1}; }
};

struct HPoint {
    double re = 0, im = 1;
};

// A point of R ∪ {∞} as a projective pair (x : w) with w ∈ {0, 1}.
struct BoundaryPoint {
    double x = 0, w = 1;

    static BoundaryPoint finite(double v) { return {v, 1}; }
    static BoundaryPoint infinity() { return {1, 0}; }
    bool is_infinite() const { return w == 0; }
};

struct Geodesic {
    BoundaryPoint p, q;
};

enum class TraceKind { Parabolic, Elliptic, Marginal };

struct NonHyperbolic : std::domain_error {
    TraceKind kind;
    NonHyperbolic(TraceKind k, const std::string& what) : std::domain_error(what), kind(k) {}
};

struct DegenerateImage : std::domain_error {
    using std::domain_error::domain_error;
};

struct NonCrossing : std::domain_error {
    using std::domain_error::domain_error;
};

// Classification threshold for |tr| near 2.
inline constexpr double kHyperbolicMargin = 1e-10;

HPoint apply_mobius(const Mat2& m, const HPoint& z);
BoundaryPoint apply_mobius(const Mat2& m, const BoundaryPoint& x);
Geodesic apply_mobius(const Mat2& m, const Geodesic& g);

void require_hyperbolic(const Mat2& m);
double translation_length(const Mat2& m);

// Axis oriented from the repelling to the attracting fixed point.
Geodesic axis(const Mat2& m);

// Anticlockwise angle from g1 to g2 at their crossing, in (0, π).
double angle_at_intersection(const Geodesic& g1, const Geodesic& g2);

// Same angle expressed through the normalized cross-ratio parameter r > 0 of
// the pair (0,∞), (−1, r).
double angle_from_ratio(double r);

// Half-width of the standard collar about a geodesic of length t.
double width(double t);

// The path g·[[1,t],[0,1]]·g⁻¹·base for t ∈ [t0, t1].
struct HorocyclePath {
    Mat2 conj;
    HPoint base;
    double t0 = 0, t1 = 1;

    HPoint at(double t) const;
    HPoint start() const { return at(t0); }
    HPoint end() const { return at(t1); }
    double parameter_length() const { return t1 - t0; }
    // Parabolic fixed point g(∞) the horocycle is tangent to.
    BoundaryPoint tangency() const;
    // Parameter at which the path passes through z (z must lie on the horocycle).
    double parameter_of(const HPoint& z) const;
    std::vector<HPoint> sample(int n) const;
};

// Unit-speed horocyclic flow [[1,t],[0,1]] (optionally conjugated by g) applied to base.
HorocyclePath horocycle_segment(const HPoint& base, double t0, double t1, const Mat2& g = Mat2::identity());
// Image of a path under a Möbius map.
HorocyclePath image(const HorocyclePath& path, const Mat2& g);

}  // namespace quake
