#include "quake/hyp2.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace quake {

Mat2 Mat2::normalized() const {
    double dt = det();
    if (!(dt > 0) || !std::isfinite(dt)) throw std::domain_error("Mat2: determinant not positive");
    double s = 1 / std::sqrt(dt);
    return {a * s, b * s, c * s, d * s};
}

bool Mat2::finite() const {
    return std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && std::isfinite(d);
}

HPoint apply_mobius(const Mat2& m, const HPoint& z) {
    std::complex<double> w(z.re, z.im);
    std::complex<double> img = (m.a * w + m.b) / (m.c * w + m.d);
    if (!(img.imag() > 0) || !std::isfinite(img.real()))
        throw DegenerateImage("apply_mobius: image left the upper half-plane (non-unit determinant?)");
    return {img.real(), img.imag()};
}

BoundaryPoint apply_mobius(const Mat2& m, const BoundaryPoint& x) {
    double num = m.a * x.x + m.b * x.w;
    double den = m.c * x.x + m.d * x.w;
    if (den == 0) return BoundaryPoint::infinity();
    return BoundaryPoint::finite(num / den);
}

Geodesic apply_mobius(const Mat2& m, const Geodesic& g) {
    return {apply_mobius(m, g.p), apply_mobius(m, g.q)};
}

void require_hyperbolic(const Mat2& m) {
    double t = std::abs(m.trace());
    if (t == 2) throw NonHyperbolic(TraceKind::Parabolic, "parabolic element (|tr| = 2)");
    if (t < 2 - kHyperbolicMargin) throw NonHyperbolic(TraceKind::Elliptic, "elliptic element (|tr| < 2)");
    if (t <= 2 + kHyperbolicMargin) throw NonHyperbolic(TraceKind::Marginal, "near-parabolic element (|tr| within margin of 2)");
}

double translation_length(const Mat2& m) {
    require_hyperbolic(m);
    return 2 * std::acosh(std::abs(m.trace()) / 2);
}

Geodesic axis(const Mat2& m) {
    require_hyperbolic(m);
    if (m.c == 0) {
        BoundaryPoint fin = BoundaryPoint::finite(m.b / (m.d - m.a));
        if (std::abs(m.a) > std::abs(m.d)) return {fin, BoundaryPoint::infinity()};
        return {BoundaryPoint::infinity(), fin};
    }
    double tr = m.trace();
    double s = std::sqrt((tr - 2) * (tr + 2));
    double dm = m.d - m.a;
    double q = -0.5 * (dm + (dm >= 0 ? s : -s));
    double z1 = q / m.c;
    double z2 = -m.b / q;
    // attracting fixed point has |cz + d| > 1
    bool first_attracts = std::abs(m.c * z1 + m.d) > std::abs(m.c * z2 + m.d);
    if (first_attracts) return {BoundaryPoint::finite(z2), BoundaryPoint::finite(z1)};
    return {BoundaryPoint::finite(z1), BoundaryPoint::finite(z2)};
}

double angle_from_ratio(double r) {
    return std::atan2(2 * std::sqrt(r), 1 - r);
}

double angle_at_intersection(const Geodesic& g1, const Geodesic& g2) {
    Mat2 norm;
    if (g1.p.is_infinite() || g1.q.is_infinite()) {
        if (g1.p.is_infinite() && g1.q.is_infinite()) throw NonCrossing("degenerate geodesic");
        double a = g1.p.is_infinite() ? g1.q.x : g1.p.x;
        norm = {1, -a, 0, 1};
    } else {
        double a = std::min(g1.p.x, g1.q.x), b = std::max(g1.p.x, g1.q.x);
        if (a == b) throw NonCrossing("degenerate geodesic");
        norm = {1, -a, -1, b};
    }
    BoundaryPoint u = apply_mobius(norm, g2.p), v = apply_mobius(norm, g2.q);
    if (u.is_infinite() || v.is_infinite() || u.x == 0 || v.x == 0)
        throw NonCrossing("geodesics share an endpoint");
    if ((u.x > 0) == (v.x > 0)) throw NonCrossing("geodesics are disjoint");
    double pos = u.x > 0 ? u.x : v.x;
    double neg = u.x > 0 ? v.x : u.x;
    return angle_from_ratio(pos / -neg);
}

double width(double t) {
    if (!(t > 0)) throw std::domain_error("width: t must be positive");
    return std::asinh(1 / std::sinh(t / 2));
}

HPoint HorocyclePath::at(double t) const {
    HPoint w = apply_mobius(conj.inverse(), base);
    w.re += t;
    return apply_mobius(conj, w);
}

BoundaryPoint HorocyclePath::tangency() const {
    return apply_mobius(conj, BoundaryPoint::infinity());
}

double HorocyclePath::parameter_of(const HPoint& z) const {
    HPoint w0 = apply_mobius(conj.inverse(), base);
    HPoint w = apply_mobius(conj.inverse(), z);
    if (std::abs(w.im - w0.im) > 1e-9 * std::max(1.0, w0.im))
        throw std::domain_error("parameter_of: point is not on the horocycle");
    return w.re - w0.re;
}

std::vector<HPoint> HorocyclePath::sample(int n) const {
    std::vector<HPoint> out;
    if (n < 2 || t1 == t0) {
        out.push_back(at(t0));
        return out;
    }
    for (int i = 0; i < n; ++i) out.push_back(at(t0 + (t1 - t0) * i / (n - 1)));
    return out;
}

HorocyclePath horocycle_segment(const HPoint& base, double t0, double t1, const Mat2& g) {
    if (!std::isfinite(t0) || !std::isfinite(t1) || t1 < t0) throw std::domain_error("horocycle_segment: bad range");
    return {g.normalized(), base, t0, t1};
}

HorocyclePath image(const HorocyclePath& path, const Mat2& g) {
    Mat2 gn = g.normalized();
    HorocyclePath out = path;
    out.conj = gn * path.conj;
    out.base = apply_mobius(gn, path.base);
    return out;
}

}  // namespace quake
