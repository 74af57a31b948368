#pragma once

// Finsler norms on the tangent space of T(S₁,₁): earthquake, Thurston and
// Weil–Petersson, plus the indicatrix and symmetrized norms.
//
// Tangent vectors live in (ℓ_A, τ_A) coordinates (see torus.hpp).

#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "quake/torus.hpp"

namespace quake {

struct Vec2 {
    double x = 0, y = 0;
};
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }

// ê_γ = e_γ/ℓ_γ as a plain vector.
Vec2 unit_earthquake(const MarkedSurface& s, const Slope& g);

// ℓ_γ and its derivative in direction v.
std::pair<double, double> directional_length(const MarkedSurface& s, const Slope& g, const TangentVector& v);

struct NormOptions {
    int max_steps = 60;
    double rel_tol = 1e-10;
};

struct NormResult {
    double value = 0;
    WeightedCurve lamination;
    int steps = 0;
};

// ‖v‖ₑ by inverting the earthquake map λ ↦ e_λ(x) along Farey arcs.
NormResult earthquake_norm(const TangentVector& v, const NormOptions& opt = {});

struct IndicatrixPoint {
    double param;  // angle of the homology direction (p, q), in [0, π)
    Slope slope;
    Vec2 point;    // ê_x(slope)
};

struct IndicatrixSample {
    MarkedSurface base;
    std::vector<IndicatrixPoint> points;
};

IndicatrixSample indicatrix(const MarkedSurface& s, int n);

// Turns are sines of the turning angle between consecutive chords. Near a
// rational direction the boundary curvature is O(e^{-kℓ}), so many turns sit
// at rounding level; only wrong-sign turns larger than tol count as flips.
struct ConvexityReport {
    int sign_flips = 0;       // turns against the majority orientation, beyond tol
    int collinear = 0;        // |turn| <= tol
    bool origin_inside = false;
    double min_turn = 0;      // signed by the majority orientation
};
ConvexityReport convexity(const IndicatrixSample& ind, double tol = 1e-8);

void write_indicatrix_csv(std::ostream& os, const IndicatrixSample& ind);
void write_indicatrix_svg(std::ostream& os, const IndicatrixSample& ind);

// Supremum of f over projective slopes: coarse Farey sweep then local
// Stern–Brocot refinement around the best candidates.
struct SupResult {
    double lo = 0, hi = 0;
    Slope argmax;
};
struct SupOptions {
    int depth = 12;
    int refine_steps = 40;
    int candidates = 3;
    double tol_report = 1e-6;
};
SupResult sup_over_slopes(const std::function<double(const Slope&)>& f, const SupOptions& opt = {});

// sup_γ dℓ_γ(v)/ℓ_γ
SupResult thurston_norm(const TangentVector& v, const SupOptions& opt = {});

struct GramOptions {
    double cutoff = 10;       // hyperbolic distance of lifts kept in the sum
    double slack = 3;         // pruning slack for the coset walk
    std::size_t max_lifts = 4'000'000;
};
struct GramResult {
    double value = 0;             // tail-extrapolated estimate
    double raw = 0;               // plain truncated sum
    double tail_estimate = 0;     // |value − raw|
    std::vector<double> partial;  // truncated sums at cutoff − k, k = 3..0
    bool tail_monotone = true;    // increments shrink as the cutoff grows
    std::size_t lifts = 0;
};
GramResult wp_gram(const MarkedSurface& s, const Slope& a, const Slope& b, const GramOptions& opt = {});

struct WPTensor {
    MarkedSurface base;
    double g11 = 0, g12 = 0, g22 = 0;  // metric in (ℓ_A, τ_A)
    double condition = 0;              // of the linear solve
    double det_defect = 0;             // |det G − 1/4|
    double offdiag_residual = 0;       // worst mismatch on the off-diagonal Gram entries
    std::vector<Slope> slopes;
};
struct IllConditioned : std::runtime_error {
    using std::runtime_error::runtime_error;
};
// With no slopes given, the best-conditioned triple among the five shortest
// slopes of depth ≤ 2 is used (0/1, 1/0 have parallel differentials at σ = 0).
WPTensor wp_tensor(const MarkedSurface& s, std::vector<Slope> slopes = {}, const GramOptions& opt = {});
double wp_norm(const TangentVector& v, const WPTensor& g);
double wp_norm(const TangentVector& v);

// sup-norm residual between ω(·, ê_β) and d log ℓ_β, ω = dℓ_A ∧ dτ_A.
double duality_check(const MarkedSurface& s, const Slope& beta, double weight = 1,
                     Backend backend = Backend::Analytic);

// p = +inf gives the max.
double symmetrized_norm(const TangentVector& v, double p);

struct AsymmetryResult {
    double ratio = 1;
    Vec2 direction;
};
AsymmetryResult asymmetry_ratio(const MarkedSurface& s, int n_dirs);

}  // namespace quake
