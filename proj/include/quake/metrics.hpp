#pragma once

// Distances and paths on T(S₁,₁): piecewise earthquake paths and their
// magnitudes, brackets for the earthquake distance, the Thurston and WP
// distances, the pinching construction and a few fixed experiments.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "quake/hyp2.hpp"
#include "quake/norms.hpp"
#include "quake/torus.hpp"

namespace quake {

// Left earthquake along weight·slope for the given duration; the twist
// displacement is weight·duration.
struct Segment {
    Slope slope;
    double weight = 1;
    double duration = 0;
    double displacement() const { return weight * duration; }
};

class PiecewisePath {
public:
    explicit PiecewisePath(const MarkedSurface& start) : start_(start), end_(start) {}

    void push(const Segment& s);
    const MarkedSurface& start() const { return start_; }
    const MarkedSurface& end() const { return end_; }
    const std::vector<Segment>& segments() const { return segs_; }
    bool empty() const { return segs_.empty(); }

    // Surfaces at the start of every segment, followed by the endpoint.
    std::vector<MarkedSurface> waypoints() const;
    // Fold of twist over the segments, recomputed from scratch.
    MarkedSurface replay() const;
    // Segment i cut at the given fraction of its duration.
    PiecewisePath split(std::size_t i, double fraction) const;
    // Appends another path whose start must be this path's end (chart gap ≤ tol).
    PiecewisePath then(const PiecewisePath& next, double tol = 1e-8) const;

private:
    MarkedSurface start_, end_;
    std::vector<Segment> segs_;
};

double magnitude(const PiecewisePath& p);

// Euclidean distance in the (ℓ, σ) chart of the reference basis.
double chart_distance(const MarkedSurface& a, const MarkedSurface& b);

// Homology matrix of δ ↦ dehn_twist_slope(γ, δ, m).
IMat2 dehn_matrix(const Slope& gamma, std::int64_t m = 1);
// Image of a path under the mapping class act(m, ·); slopes are carried along.
PiecewisePath map_path(const IMat2& m, const PiecewisePath& p);

// Same surface with ℓ_γ replaced by len, keeping the relative twist about γ.
MarkedSurface with_length(const MarkedSurface& s, const Slope& gamma, double len);

struct DistanceEstimate {
    double lower = 0;
    double upper = 0;
    std::optional<PiecewisePath> witness;
    double feasibility_gap = 0;
    std::string method;  // which candidate produced the upper bound
};

struct DeOptions {
    int max_legs = 4;          // K
    int restarts = 8;
    std::uint64_t seed = 1;
    double eps_chart = 1e-6;
    int max_evals = 400;       // per optimizer run
    int leg_depth = 3;         // Farey depth for the initial slope pair of a leg
    int leg_refine = 6;        // mediant refinements tried per leg
};

// Two earthquakes (a then b, nonnegative displacements) from u to v. The
// slope pair is refined toward the direction of v − u and the cheapest
// feasible solution is kept.
struct Leg {
    Slope a, b;
    double ta = 0, tb = 0;
    double cost = 0;
    double gap = 0;
};
std::optional<Leg> two_slope_leg(const MarkedSurface& u, const MarkedSurface& v, const DeOptions& opt = {});

// Upper bound on d_e(x, y) by magnitude minimization over K-leg paths.
DistanceEstimate de_upper(const MarkedSurface& x, const MarkedSurface& y, const DeOptions& opt = {});

// 2∫ w(ℓ) dℓ between the two lengths, w(ℓ) = arcsinh(cosech(ℓ/2)).
double width_integral(double l1, double l2);
// max over slopes of depth ≤ depth of the width integral.
double de_lower(const MarkedSurface& x, const MarkedSurface& y, int depth = 6);

// [lower, upper] with a witness path; lower ≤ upper is asserted.
DistanceEstimate de_bracket(const MarkedSurface& x, const MarkedSurface& y, const DeOptions& opt = {});

// log sup_γ ℓ_γ(y)/ℓ_γ(x) as a bracket.
SupResult d_thurston(const MarkedSurface& x, const MarkedSurface& y, const SupOptions& opt = {});

struct WpOptions {
    GramOptions gram{8, 3, 4'000'000};
    double rel_tol = 1e-3;
    int max_pieces = 16;
};
// Length of the straight (ℓ, τ) segment in the WP metric, Gauss–Legendre per
// piece with doubling subdivision; an upper bound on d_WP.
double d_wp(const MarkedSurface& x, const MarkedSurface& y, const WpOptions& opt = {});

// (½(d(x,y)^p + d(y,x)^p))^{1/p} from de_upper both ways; p = inf gives the max.
double symmetrized_distance(const MarkedSurface& x, const MarkedSurface& y, double p, const DeOptions& opt = {});

// ---------------------------------------------------------------------------
// Pinching

struct PinchStep {
    int step = 0;
    Slope slope;
    double displacement = 0;
    double ell_alpha = 0;    // after the step
    double magnitude = 0;    // cumulative
    double angle = 0;        // angle at the start of the step
};

struct PinchResult {
    PiecewisePath path;
    Slope alpha;
    double ell0 = 0;
    std::vector<PinchStep> ledger;
    double magnitude = 0;
    double lower = 0;        // width-integral bound between ℓ₀ and the final length
};

struct PinchFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Angle at the intersection of the axes of α and β, with i(α, β) = 1.
double intersection_angle(const MarkedSurface& s, const Slope& alpha, const Slope& beta);

PinchResult pinch_path(const MarkedSurface& x, double theta, double target, int max_steps = 100000);

void write_pinch_csv(std::ostream& os, const PinchResult& r);
void write_pinch_svg(std::ostream& os, const PinchResult& r);

// ---------------------------------------------------------------------------
// Experiments

struct NongeodesicWitness {
    std::int64_t m = 0;
    double lhs = 0;        // m·ℓ_γ(x)²
    double rhs = 0;        // d₁ + m·ℓ_γ(y)² + d₂
    double d1 = 0, d2 = 0;
    double lx = 0, ly = 0;
    double endpoint_gap = 0;  // detour path endpoint vs twist(x, γ, m·ℓ_γ(x))
    PiecewisePath detour;
};
NongeodesicWitness nongeodesic_witness(const MarkedSurface& x, const Slope& gamma, const MarkedSurface& y,
                                       const DeOptions& opt = {}, std::int64_t m_max = 1'000'000);

struct HorocycleReport {
    double a = 0, b = 0, c = 0, d = 0;
    double a_residual = 0;     // endpoint error of the conjugated unit path
    double b_residual = 0;
    HPoint x_low, x_high;      // where the c and d horocycles meet
    bool pass = false;
};
HorocycleReport horocycle_config_check();

struct BilipschitzReport {
    double radius = 0;
    double c = 0;              // max(sup ratio, 1/inf ratio)
    double min_ratio = 0, max_ratio = 0;
    double max_asym = 0;       // max of d(p,q)/d(q,p) over pairs
    int pairs = 0;
};
BilipschitzReport local_bilipschitz_check(const MarkedSurface& s, double radius, int pairs = 24,
                                          std::uint64_t seed = 1, const DeOptions& opt = {});

}  // namespace quake
