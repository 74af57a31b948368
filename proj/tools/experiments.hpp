#pragma once

// Named experiments shared by the command-line runner and the acceptance
// binary. Each returns a JSON record with a boolean "pass" and the measured
// values; artifact writing is left to the caller.

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "quake/metrics.hpp"

namespace quake::cli {

using nlohmann::json;

// "fn:ell,tau", "markov:x,y,z" or "x,y[,lower|upper]".
MarkedSurface parse_surface(const std::string& text);
// Accepts plain numbers and multiples of pi: "0.9pi", "pi", "2.8".
double parse_angle(const std::string& text);

std::string fmt(double v);  // %.16e

// Light optimizer settings for batch distance work.
DeOptions light_de();

json cosine_formula(int samples, std::uint64_t seed);
json twist_invariance(int samples, std::uint64_t seed);
json dehn_equivariance(int surfaces, int depth, std::uint64_t seed);
json duality(int surfaces, int slopes, std::uint64_t seed);

// Thick and moderately thin points along a quasi-uniform grid.
std::vector<MarkedSurface> surface_grid(int n, double lmin, double lmax);

json indicatrix_check(const IndicatrixSample& ind);
json indicatrix_family(int surfaces, int n);
json asymmetry(int surfaces, int dirs, std::uint64_t seed);

struct ChainConstants {
    double k0 = 0, k1 = 0, k2 = 0;
    int samples = 0;
};
ChainConstants norm_chain(int surfaces, int dirs);
json norm_chain_check(int surfaces, int dirs);
// ‖e_α‖_WP/√ℓ_α along a pinching family; c is fitted on the thick half when
// c ≤ 0, otherwise used as given.
json wp_pinching_window(double c);
json symmetrized_norms(int samples, std::uint64_t seed);

struct PairSample {
    MarkedSurface x, y;
    DistanceEstimate fwd, bwd;
    double lower = 0;     // de_lower(x, y)
    double lower_back = 0;
    SupResult dth;
};
std::vector<PairSample> distance_pairs(int n, std::uint64_t seed, const DeOptions& opt);
json bracket_check(const std::vector<PairSample>& pairs);
json de_thurston_ratio(const std::vector<PairSample>& pairs);
json symmetrized_distances(const std::vector<PairSample>& pairs);
json thurston_triangle(int triples, std::uint64_t seed);

struct PinchRun {
    PinchResult result;
    double ell0 = 0, theta = 0;
    double ratio = 0;        // magnitude / (2ℓ₀Log(1/ℓ₀))
    double lower_ratio = 0;  // same for the width-integral lower bound
};
PinchRun pinch(double ell0, double theta, double target);
double pinch_scale(double ell0);  // 2ℓ₀Log(1/ℓ₀)
json pinch_check(const std::vector<PinchRun>& runs, double theta_window);

json nongeodesic(const DeOptions& opt);
json horocycle();
json fd_machinery();
json taylor(int cases, std::uint64_t seed);
json bilipschitz(const MarkedSurface& s, double radius, int halvings, int pairs, std::uint64_t seed,
                 const DeOptions& opt);

}  // namespace quake::cli
