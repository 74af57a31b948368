#pragma once

#include <cmath>
#include <random>

#include "quake/torus.hpp"

namespace quake::testing {

inline const double kL3 = 2 * std::acosh(1.5);

inline MarkedSurface from_fn(double l, double tau) { return MarkedSurface::from_fn(l, tau); }
inline MarkedSurface hex_point() { return from_traces(3, 3, Branch::Lower); }
// x = y = 2√2, z = 4: the rectangular point, on the fold of the trace chart
inline MarkedSurface square_point() { return from_fn(2 * std::acosh(std::sqrt(2.0)), 0); }

inline MarkedSurface random_surface(std::mt19937_64& rng, double lmin = 0.3, double lmax = 3) {
    std::uniform_real_distribution<double> ul(std::log(lmin), std::log(lmax)), ut(-0.5, 0.5);
    double l = std::exp(ul(rng));
    return from_fn(l, ut(rng) * l);
}

inline Slope random_slope(std::mt19937_64& rng, int maxq = 4) {
    std::uniform_int_distribution<int> up(-maxq, maxq), uq(0, maxq);
    for (;;) {
        int p = up(rng), q = uq(rng);
        if (p == 0 && q == 0) continue;
        return Slope::make(p, q);
    }
}

inline TangentVector random_direction(std::mt19937_64& rng, const MarkedSurface& s) {
    std::uniform_real_distribution<double> ua(0, 2 * M_PI);
    double a = ua(rng);
    return {s, std::cos(a), std::sin(a)};
}

}  // namespace quake::testing
