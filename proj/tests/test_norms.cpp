#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "quake/norms.hpp"
#include "support.hpp"

using namespace quake;
using namespace quake::testing;

namespace {

double norm_e(const TangentVector& v) { return earthquake_norm(v).value; }

// ω(v, u) with ω = dℓ ∧ dτ
double omega(const TangentVector& v, Vec2 u) { return v.dl * u.y - v.dtau * u.x; }

GramOptions quick_gram() {
    GramOptions o;
    o.cutoff = 8;
    return o;
}

}  // namespace

TEST_CASE("earthquake norm of an earthquake vector is the length") {
    auto s = hex_point();
    auto e = earthquake_vector(s, {{0, 1}, 1});
    auto r = earthquake_norm(e);
    CHECK(std::abs(r.value - kL3) < 1e-12);
    CHECK(r.lamination.slope == Slope{0, 1});

    std::mt19937_64 rng(21);
    for (int n = 0; n < 40; ++n) {
        auto x = random_surface(rng);
        Slope g = random_slope(rng, 6);
        double c = std::exp(std::uniform_real_distribution<double>(-2, 2)(rng));
        auto res = earthquake_norm(earthquake_vector(x, {g, c}));
        double l = length_of_slope(x, g);
        CHECK(std::abs(res.value - c * l) < 1e-9 * c * l);
        CHECK(res.lamination.slope == g);
        CHECK(std::abs(res.lamination.weight - c) < 1e-9 * c);
    }
}

TEST_CASE("earthquake norm is positively homogeneous and subadditive") {
    std::mt19937_64 rng(22);
    for (int n = 0; n < 40; ++n) {
        auto s = random_surface(rng);
        auto v = random_direction(rng, s), w = random_direction(rng, s);
        double nv = norm_e(v);
        CHECK(nv > 0);
        CHECK(std::abs(norm_e(v * 2.0) - 2 * nv) < 1e-9 * nv);
        CHECK(std::abs(norm_e(v * 0.125) - 0.125 * nv) < 1e-9 * nv);
        CHECK(norm_e(v + w) <= nv + norm_e(w) + 1e-9);
    }
    CHECK_THROWS_AS(earthquake_norm(TangentVector{hex_point(), 0, 0}), std::domain_error);
}

TEST_CASE("generic directions are resolved to the requested tolerance") {
    auto s = from_fn(1.1, 0.37);
    TangentVector v{s, 0.3, 1.0};
    auto r = earthquake_norm(v);
    // the returned curve's earthquake is nearly parallel to v and carries its norm
    auto e = earthquake_vector(s, r.lamination);
    double ang = std::abs(std::atan2(e.dl * v.dtau - e.dtau * v.dl, e.dl * v.dl + e.dtau * v.dtau));
    CHECK(ang < 1e-3);
    NormOptions loose;
    loose.rel_tol = 1e-6;
    CHECK(std::abs(earthquake_norm(v, loose).value - r.value) < 1e-6 * r.value);
}

TEST_CASE("indicatrix lies on the unit sphere and is ordered") {
    auto s = hex_point();
    auto ind = indicatrix(s, 720);
    REQUIRE(ind.points.size() == 720);
    for (size_t i = 1; i < ind.points.size(); ++i) CHECK(ind.points[i].param > ind.points[i - 1].param);
    for (size_t i = 0; i < ind.points.size(); i += 37) {
        auto p = ind.points[i].point;
        CHECK(std::abs(norm_e({s, p.x, p.y}) - 1) < 1e-6);
    }
    // midpoints of chords are strictly inside
    for (size_t i = 0; i + 1 < ind.points.size(); i += 60) {
        auto a = ind.points[i].point, b = ind.points[i + 60 < ind.points.size() ? i + 60 : 0].point;
        CHECK(norm_e({s, 0.5 * (a.x + b.x), 0.5 * (a.y + b.y)}) < 1);
    }
    CHECK_THROWS(indicatrix(s, 8));
}

TEST_CASE("indicatrix is in strictly convex position around the origin") {
    std::mt19937_64 rng(23);
    std::vector<MarkedSurface> surfaces{hex_point(), square_point()};
    for (int n = 0; n < 6; ++n) surfaces.push_back(random_surface(rng, 0.08, 3));
    for (const auto& s : surfaces) {
        auto c = convexity(indicatrix(s, 720));
        CHECK(c.sign_flips == 0);
        CHECK(c.origin_inside);
        CHECK(c.min_turn > -1e-8);
    }
}

TEST_CASE("convexity report detects a dent") {
    auto ind = indicatrix(hex_point(), 64);
    ind.points[10].point.x *= 0.9;
    ind.points[10].point.y *= 0.9;
    CHECK(convexity(ind).sign_flips >= 1);
}

TEST_CASE("indicatrix exports") {
    auto ind = indicatrix(hex_point(), 16);
    std::ostringstream csv, svg;
    write_indicatrix_csv(csv, ind);
    write_indicatrix_svg(svg, ind);
    std::string c = csv.str();
    CHECK(c.rfind("slope_param,dx,dy\n", 0) == 0);
    CHECK(std::count(c.begin(), c.end(), '\n') == 17);
    CHECK(svg.str().find("<polygon") != std::string::npos);
    CHECK(svg.str().find("<circle") != std::string::npos);
}

TEST_CASE("thurston norm basics") {
    std::mt19937_64 rng(24);
    for (int n = 0; n < 15; ++n) {
        auto s = random_surface(rng);
        auto v = random_direction(rng, s);
        double a = thurston_norm(v).lo, b = thurston_norm(-v).lo;
        CHECK(a >= 0);
        CHECK(b >= 0);
        CHECK(a + b > 0);
        CHECK(std::abs(thurston_norm(v * 2.0).lo - 2 * a) < 1e-9 * a);
        CHECK(thurston_norm(v).hi >= a);
    }
}

TEST_CASE("thurston norm is the support function of the rotated indicatrix") {
    // by duality d log ℓ_λ(v) = ω(v, ê_λ), so every indicatrix sample bounds the sup from below
    auto s = from_fn(0.9, 0.2);
    auto ind = indicatrix(s, 720);
    std::mt19937_64 rng(25);
    for (int n = 0; n < 10; ++n) {
        auto v = random_direction(rng, s);
        double sup = -1e300;
        for (const auto& p : ind.points) sup = std::max(sup, omega(v, p.point));
        auto th = thurston_norm(v);
        CHECK(th.lo >= sup - 1e-12);
        CHECK(std::abs(omega(v, unit_earthquake(s, th.argmax)) - th.lo) < 1e-12);
    }
}

TEST_CASE("Gram sums") {
    auto s = hex_point();
    auto g = wp_gram(s, {0, 1}, {0, 1});
    CHECK(g.value >= 2 / std::numbers::pi * kL3 - g.tail_estimate);
    CHECK(g.partial.size() == 4);
    CHECK(g.tail_monotone);
    auto a = wp_gram(s, {0, 1}, {1, 1}), b = wp_gram(s, {1, 1}, {0, 1});
    CHECK(std::abs(a.value - b.value) < 1e-9);
    // the three shortest curves of the hexagonal torus are permuted by a symmetry
    CHECK(std::abs(wp_gram(s, {1, 0}, {1, 0}).value - g.value) < 1e-6 * g.value);
    CHECK(std::abs(wp_gram(s, {1, 1}, {1, 1}).value - g.value) < 1e-6 * g.value);
}

TEST_CASE("Gram diagonal over a pinching family") {
    for (double l : {0.5, 0.2, 0.1, 0.05}) {
        auto s = from_fn(l, 0);
        auto g = wp_gram(s, {1, 0}, {1, 0}, quick_gram());
        double r = g.value / l;
        CHECK(r >= 2 / std::numbers::pi - 1e-9);
        CHECK(r < 2 / std::numbers::pi * (1 + l * std::exp(l / 2)) + 0.05);
    }
}

TEST_CASE("WP tensor") {
    auto s = hex_point();
    auto t = wp_tensor(s);
    CHECK(t.g11 > 0);
    CHECK(t.g11 * t.g22 - t.g12 * t.g12 > 0);
    CHECK(t.det_defect < 1e-4);
    CHECK(t.offdiag_residual < 1e-4);
    auto e = earthquake_vector(s, {{1, 0}, 1});
    double half = 0.5 * std::sqrt(wp_gram(s, {1, 0}, {1, 0}).value);
    CHECK(std::abs(wp_norm(e, t) - half) < 0.05 * half);

    auto t2 = wp_tensor(s, {{0, 1}, {1, 0}, {-1, 1}});
    CHECK(std::abs(t2.g11 - t.g11) < 1e-4 * t.g11);
    CHECK(std::abs(t2.g12 - t.g12) < 1e-4 * std::max(std::abs(t.g12), t.g11));
    CHECK(std::abs(t2.g22 - t.g22) < 1e-4 * t.g22);

    CHECK_THROWS_AS(wp_tensor(square_point(), {{0, 1}, {1, 0}, {1, 1}}, quick_gram()), IllConditioned);
    CHECK_THROWS_AS(wp_tensor(s, {{0, 1}, {1, 0}}), std::domain_error);
}

TEST_CASE("WP tensor is positive definite on thick surfaces") {
    std::mt19937_64 rng(26);
    for (int n = 0; n < 8; ++n) {
        auto s = random_surface(rng, 0.5, 2.5);
        auto t = wp_tensor(s, {}, quick_gram());
        CHECK(t.g11 > 0);
        CHECK(t.g22 > 0);
        CHECK(t.g11 * t.g22 - t.g12 * t.g12 > 0);
        CHECK(t.det_defect < 1e-3);
        auto v = random_direction(rng, s);
        CHECK(std::abs(wp_norm(v * 3.0, t) - 3 * wp_norm(v, t)) < 1e-9 * wp_norm(v, t));
        CHECK(norm_e(v) / wp_norm(v, t) < 50);
    }
}

TEST_CASE("duality between earthquakes and length differentials") {
    auto s = hex_point();
    CHECK(duality_check(s, {1, 0}) < 1e-6);
    CHECK(duality_check(s, {0, 1}) < 1e-4);
    CHECK(duality_check(s, {0, 1}, 1, Backend::FiniteDifference) < 1e-6);
    std::mt19937_64 rng(27);
    for (int n = 0; n < 30; ++n) {
        auto x = random_surface(rng);
        Slope g = random_slope(rng, 5);
        double r1 = duality_check(x, g), r2 = duality_check(x, g, 7.5);
        CHECK(r1 < 1e-9);
        CHECK(std::abs(r1 - r2) < 1e-9);
    }
}

TEST_CASE("symmetrized norms") {
    std::mt19937_64 rng(28);
    for (int n = 0; n < 30; ++n) {
        auto s = random_surface(rng);
        auto v = random_direction(rng, s);
        double inf = symmetrized_norm(v, INFINITY), one = symmetrized_norm(v, 1);
        CHECK(inf == symmetrized_norm(-v, INFINITY));
        CHECK(one == symmetrized_norm(-v, 1));
        for (double p : {1.0, 2.0, 3.5}) {
            double np = symmetrized_norm(v, p);
            CHECK(np == doctest::Approx(symmetrized_norm(-v, p)).epsilon(1e-12));
            double k = std::pow(2.0, 1 / p);
            CHECK(inf <= k * np * (1 + 1e-12));
            CHECK(np <= inf * (1 + 1e-12));
            CHECK(np >= one * (1 - 1e-12));
        }
    }
    CHECK_THROWS(symmetrized_norm({hex_point(), 1, 0}, 0.5));
}

TEST_CASE("asymmetry") {
    auto hex = asymmetry_ratio(hex_point(), 64);
    CHECK(hex.ratio > 1 + 1e-6);
    auto v = TangentVector{hex_point(), hex.direction.x, hex.direction.y};
    CHECK(std::abs(norm_e(-v) / norm_e(v) - hex.ratio) < 1e-12);
    // −I acts trivially on the chart, so the sweep is unchanged
    auto flipped = act(IMat2{-1, 0, 0, -1}, hex_point());
    CHECK(std::abs(asymmetry_ratio(flipped, 64).ratio - hex.ratio) < 1e-6);

    // the rectangular torus has an automorphism acting by −1 on its tangent plane
    auto sq = square_point();
    std::mt19937_64 rng(29);
    for (int n = 0; n < 10; ++n) {
        auto u = random_direction(rng, sq);
        CHECK(std::abs(norm_e(u) - norm_e(-u)) < 1e-9 * norm_e(u));
    }
    CHECK_THROWS(asymmetry_ratio(sq, 16));
}
