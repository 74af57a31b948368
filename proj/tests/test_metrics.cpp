#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "quake/metrics.hpp"
#include "support.hpp"

using namespace quake;
using namespace quake::testing;

namespace {

DeOptions light() {
    DeOptions o;
    o.max_legs = 3;
    o.restarts = 2;
    o.max_evals = 150;
    return o;
}

// Composite Simpson on the collar width, independent of the library quadrature.
double simpson_width(double a, double b, int n = 4000) {
    auto w = [](double l) { return std::asinh(1 / std::sinh(l / 2)); };
    double h = (b - a) / n, s = w(a) + w(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4 : 2) * w(a + i * h);
    return s * h / 3;
}

PiecewisePath random_path(std::mt19937_64& rng, const MarkedSurface& x, int n) {
    std::uniform_real_distribution<double> ut(0, 0.4), uw(0.5, 2);
    PiecewisePath p(x);
    for (int i = 0; i < n; ++i) p.push({random_slope(rng, 3), uw(rng), ut(rng)});
    return p;
}

}  // namespace

TEST_CASE("magnitude of basic paths") {
    auto x = hex_point();
    PiecewisePath empty(x);
    CHECK(magnitude(empty) == 0);

    Slope g{1, 1};
    double l = length_of_slope(x, g);
    PiecewisePath one(x);
    one.push({g, 1, 0.7});
    CHECK(magnitude(one) == doctest::Approx(0.7 * l).epsilon(1e-13));

    PiecewisePath weighted(x);
    weighted.push({g, 2.5, 0.28});
    CHECK(magnitude(weighted) == doctest::Approx(0.7 * l).epsilon(1e-13));

    for (int m : {1, 3, 10}) {
        PiecewisePath dehn(x);
        dehn.push({g, 1, m * l});
        CHECK(magnitude(dehn) == doctest::Approx(m * l * l).epsilon(1e-12));
    }
}

TEST_CASE("path replay and splitting") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 20; ++k) {
        auto x = random_surface(rng);
        auto p = random_path(rng, x, 5);
        CHECK(chart_distance(p.replay(), p.end()) <= 1e-9);
        CHECK(magnitude(p) >= 0);
        std::uniform_real_distribution<double> uf(0, 1);
        auto q = p.split(k % 5, uf(rng));
        CHECK(q.segments().size() == 6);
        CHECK(std::abs(magnitude(q) - magnitude(p)) <= 1e-10 * std::max(1.0, magnitude(p)));
        CHECK(chart_distance(q.end(), p.end()) <= 1e-9);
    }
    auto x = hex_point();
    PiecewisePath a(x), b(twist(x, {0, 1}, 0.3));
    a.push({{0, 1}, 1, 0.3});
    b.push({{1, 0}, 1, 0.2});
    auto c = a.then(b);
    CHECK(c.segments().size() == 2);
    CHECK(chart_distance(c.end(), b.end()) <= 1e-12);
    PiecewisePath far(twist(x, {0, 1}, 1.0));
    CHECK_THROWS(a.then(far));
}

TEST_CASE("Dehn twist matrix matches full twists") {
    std::mt19937_64 rng(12);
    for (int k = 0; k < 30; ++k) {
        auto s = random_surface(rng);
        Slope g = random_slope(rng, 3);
        for (std::int64_t m : {1, 2, -1}) {
            IMat2 d = dehn_matrix(g, m);
            CHECK(d.det() == 1);
            for (const Slope& delta : enumerate_slopes(2))
                CHECK(d.apply(delta) == dehn_twist_slope(g, delta, m));
            double l = length_of_slope(s, g);
            auto t = twist(s, g, m * l);
            auto a = act(dehn_matrix(g, -m), s);
            for (const Slope& delta : enumerate_slopes(2))
                CHECK(length_of_slope(t, delta) ==
                      doctest::Approx(length_of_slope(a, delta)).epsilon(1e-9));
        }
    }
}

TEST_CASE("mapping classes carry paths") {
    std::mt19937_64 rng(13);
    for (int k = 0; k < 15; ++k) {
        auto x = random_surface(rng);
        auto p = random_path(rng, x, 4);
        IMat2 m = dehn_matrix(random_slope(rng, 2), 1) * dehn_matrix(random_slope(rng, 2), -1);
        auto q = map_path(m, p);
        auto e = act(m, p.end());
        for (const Slope& d : enumerate_slopes(2))
            CHECK(length_of_slope(q.end(), d) == doctest::Approx(length_of_slope(e, d)).epsilon(1e-8));
        CHECK(magnitude(q) == doctest::Approx(magnitude(p)).epsilon(1e-9));
    }
}

TEST_CASE("with_length sets one length") {
    auto x = hex_point();
    for (Slope g : {Slope{0, 1}, Slope{1, 1}, Slope{-2, 3}}) {
        auto y = with_length(x, g, 0.4);
        CHECK(length_of_slope(y, g) == doctest::Approx(0.4).epsilon(1e-12));
    }
}

TEST_CASE("two-slope legs") {
    std::mt19937_64 rng(14);
    std::normal_distribution<double> N(0, 0.05);
    for (int k = 0; k < 20; ++k) {
        auto u = random_surface(rng, 0.5, 2.5);
        auto v = from_fn(u.ell + N(rng), u.tau() + N(rng));
        auto leg = two_slope_leg(u, v);
        REQUIRE(leg);
        CHECK(leg->ta >= 0);
        CHECK(leg->tb >= 0);
        CHECK(leg->gap <= 1e-10);
        CHECK(leg->cost + 1e-12 >= de_lower(u, v));
        // Short legs cost about the norm of the chart displacement.
        double nrm = earthquake_norm({u, v.ell - u.ell, v.tau() - u.tau()}).value;
        CHECK(leg->cost == doctest::Approx(nrm).epsilon(0.05));
    }
    auto u = hex_point();
    auto same = two_slope_leg(u, u);
    REQUIRE(same);
    CHECK(same->cost == 0);
}

TEST_CASE("upper bound search") {
    auto x = hex_point();
    auto self = de_upper(x, x);
    CHECK(self.upper == 0);
    REQUIRE(self.witness);
    CHECK(self.witness->empty());

    for (Slope g : {Slope{0, 1}, Slope{1, 1}, Slope{2, -1}}) {
        double t = 0.6;
        auto y = twist(x, g, t);
        auto e = de_upper(x, y, light());
        CHECK(e.upper <= t * length_of_slope(x, g) + 1e-9);
        REQUIRE(e.witness);
        CHECK(e.feasibility_gap <= 1e-6);
        CHECK(chart_distance(e.witness->end(), y) <= e.feasibility_gap + 1e-12);
    }

    DeOptions bad = light();
    bad.max_legs = 0;
    CHECK_THROWS(de_upper(x, twist(x, {1, 0}, 0.1), bad));
}

TEST_CASE("lower bound and bracket") {
    CHECK(width_integral(0.1, 0.2) == doctest::Approx(2 * simpson_width(0.1, 0.2)).epsilon(1e-10));
    CHECK(width_integral(0.2, 0.1) == doctest::Approx(width_integral(0.1, 0.2)).epsilon(1e-14));
    CHECK(width_integral(1.5, 0.01) == doctest::Approx(2 * simpson_width(0.01, 1.5, 200000)).epsilon(1e-8));
    auto x = hex_point();
    CHECK(de_lower(x, x) == 0);

    std::mt19937_64 rng(15);
    std::normal_distribution<double> N(0, 0.3);
    for (int k = 0; k < 4; ++k) {
        auto a = random_surface(rng, 0.6, 2.5);
        auto b = from_fn(std::max(0.2, a.ell + N(rng)), a.tau() + N(rng));
        auto e = de_bracket(a, b, light());
        CHECK(e.lower <= e.upper);
        CHECK(e.lower > 0);
    }
}

TEST_CASE("Thurston distance") {
    std::mt19937_64 rng(16);
    auto x = random_surface(rng);
    CHECK(d_thurston(x, x).lo == 0);
    for (int k = 0; k < 10; ++k) {
        auto a = random_surface(rng), b = random_surface(rng), c = random_surface(rng);
        auto mid = [](const SupResult& r) { return 0.5 * (r.lo + r.hi); };
        double ab = mid(d_thurston(a, b)), bc = mid(d_thurston(b, c)), ac = mid(d_thurston(a, c));
        CHECK(ac <= ab + bc + 1e-6);
        CHECK(ab >= 0);
        CHECK(mid(d_thurston(b, a)) >= 0);
    }
}

TEST_CASE("WP path length") {
    auto x = hex_point();
    CHECK(d_wp(x, x) == 0);
    auto y = from_fn(x.ell * 1.2, x.tau() + 0.2);
    double f = d_wp(x, y), b = d_wp(y, x);
    CHECK(f > 0);
    CHECK(std::abs(f - b) <= 1e-3 * f);
    // short segments: length ≈ WP norm of the displacement
    auto z = from_fn(x.ell + 1e-3, x.tau());
    CHECK(d_wp(x, z) == doctest::Approx(wp_norm({x, 1e-3, 0})).epsilon(1e-3));
}

TEST_CASE("symmetrized distances") {
    auto x = hex_point();
    auto y = from_fn(x.ell * 0.8, x.tau() + 0.15);
    auto o = light();
    double f = de_upper(x, y, o).upper, b = de_upper(y, x, o).upper;
    CHECK(symmetrized_distance(x, y, 1, o) == doctest::Approx(0.5 * (f + b)).epsilon(1e-12));
    CHECK(symmetrized_distance(x, y, INFINITY, o) == doctest::Approx(std::max(f, b)).epsilon(1e-12));
    for (double p : {1.0, 2.0, 4.0}) {
        double dp = symmetrized_distance(x, y, p, o), dinf = std::max(f, b);
        CHECK(dinf <= std::pow(2, 1 / p) * dp * (1 + 1e-12));
        CHECK(dp <= dinf * (1 + 1e-12));
    }
    CHECK_THROWS(symmetrized_distance(x, y, 0.5, o));
}

TEST_CASE("intersection angle agrees with the length rate") {
    std::mt19937_64 rng(17);
    for (int k = 0; k < 20; ++k) {
        auto s = random_surface(rng);
        Slope a = random_slope(rng, 3);
        Slope b = dual_slope(a);
        double th = intersection_angle(s, a, b);
        double rate = directional_length(s, a, earthquake_vector(s, {b, 1})).second;
        CHECK(std::cos(th) == doctest::Approx(rate).epsilon(1e-9));
    }
    CHECK_THROWS(intersection_angle(hex_point(), {1, 0}, {1, 2}));
}

TEST_CASE("pinching path") {
    const double l0 = 1e-2;
    auto x = from_fn(l0, 0.3 * l0);
    for (double frac : {0.8, 0.9, 0.95}) {
        const double theta = frac * std::numbers::pi;
        auto r = pinch_path(x, theta, 1e-3);
        CHECK(r.alpha == Slope{1, 0});
        CHECK(r.ell0 == doctest::Approx(l0).epsilon(1e-12));
        REQUIRE(!r.ledger.empty());
        double prev = r.ell0, mag = 0;
        for (const auto& s : r.ledger) {
            CHECK(s.ell_alpha < prev);
            CHECK(s.angle > theta);
            CHECK(s.magnitude >= mag);
            prev = s.ell_alpha;
            mag = s.magnitude;
        }
        CHECK(r.ledger.back().ell_alpha <= 1e-3);
        CHECK(r.magnitude == doctest::Approx(magnitude(r.path)).epsilon(1e-9));
        CHECK(r.lower <= r.magnitude);
        // leading term with the collar and angle constants as the lower-order part
        double c = std::abs(std::cos(theta));
        double bound = 2 / c * l0 * (std::log(1 / l0) + 1 + std::log(4.0) + std::log(1 / std::sin(theta)));
        CHECK(r.magnitude <= bound);
    }
    CHECK_THROWS(pinch_path(x, 0.4 * std::numbers::pi, 1e-3));
    CHECK_THROWS(pinch_path(x, 0.9 * std::numbers::pi, 0.5));

    auto r = pinch_path(x, 0.9 * std::numbers::pi, 5e-3);
    std::ostringstream csv, svg;
    write_pinch_csv(csv, r);
    write_pinch_svg(svg, r);
    CHECK(csv.str().rfind("step,slope,displacement,ell_alpha,cumulative_magnitude\n", 0) == 0);
    CHECK(svg.str().find("<svg") == 0);
}

TEST_CASE("horocycle configuration") {
    auto h = horocycle_config_check();
    CHECK(std::abs(h.a - 1) <= 1e-12);
    CHECK(std::abs(h.b - 2) <= 1e-12);
    CHECK(h.a_residual <= 1e-12);
    CHECK(h.b_residual <= 1e-12);
    // Along the horocycle tangent at −1 through iy the parameter is y²/(1 + y²).
    double lo = 2 - std::sqrt(3.0), hi = 2 + std::sqrt(3.0);
    auto par = [](double y) { return y * y / (1 + y * y); };
    CHECK(h.c == doctest::Approx(par(hi) - par(lo)).epsilon(1e-12));
    CHECK(h.c == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-12));
    CHECK(h.d == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-12));
    CHECK(h.c < 1 - 1e-6);
    CHECK(h.d < 1 - 1e-6);
    CHECK(h.pass);
}

TEST_CASE("non-geodesic earthquake witness") {
    auto x = hex_point();
    Slope g{0, 1};
    double lx = length_of_slope(x, g);
    auto y = with_length(x, g, lx / 2);
    auto w = nongeodesic_witness(x, g, y, light());
    CHECK(w.m >= 1);
    CHECK(w.lhs > w.rhs);
    CHECK(w.lhs == doctest::Approx(w.m * lx * lx).epsilon(1e-12));
    CHECK(w.m <= std::ceil((w.d1 + w.d2) / (lx * lx * 0.75)));
    // one fewer twist does not witness, and m = 0 never does
    double m1 = w.m - 1;
    CHECK(m1 * lx * lx <= w.d1 + m1 * w.ly * w.ly + w.d2);
    CHECK(0.0 < w.d1 + w.d2);
    CHECK(w.endpoint_gap <= 1e-6);
    CHECK(magnitude(w.detour) == doctest::Approx(w.rhs).epsilon(1e-8));
    CHECK_THROWS(nongeodesic_witness(y, g, x, light()));
}

TEST_CASE("local bi-Lipschitz comparison") {
    auto x = hex_point();
    auto o = light();
    o.max_legs = 2;
    o.restarts = 1;
    auto r = local_bilipschitz_check(x, 0.05, 6, 3, o);
    CHECK(r.pairs == 6);
    CHECK(std::isfinite(r.c));
    CHECK(r.c >= 1);
    CHECK(r.min_ratio > 0);
    CHECK(r.max_asym <= 4 * r.c * r.c);
    CHECK(r.max_asym >= 1);
}
