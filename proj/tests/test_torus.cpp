#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "quake/torus.hpp"
#include "support.hpp"

using namespace quake;
using namespace quake::testing;

namespace {

// Independent trace oracle: the Christoffel word of p/q in the canonical matrices.
double matrix_trace(const MarkedSurface& s, const Slope& g) {
    auto [A, B] = s.matrices();
    if (g.q == 0) return std::abs(A.trace());
    Mat2 m;
    for (int l : christoffel_word(g.p, g.q)) m = m * (l == 2 ? B : (l == 1 ? A : A.inverse()));
    return std::abs(m.trace());
}

double commutator_trace(const MarkedSurface& s) {
    auto [A, B] = s.matrices();
    return (A * B * A.inverse() * B.inverse()).trace();
}

}  // namespace

TEST_CASE("slopes") {
    CHECK(Slope::make(2, -4) == Slope{-1, 2});
    CHECK(Slope::make(-3, 0) == Slope{1, 0});
    CHECK(Slope::make(0, -7) == Slope{0, 1});
    CHECK_THROWS(Slope::make(0, 0));
    CHECK(Slope::parse("-2/3") == Slope{-2, 3});
    CHECK(Slope::parse("inf") == Slope{1, 0});
    CHECK(Slope{-2, 3}.str() == "-2/3");
    CHECK(intersection_number({0, 1}, {1, 0}) == 1);
    CHECK(intersection_number({3, 2}, {3, 2}) == 0);
    CHECK(intersection_number({2, 1}, {0, 1}) == 2);
}

TEST_CASE("enumeration matches the Stern-Brocot depth oracle") {
    auto d0 = enumerate_slopes(0);
    std::set<std::pair<long, long>> s0;
    for (auto& s : d0) s0.insert({s.p, s.q});
    CHECK(s0 == std::set<std::pair<long, long>>{{0, 1}, {1, 0}, {1, 1}, {-1, 1}});
    auto d1 = enumerate_slopes(1);
    std::set<std::pair<long, long>> s1;
    for (auto& s : d1) s1.insert({s.p, s.q});
    for (auto e : std::vector<std::pair<long, long>>{{2, 1}, {1, 2}, {-2, 1}, {-1, 2}}) CHECK(s1.count(e) == 1);
    for (int d = 0; d <= 10; ++d) {
        auto v = enumerate_slopes(d);
        CHECK(v.size() == (size_t(1) << (d + 2)));
        // brute force over |p|, q ≤ F(d+3), the largest entry at depth d
        long fa = 1, fb = 1;
        for (int k = 0; k < d + 1; ++k) { long t = fa + fb; fa = fb; fb = t; }
        std::set<std::pair<long, long>> brute, got;
        for (long q = 0; q <= fb; ++q)
            for (long p = -fb; p <= fb; ++p) {
                if (p == 0 && q == 0) continue;
                Slope s = Slope::make(p, q);
                if (stern_brocot_depth(s) <= d) brute.insert({s.p, s.q});
            }
        for (auto& s : v) got.insert({s.p, s.q});
        CHECK(got == brute);
        // circular order: p/q strictly decreasing after 1/0
        for (size_t i = 2; i < v.size(); ++i) CHECK(v[i - 1].p * v[i].q > v[i].p * v[i - 1].q);
    }
}

TEST_CASE("from_traces examples") {
    auto lo = from_traces(3, 3, Branch::Lower);
    auto up = from_traces(3, 3, Branch::Upper);
    CHECK(std::abs(lo.z() - 3) < 1e-12);
    CHECK(std::abs(up.z() - 6) < 1e-12);
    CHECK_THROWS_AS(from_traces(2, 3, Branch::Lower), InvalidSurface);
    CHECK_THROWS_AS(from_traces(2.1, 2.1, Branch::Lower), InvalidSurface);
    auto m = from_markov_triple(3, 3, 6);
    CHECK(std::abs(m.sigma - up.sigma) < 1e-12);
    auto j = MarkedSurface::from_json(lo.to_json());
    CHECK(std::abs(j.sigma - lo.sigma) < 1e-12);
    CHECK(std::abs(j.ell - lo.ell) < 1e-14);
}

TEST_CASE("trace examples at (3,3,3)") {
    auto s = hex_point();
    CHECK(std::abs(trace_of_slope(s, {1, 1}) - 3) < 1e-12);
    CHECK(std::abs(trace_of_slope(s, {-1, 1}) - 6) < 1e-12);
    CHECK(std::abs(trace_of_slope(s, {2, 1}) - 6) < 1e-12);
    CHECK(std::abs(length_of_slope(s, {0, 1}) - kL3) < 1e-12);
    CHECK(std::abs(length_of_slope(s, {1, 0}) - kL3) < 1e-12);
    CHECK(std::abs(length_of_slope(s, {1, 1}) - kL3) < 1e-12);
    CHECK(std::abs(length_of(s, {{0, 1}, 2}) - 2 * kL3) < 1e-12);
}

TEST_CASE("trace agrees with the matrix oracle and the Markov identity") {
    std::mt19937_64 rng(1);
    for (int n = 0; n < 300; ++n) {
        auto s = random_surface(rng);
        CHECK(std::abs(commutator_trace(s) + 2) < 1e-9);
        double x = s.x(), y = s.y(), z = s.z();
        CHECK(std::abs(x * x + y * y + z * z - x * y * z) < 1e-9 * x * y * z);
        Slope g = random_slope(rng, 5);
        double t = trace_of_slope(s, g), m = matrix_trace(s, g);
        CHECK(std::abs(t - m) < 1e-9 * m);
    }
}

TEST_CASE("Fricke identity on Farey triangles") {
    std::mt19937_64 rng(2);
    for (int n = 0; n < 300; ++n) {
        auto s = random_surface(rng);
        // u, v Farey neighbours; uv = u + v and uv⁻¹ = u − v
        Slope u = random_slope(rng, 6);
        Slope v = dual_slope(u);
        double lhs = trace_of_slope(s, Slope::make(u.p + v.p, u.q + v.q)) + trace_of_slope(s, Slope::make(u.p - v.p, u.q - v.q));
        double rhs = trace_of_slope(s, u) * trace_of_slope(s, v);
        CHECK(std::abs(lhs - rhs) < 1e-9 * rhs);
    }
}

TEST_CASE("words and markings") {
    std::mt19937_64 rng(3);
    for (int n = 0; n < 500; ++n) {
        Slope g = random_slope(rng, 40);
        IMat2 m = word_matrix(word_for(g));
        CHECK(m.det() == 1);
        CHECK(Slope::make(m.a, m.c) == g);
        CHECK(intersection_number(g, dual_slope(g)) == 1);
        IMat2 r = word_matrix(word_for_matrix(m * IMat2{1, 3, 0, 1}));
        CHECK((r.a == m.a && r.b == m.b + 3 * m.a && r.c == m.c && r.d == m.d + 3 * m.c));
    }
}

TEST_CASE("mapping class equivariance") {
    std::mt19937_64 rng(4);
    for (int n = 0; n < 200; ++n) {
        auto s = random_surface(rng);
        IMat2 m = word_matrix(word_for(random_slope(rng, 5)));
        if (n % 2) m = m * IMat2{1, n % 5, 0, 1};
        auto ms = act(m, s);
        for (int k = 0; k < 5; ++k) {
            Slope g = random_slope(rng, 5);
            double a = trace_of_slope(ms, g), b = trace_of_slope(s, m.inverse().apply(g));
            CHECK(std::abs(a - b) < 1e-9 * b);
        }
    }
}

TEST_CASE("twist basics") {
    std::mt19937_64 rng(5);
    for (int n = 0; n < 100; ++n) {
        auto s = random_surface(rng);
        Slope g = random_slope(rng);
        auto t0 = twist(s, g, 0);
        for (auto d : enumerate_slopes(2)) CHECK(std::abs(trace_of_slope(t0, d) - trace_of_slope(s, d)) < 1e-12 * trace_of_slope(s, d));
        double lg = length_of_slope(s, g);
        for (double t : {0.3, 1.7, -2.2, 5 * lg}) {
            auto st = twist(s, g, t);
            CHECK(std::abs(length_of_slope(st, g) - lg) < 1e-9 * lg);
            CHECK(std::abs(commutator_trace(st) + 2) < 1e-9);
        }
    }
    CHECK_THROWS(twist(hex_point(), {0, 1}, std::nan("")));
}

TEST_CASE("Dehn twist displacement matches the slope action") {
    std::mt19937_64 rng(6);
    for (int n = 0; n < 30; ++n) {
        auto s = random_surface(rng);
        Slope g = random_slope(rng, 3);
        auto st = twist(s, g, length_of_slope(s, g));
        for (auto d : enumerate_slopes(4)) {
            double a = trace_of_slope(st, d), b = trace_of_slope(s, dehn_twist_slope(g, d));
            CHECK(std::abs(a - b) < 1e-8 * b);
        }
    }
}

TEST_CASE("earthquake vectors") {
    std::mt19937_64 rng(7);
    for (int n = 0; n < 50; ++n) {
        auto s = random_surface(rng);
        Slope a = random_slope(rng), b = random_slope(rng);
        auto ea = earthquake_vector(s, {a, 1});
        auto fa = earthquake_vector(s, {a, 1}, Backend::FiniteDifference);
        CHECK(std::abs(ea.dl - fa.dl) < 1e-7 * (1 + std::abs(ea.dl)));
        CHECK(std::abs(ea.dtau - fa.dtau) < 1e-7 * (1 + std::abs(ea.dtau)));
        auto e3 = earthquake_vector(s, {a, 3});
        CHECK(std::abs(e3.dl - 3 * ea.dl) < 1e-9 * (1 + std::abs(e3.dl)));
        CHECK(std::abs(pair(length_differential(s, a), ea)) < 1e-8);
        if (a == b) continue;
        double ab = pair(length_differential(s, b), ea);
        double ba = pair(length_differential(s, a), earthquake_vector(s, {b, 1}));
        CHECK(std::abs(ab + ba) < 1e-6 * (1 + std::abs(ab)));
    }
    auto e = earthquake_vector(square_point(), {{1, 0}, 1});
    CHECK(std::abs(pair(length_differential(square_point(), {0, 1}), e)) < 1e-12);
    CHECK(std::abs(e.dl) < 1e-15);
    CHECK(std::abs(e.dtau - 1) < 1e-15);
}

TEST_CASE("cosine formula fixes the twist sign") {
    std::mt19937_64 rng(8);
    for (int n = 0; n < 100; ++n) {
        auto s = random_surface(rng);
        Slope a = random_slope(rng, 3), b = random_slope(rng, 3);
        if (a == b) continue;
        auto terms = cosine_terms(s, a, b);
        CHECK(terms.angles.size() == size_t(intersection_number(a, b)));
        double fd = pair(length_differential(s, b), earthquake_vector(s, {a, 1}, Backend::FiniteDifference));
        CHECK(std::abs(terms.sum - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
        CHECK(std::abs(terms.sum) <= intersection_number(a, b));
    }
    CHECK(std::abs(cosine_pairing(square_point(), {1, 0}, {0, 1})) < 1e-9);
}

TEST_CASE("christoffel words") {
    CHECK(christoffel_word(0, 1) == std::vector<int>{2});
    CHECK(christoffel_word(1, 1) == std::vector<int>{1, 2});
    CHECK(christoffel_word(2, 1) == std::vector<int>{1, 1, 2});
    CHECK(christoffel_word(-1, 2) == std::vector<int>{-1, 2, 2});
}

TEST_CASE("systole") {
    auto r = systole(hex_point());
    CHECK(r.slope == Slope{0, 1});
    CHECK(std::abs(r.length - kL3) < 1e-12);
    std::mt19937_64 rng(9);
    for (int n = 0; n < 100; ++n) {
        auto s = random_surface(rng, 0.05, 4);
        std::uniform_real_distribution<double> ut(-40, 40);
        Slope g = random_slope(rng);
        auto st = twist(s, g, ut(rng));
        auto sys = systole(st);
        CHECK(sys.length <= length_of_slope(st, g) * (1 + 1e-12));
        double brute = 1e300;
        for (auto d : enumerate_slopes(9)) brute = std::min(brute, length_of_slope(st, d));
        CHECK(sys.length <= brute * (1 + 1e-12));
        CHECK(std::abs(length_of_slope(st, sys.slope) - sys.length) < 1e-9 * sys.length);
    }
}

TEST_CASE("Fenchel-Nielsen coordinates") {
    auto s = square_point();
    auto c = fn_coordinates(s, {1, 0});
    CHECK(std::abs(c.tau) < 1e-8);
    CHECK(c.dual == Slope{0, 1});
    CHECK(c.ell == length_of_slope(s, {1, 0}));
    std::mt19937_64 rng(10);
    for (int n = 0; n < 50; ++n) {
        auto x = random_surface(rng);
        Slope a = random_slope(rng);
        double t = std::uniform_real_distribution<double>(-3, 3)(rng);
        auto c0 = fn_coordinates(x, a), c1 = fn_coordinates(twist(x, a, t), a);
        CHECK(std::abs(c1.tau - c0.tau - t) < 1e-8 * (1 + std::abs(c0.tau)));
        // the section: the dual length is minimal at τ = 0
        auto base = twist(x, a, -c0.tau);
        double lb = length_of_slope(base, c0.dual);
        CHECK(length_of_slope(twist(base, a, 1e-3), c0.dual) > lb);
        CHECK(length_of_slope(twist(base, a, -1e-3), c0.dual) > lb);
    }
}

TEST_CASE("Taylor remainder is quadratic") {
    std::mt19937_64 rng(11);
    for (int n = 0; n < 20; ++n) {
        auto s = random_surface(rng);
        Slope g = random_slope(rng, 3), d = random_slope(rng, 3);
        if (g == d || intersection_number(g, d) == 0) continue;
        auto fit = taylor_remainder_check(s, g, d);
        CHECK(fit.exponent > 1.9);
        CHECK(fit.exponent < 2.1);
        auto fit2 = taylor_remainder_check(s, g, d, 2);
        CHECK(std::abs(fit2.phi1 - 2 * fit.phi1) < 1e-6 * (1 + std::abs(fit.phi1)));
    }
}
