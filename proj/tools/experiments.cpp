#include "experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "quake/asym.hpp"
#include "quake/fdcomp.hpp"

namespace quake::cli {

namespace {

using clk = std::chrono::steady_clock;
double seconds_since(clk::time_point t0) { return std::chrono::duration<double>(clk::now() - t0).count(); }

double Log(double t) { return std::max(1.0, std::log(t)); }

MarkedSurface random_surface(std::mt19937_64& rng, double lmin = 0.3, double lmax = 3) {
    std::uniform_real_distribution<double> ul(std::log(lmin), std::log(lmax)), ut(-0.5, 0.5);
    double l = std::exp(ul(rng));
    return MarkedSurface::from_fn(l, ut(rng) * l);
}

Slope random_slope(std::mt19937_64& rng, int maxq) {
    std::uniform_int_distribution<int> up(-maxq, maxq), uq(0, maxq);
    for (;;) {
        int p = up(rng), q = uq(rng);
        if (p == 0 && q == 0) continue;
        return Slope::make(p, q);
    }
}

std::vector<double> split_numbers(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double x = std::stod(item, &used);
        if (used != item.size()) throw std::invalid_argument("bad number '" + item + "'");
        v.push_back(x);
    }
    return v;
}

// Left twist on homology, δ ↦ δ − ⟨γ, δ⟩γ with ⟨γ, δ⟩ = γ.p δ.q − γ.q δ.p.
Slope twist_oracle(const Slope& g, const Slope& d) {
    std::int64_t k = g.p * d.q - g.q * d.p;
    return Slope::make(d.p - k * g.p, d.q - k * g.q);
}

}  // namespace

MarkedSurface parse_surface(const std::string& text) {
    auto take = [&](const std::string& prefix) { return text.rfind(prefix, 0) == 0 ? text.substr(prefix.size()) : ""; };
    if (auto r = take("fn:"); !r.empty()) {
        auto v = split_numbers(r);
        if (v.size() != 2) throw std::invalid_argument("fn: needs ell,tau");
        return MarkedSurface::from_fn(v[0], v[1]);
    }
    if (auto r = take("markov:"); !r.empty()) {
        auto v = split_numbers(r);
        if (v.size() != 3) throw std::invalid_argument("markov: needs x,y,z");
        return from_markov_triple(v[0], v[1], v[2]);
    }
    std::string body = text;
    Branch br = Branch::Lower;
    if (auto c = body.rfind(','); c != std::string::npos) {
        std::string tail = body.substr(c + 1);
        if (tail == "lower" || tail == "upper") {
            br = tail == "lower" ? Branch::Lower : Branch::Upper;
            body = body.substr(0, c);
        }
    }
    auto v = split_numbers(body);
    if (v.size() != 2) throw std::invalid_argument("surface '" + text + "': expected x,y[,branch]");
    return from_traces(v[0], v[1], br);
}

double parse_angle(const std::string& text) {
    std::string t = text;
    double scale = 1;
    if (t.size() >= 2 && t.substr(t.size() - 2) == "pi") {
        scale = std::numbers::pi;
        t = t.substr(0, t.size() - 2);
        if (t.empty()) return scale;
    }
    std::size_t used = 0;
    double v = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument("bad angle '" + text + "'");
    return v * scale;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

DeOptions light_de() {
    DeOptions o;
    o.max_legs = 3;
    o.restarts = 2;
    o.max_evals = 150;
    return o;
}

json cosine_formula(int samples, std::uint64_t seed) {
    auto t0 = clk::now();
    std::mt19937_64 rng(seed);
    double worst = 0, worst_recip = 0;
    int n = 0;
    while (n < samples) {
        auto s = random_surface(rng);
        Slope a = random_slope(rng, 3), b = random_slope(rng, 3);
        if (a == b || intersection_number(a, b) > 3) continue;
        double geo = cosine_terms(s, a, b).sum;
        double fd = pair(length_differential(s, b), earthquake_vector(s, {a, 1}, Backend::FiniteDifference));
        double rev = pair(length_differential(s, a), earthquake_vector(s, {b, 1}, Backend::FiniteDifference));
        worst = std::max(worst, std::abs(geo - fd) / std::max(1.0, std::abs(fd)));
        worst_recip = std::max(worst_recip, std::abs(fd + rev) / std::max(1.0, std::abs(fd)));
        ++n;
    }
    double secs = seconds_since(t0);
    return {{"samples", n},
            {"max_rel_error", worst},
            {"max_reciprocity_defect", worst_recip},
            {"seconds", secs},
            {"pass_cosine", worst <= 1e-6 && secs < 60},
            {"pass_reciprocity", worst_recip <= 1e-6},
            {"pass", worst <= 1e-6 && secs < 60 && worst_recip <= 1e-6}};
}

json twist_invariance(int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double worst = 0;
    for (int n = 0; n < samples; ++n) {
        auto s = random_surface(rng);
        Slope g = random_slope(rng, 4);
        double l0 = length_of_slope(s, g);
        for (int k = 1; k <= 50; ++k) {
            double t = 5 * l0 * k / 50;
            worst = std::max(worst, std::abs(length_of_slope(twist(s, g, t), g) - l0) / l0);
        }
    }
    return {{"samples", samples}, {"max_rel_drift", worst}, {"pass", worst <= 1e-9}};
}

json dehn_equivariance(int surfaces, int depth, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto slopes = enumerate_slopes(depth);
    double worst = 0;
    for (int n = 0; n < surfaces; ++n) {
        auto s = random_surface(rng);
        Slope g = random_slope(rng, 3);
        auto st = twist(s, g, length_of_slope(s, g));
        for (const auto& d : slopes) {
            double a = trace_of_slope(st, d), b = trace_of_slope(s, twist_oracle(g, d));
            worst = std::max(worst, std::abs(a - b) / b);
        }
    }
    return {{"surfaces", surfaces},
            {"slopes", slopes.size()},
            {"depth", depth},
            {"max_rel_trace_error", worst},
            {"pass", worst <= 1e-8}};
}

json duality(int surfaces, int slopes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double worst = 0;
    for (int n = 0; n < surfaces; ++n) {
        auto s = random_surface(rng);
        for (int k = 0; k < slopes; ++k) worst = std::max(worst, duality_check(s, random_slope(rng, 4)));
    }
    return {{"cases", surfaces * slopes}, {"max_residual", worst}, {"pass", worst <= 1e-4}};
}

std::vector<MarkedSurface> surface_grid(int n, double lmin, double lmax) {
    std::vector<MarkedSurface> out;
    for (int i = 0; i < n; ++i) {
        double u = (i + 0.5) / n;
        double w = std::fmod((i + 0.5) * 0.6180339887498949, 1.0);
        double l = std::exp(std::log(lmin) + u * (std::log(lmax) - std::log(lmin)));
        out.push_back(MarkedSurface::from_fn(l, (w - 0.5) * l));
    }
    return out;
}

json indicatrix_check(const IndicatrixSample& ind) {
    auto c = convexity(ind);
    return {{"ell", ind.base.ell},
            {"tau", ind.base.tau()},
            {"samples", ind.points.size()},
            {"sign_flips", c.sign_flips},
            {"collinear", c.collinear},
            {"origin_inside", c.origin_inside},
            {"min_turn", c.min_turn},
            {"pass", c.sign_flips == 0 && c.origin_inside}};
}

json indicatrix_family(int surfaces, int n) {
    json rows = json::array();
    bool pass = true;
    int flips = 0;
    for (const auto& s : surface_grid(surfaces, 0.1, 4)) {
        auto r = indicatrix_check(indicatrix(s, n));
        pass = pass && r["pass"].get<bool>();
        flips += r["sign_flips"].get<int>();
        rows.push_back(r);
    }
    return {{"surfaces", rows}, {"total_sign_flips", flips}, {"pass", pass}};
}

json asymmetry(int surfaces, int dirs, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    json rows = json::array();
    int above = 0;
    for (int n = 0; n < surfaces; ++n) {
        auto s = random_surface(rng);
        auto a = asymmetry_ratio(s, dirs);
        if (a.ratio > 1 + 1e-6) ++above;
        rows.push_back({{"ell", s.ell}, {"tau", s.tau()}, {"ratio", a.ratio},
                        {"direction", {a.direction.x, a.direction.y}}});
    }
    double frac = double(above) / surfaces;
    return {{"ratios", rows}, {"fraction_above", frac}, {"pass", frac >= 0.9}};
}

ChainConstants norm_chain(int surfaces, int dirs) {
    GramOptions g;
    g.cutoff = 8;
    ChainConstants k;
    for (const auto& s : surface_grid(surfaces, 0.1, 3)) {
        double ls = systole(s).length;
        auto t = wp_tensor(s, {}, g);
        for (int j = 0; j < dirs; ++j) {
            double a = 2 * std::numbers::pi * (j + 0.5) / dirs;
            TangentVector v{s, std::cos(a), std::sin(a)};
            double e = earthquake_norm(v).value, th = thurston_norm(v).hi, wp = wp_norm(v, t);
            k.k0 = std::max(k.k0, ls * Log(1 / ls) * th / e);
            k.k1 = std::max(k.k1, e / wp);
            k.k2 = std::max(k.k2, wp / th);
            ++k.samples;
        }
    }
    return k;
}

json norm_chain_check(int surfaces, int dirs) {
    auto a = norm_chain(surfaces, dirs), b = norm_chain(2 * surfaces, 2 * dirs);
    auto row = [](const ChainConstants& c) {
        return json{{"samples", c.samples}, {"K0", c.k0}, {"K1", c.k1}, {"K2", c.k2}};
    };
    auto change = [](double x, double y) { return std::abs(y - x) / x; };
    double worst = std::max({change(a.k0, b.k0), change(a.k1, b.k1), change(a.k2, b.k2)});
    bool finite = std::isfinite(b.k0) && std::isfinite(b.k1) && std::isfinite(b.k2) && b.k0 > 0 && b.k1 > 0 && b.k2 > 0;
    return {{"coarse", row(a)}, {"fine", row(b)}, {"max_relative_change", worst}, {"pass", finite && worst < 0.1}};
}

json wp_pinching_window(double c) {
    GramOptions g;
    g.cutoff = 8;
    const double lo = std::sqrt(1 / (2 * std::numbers::pi));
    auto ratio = [&](double l) {
        auto s = MarkedSurface::from_fn(l, 0.1 * l);
        return wp_norm(earthquake_vector(s, {{1, 0}, 1}), wp_tensor(s, {}, g)) / std::sqrt(l);
    };
    bool fitted = !(c > 0);
    if (fitted) {
        double m = 0;
        for (double l : {0.5, 0.2, 0.1, 0.05}) m = std::max(m, ratio(l));
        c = m * m / 2;
    }
    double hi = std::sqrt(2 * c);
    json rows = json::array();
    bool pass = true;
    for (double l : {0.04, 0.02, 0.01, 5e-3, 3e-3}) {
        double r = ratio(l);
        bool ok = r >= lo * 0.95 && r <= hi;
        pass = pass && ok;
        rows.push_back({{"ell", l}, {"ratio", r}, {"in_window", ok}});
    }
    return {{"c", c}, {"c_fitted_here", fitted}, {"window", {lo * 0.95, hi}}, {"family", rows}, {"pass", pass}};
}

json symmetrized_norms(int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ua(0, 2 * std::numbers::pi);
    int bad = 0;
    for (int n = 0; n < samples; ++n) {
        auto s = random_surface(rng);
        double a = ua(rng);
        TangentVector v{s, std::cos(a), std::sin(a)};
        double inf = symmetrized_norm(v, INFINITY), one = symmetrized_norm(v, 1);
        for (double p : {1.0, 2.0, 3.5}) {
            double np = symmetrized_norm(v, p), k = std::pow(2.0, 1 / p);
            if (inf > k * np * (1 + 1e-12) || np > inf * (1 + 1e-12) || np < one * (1 - 1e-12)) ++bad;
        }
    }
    return {{"samples", samples}, {"violations", bad}, {"pass", bad == 0}};
}

std::vector<PairSample> distance_pairs(int n, std::uint64_t seed, const DeOptions& opt) {
    std::mt19937_64 rng(seed);
    std::vector<PairSample> out;
    for (int i = 0; i < n; ++i) {
        PairSample p;
        p.x = random_surface(rng, 0.5, 2.5);
        p.y = random_surface(rng, 0.5, 2.5);
        p.fwd = de_upper(p.x, p.y, opt);
        p.bwd = de_upper(p.y, p.x, opt);
        p.lower = de_lower(p.x, p.y);
        p.lower_back = de_lower(p.y, p.x);
        p.dth = d_thurston(p.x, p.y);
        out.push_back(std::move(p));
    }
    return out;
}

json bracket_check(const std::vector<PairSample>& pairs) {
    int violations = 0, evaluated = 0;
    json rows = json::array();
    for (const auto& p : pairs) {
        for (auto [lo, up] : {std::pair{p.lower, p.fwd.upper}, std::pair{p.lower_back, p.bwd.upper}}) {
            ++evaluated;
            if (!(lo <= up)) ++violations;
        }
        rows.push_back({{"lower", p.lower}, {"upper", p.fwd.upper}, {"method", p.fwd.method},
                        {"lower_back", p.lower_back}, {"upper_back", p.bwd.upper}});
    }
    return {{"evaluated", evaluated}, {"violations", violations}, {"pairs", rows}, {"pass", violations == 0}};
}

json de_thurston_ratio(const std::vector<PairSample>& pairs) {
    auto k_of = [&](std::size_t n) {
        double k = 0;
        for (std::size_t i = 0; i < n; ++i) k = std::max(k, pairs[i].fwd.upper / pairs[i].dth.lo);
        return k;
    };
    std::size_t half = pairs.size() / 2;
    double k1 = k_of(half), k2 = k_of(pairs.size());
    double change = std::abs(k2 - k1) / k1;
    return {{"K_half", k1}, {"K_all", k2}, {"pairs", pairs.size()}, {"relative_change", change},
            {"pass", std::isfinite(k2) && change < 0.1}};
}

json symmetrized_distances(const std::vector<PairSample>& pairs) {
    int bad = 0, checks = 0;
    for (const auto& s : pairs) {
        double a = s.fwd.upper, b = s.bwd.upper;
        double inf = asym::p_mean(a, b, INFINITY);
        for (double p : {1.0, 2.0, 3.5}) {
            double dp = asym::p_mean(a, b, p), k = std::pow(2.0, 1 / p);
            ++checks;
            if (inf > k * dp * (1 + 1e-12) || k * dp > k * inf * (1 + 1e-12)) ++bad;
        }
    }
    return {{"checks", checks}, {"violations", bad}, {"pass", bad == 0}};
}

json thurston_triangle(int triples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    double worst = -INFINITY, self = 0;
    for (int n = 0; n < triples; ++n) {
        auto x = random_surface(rng, 0.5, 2.5), y = random_surface(rng, 0.5, 2.5), z = random_surface(rng, 0.5, 2.5);
        double xz = d_thurston(x, z).lo, xy = d_thurston(x, y).hi, yz = d_thurston(y, z).hi;
        worst = std::max(worst, xz - xy - yz);
        if (n < 10) self = std::max(self, std::abs(d_thurston(x, x).hi));
    }
    return {{"triples", triples}, {"max_triangle_excess", worst}, {"max_self_distance", self},
            {"pass", worst <= 1e-6 && self <= 1e-12}};
}

double pinch_scale(double ell0) { return 2 * ell0 * Log(1 / ell0); }

PinchRun pinch(double ell0, double theta, double target) {
    PinchRun r{pinch_path(MarkedSurface::from_fn(ell0, 0.3 * ell0), theta, target), ell0, theta};
    r.ratio = r.result.magnitude / pinch_scale(ell0);
    r.lower_ratio = r.result.lower / pinch_scale(ell0);
    return r;
}

json pinch_check(const std::vector<PinchRun>& runs, double theta_window) {
    json rows = json::array();
    bool window = false, monotone = true;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto& r = runs[i];
        double hi = 1 / std::abs(std::cos(r.theta)) + 0.1;
        bool in = r.ratio >= 1 && r.ratio <= hi;
        if (std::abs(r.theta - theta_window) < 1e-12) window = in;
        if (i > 0 && runs[i].theta > runs[i - 1].theta && !(r.ratio < runs[i - 1].ratio)) monotone = false;
        rows.push_back({{"theta_over_pi", r.theta / std::numbers::pi},
                        {"ell0", r.ell0},
                        {"ell_end", r.result.ledger.empty() ? r.ell0 : r.result.ledger.back().ell_alpha},
                        {"steps", r.result.ledger.size()},
                        {"magnitude", r.result.magnitude},
                        {"ratio", r.ratio},
                        {"lower_ratio", r.lower_ratio},
                        {"window", {1.0, hi}},
                        {"in_window", in}});
    }
    return {{"runs", rows}, {"window_ok", window}, {"monotone", monotone}, {"pass", window && monotone}};
}

json nongeodesic(const DeOptions& opt) {
    auto t0 = clk::now();
    auto x = from_traces(3, 3, Branch::Lower);
    Slope g{0, 1};
    double lx = length_of_slope(x, g);
    auto y = with_length(x, g, lx / 2);
    auto w = nongeodesic_witness(x, g, y, opt);
    double secs = seconds_since(t0);
    json segs = json::array();
    for (const auto& s : w.detour.segments())
        segs.push_back({{"slope", s.slope.str()}, {"weight", s.weight}, {"duration", s.duration}});
    return {{"gamma", g.str()},
            {"x", {{"ell", x.ell}, {"tau", x.tau()}}},
            {"y", {{"ell", y.ell}, {"tau", y.tau()}}},
            {"m", w.m},
            {"lhs", w.lhs},
            {"rhs", w.rhs},
            {"d1", w.d1},
            {"d2", w.d2},
            {"ell_gamma_x", w.lx},
            {"ell_gamma_y", w.ly},
            {"endpoint_gap", w.endpoint_gap},
            {"detour", segs},
            {"seconds", secs},
            {"pass", w.lhs > w.rhs && w.endpoint_gap <= 1e-6 && secs < 120}};
}

json horocycle() {
    auto h = horocycle_config_check();
    bool pass = std::abs(h.a - 1) <= 1e-12 && std::abs(h.b - 2) <= 1e-12 && h.c < 1 - 1e-6 && h.d < 1 - 1e-6;
    return {{"a", h.a}, {"b", h.b}, {"c_sum", h.c}, {"d_sum", h.d},
            {"a_residual", h.a_residual}, {"b_residual", h.b_residual},
            {"x_low", {h.x_low.re, h.x_low.im}}, {"x_high", {h.x_high.re, h.x_high.im}},
            {"pass", pass}};
}

json fd_machinery() {
    using namespace quake::fd;
    using boost::multiprecision::cpp_rational;
    json out;

    bool series = true;
    for (Index n : {1, 2, 3, 10, 100, 1000})
        series = series && nat_partial_exact(n) == 1 - cpp_rational(1, n);
    out["nat_series_exact"] = series;

    auto no = nat_example_space();
    bool embedded = true;
    for (Index m = 1; m <= 8; ++m)
        for (Index n = 1; n <= 8; ++n) {
            auto v = extended_distance(embed_point(no, m, "m"), embed_point(no, n, "n"), 16);
            double d = no(m, n);
            embedded = embedded && v.lo == d && v.hi == d && v.hi_certified;
        }
    out["embedded_exact"] = embedded;

    auto a = nat_sequence();
    auto phi = [](Index j) { return 3 * j + 1; };
    auto sub = fd_equivalent(a, subsequence(a, phi), subsequence_schedule(phi, a.tail_bound), 2000);
    out["subsequence_equivalence"] = sub;

    MetricOracle<double> line{"R", [](const double& x, const double& y) { return std::abs(x - y); }};
    FDSeq<double> dyadic;
    dyadic.space = line;
    dyadic.term = [](Index n) { return 1 - std::ldexp(1.0, -int(n)); };
    dyadic.tail_bound = [](Index i) { return std::ldexp(1.0, -int(i)); };
    dyadic.label = "dyadic";
    auto harmonic = cauchy_subsequence<double>(
        line, [](Index n) { return (n % 2 ? -1.0 : 1.0) / double(n); },
        [](double eps) { return Index(std::ceil(2 / eps)); }, "alternating harmonic");
    bool cauchy = true;
    for (const auto* s : {&dyadic, &harmonic})
        cauchy = cauchy && is_fd(*s, 40).proven && cauchy_check(*s, 40).pass;
    out["cauchy"] = cauchy;

    const double theta = 0.9 * std::numbers::pi;
    auto r = pinch_path(MarkedSurface::from_fn(1e-2, 3e-3), theta, 1e-3);
    auto ps = pinch_sequence(r, theta);
    auto rep = is_fd(ps.seq, Index(ps.samples.size()));
    bool alpha_converges = false, others_diverge = true;
    json limits = json::array();
    for (const auto& l : ps.limits) {
        if (l.slope == r.alpha) alpha_converges = l.status == "converges";
        else others_diverge = others_diverge && l.status == "diverges" && l.last >= l.certificate;
        limits.push_back({{"slope", l.slope.str()}, {"status", l.status}, {"last", l.last}, {"certificate", l.certificate}});
    }
    out["pinch"] = {{"fd", rep}, {"samples", ps.samples.size()}, {"remainder", ps.remainder}, {"limits", limits}};
    bool pinch_ok = rep.proven && alpha_converges && others_diverge;
    out["pinch_ok"] = pinch_ok;
    out["pass"] = series && embedded && sub.proven && cauchy && pinch_ok;
    return out;
}

json taylor(int cases, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    json rows = json::array();
    double lo = INFINITY, hi = -INFINITY;
    int n = 0;
    while (n < cases) {
        auto s = random_surface(rng);
        Slope g = random_slope(rng, 3), d = random_slope(rng, 3);
        if (g == d || intersection_number(g, d) == 0) continue;
        auto fit = taylor_remainder_check(s, g, d);
        lo = std::min(lo, fit.exponent);
        hi = std::max(hi, fit.exponent);
        rows.push_back({{"gamma", g.str()}, {"delta", d.str()}, {"ell", s.ell}, {"tau", s.tau()}, {"exponent", fit.exponent}});
        ++n;
    }
    return {{"cases", rows}, {"min_exponent", lo}, {"max_exponent", hi}, {"pass", lo >= 1.9 && hi <= 2.1}};
}

json bilipschitz(const MarkedSurface& s, double radius, int halvings, int pairs, std::uint64_t seed,
                 const DeOptions& opt) {
    json rows = json::array();
    double first = 0, drift = 0;
    for (int k = 0; k <= halvings; ++k) {
        double r = std::ldexp(radius, -k);
        auto b = local_bilipschitz_check(s, r, pairs, seed, opt);
        if (k == 0) first = b.c;
        drift = std::max(drift, std::abs(b.c - first) / first);
        rows.push_back({{"radius", r}, {"C", b.c}, {"min_ratio", b.min_ratio}, {"max_ratio", b.max_ratio},
                        {"max_asym", b.max_asym}, {"pairs", b.pairs}});
    }
    return {{"balls", rows}, {"max_drift", drift}, {"pass", std::isfinite(first) && drift < 0.2}};
}

}  // namespace quake::cli
