#include "quake/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

namespace quake {

void PiecewisePath::push(const Segment& s) {
    if (!(s.weight > 0) || !(s.duration >= 0)) throw std::domain_error("PiecewisePath: weight must be > 0 and duration ≥ 0");
    segs_.push_back(s);
    end_ = twist(end_, s.slope, s.displacement());
}

std::vector<MarkedSurface> PiecewisePath::waypoints() const {
    std::vector<MarkedSurface> out{start_};
    MarkedSurface cur = start_;
    for (const Segment& s : segs_) {
        cur = twist(cur, s.slope, s.displacement());
        out.push_back(cur);
    }
    return out;
}

MarkedSurface PiecewisePath::replay() const { return waypoints().back(); }

PiecewisePath PiecewisePath::split(std::size_t i, double fraction) const {
    if (i >= segs_.size() || !(fraction >= 0 && fraction <= 1)) throw std::out_of_range("PiecewisePath::split");
    PiecewisePath out(start_);
    for (std::size_t k = 0; k < segs_.size(); ++k) {
        if (k != i) {
            out.push(segs_[k]);
            continue;
        }
        Segment a = segs_[k], b = segs_[k];
        a.duration *= fraction;
        b.duration -= a.duration;
        out.push(a);
        out.push(b);
    }
    return out;
}

PiecewisePath PiecewisePath::then(const PiecewisePath& next, double tol) const {
    double gap = chart_distance(end_, next.start());
    if (gap > tol) throw std::domain_error("PiecewisePath::then: paths do not meet");
    PiecewisePath out = *this;
    for (const Segment& s : next.segments()) out.push(s);
    return out;
}

double magnitude(const PiecewisePath& p) {
    double m = 0;
    MarkedSurface cur = p.start();
    for (const Segment& s : p.segments()) {
        m += s.displacement() * length_of_slope(cur, s.slope);
        cur = twist(cur, s.slope, s.displacement());
    }
    return m;
}

double chart_distance(const MarkedSurface& a, const MarkedSurface& b) {
    return std::hypot(a.ell - b.ell, a.sigma - b.sigma);
}

IMat2 dehn_matrix(const Slope& g, std::int64_t m) {
    std::int64_t c = m * static_cast<std::int64_t>(kLeftTwist);
    return {1 - c * g.p * g.q, c * g.p * g.p, -c * g.q * g.q, 1 + c * g.p * g.q};
}

PiecewisePath map_path(const IMat2& m, const PiecewisePath& p) {
    PiecewisePath out(act(m, p.start()));
    for (Segment s : p.segments()) {
        s.slope = m.apply(s.slope);
        out.push(s);
    }
    return out;
}

MarkedSurface with_length(const MarkedSurface& s, const Slope& gamma, double len) {
    if (!(len > 0)) throw std::domain_error("with_length: length must be positive");
    chart::Word w = word_for(gamma);
    chart::Fn<double> f = chart::apply_word(s.fn(), w);
    f.sigma *= len / f.ell;
    f.ell = len;
    f = chart::apply_word_inverse(f, w);
    return {f.ell, f.sigma};
}

// ---------------------------------------------------------------------------
// Two-slope legs

namespace {

struct SV {
    std::int64_t p, q;
};

SV mediant(SV a, SV b) {
    std::int64_t d = a.p * b.q - a.q * b.p;
    return {a.p + d * b.p, a.q + d * b.q};
}

Slope as_slope(SV v) { return Slope::make(v.p, v.q); }

Vec2 eq_vec(const MarkedSurface& s, SV v) {
    TangentVector e = earthquake_vector(s, {as_slope(v), 1});
    return {e.dl, e.dtau};
}

Vec2 chart_delta(const MarkedSurface& u, const MarkedSurface& v) { return {v.ell - u.ell, v.tau() - u.tau()}; }

struct Solve {
    double ta, tb, gap;
};

// Newton on (ta, tb) ↦ twist(twist(u, a, ta), b, tb) − v with a central FD Jacobian.
std::optional<Solve> newton_leg(const MarkedSurface& u, const MarkedSurface& v, const Slope& a, const Slope& b,
                                double ta, double tb) {
    auto F = [&](double x, double y) -> std::optional<Vec2> {
        try {
            return chart_delta(v, twist(twist(u, a, x), b, y));
        } catch (const std::exception&) {
            return std::nullopt;
        }
    };
    auto r = F(ta, tb);
    if (!r) return std::nullopt;
    double scale = 1 + std::hypot(v.ell, v.sigma);
    for (int it = 0; it < 30; ++it) {
        double res = std::hypot(r->x, r->y);
        if (res <= 1e-14 * scale) break;
        double ha = 1e-7 * (1 + std::abs(ta)), hb = 1e-7 * (1 + std::abs(tb));
        auto fa1 = F(ta + ha, tb), fa0 = F(ta - ha, tb), fb1 = F(ta, tb + hb), fb0 = F(ta, tb - hb);
        if (!fa1 || !fa0 || !fb1 || !fb0) return std::nullopt;
        double j11 = (fa1->x - fa0->x) / (2 * ha), j21 = (fa1->y - fa0->y) / (2 * ha);
        double j12 = (fb1->x - fb0->x) / (2 * hb), j22 = (fb1->y - fb0->y) / (2 * hb);
        double det = j11 * j22 - j12 * j21;
        if (!(std::abs(det) > 0)) return std::nullopt;
        double da = -(j22 * r->x - j12 * r->y) / det;
        double db = -(-j21 * r->x + j11 * r->y) / det;
        double lam = 1;
        bool moved = false;
        for (int k = 0; k < 20; ++k, lam /= 2) {
            auto rn = F(ta + lam * da, tb + lam * db);
            if (rn && std::hypot(rn->x, rn->y) < res) {
                ta += lam * da;
                tb += lam * db;
                r = rn;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }
    return Solve{ta, tb, std::hypot(r->x, r->y)};
}

}  // namespace

std::optional<Leg> two_slope_leg(const MarkedSurface& u, const MarkedSurface& v, const DeOptions& opt) {
    Vec2 d = chart_delta(u, v);
    if (std::hypot(d.x, d.y) == 0) return Leg{{1, 0}, {0, 1}, 0, 0, 0, 0};
    std::vector<SV> circle;
    for (const Slope& s : enumerate_slopes(opt.leg_depth)) circle.push_back({s.p, s.q});
    circle.push_back({-1, 0});
    std::vector<Vec2> e;
    for (SV c : circle) e.push_back(eq_vec(u, c));
    const double orient = cross(e[0], e[1]) > 0 ? 1 : -1;
    auto between = [&](Vec2 a, Vec2 b) { return orient * cross(a, d) >= 0 && orient * cross(d, b) >= 0; };
    const std::size_t n_arcs = circle.size() - 1;
    std::size_t home = 0;
    for (std::size_t i = 0; i < n_arcs; ++i)
        if (between(e[i], e[i + 1])) home = i;

    // Solves on the arc (L, R) in both orders; returns the cheapest feasible one.
    auto solve_arc = [&](SV L, SV R, Vec2 eL, Vec2 eR, const Leg* hint) -> std::optional<Leg> {
        std::optional<Leg> best;
        for (int order = 0; order < 2; ++order) {
            SV A = order ? R : L, B = order ? L : R;
            Vec2 ea = order ? eR : eL, eb = order ? eL : eR;
            Slope a = as_slope(A), b = as_slope(B);
            std::vector<std::pair<double, double>> inits;
            if (hint) inits.push_back({hint->ta, hint->tb});
            double det = cross(ea, eb);
            if (det != 0) {
                double ta = cross(d, eb) / det, tb = cross(ea, d) / det;
                inits.push_back({std::max(ta, 0.0), std::max(tb, 0.0)});
                inits.push_back({std::abs(ta), std::abs(tb)});
            }
            for (auto [ia, ib] : inits) {
                auto s = newton_leg(u, v, a, b, ia, ib);
                if (!s) continue;
                double floor = -1e-12 * (1 + std::abs(s->ta) + std::abs(s->tb));
                if (s->ta < floor || s->tb < floor) continue;
                Leg leg{a, b, std::max(s->ta, 0.0), std::max(s->tb, 0.0), 0, 0};
                MarkedSurface mid = twist(u, a, leg.ta);
                leg.gap = chart_distance(twist(mid, b, leg.tb), v);
                if (leg.gap > opt.eps_chart) continue;
                leg.cost = leg.ta * length_of_slope(u, a) + leg.tb * length_of_slope(mid, b);
                if (!best || leg.cost < best->cost) best = leg;
                break;
            }
        }
        return best;
    };

    // Arcs are tried outward from the one containing the chart direction.
    std::optional<Leg> best;
    SV L{}, R{};
    Vec2 eL{}, eR{};
    for (std::size_t k = 0; k < n_arcs && !best; ++k) {
        std::size_t i = (k % 2 == 0) ? (home + k / 2) % n_arcs : (home + n_arcs - (k + 1) / 2) % n_arcs;
        SV l = circle[i], r = circle[i + 1];
        if (auto leg = solve_arc(l, r, e[i], e[i + 1], nullptr)) {
            best = leg;
            L = l, R = r, eL = e[i], eR = e[i + 1];
        }
    }
    if (!best) return std::nullopt;
    Leg last = *best;
    for (int level = 0; level < opt.leg_refine; ++level) {
        SV M = mediant(L, R);
        if (std::abs(M.p) > (std::int64_t(1) << 22) || std::abs(M.q) > (std::int64_t(1) << 22)) break;
        Vec2 eM = eq_vec(u, M);
        auto left = solve_arc(L, M, eL, eM, &last), right = solve_arc(M, R, eM, eR, &last);
        bool go_left = left && (!right || left->cost <= right->cost);
        if (!left && !right) break;
        last = go_left ? *left : *right;
        if (go_left) R = M, eR = eM;
        else L = M, eL = eM;
        if (last.cost < best->cost) best = last;
    }
    return best;
}

// ---------------------------------------------------------------------------
// Upper bound search

namespace {

struct Candidate {
    double cost = std::numeric_limits<double>::infinity();
    std::vector<Leg> legs;
    bool ok = false;
};

Candidate chain(const std::vector<MarkedSurface>& pts, const DeOptions& opt) {
    Candidate c;
    c.cost = 0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        auto leg = two_slope_leg(pts[i], pts[i + 1], opt);
        if (!leg) return Candidate{};
        c.cost += leg->cost;
        c.legs.push_back(*leg);
    }
    c.ok = true;
    return c;
}

std::vector<MarkedSurface> straight(const MarkedSurface& x, const MarkedSurface& y, int k) {
    std::vector<MarkedSurface> pts;
    for (int i = 0; i <= k; ++i) {
        double s = double(i) / k;
        pts.push_back(MarkedSurface::from_fn(x.ell + s * (y.ell - x.ell), x.tau() + s * (y.tau() - x.tau())));
    }
    pts.front() = x;
    pts.back() = y;
    return pts;
}

struct NmContext {
    std::function<double(const gsl_vector*)> f;
};

double nm_call(const gsl_vector* v, void* p) { return static_cast<NmContext*>(p)->f(v); }

PiecewisePath build(const MarkedSurface& x, const std::vector<Leg>& legs) {
    PiecewisePath p(x);
    for (const Leg& l : legs) {
        if (l.ta > 0) p.push({l.a, 1, l.ta});
        if (l.tb > 0) p.push({l.b, 1, l.tb});
    }
    return p;
}

}  // namespace

DistanceEstimate de_upper(const MarkedSurface& x, const MarkedSurface& y, const DeOptions& opt) {
    if (opt.max_legs < 1) throw std::domain_error("de_upper: K must be ≥ 1");
    DistanceEstimate out;
    if (chart_distance(x, y) == 0) {
        out.witness = PiecewisePath(x);
        out.method = "identity";
        return out;
    }
    struct Best {
        Candidate c;
        std::string method;
    } best;
    double worst_gap = std::numeric_limits<double>::infinity();
    auto offer = [&](const Candidate& c, const std::string& method) {
        if (!c.ok) return;
        PiecewisePath p = build(x, c.legs);
        double gap = chart_distance(p.end(), y);
        worst_gap = std::min(worst_gap, gap);
        if (gap > opt.eps_chart) return;
        if (c.cost < best.c.cost) best = {c, method};
    };
    offer(chain({x, y}, opt), "direct");
    if (opt.max_legs > 1) offer(chain(straight(x, y, opt.max_legs), opt), "polyline");

    // Nelder–Mead over interior waypoints in (log ℓ, τ).
    DeOptions inner = opt;
    inner.leg_refine = 0;
    const double span = chart_distance(x, y);
    const double penalty = 1e3 * (1 + span);
    gsl_set_error_handler_off();
    for (int k = 2; k <= opt.max_legs; ++k) {
        const int n = 2 * (k - 1);
        for (int r = 0; r < opt.restarts; ++r) {
            std::mt19937_64 rng(opt.seed * 1000003ULL + 7919ULL * k + r);
            std::normal_distribution<double> N(0, 1);
            std::vector<MarkedSurface> init = straight(x, y, k);
            auto unpack = [&](const gsl_vector* v) {
                std::vector<MarkedSurface> pts{x};
                for (int i = 0; i + 1 < k; ++i)
                    pts.push_back(MarkedSurface::from_fn(std::exp(gsl_vector_get(v, 2 * i)), gsl_vector_get(v, 2 * i + 1)));
                pts.push_back(y);
                return pts;
            };
            NmContext ctx{[&](const gsl_vector* v) {
                for (int i = 0; i < n; ++i)
                    if (!std::isfinite(gsl_vector_get(v, i)) || std::abs(gsl_vector_get(v, i)) > 50) return penalty;
                Candidate c = chain(unpack(v), inner);
                return c.ok ? c.cost : penalty;
            }};
            gsl_vector* x0 = gsl_vector_alloc(n);
            gsl_vector* step = gsl_vector_alloc(n);
            for (int i = 0; i + 1 < k; ++i) {
                double jitter = r == 0 ? 0 : 0.3 * span;
                gsl_vector_set(x0, 2 * i, std::log(init[i + 1].ell) + jitter * N(rng) / std::max(init[i + 1].ell, 1e-3));
                gsl_vector_set(x0, 2 * i + 1, init[i + 1].tau() + jitter * N(rng));
                gsl_vector_set(step, 2 * i, 0.2 * span / std::max(init[i + 1].ell, 1e-3));
                gsl_vector_set(step, 2 * i + 1, 0.2 * span);
            }
            gsl_multimin_function fn{&nm_call, static_cast<std::size_t>(n), &ctx};
            gsl_multimin_fminimizer* m = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
            gsl_multimin_fminimizer_set(m, &fn, x0, step);
            for (int it = 0; it < opt.max_evals; ++it) {
                if (gsl_multimin_fminimizer_iterate(m) != GSL_SUCCESS) break;
                if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(m), 1e-7 * (1 + span)) == GSL_SUCCESS) break;
            }
            if (m->fval < penalty) offer(chain(unpack(m->x), opt), "search K=" + std::to_string(k));
            gsl_multimin_fminimizer_free(m);
            gsl_vector_free(x0);
            gsl_vector_free(step);
        }
    }

    if (!best.c.ok) {
        out.upper = std::numeric_limits<double>::infinity();
        out.feasibility_gap = worst_gap;
        out.method = "none";
        return out;
    }
    PiecewisePath p = build(x, best.c.legs);
    out.feasibility_gap = chart_distance(p.end(), y);
    out.upper = magnitude(p);
    out.witness = std::move(p);
    out.method = best.method;
    return out;
}

double width_integral(double l1, double l2) {
    if (!(l1 > 0 && l2 > 0)) throw std::domain_error("width_integral: lengths must be positive");
    if (l1 == l2) return 0;
    auto w = [](double l) { return width(l); };
    double a = std::min(l1, l2), b = std::max(l1, l2);
    return 2 * boost::math::quadrature::gauss_kronrod<double, 31>::integrate(w, a, b, 15, 1e-13);
}

double de_lower(const MarkedSurface& x, const MarkedSurface& y, int depth) {
    double best = 0;
    for (const Slope& s : enumerate_slopes(depth))
        best = std::max(best, width_integral(length_of_slope(x, s), length_of_slope(y, s)));
    return best;
}

DistanceEstimate de_bracket(const MarkedSurface& x, const MarkedSurface& y, const DeOptions& opt) {
    DistanceEstimate e = de_upper(x, y, opt);
    e.lower = de_lower(x, y);
    if (e.lower > e.upper * (1 + 1e-12)) throw std::logic_error("de_bracket: lower bound exceeds upper bound");
    return e;
}

SupResult d_thurston(const MarkedSurface& x, const MarkedSurface& y, const SupOptions& opt) {
    return sup_over_slopes([&](const Slope& g) { return std::log(length_of_slope(y, g) / length_of_slope(x, g)); },
                           opt);
}

double d_wp(const MarkedSurface& x, const MarkedSurface& y, const WpOptions& opt) {
    const double dl = y.ell - x.ell, dt = y.tau() - x.tau();
    if (dl == 0 && dt == 0) return 0;
    static const double node[3] = {-std::sqrt(0.6), 0, std::sqrt(0.6)};
    static const double wt[3] = {5.0 / 9, 8.0 / 9, 5.0 / 9};
    auto integrate = [&](int pieces) {
        double sum = 0;
        for (int i = 0; i < pieces; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = (i + 0.5 + 0.5 * node[j]) / pieces;
                MarkedSurface p = MarkedSurface::from_fn(x.ell + s * dl, x.tau() + s * dt);
                WPTensor g = wp_tensor(p, {}, opt.gram);
                sum += wt[j] * 0.5 / pieces * wp_norm({p, dl, dt}, g);
            }
        return sum;
    };
    double prev = integrate(1);
    for (int pieces = 2; pieces <= opt.max_pieces; pieces *= 2) {
        double cur = integrate(pieces);
        if (std::abs(cur - prev) <= opt.rel_tol * cur) return cur;
        prev = cur;
    }
    return prev;
}

double symmetrized_distance(const MarkedSurface& x, const MarkedSurface& y, double p, const DeOptions& opt) {
    if (!(p >= 1)) throw std::domain_error("symmetrized_distance: p must be ≥ 1");
    double a = de_upper(x, y, opt).upper, b = de_upper(y, x, opt).upper;
    if (std::isinf(p)) return std::max(a, b);
    return std::pow(0.5 * (std::pow(a, p) + std::pow(b, p)), 1 / p);
}

// ---------------------------------------------------------------------------
// Pinching

double intersection_angle(const MarkedSurface& s, const Slope& alpha, const Slope& beta) {
    if (intersection_number(alpha, beta) != 1) throw std::domain_error("intersection_angle: need i(α, β) = 1");
    // cos of this angle is the rate of ℓ_α under the left earthquake along β.
    try {
        return cosine_terms(s, beta, alpha).angles.at(0);
    } catch (const NonHyperbolic&) {
        // Axes of very short curves are unresolvable; use the rate itself.
        double rate = directional_length(s, alpha, earthquake_vector(s, {beta, 1})).second;
        return std::acos(std::clamp(rate, -1.0, 1.0));
    }
}

PinchResult pinch_path(const MarkedSurface& x, double theta, double target, int max_steps) {
    if (!(theta > std::numbers::pi / 2 && theta < std::numbers::pi)) throw std::domain_error("pinch_path: ϑ must lie in (π/2, π)");
    SystoleResult sys = systole(x);
    PinchResult out{PiecewisePath(x), sys.slope, sys.length, {}, 0, 0};
    const Slope alpha = sys.slope;
    if (!(target > 0 && target < sys.length)) throw std::domain_error("pinch_path: target must lie in (0, ℓ₀)");

    Slope beta = dual_slope(alpha);
    auto angle = [&](const MarkedSurface& s, const Slope& b) { return intersection_angle(s, alpha, b); };
    std::int64_t dir = angle(x, dehn_twist_slope(alpha, beta, 1)) > angle(x, dehn_twist_slope(alpha, beta, -1)) ? 1 : -1;
    for (int k = 0; angle(x, beta) <= theta; ++k) {
        if (k > 10000) throw PinchFailure("pinch_path: no Farey neighbour reaches the angle threshold");
        beta = dehn_twist_slope(alpha, beta, dir);
    }

    MarkedSurface cur = x;
    double ell = sys.length;
    for (int step = 0; ell > target; ++step) {
        if (step >= max_steps) throw PinchFailure("pinch_path: step budget exhausted");
        double th0 = angle(cur, beta);
        if (!(th0 > theta)) throw PinchFailure("pinch_path: leg starts below the angle threshold");
        auto at = [&](double t) { return twist(cur, beta, t); };
        auto g = [&](double t) { return angle(at(t), beta) - theta; };
        double lo = 0, hi = 1e-3 * ell;
        int k = 0;
        while (g(hi) > 0) {
            lo = hi;
            hi *= 2;
            if (++k > 200) throw PinchFailure("pinch_path: angle stopping time not bracketed");
        }
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            double mid = 0.5 * (lo + hi);
            (g(mid) > 0 ? lo : hi) = mid;
        }
        double t = hi;
        bool last = length_of_slope(at(t), alpha) <= target;
        if (last) {
            double a = 0, b = t;
            for (int it = 0; it < 200 && b - a > 1e-15 * b; ++it) {
                double mid = 0.5 * (a + b);
                (length_of_slope(at(mid), alpha) > target ? a : b) = mid;
            }
            t = b;
        }
        double prev_l = ell, prev_a = th0;
        for (int j = 1; j <= 4; ++j) {
            MarkedSurface s = at(t * j / 4);
            double l = length_of_slope(s, alpha), a = angle(s, beta);
            if (!(l < prev_l)) throw PinchFailure("pinch_path: ℓ_α is not decreasing along the leg");
            if (a > prev_a + 1e-12) throw PinchFailure("pinch_path: angle is not decreasing along the leg");
            prev_l = l;
            prev_a = a;
        }
        double lb = length_of_slope(cur, beta);
        out.path.push({beta, 1, t});
        cur = out.path.end();
        ell = length_of_slope(cur, alpha);
        out.magnitude += t * lb;
        out.ledger.push_back({step, beta, t, ell, out.magnitude, th0});
        beta = dehn_twist_slope(alpha, beta, dir);
    }
    out.lower = width_integral(sys.length, ell);
    return out;
}

void write_pinch_csv(std::ostream& os, const PinchResult& r) {
    char buf[160];
    os << "step,slope,displacement,ell_alpha,cumulative_magnitude\n";
    for (const auto& s : r.ledger) {
        std::snprintf(buf, sizeof buf, "%d,%s,%.16e,%.16e,%.16e\n", s.step, s.slope.str().c_str(), s.displacement,
                      s.ell_alpha, s.magnitude);
        os << buf;
    }
}

void write_pinch_svg(std::ostream& os, const PinchResult& r) {
    const double w = 560, h = 400, pad = 40;
    double lmin = r.ell0, mmax = 0;
    for (const auto& s : r.ledger) {
        lmin = std::min(lmin, s.ell_alpha);
        mmax = std::max(mmax, s.magnitude);
    }
    auto ref = [](double l) { return 2 * l * std::log(1 / l); };
    mmax = std::max(mmax, ref(std::min(r.ell0, std::exp(-1.0))));
    const double x0 = std::log10(lmin), x1 = std::log10(r.ell0);
    auto X = [&](double l) { return pad + (w - 2 * pad) * (std::log10(l) - x0) / std::max(x1 - x0, 1e-12); };
    auto Y = [&](double m) { return h - pad - (h - 2 * pad) * m / mmax; };
    char buf[96];
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
    os << "<polyline fill=\"none\" stroke=\"black\" points=\"";
    std::snprintf(buf, sizeof buf, "%.3f,%.3f ", X(r.ell0), Y(0));
    os << buf;
    for (const auto& s : r.ledger) {
        std::snprintf(buf, sizeof buf, "%.3f,%.3f ", X(s.ell_alpha), Y(s.magnitude));
        os << buf;
    }
    os << "\"/>\n<polyline fill=\"none\" stroke=\"#c33\" stroke-dasharray=\"4 3\" points=\"";
    for (int i = 0; i <= 100; ++i) {
        double l = std::pow(10.0, x0 + (x1 - x0) * i / 100);
        if (l >= 1) continue;
        std::snprintf(buf, sizeof buf, "%.3f,%.3f ", X(l), Y(ref(l)));
        os << buf;
    }
    os << "\"/>\n";
    os << "<text x=\"" << pad << "\" y=\"" << h - 10 << "\" font-size=\"12\">log10 ell_alpha</text>\n";
    os << "<text x=\"8\" y=\"16\" font-size=\"12\">magnitude (black), 2 l log(1/l) (red)</text>\n";
    os << "</svg>\n";
}

// ---------------------------------------------------------------------------
// Experiments

NongeodesicWitness nongeodesic_witness(const MarkedSurface& x, const Slope& gamma, const MarkedSurface& y,
                                       const DeOptions& opt, std::int64_t m_max) {
    NongeodesicWitness w{0, 0, 0, 0, 0, length_of_slope(x, gamma), length_of_slope(y, gamma), 0, PiecewisePath(x)};
    if (!(w.ly < w.lx)) throw std::domain_error("nongeodesic_witness: need ℓ_γ(y) < ℓ_γ(x)");
    DistanceEstimate e1 = de_upper(x, y, opt), e2 = de_upper(y, x, opt);
    if (!e1.witness || !e2.witness) throw std::runtime_error("nongeodesic_witness: no feasible detour leg");
    w.d1 = e1.upper;
    w.d2 = e2.upper;
    double m = std::floor((w.d1 + w.d2) / (w.lx * w.lx - w.ly * w.ly)) + 1;
    if (m > double(m_max)) throw std::runtime_error("nongeodesic_witness: no witness with m ≤ m_max");
    w.m = static_cast<std::int64_t>(m);
    w.lhs = w.m * w.lx * w.lx;
    w.rhs = w.d1 + w.m * w.ly * w.ly + w.d2;
    // x → y, y → y_m along γ, then y_m → x_m as the image of the y → x leg.
    PiecewisePath route = *e1.witness;
    route.push({gamma, 1, w.m * w.ly});
    PiecewisePath back = map_path(dehn_matrix(gamma, -w.m), *e2.witness);
    w.detour = route.then(back, 1e-6);
    w.endpoint_gap = chart_distance(w.detour.end(), twist(x, gamma, w.m * w.lx));
    return w;
}

HorocycleReport horocycle_config_check() {
    HorocycleReport r;
    const Mat2 S{0, 1, -1, 0}, C{1, 0, -1, 1}, D{1, 0, 1, 1};
    const HPoint p{1, 1}, q{-1, 1}, o{0, 1};
    auto dist = [](HPoint u, HPoint v) { return std::hypot(u.re - v.re, u.im - v.im); };

    HorocyclePath a = horocycle_segment(p, 0, 1, S);
    r.a = a.parameter_length();
    r.a_residual = dist(a.end(), q);

    HorocyclePath b1 = horocycle_segment(q, 0, 1), b2 = horocycle_segment(o, 0, 1);
    r.b = b1.parameter_length() + b2.parameter_length();
    r.b_residual = std::max({dist(b1.end(), o), dist(b2.start(), o), dist(b2.end(), p)});

    const double s3 = std::sqrt(3.0);
    r.x_low = {0, 2 - s3};
    r.x_high = {0, 2 + s3};
    HorocyclePath c = horocycle_segment(r.x_low, 0, 1, C);
    r.c = c.parameter_of(r.x_high);
    HorocyclePath d = horocycle_segment(r.x_high, 0, 1, D);
    r.d = d.parameter_of(r.x_low);
    r.pass = std::abs(r.a - 1) <= 1e-12 && r.a_residual <= 1e-12 && std::abs(r.b - 2) <= 1e-12 &&
             r.b_residual <= 1e-12 && r.c > 0 && r.d > 0 && r.c < 1 - 1e-6 && r.d < 1 - 1e-6 && r.a + r.b > r.c + r.d;
    return r;
}

BilipschitzReport local_bilipschitz_check(const MarkedSurface& s, double radius, int pairs, std::uint64_t seed,
                                          const DeOptions& opt) {
    BilipschitzReport rep;
    rep.radius = radius;
    rep.min_ratio = std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1, 1);
    auto sample = [&] {
        for (;;) {
            double a = U(rng), b = U(rng);
            if (a * a + b * b <= 1) return MarkedSurface::from_fn(s.ell + radius * a, s.tau() + radius * b);
        }
    };
    while (rep.pairs < pairs) {
        MarkedSurface p = sample(), q = sample();
        double d0 = chart_distance(p, q);
        if (d0 == 0) continue;
        DistanceEstimate f = de_upper(p, q, opt), g = de_upper(q, p, opt);
        if (!f.witness || !g.witness) throw std::runtime_error("local_bilipschitz_check: infeasible path inside the ball");
        for (double v : {f.upper / d0, g.upper / d0}) {
            rep.min_ratio = std::min(rep.min_ratio, v);
            rep.max_ratio = std::max(rep.max_ratio, v);
        }
        rep.max_asym = std::max({rep.max_asym, f.upper / g.upper, g.upper / f.upper});
        ++rep.pairs;
    }
    rep.c = std::max(rep.max_ratio, 1 / rep.min_ratio);
    return rep;
}

}  // namespace quake
