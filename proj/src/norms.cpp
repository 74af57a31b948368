#include "quake/norms.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>

#include <Eigen/Dense>

namespace quake {

namespace {

// ê of a slope with entries near N carries relative error ~ N·ε; beyond
// this cap the chart arithmetic no longer resolves neighbouring directions.
constexpr std::int64_t kSlopeCap = std::int64_t(1) << 22;

struct SV {
    std::int64_t p, q;
};

SV mediant(SV a, SV b) {
    std::int64_t d = a.p * b.q - a.q * b.p;  // ±1 for Farey neighbours
    return {a.p + d * b.p, a.q + d * b.q};
}

bool too_big(SV v) { return std::abs(v.p) > kSlopeCap || std::abs(v.q) > kSlopeCap; }

Slope as_slope(SV v) { return Slope::make(v.p, v.q); }

// Circular list of slopes of depth ≤ d as homology vectors, closed by −(1,0).
std::vector<SV> farey_circle(int depth) {
    std::vector<SV> out;
    for (const Slope& s : enumerate_slopes(depth)) out.push_back({s.p, s.q});
    out.push_back({-1, 0});
    return out;
}

Vec2 vec(const TangentVector& v) { return {v.dl, v.dtau}; }

}  // namespace

Vec2 unit_earthquake(const MarkedSurface& s, const Slope& g) {
    TangentVector e = earthquake_vector(s, {g, 1});
    double l = length_of_slope(s, g);
    return {e.dl / l, e.dtau / l};
}

std::pair<double, double> directional_length(const MarkedSurface& s, const Slope& g, const TangentVector& v) {
    using D = Dual<long double>;
    chart::Fn<D> f{D(s.ell, v.dl), D(s.sigma, kLeftTwist * v.dtau)};
    f = chart::apply_word(f, word_for(g));
    return {static_cast<double>(f.ell.v), static_cast<double>(f.ell.d)};
}

NormResult earthquake_norm(const TangentVector& v, const NormOptions& opt) {
    const MarkedSurface& s = v.base;
    Vec2 w = vec(v);
    if (!(std::hypot(w.x, w.y) > 0)) throw std::domain_error("earthquake_norm: zero vector");
    auto ehat = [&](SV a) { return unit_earthquake(s, as_slope(a)); };

    // Farey arcs with a winding check: consecutive ê's turn one way, once around.
    std::vector<SV> circle;
    std::vector<Vec2> pts;
    double orient = 0;
    for (int depth = 2; depth <= 8; ++depth) {
        circle = farey_circle(depth);
        pts.clear();
        for (SV c : circle) pts.push_back(ehat(c));
        orient = cross(pts[0], pts[1]) > 0 ? 1 : -1;
        bool ok = true;
        double winding = 0;
        for (size_t i = 0; i + 1 < pts.size(); ++i) {
            double c = orient * cross(pts[i], pts[i + 1]);
            if (!(c > 0)) ok = false;
            winding += std::atan2(c, pts[i].x * pts[i + 1].x + pts[i].y * pts[i + 1].y);
        }
        // closing arc from −(1,0) back to (1,0) is the same point
        if (ok && std::abs(winding - 2 * std::numbers::pi) < 1e-6) break;
        if (depth == 8) throw ConvergenceFailure("earthquake_norm: winding check failed");
    }

    const double wn = std::hypot(w.x, w.y);
    auto parallel = [&](Vec2 e) {
        return std::abs(cross(e, w)) <= 1e-13 * wn * std::hypot(e.x, e.y) && e.x * w.x + e.y * w.y > 0;
    };
    auto exact_result = [&](SV c, Vec2 e, int steps) {
        Slope g = as_slope(c);
        double val = wn / std::hypot(e.x, e.y);
        return NormResult{val, {g, val / length_of_slope(s, g)}, steps};
    };
    for (size_t i = 0; i + 1 < circle.size(); ++i)
        if (parallel(pts[i])) return exact_result(circle[i], pts[i], 0);

    auto inside = [&](Vec2 l, Vec2 r) { return orient * cross(l, w) >= 0 && orient * cross(w, r) >= 0; };
    size_t arc = 0;
    while (arc + 1 < circle.size() && !inside(pts[arc], pts[arc + 1])) ++arc;
    if (arc + 1 == circle.size()) throw ConvergenceFailure("earthquake_norm: no arc contains the direction");

    SV L = circle[arc], R = circle[arc + 1];
    Vec2 eL = pts[arc], eR = pts[arc + 1];
    auto estimate = [&](Vec2 l, Vec2 r, double& a, double& b) {
        double d = cross(l, r);
        a = cross(w, r) / d;
        b = cross(l, w) / d;
        return a + b;
    };
    double a = 0, b = 0;
    double est = estimate(eL, eR, a, b);
    int steps = 0;
    bool exact = false;
    for (; steps < opt.max_steps && !exact; ++steps) {
        SV M = mediant(L, R);
        if (too_big(M)) break;
        Vec2 eM = ehat(M);
        if (parallel(eM)) return exact_result(M, eM, steps + 1);
        if (orient * cross(w, eM) >= 0) {
            // left: gallop along (L, kL + R)
            auto cand = [&](std::int64_t k) { return SV{k * L.p + R.p, k * L.q + R.q}; };
            std::int64_t good = 1, bad = 0;
            Vec2 eGood = eM;
            for (std::int64_t k = 2;; k *= 2) {
                SV c = cand(k);
                if (too_big(c)) { exact = true; break; }
                Vec2 ec = ehat(c);
                if (parallel(ec)) return exact_result(c, ec, steps + 1);
                if (orient * cross(w, ec) >= 0) { good = k; eGood = ec; } else { bad = k; break; }
            }
            while (!exact && bad - good > 1) {
                std::int64_t mid = good + (bad - good) / 2;
                Vec2 ec = ehat(cand(mid));
                if (parallel(ec)) return exact_result(cand(mid), ec, steps + 1);
                if (orient * cross(w, ec) >= 0) { good = mid; eGood = ec; } else bad = mid;
            }
            R = cand(good);
            eR = eGood;
        } else {
            auto cand = [&](std::int64_t k) { return SV{L.p + k * R.p, L.q + k * R.q}; };
            std::int64_t good = 1, bad = 0;
            Vec2 eGood = eM;
            for (std::int64_t k = 2;; k *= 2) {
                SV c = cand(k);
                if (too_big(c)) { exact = true; break; }
                Vec2 ec = ehat(c);
                if (parallel(ec)) return exact_result(c, ec, steps + 1);
                if (orient * cross(ec, w) >= 0) { good = k; eGood = ec; } else { bad = k; break; }
            }
            while (!exact && bad - good > 1) {
                std::int64_t mid = good + (bad - good) / 2;
                Vec2 ec = ehat(cand(mid));
                if (parallel(ec)) return exact_result(cand(mid), ec, steps + 1);
                if (orient * cross(ec, w) >= 0) { good = mid; eGood = ec; } else bad = mid;
            }
            L = cand(good);
            eL = eGood;
        }
        double next = estimate(eL, eR, a, b);
        bool settled = std::abs(est - next) <= opt.rel_tol * next;
        est = next;
        if (settled) break;
    }
    if (steps >= opt.max_steps && !exact)
        throw ConvergenceFailure("earthquake_norm: direction match did not settle at maximum depth");
    SV near = a >= b ? L : R;
    Slope g = as_slope(near);
    return {est, {g, est / length_of_slope(s, g)}, steps};
}

namespace {

// Smallest-denominator rational in [lo, hi].
SV simplest_between(double lo, double hi) {
    if (lo <= 0 && hi >= 0) return {0, 1};
    if (hi < 0) {
        SV r = simplest_between(-hi, -lo);
        return {-r.p, r.q};
    }
    double fl = std::floor(lo);
    if (fl == lo || fl + 1 <= hi) return {static_cast<std::int64_t>(std::ceil(lo)), 1};
    SV r = simplest_between(1 / (hi - fl), 1 / (lo - fl));
    auto f = static_cast<std::int64_t>(fl);
    return {f * r.p + r.q, r.p};
}

}  // namespace

IndicatrixSample indicatrix(const MarkedSurface& s, int n) {
    if (n < 16) throw std::domain_error("indicatrix: need at least 16 samples");
    IndicatrixSample out{s, {}};
    const double half = std::numbers::pi / (4.0 * n);
    for (int i = 0; i < n; ++i) {
        double th = std::numbers::pi * i / n;
        Slope g{1, 0};
        if (i > 0) {
            // simplest slope whose homology direction lies within a quarter step of th
            SV r = simplest_between(1 / std::tan(th + half), 1 / std::tan(th - half));
            g = Slope::make(r.p, r.q);
        }
        out.points.push_back({std::atan2(double(g.q), double(g.p)), g, unit_earthquake(s, g)});
    }
    return out;
}

ConvexityReport convexity(const IndicatrixSample& ind, double tol) {
    ConvexityReport r;
    const auto& p = ind.points;
    size_t n = p.size();
    std::vector<double> turns(n);
    int pos = 0, neg = 0, around_pos = 0, around_neg = 0;
    for (size_t i = 0; i < n; ++i) {
        Vec2 a = p[(i + n - 1) % n].point, b = p[i].point, c = p[(i + 1) % n].point;
        Vec2 d1{b.x - a.x, b.y - a.y}, d2{c.x - b.x, c.y - b.y};
        double norm = std::hypot(d1.x, d1.y) * std::hypot(d2.x, d2.y);
        turns[i] = norm > 0 ? cross(d1, d2) / norm : 0.0;
        if (turns[i] > 0) ++pos; else if (turns[i] < 0) ++neg;
        if (std::abs(turns[i]) <= tol) ++r.collinear;
        if (cross(b, c) > 0) ++around_pos; else ++around_neg;
    }
    double sgn = pos >= neg ? 1 : -1;
    r.min_turn = std::numeric_limits<double>::infinity();
    for (double t : turns) {
        if (sgn * t < -tol) ++r.sign_flips;
        r.min_turn = std::min(r.min_turn, sgn * t);
    }
    r.origin_inside = around_pos == int(n) || around_neg == int(n);
    return r;
}

void write_indicatrix_csv(std::ostream& os, const IndicatrixSample& ind) {
    char buf[128];
    os << "slope_param,dx,dy\n";
    for (const auto& q : ind.points) {
        std::snprintf(buf, sizeof buf, "%.16e,%.16e,%.16e\n", q.param, q.point.x, q.point.y);
        os << buf;
    }
}

void write_indicatrix_svg(std::ostream& os, const IndicatrixSample& ind) {
    double r = 0;
    for (const auto& q : ind.points) r = std::max({r, std::abs(q.point.x), std::abs(q.point.y)});
    const double size = 480, pad = 20, k = (size / 2 - pad) / r;
    auto X = [&](double x) { return size / 2 + k * x; };
    auto Y = [&](double y) { return size / 2 - k * y; };
    char buf[96];
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\">\n";
    os << "<line x1=\"0\" y1=\"" << size / 2 << "\" x2=\"" << size << "\" y2=\"" << size / 2 << "\" stroke=\"#ccc\"/>\n";
    os << "<line x1=\"" << size / 2 << "\" y1=\"0\" x2=\"" << size / 2 << "\" y2=\"" << size << "\" stroke=\"#ccc\"/>\n";
    os << "<polygon fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"";
    for (const auto& q : ind.points) {
        std::snprintf(buf, sizeof buf, "%.3f,%.3f ", X(q.point.x), Y(q.point.y));
        os << buf;
    }
    os << "\"/>\n<circle cx=\"" << X(0) << "\" cy=\"" << Y(0) << "\" r=\"3\" fill=\"red\"/>\n";
    os << "<text x=\"8\" y=\"16\" font-size=\"12\">dl</text><text x=\"" << size - 40 << "\" y=\"16\" font-size=\"12\">dtau</text>\n";
    os << "</svg>\n";
}

SupResult sup_over_slopes(const std::function<double(const Slope&)>& f, const SupOptions& opt) {
    std::vector<SV> circle = farey_circle(opt.depth);
    circle.pop_back();
    const size_t n = circle.size();
    std::vector<double> vals(n);
    for (size_t i = 0; i < n; ++i) vals[i] = f(as_slope(circle[i]));
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::partial_sort(order.begin(), order.begin() + std::min<size_t>(n, 4 * opt.candidates), order.end(),
                      [&](size_t a, size_t b) { return vals[a] > vals[b]; });
    std::vector<size_t> picks;
    for (size_t k = 0; k < std::min<size_t>(n, 4 * opt.candidates) && int(picks.size()) < opt.candidates; ++k) {
        bool near = false;
        for (size_t p : picks) {
            size_t d = std::min((order[k] + n - p) % n, (p + n - order[k]) % n);
            if (d <= 1) near = true;
        }
        if (!near) picks.push_back(order[k]);
    }
    SupResult best{vals[order[0]], vals[order[0]], as_slope(circle[order[0]])};
    for (size_t i : picks) {
        SV c = circle[i];
        SV l = i == 0 ? SV{-circle[n - 1].p, -circle[n - 1].q} : circle[i - 1];
        SV r = i + 1 == n ? SV{-1, 0} : circle[i + 1];
        double fc = vals[i];
        for (int step = 0; step < opt.refine_steps; ++step) {
            SV m1 = mediant(l, c), m2 = mediant(c, r);
            if (too_big(m1) || too_big(m2)) break;
            double f1 = f(as_slope(m1)), f2 = f(as_slope(m2));
            if (f1 > fc && f1 >= f2) {
                r = c;
                c = m1;
                fc = f1;
            } else if (f2 > fc) {
                l = c;
                c = m2;
                fc = f2;
            } else {
                l = m1;
                r = m2;
            }
        }
        if (fc > best.lo) best = {fc, fc, as_slope(c)};
    }
    best.hi = best.lo + std::abs(best.lo) * opt.tol_report;
    return best;
}

SupResult thurston_norm(const TangentVector& v, const SupOptions& opt) {
    if (!(std::hypot(v.dl, v.dtau) > 0)) throw std::domain_error("thurston_norm: zero vector");
    return sup_over_slopes([&](const Slope& g) {
        auto [l, dl] = directional_length(v.base, g, v);
        return dl / l;
    }, opt);
}

// ---------------------------------------------------------------------------
// Gram sums over pairs of lifts.

namespace {

// u·log|(u+1)/(u−1)| − 2 = 2u·atanh(1/u) − 2 for |u| > 1, 2u·atanh(u) − 2 for |u| < 1
double riera_term(double u, bool crossing) {
    if (crossing) return 2 * u * std::atanh(u) - 2;
    double x = 1 / u;
    if (x < 0.1) {
        double x2 = x * x, pw = x2, sum = 0;
        for (int k = 1; k < 40; ++k) {
            sum += pw / (2 * k + 1);
            pw *= x2;
        }
        return 2 * sum;
    }
    return 2 * std::atanh(x) / x - 2;
}

double dist_to_imag_axis(const HPoint& z) { return std::asinh(std::abs(z.re) / z.im); }

Mat2 slope_matrix(const Mat2& X, const Mat2& Y, std::int64_t p, std::int64_t q) {
    if (q == 0) return X;
    if (q < 0) { p = -p; q = -q; }
    Mat2 Xi = X.inverse(), m;
    for (int l : christoffel_word(p, q)) m = m * (l == 2 ? Y : (l == 1 ? X : Xi));
    return m;
}

struct LiftKey {
    int signs;
    double shape, pos;
};

}  // namespace

GramResult wp_gram(const MarkedSurface& s, const Slope& alpha, const Slope& beta, const GramOptions& opt) {
    if (opt.cutoff < 4) throw std::domain_error("wp_gram: cutoff must be at least 4");
    chart::Word w = word_for(alpha);
    chart::Fn<double> f = chart::apply_word(s.fn(), w);
    MarkedSurface local{f.ell, f.sigma};
    auto [X, Y] = local.matrices();
    IMat2 mi = word_matrix(w).inverse();
    std::int64_t bp = mi.a * beta.p + mi.b * beta.q, bq = mi.c * beta.p + mi.d * beta.q;
    const bool same = alpha == beta;
    const double ell = f.ell;
    Geodesic L0 = axis(slope_matrix(X, Y, bp, bq));

    double d0 = 0;
    if (!L0.p.is_infinite() && !L0.q.is_infinite()) {
        double a = std::min(L0.p.x, L0.q.x), b = std::max(L0.p.x, L0.q.x);
        Mat2 nm = Mat2{1, -a, -1, b}.normalized();
        d0 = dist_to_imag_axis(apply_mobius(nm, HPoint{0, 1}));
    }

    const int nbins = 4;
    std::vector<double> partial(nbins, 0.0);
    auto bucket = [&](double shape) { return static_cast<long long>(std::floor(shape * 1e6)); };
    std::map<std::pair<int, long long>, std::vector<LiftKey>> seen;
    auto record = [&](const Geodesic& g) {
        if (g.p.is_infinite() || g.q.is_infinite() || g.p.x == 0 || g.q.x == 0) {
            if (!same) throw std::runtime_error("wp_gram: lift shares an endpoint with the reference axis");
            return;  // the reference axis itself
        }
        double u = std::min(g.p.x, g.q.x), v = std::max(g.p.x, g.q.x);
        bool crossing = u < 0 && v > 0;
        int signs = crossing ? 0 : (v < 0 ? -1 : 1);
        double lu = std::log(std::abs(u)), lv = std::log(std::abs(v));
        double shape = lv - lu;
        double pos = std::fmod(lu, ell);
        if (pos < 0) pos += ell;
        auto b = bucket(shape);
        for (long long bb = b - 1; bb <= b + 1; ++bb) {
            auto it = seen.find({signs, bb});
            if (it == seen.end()) continue;
            for (const LiftKey& k : it->second) {
                double dp = std::abs(k.pos - pos);
                dp = std::min(dp, ell - dp);
                if (std::abs(k.shape - shape) <= 1e-8 * std::max(1.0, std::abs(shape)) && dp <= 1e-8 * std::max(1.0, ell))
                    return;
            }
        }
        seen[{signs, b}].push_back({signs, shape, pos});
        double term, dist;
        if (crossing) {
            double r = v / -u;
            term = riera_term((1 - r) / (1 + r), true);
            dist = 0;
        } else {
            double a = std::abs(u), c = std::abs(v);
            if (a > c) std::swap(a, c);
            double uu = (a + c) / (c - a);
            term = riera_term(uu, false);
            dist = std::acosh(uu);
        }
        for (int k = 0; k < nbins; ++k)
            if (dist <= opt.cutoff - (nbins - 1 - k)) partial[k] += term;
    };

    struct Node {
        Mat2 g;
        int last;
    };
    const Mat2 gens[4] = {X, X.inverse(), Y, Y.inverse()};
    std::deque<Node> queue;
    record(L0);
    queue.push_back({Mat2{}, -1});
    std::size_t lifts = 0;
    const double prune = opt.cutoff + opt.slack + d0;
    while (!queue.empty()) {
        Node n = queue.front();
        queue.pop_front();
        for (int l = 0; l < 4; ++l) {
            if (n.last < 0 && l < 2) continue;  // coset representatives of ⟨X⟩ start with Y^±1
            if (n.last >= 0 && (l ^ 1) == n.last) continue;
            Mat2 g = n.g * gens[l];
            HPoint z = apply_mobius(g, HPoint{0, 1});
            if (dist_to_imag_axis(z) > prune) continue;
            record(apply_mobius(g, L0));
            if (++lifts > opt.max_lifts) throw std::runtime_error("wp_gram: word enumeration overflow");
            queue.push_back({g, l});
        }
    }

    GramResult out;
    const double c = 2 / std::numbers::pi;
    double diag = same ? ell : 0;
    for (double p : partial) out.partial.push_back(c * (diag + p));
    out.raw = out.partial.back();
    double inc = out.partial[nbins - 1] - out.partial[nbins - 2];
    const double q = std::exp(-1.0);
    out.value = out.raw + inc * q / (1 - q);
    out.tail_estimate = std::abs(out.value - out.raw);
    for (int k = 1; k + 1 < nbins; ++k) {
        double d1 = std::abs(out.partial[k] - out.partial[k - 1]);
        double d2 = std::abs(out.partial[k + 1] - out.partial[k]);
        if (d2 > d1 && d2 > 1e-14) out.tail_monotone = false;
    }
    out.lifts = lifts;
    return out;
}

namespace {

Eigen::Matrix3d design(const std::vector<Covector>& w) {
    Eigen::Matrix3d m;
    for (int i = 0; i < 3; ++i) {
        m(i, 0) = w[i].dl * w[i].dl;
        m(i, 1) = 2 * w[i].dl * w[i].dtau;
        m(i, 2) = w[i].dtau * w[i].dtau;
    }
    return m;
}

double condition(const Eigen::Matrix3d& m) {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(m);
    return svd.singularValues()(0) / svd.singularValues()(2);
}

}  // namespace

WPTensor wp_tensor(const MarkedSurface& s, std::vector<Slope> slopes, const GramOptions& opt) {
    if (slopes.empty()) {
        std::vector<std::pair<double, Slope>> cand;
        for (const Slope& g : enumerate_slopes(2)) cand.push_back({length_of_slope(s, g), g});
        std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
        cand.resize(5);
        double best = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 5; ++i)
            for (int j = i + 1; j < 5; ++j)
                for (int k = j + 1; k < 5; ++k) {
                    std::vector<Covector> w{length_differential(s, cand[i].second), length_differential(s, cand[j].second),
                                            length_differential(s, cand[k].second)};
                    double c = condition(design(w));
                    if (c < best) {
                        best = c;
                        slopes = {cand[i].second, cand[j].second, cand[k].second};
                    }
                }
    }
    if (slopes.size() != 3) throw std::domain_error("wp_tensor: need three slopes");
    std::vector<Covector> w;
    Eigen::Vector3d rhs;
    for (int i = 0; i < 3; ++i) {
        w.push_back(length_differential(s, slopes[i]));
        rhs(i) = wp_gram(s, slopes[i], slopes[i], opt).value;
    }
    Eigen::Matrix3d m = design(w);
    double cond = condition(m);
    if (!(cond < 1e12)) throw IllConditioned("wp_tensor: ill-conditioned solve, condition " + std::to_string(cond));
    Eigen::Vector3d h = m.colPivHouseholderQr().solve(rhs);
    Eigen::Matrix2d H;
    H << h(0), h(1), h(1), h(2);
    if (!(H(0, 0) > 0) || !(H.determinant() > 0)) throw IllConditioned("wp_tensor: indefinite result");
    Eigen::Matrix2d G = H.inverse();
    WPTensor t{s, G(0, 0), G(0, 1), G(1, 1), cond, std::abs(G.determinant() - 0.25), 0, slopes};
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            Eigen::Vector2d wi(w[i].dl, w[i].dtau), wj(w[j].dl, w[j].dtau);
            double pred = wi.dot(H * wj);
            double gram = wp_gram(s, slopes[i], slopes[j], opt).value;
            t.offdiag_residual = std::max(t.offdiag_residual, std::abs(pred - gram));
        }
    return t;
}

double wp_norm(const TangentVector& v, const WPTensor& g) {
    double q = g.g11 * v.dl * v.dl + 2 * g.g12 * v.dl * v.dtau + g.g22 * v.dtau * v.dtau;
    return std::sqrt(std::max(q, 0.0));
}

double wp_norm(const TangentVector& v) { return wp_norm(v, wp_tensor(v.base)); }

double duality_check(const MarkedSurface& s, const Slope& beta, double weight, Backend backend) {
    TangentVector e = earthquake_vector(s, {beta, weight}, backend);
    double lw = weight * length_of_slope(s, beta);
    Covector dl = length_differential(s, beta);
    double l = length_of_slope(s, beta);
    // ω(u, ê) = u.dl·ê.dτ − u.dτ·ê.dl
    double r1 = std::abs(e.dtau / lw - dl.dl / l);
    double r2 = std::abs(-e.dl / lw - dl.dtau / l);
    return std::max(r1, r2);
}

double symmetrized_norm(const TangentVector& v, double p) {
    if (!(p >= 1)) throw std::domain_error("symmetrized_norm: p must be ≥ 1");
    double a = earthquake_norm(v).value, b = earthquake_norm(-v).value;
    if (std::isinf(p)) return std::max(a, b);
    return std::pow(0.5 * (std::pow(a, p) + std::pow(b, p)), 1 / p);
}

AsymmetryResult asymmetry_ratio(const MarkedSurface& s, int n_dirs) {
    if (n_dirs < 64) throw std::domain_error("asymmetry_ratio: need at least 64 directions");
    AsymmetryResult best;
    for (int i = 0; i < n_dirs; ++i) {
        double phi = 2 * std::numbers::pi * i / n_dirs;
        TangentVector v{s, std::cos(phi), std::sin(phi)};
        double r = earthquake_norm(-v).value / earthquake_norm(v).value;
        if (r > best.ratio) best = {r, {v.dl, v.dtau}};
    }
    return best;
}

}  // namespace quake
