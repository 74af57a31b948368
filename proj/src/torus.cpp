#include "quake/torus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace quake {

using chart::Fn;
using chart::Move;
using chart::Word;

Slope Slope::make(std::int64_t p, std::int64_t q) {
    if (p == 0 && q == 0) throw std::domain_error("slope 0/0");
    std::int64_t g = std::gcd(p < 0 ? -p : p, q < 0 ? -q : q);
    p /= g;
    q /= g;
    if (q < 0 || (q == 0 && p < 0)) {
        p = -p;
        q = -q;
    }
    return {p, q};
}

std::string Slope::str() const { return std::to_string(p) + "/" + std::to_string(q); }

Slope Slope::parse(const std::string& text) {
    if (text == "inf" || text == "∞") return {1, 0};
    auto slash = text.find('/');
    if (slash == std::string::npos) return make(std::stoll(text), 1);
    return make(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
}

MarkedSurface MarkedSurface::from_fn(double ell, double tau) {
    if (!(ell > 0) || !std::isfinite(tau)) throw InvalidSurface("from_fn: need ℓ > 0 and finite τ");
    return {ell, kLeftTwist * tau};
}

double MarkedSurface::x() const { return 2 * std::cosh(ell / 2); }
double MarkedSurface::y() const { return 2 / std::tanh(ell / 2) * std::cosh(sigma / 2); }
double MarkedSurface::z() const { return 2 / std::tanh(ell / 2) * std::cosh((sigma + ell) / 2); }

std::pair<Mat2, Mat2> MarkedSurface::matrices() const {
    double e = std::exp(ell / 2);
    double ct = 1 / std::tanh(ell / 2);
    double cs = 1 / std::sinh(ell / 2);
    Mat2 A{e, 0, 0, 1 / e};
    Mat2 B{ct * std::exp(sigma / 2), cs, cs, ct * std::exp(-sigma / 2)};
    return {A, B};
}

std::string MarkedSurface::to_json() const {
    nlohmann::json j;
    j["x"] = x();
    j["y"] = y();
    j["branch"] = branch() == Branch::Lower ? "lower" : "upper";
    return j.dump();
}

MarkedSurface MarkedSurface::from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    std::string b = j.at("branch").get<std::string>();
    if (b != "lower" && b != "upper") throw InvalidSurface("branch must be lower or upper");
    return from_traces(j.at("x").get<double>(), j.at("y").get<double>(), b == "lower" ? Branch::Lower : Branch::Upper);
}

MarkedSurface from_traces(double x, double y, Branch branch) {
    if (!(x > 2) || !(y > 2)) throw InvalidSurface("traces must exceed 2");
    double disc = x * x * y * y - 4 * (x * x + y * y);
    if (disc < 0) throw InvalidSurface("discriminant x²y² − 4(x²+y²) is negative");
    double ell = 2 * std::acosh(x / 2);
    double c = y * std::tanh(ell / 2) / 2;
    if (c < 1) c = 1;  // on the fold up to rounding
    double s0 = 2 * std::acosh(c);
    MarkedSurface s{ell, branch == Branch::Lower ? -s0 : s0};
    if (!(s.z() > 2)) throw InvalidSurface("tr AB ≤ 2 on the chosen branch");
    return s;
}

MarkedSurface from_markov_triple(double x, double y, double z) {
    double res = x * x + y * y + z * z - x * y * z;
    if (std::abs(res) > 1e-9 * std::max(1.0, x * y * z)) throw InvalidSurface("not a Markov triple");
    return from_traces(x, y, z < x * y / 2 ? Branch::Lower : Branch::Upper);
}

// ---------------------------------------------------------------------------

Word word_for(const Slope& s) {
    Word w;
    std::int64_t p = s.p, q = s.q;
    for (;;) {
        if (q == 0) break;
        if (q < 0) { p = -p; q = -q; }
        std::int64_t k = p / q;
        if (p % q != 0 && p < 0) --k;  // floor
        if (k != 0) w.push_back({Move::T, k});
        p -= k * q;
        w.push_back({Move::S, 0});
        std::int64_t np = q, nq = -p;
        p = np;
        q = nq;
    }
    return w;
}

IMat2 word_matrix(const Word& w) {
    IMat2 m;
    for (const Move& mv : w) {
        if (mv.kind == Move::T) m = m * IMat2{1, mv.k, 0, 1};
        else m = m * IMat2{0, -1, 1, 0};
    }
    return m;
}

Word word_for_matrix(const IMat2& n) {
    if (n.det() != 1) throw std::domain_error("word_for_matrix: determinant must be 1");
    Word w = word_for(Slope::make(n.a, n.c));
    IMat2 r = word_matrix(w).inverse() * n;
    std::int64_t eps = r.a;
    std::int64_t j = eps * r.b;
    if (j != 0) w.push_back({Move::T, j});
    return w;
}

Slope dual_slope(const Slope& s) {
    IMat2 m = word_matrix(word_for(s));
    return Slope::make(m.b, m.d);
}

MarkedSurface remark(const MarkedSurface& s, const Slope& alpha) {
    Fn<double> f = chart::apply_word(s.fn(), word_for(alpha));
    return {f.ell, f.sigma};
}

MarkedSurface act(const IMat2& m, const MarkedSurface& s) {
    Fn<double> f = chart::apply_word(s.fn(), word_for_matrix(m.inverse()));
    return {f.ell, f.sigma};
}

std::int64_t det(const Slope& a, const Slope& b) { return a.p * b.q - a.q * b.p; }

Slope dehn_twist_slope(const Slope& gamma, const Slope& delta, std::int64_t m) {
    std::int64_t c = m * static_cast<std::int64_t>(kLeftTwist) * det(gamma, delta);
    return Slope::make(delta.p + c * gamma.p, delta.q + c * gamma.q);
}

double length_of_slope(const MarkedSurface& s, const Slope& g) {
    Fn<long double> f{s.ell, s.sigma};
    return static_cast<double>(chart::apply_word(f, word_for(g)).ell);
}

double trace_of_slope(const MarkedSurface& s, const Slope& g) {
    return 2 * std::cosh(length_of_slope(s, g) / 2);
}

double length_of(const MarkedSurface& s, const WeightedCurve& c) {
    return c.weight * length_of_slope(s, c.slope);
}

std::int64_t intersection_number(const Slope& a, const Slope& b) {
    std::int64_t d = det(a, b);
    return d < 0 ? -d : d;
}

namespace {

void inorder(const Slope& l, const Slope& r, int depth, int max_depth, std::vector<Slope>& out) {
    if (depth > max_depth) return;
    Slope m{l.p + r.p, l.q + r.q};
    inorder(l, m, depth + 1, max_depth, out);
    out.push_back(m);
    inorder(m, r, depth + 1, max_depth, out);
}

}  // namespace

std::vector<Slope> enumerate_slopes(int depth) {
    if (depth < 0) throw std::domain_error("enumerate_slopes: depth must be ≥ 0");
    std::vector<Slope> out;
    out.push_back({1, 0});
    inorder({1, 0}, {0, 1}, 0, depth, out);
    out.push_back({0, 1});
    inorder({0, 1}, {-1, 0}, 0, depth, out);
    for (auto& s : out) s = Slope::make(s.p, s.q);
    return out;
}

int stern_brocot_depth(const Slope& s) {
    if (s.p == 0 || s.q == 0) return -1;
    std::int64_t a = s.p < 0 ? -s.p : s.p, b = s.q;
    std::int64_t total = 0;
    while (b != 0) {
        total += a / b;
        std::int64_t r = a % b;
        a = b;
        b = r;
    }
    return static_cast<int>(total - 1);
}

MarkedSurface twist(const MarkedSurface& s, const Slope& g, double t) {
    if (!std::isfinite(t)) throw std::domain_error("twist: non-finite displacement");
    Word w = word_for(g);
    Fn<double> f = chart::apply_word(s.fn(), w);
    f.sigma += kLeftTwist * t;
    f = chart::apply_word_inverse(f, w);
    if (!(f.ell > 0) || !std::isfinite(f.sigma)) throw std::runtime_error("twist: chart renormalization failed");
    return {f.ell, f.sigma};
}

FdResult richardson(const std::function<std::vector<double>(double)>& f, const FdOptions& opt) {
    auto central = [&](double h) {
        auto fp = f(h), fm = f(-h);
        std::vector<double> d(fp.size());
        for (size_t i = 0; i < d.size(); ++i) d[i] = (fp[i] - fm[i]) / (2 * h);
        return d;
    };
    std::vector<std::vector<std::vector<double>>> table;
    double h = opt.h0;
    table.push_back({central(h)});
    double best_err = std::numeric_limits<double>::infinity();
    std::vector<double> best = table[0][0];
    for (int i = 1; i < opt.max_levels; ++i) {
        h /= 2;
        std::vector<std::vector<double>> row{central(h)};
        for (int j = 1; j <= i; ++j) {
            const auto& prev = row[j - 1];
            const auto& up = table[i - 1][j - 1];
            std::vector<double> r(prev.size());
            double fac = std::pow(4.0, j) - 1;
            for (size_t k = 0; k < r.size(); ++k) r[k] = prev[k] + (prev[k] - up[k]) / fac;
            row.push_back(r);
        }
        const auto& cur = row[i];
        const auto& old = table[i - 1][i - 1];
        double err = 0, scale = 0;
        for (size_t k = 0; k < cur.size(); ++k) {
            err = std::max(err, std::abs(cur[k] - old[k]));
            scale = std::max(scale, std::abs(cur[k]));
        }
        table.push_back(std::move(row));
        if (err < best_err) {
            best_err = err;
            best = cur;
        }
        if (err <= opt.rel_tol * std::max(scale, 1e-300)) return {cur, err};
    }
    throw ConvergenceFailure("richardson: extrapolation levels did not agree within tolerance");
}

TangentVector earthquake_vector(const MarkedSurface& s, const WeightedCurve& c, Backend backend, const FdOptions& fd) {
    if (!(c.weight > 0)) throw std::domain_error("earthquake_vector: weight must be positive");
    if (backend == Backend::FiniteDifference) {
        auto f = [&](double h) {
            MarkedSurface t = twist(s, c.slope, c.weight * h);
            return std::vector<double>{t.ell, t.tau()};
        };
        FdResult r = richardson(f, fd);
        return {s, r.value[0], r.value[1]};
    }
    using D = Dual<long double>;
    Word w = word_for(c.slope);
    Fn<D> f{D(s.ell), D(s.sigma)};
    f = chart::apply_word(f, w);
    f.sigma += D(0.0L, kLeftTwist * c.weight);
    f = chart::apply_word_inverse(f, w);
    return {s, static_cast<double>(f.ell.d), static_cast<double>(kLeftTwist * f.sigma.d)};
}

Covector length_differential(const MarkedSurface& s, const Slope& g) {
    using D = Dual<long double>;
    Word w = word_for(g);
    Fn<D> fl = chart::apply_word(Fn<D>{D(s.ell, 1.0L), D(s.sigma)}, w);
    Fn<D> fs = chart::apply_word(Fn<D>{D(s.ell), D(s.sigma, 1.0L)}, w);
    return {static_cast<double>(fl.ell.d), static_cast<double>(kLeftTwist * fs.ell.d)};
}

double pair(const Covector& w, const TangentVector& v) { return w(v); }

std::vector<int> christoffel_word(std::int64_t p, std::int64_t q) {
    std::int64_t ap = p < 0 ? -p : p;
    std::int64_t n = ap + q;
    int xl = p < 0 ? -1 : 1;
    std::vector<int> out;
    out.reserve(static_cast<size_t>(n));
    for (std::int64_t k = 1; k <= n; ++k) {
        bool y = (k * q) / n > ((k - 1) * q) / n;
        out.push_back(y ? 2 : xl);
    }
    return out;
}

CosineTerms cosine_terms(const MarkedSurface& s, const Slope& alpha, const Slope& beta) {
    Word w = word_for(alpha);
    Fn<double> f = chart::apply_word(s.fn(), w);
    IMat2 m = word_matrix(w);
    IMat2 mi = m.inverse();
    std::int64_t p = mi.a * beta.p + mi.b * beta.q;
    std::int64_t q = mi.c * beta.p + mi.d * beta.q;
    if (q == 0) throw std::domain_error("cosine_pairing: α and β coincide");
    if (q < 0) { p = -p; q = -q; }
    MarkedSurface local{f.ell, f.sigma};
    auto [X, Y] = local.matrices();
    Mat2 Xi = X.inverse();
    std::vector<int> letters = christoffel_word(p, q);
    Geodesic ax = axis(X);
    CosineTerms out;
    std::vector<std::pair<double, double>> keys;
    const size_t n = letters.size();
    for (size_t j = 0; j < n; ++j) {
        if (letters[j] != 2) continue;
        Mat2 g;
        for (size_t k = 0; k < n; ++k) {
            int l = letters[(j + k) % n];
            g = g * (l == 2 ? Y : (l == 1 ? X : Xi));
        }
        Geodesic gb = axis(g);
        double theta = angle_at_intersection(ax, gb);
        double u = gb.p.x, v = gb.q.x;
        double neg = std::min(u, v), pos = std::max(u, v);
        double r = pos / -neg;
        double position = std::fmod(0.5 * std::log(pos * -neg), f.ell);
        if (position < 0) position += f.ell;
        for (auto& [rk, pk] : keys) {
            double dp = std::abs(pk - position);
            dp = std::min(dp, f.ell - dp);
            if (std::abs(rk - r) <= 1e-9 * std::max(1.0, r) && dp <= 1e-9 * std::max(1.0, f.ell))
                throw std::runtime_error("cosine_pairing: two crossings share a coset");
        }
        keys.emplace_back(r, position);
        out.angles.push_back(theta);
        out.sum += (1 - r) / (1 + r);
    }
    return out;
}

double cosine_pairing(const MarkedSurface& s, const Slope& alpha, const Slope& beta) {
    return cosine_terms(s, alpha, beta).sum;
}

namespace {

struct SysSearch {
    Fn<double> f;
    IMat2 n;
    int max_depth;
    std::int64_t visited = 0;
    Slope best{1, 0};
    double best_len = std::numeric_limits<double>::infinity();

    static std::tuple<std::int64_t, std::int64_t, std::int64_t> key(const Slope& s) {
        std::int64_t ap = s.p < 0 ? -s.p : s.p;
        return {ap + s.q, ap, s.p};
    }

    double length(std::int64_t p, std::int64_t q) {
        ++visited;
        Slope local = Slope::make(p, q);
        double len = chart::apply_word(f, word_for(local)).ell;
        Slope global = n.apply(local);
        double tol = std::isfinite(best_len) ? 1e-12 * std::max(len, best_len) : 0.0;
        if (len < best_len - tol || (std::abs(len - best_len) <= tol && key(global) < key(best))) {
            if (len < best_len) best_len = len;
            best = global;
        }
        return len;
    }

    void descend(std::int64_t lp, std::int64_t lq, double ll, std::int64_t rp, std::int64_t rq, double lr, int depth) {
        std::int64_t mp = lp + rp, mq = lq + rq;
        double lm = length(mp, mq);
        if (lm >= std::max(ll, lr)) return;
        if (depth >= max_depth) throw CertificationFailure("systole: search not certified at configured depth");
        descend(lp, lq, ll, mp, mq, lm, depth + 1);
        descend(mp, mq, lm, rp, rq, lr, depth + 1);
    }
};

}  // namespace

SystoleResult systole(const MarkedSurface& s, int depth) {
    SysSearch st{s.fn(), IMat2{}, depth};
    for (int it = 0; it < 100000; ++it) {
        double kr = std::round(-st.f.sigma / st.f.ell);
        if (std::abs(kr) > 4e18) throw CertificationFailure("systole: twist out of integer range");
        auto k = static_cast<std::int64_t>(kr);
        if (k != 0) {
            st.f = chart::move_T(st.f, k);
            st.n = st.n * IMat2{1, k, 0, 1};
        }
        Fn<double> g = chart::move_S(st.f);
        if (g.ell < st.f.ell * (1 - 1e-14)) {
            st.f = g;
            st.n = st.n * IMat2{0, -1, 1, 0};
        } else {
            break;
        }
    }
    double la = st.length(1, 0);
    double lb = st.length(0, 1);
    st.descend(1, 0, la, 0, 1, lb, 0);
    st.descend(0, 1, lb, -1, 0, la, 0);
    return {st.best, st.best_len, st.visited};
}

FnCoordinates fn_coordinates(const MarkedSurface& s, const Slope& alpha) {
    Fn<double> f = chart::apply_word(s.fn(), word_for(alpha));
    return {f.ell, kLeftTwist * f.sigma, dual_slope(alpha)};
}

TaylorFit taylor_remainder_check(const MarkedSurface& s, const Slope& gamma, const Slope& delta, double weight) {
    if (gamma == delta) throw std::domain_error("taylor_remainder_check: δ must differ from γ");
    double lg = length_of_slope(s, gamma);
    double rate = weight / lg;  // unit-length normalization of the lamination
    using D = Dual<double>;
    Word wg = word_for(gamma), wd = word_for(delta);
    Fn<D> f{D(s.ell), D(s.sigma)};
    f = chart::apply_word(f, wg);
    f.sigma += D(0.0, kLeftTwist * rate);
    f = chart::apply_word_inverse(f, wg);
    f = chart::apply_word(f, wd);
    D tr = 2.0 * cosh(0.5 * f.ell);
    TaylorFit fit{0, tr.d, {}, {}};
    double f0 = trace_of_slope(s, delta);
    const int n = 13;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        double t = std::pow(10.0, -4 + 2.0 * i / (n - 1));
        double ft = trace_of_slope(twist(s, gamma, rate * t), delta);
        double r = std::abs(ft - f0 - fit.phi1 * t);
        if (!(r > 0)) throw std::runtime_error("taylor_remainder_check: degenerate fit");
        fit.ts.push_back(t);
        fit.remainders.push_back(r);
        double lx = std::log(t), ly = std::log(r);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    fit.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return fit;
}

}  // namespace quake
