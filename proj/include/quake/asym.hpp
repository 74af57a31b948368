#pragma once

// Asymmetric metric spaces as black-box oracles, with sample-based checks.
// Distances take values in [0, ∞]; +inf is a legitimate value.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace quake::asym {

template <class P>
struct MetricOracle {
    std::string domain;
    std::function<double(const P&, const P&)> d;

    double operator()(const P& x, const P& y) const { return d(x, y); }
};

struct Violation {
    std::string kind;               // identity, nonnegativity, separation, triangle
    std::vector<std::size_t> where; // indices into the sample list
    double amount = 0;
};

struct AxiomReport {
    bool pass = true;
    std::size_t identity = 0, separation = 0, triangle = 0;  // checks performed
    std::vector<Violation> violations;
};

inline void to_json(nlohmann::json& j, const Violation& v) {
    j = {{"kind", v.kind}, {"where", v.where}, {"amount", v.amount}};
}

inline void to_json(nlohmann::json& j, const AxiomReport& r) {
    j = {{"pass", r.pass},
         {"checks", {{"identity", r.identity}, {"separation", r.separation}, {"triangle", r.triangle}}},
         {"violations", r.violations}};
}

template <class P, class Eq = std::equal_to<P>>
AxiomReport verify_axioms(const MetricOracle<P>& o, const std::vector<P>& samples, double tol = 1e-12,
                          Eq eq = Eq{}, std::size_t max_violations = 32) {
    AxiomReport r;
    const std::size_t n = samples.size();
    auto flag = [&](Violation v) {
        r.pass = false;
        if (r.violations.size() < max_violations) r.violations.push_back(std::move(v));
    };
    std::vector<double> d(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double v = o(samples[i], samples[j]);
            d[i * n + j] = v;
            if (!(v >= 0)) flag({"nonnegativity", {i, j}, v});
        }
    for (std::size_t i = 0; i < n; ++i) {
        ++r.identity;
        if (std::abs(d[i * n + i]) > tol) flag({"identity", {i}, d[i * n + i]});
        for (std::size_t j = i + 1; j < n; ++j) {
            ++r.separation;
            if (d[i * n + j] == 0 && d[j * n + i] == 0 && !eq(samples[i], samples[j])) flag({"separation", {i, j}, 0});
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                ++r.triangle;
                double lhs = d[i * n + k], rhs = d[i * n + j] + d[j * n + k];
                if (std::isinf(rhs)) continue;
                if (lhs > rhs + tol * (1 + rhs)) flag({"triangle", {i, j, k}, lhs - rhs});
            }
    return r;
}

template <class P>
MetricOracle<P> reverse(const MetricOracle<P>& o) {
    return {"reverse(" + o.domain + ")", [d = o.d](const P& x, const P& y) { return d(y, x); }};
}

// p-mean of d and its reverse; p = +inf gives the max.
inline double p_mean(double a, double b, double p) {
    if (std::isinf(a) || std::isinf(b)) return std::numeric_limits<double>::infinity();
    if (std::isinf(p)) return std::max(a, b);
    if (p == 1) return 0.5 * (a + b);
    return std::pow(0.5 * (std::pow(a, p) + std::pow(b, p)), 1 / p);
}

template <class P>
MetricOracle<P> symmetrize(const MetricOracle<P>& o, double p) {
    if (!(p >= 1)) throw std::domain_error("symmetrize: p must lie in [1, ∞]");
    return {"sym_" + std::to_string(p) + "(" + o.domain + ")",
            [d = o.d, p](const P& x, const P& y) { return p_mean(d(x, y), d(y, x), p); }};
}

// ---------------------------------------------------------------------------
// Busemannian check: d(xₙ, x) → 0 iff d(x, xₙ) → 0, probed on a tail window.

enum class Tail { Converges, Diverges, Inconclusive };

inline const char* to_string(Tail t) {
    switch (t) {
        case Tail::Converges: return "converges";
        case Tail::Diverges: return "does_not_converge";
        default: return "inconclusive";
    }
}

template <class P>
struct SequenceInstance {
    std::string name;
    std::function<P(std::int64_t)> term;
    P limit;
    std::int64_t probes = 1000;
};

struct BusemannEntry {
    std::string name;
    Tail forward = Tail::Inconclusive;   // d(xₙ, x)
    Tail backward = Tail::Inconclusive;  // d(x, xₙ)
    double forward_tail = 0, backward_tail = 0;  // last probed values
    bool consistent = true;              // false: one direction converges, the other not
    bool limits_differ = false;          // both settle, at different values
};

struct BusemannReport {
    bool pass = true;
    std::vector<BusemannEntry> entries;
};

inline void to_json(nlohmann::json& j, const BusemannEntry& e) {
    j = {{"name", e.name},
         {"forward", to_string(e.forward)},
         {"backward", to_string(e.backward)},
         {"forward_tail", e.forward_tail},
         {"backward_tail", e.backward_tail},
         {"consistent", e.consistent},
         {"limits_differ", e.limits_differ}};
}

inline void to_json(nlohmann::json& j, const BusemannReport& r) { j = {{"pass", r.pass}, {"entries", r.entries}}; }

// Classifies the second half of the probed values: all ≤ tol converges; a
// tail bounded below by a settled positive value diverges.
inline Tail classify_tail(const std::vector<double>& v, double tol) {
    if (v.empty()) return Tail::Inconclusive;
    std::size_t h = v.size() / 2;
    double mx = 0, mn = std::numeric_limits<double>::infinity();
    for (std::size_t i = h; i < v.size(); ++i) {
        mx = std::max(mx, v[i]);
        mn = std::min(mn, v[i]);
    }
    if (mx <= tol) return Tail::Converges;
    double q = v[h + (v.size() - h) / 2];
    if (mn > 10 * tol && std::abs(v.back() - q) <= 0.1 * mn) return Tail::Diverges;
    return Tail::Inconclusive;
}

template <class P>
BusemannReport busemannian_check(const MetricOracle<P>& o, const std::vector<SequenceInstance<P>>& seqs,
                                 double tol = 1e-6) {
    BusemannReport rep;
    for (const auto& s : seqs) {
        std::vector<double> fw, bw;
        for (std::int64_t n = 1; n <= s.probes; ++n) {
            P x = s.term(n);
            fw.push_back(o(x, s.limit));
            bw.push_back(o(s.limit, x));
        }
        BusemannEntry e;
        e.name = s.name;
        e.forward = classify_tail(fw, tol);
        e.backward = classify_tail(bw, tol);
        e.forward_tail = fw.empty() ? 0 : fw.back();
        e.backward_tail = bw.empty() ? 0 : bw.back();
        bool fc = e.forward == Tail::Converges, bc = e.backward == Tail::Converges;
        bool resolved = e.forward != Tail::Inconclusive && e.backward != Tail::Inconclusive;
        e.consistent = !(resolved && fc != bc);
        e.limits_differ = e.forward == Tail::Diverges && e.backward == Tail::Diverges &&
                          std::abs(e.forward_tail - e.backward_tail) > 10 * tol;
        if (!e.consistent) rep.pass = false;
        rep.entries.push_back(e);
    }
    return rep;
}

// Ball membership in the forward (d(x, ·) < r) and backward (d(·, x) < r) senses.
template <class P>
bool in_forward_ball(const MetricOracle<P>& o, const P& center, const P& y, double r) {
    return o(center, y) < r;
}
template <class P>
bool in_backward_ball(const MetricOracle<P>& o, const P& center, const P& y, double r) {
    return o(y, center) < r;
}

}  // namespace quake::asym
