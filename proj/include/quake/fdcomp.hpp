#pragma once

// FD-sequences (finite forward distance-series) with tail certificates,
// interlacings, certified FD-equivalence and the extended distance of the
// forward FD-completion. Sequences are 1-based term generators; every
// infinitary statement rests on a caller-supplied certificate that is
// validated on a probed prefix, never manufactured.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

#include "quake/asym.hpp"
#include "quake/metrics.hpp"

namespace quake::fd {

using asym::MetricOracle;
using Index = std::int64_t;
using Bound = std::function<double(Index)>;

enum class Kind { Forward, Backward };

template <class P>
struct FDSeq {
    MetricOracle<P> space;
    std::function<P(Index)> term;
    Bound tail_bound;  // ≥ Σ_{k≥i} step(k)
    Bound back_tail;   // optional: ≥ sup_{n≥i} d(x_n, x_i) (forward kind)
    Kind kind = Kind::Forward;
    std::string label;
};

struct CertificateViolation : std::runtime_error {
    nlohmann::json detail;
    CertificateViolation(const std::string& what, nlohmann::json d) : std::runtime_error(what), detail(std::move(d)) {}
};

struct FdReport {
    bool proven = false;
    double bound = std::numeric_limits<double>::infinity();
    Index probed_to = 0;
    std::vector<std::string> violations;
    nlohmann::json obstruction;  // null unless a separation was measured
};

inline void to_json(nlohmann::json& j, const FdReport& r) {
    j = {{"proven", r.proven}, {"bound", r.bound}, {"probed_to", r.probed_to}, {"violations", r.violations}};
    if (!r.obstruction.is_null()) j["obstruction"] = r.obstruction;
}

template <class P>
double step(const FDSeq<P>& s, Index k) {
    P a = s.term(k), b = s.term(k + 1);
    return s.kind == Kind::Forward ? s.space(a, b) : s.space(b, a);
}

template <class P>
double distance_series_partial(const FDSeq<P>& s, Index n) {
    if (n < 1) throw std::domain_error("distance_series_partial: n must be ≥ 1");
    double sum = 0;
    for (Index k = 1; k < n; ++k) sum += step(s, k);
    return sum;
}

inline std::vector<Index> probe_indices(Index budget) {
    std::vector<Index> out;
    for (Index i = 1; i < budget; i *= 2) out.push_back(i);
    out.push_back(budget);
    return out;
}

// Proven when the tail certificate dominates every probed suffix sum and
// decays along the probes; a dominated suffix is a hard error.
template <class P>
FdReport is_fd(const FDSeq<P>& s, Index budget, double tol = 1e-12) {
    if (budget < 1) throw std::domain_error("is_fd: budget must be ≥ 1");
    FdReport r;
    r.probed_to = budget;
    std::vector<double> suffix(budget + 1, 0.0);
    for (Index k = budget - 1; k >= 1; --k) suffix[k] = suffix[k + 1] + step(s, k);
    double prev = std::numeric_limits<double>::infinity();
    for (Index i : probe_indices(budget)) {
        double t = s.tail_bound(i);
        if (!std::isfinite(t)) {
            r.violations.push_back("tail bound not finite at " + std::to_string(i));
            return r;
        }
        if (suffix[i] > t + tol * (1 + t))
            throw CertificateViolation("is_fd: partial sum exceeds the tail certificate",
                                       {{"sequence", s.label}, {"index", i}, {"partial", suffix[i]}, {"tail_bound", t}});
        if (t > prev + tol * (1 + prev))
            throw CertificateViolation("is_fd: tail certificate increases",
                                       {{"sequence", s.label}, {"index", i}, {"tail_bound", t}, {"previous", prev}});
        prev = t;
    }
    double t1 = s.tail_bound(1), tb = s.tail_bound(budget);
    if (t1 > 0 && !(tb < t1)) {
        r.violations.push_back("tail bound does not decay along the probes");
        return r;
    }
    r.proven = true;
    r.bound = suffix[1] + tb;
    return r;
}

// ---------------------------------------------------------------------------
// Interlacings

enum class Src { A, B };
struct Pick {
    Src src;
    Index index;
};
struct Schedule {
    std::string name;
    std::function<Pick(Index)> pick;
    Bound tail_bound;  // certificate for the merged sequence
};

struct ScheduleError : std::domain_error {
    using std::domain_error::domain_error;
};

// Validates the first `probe` picks: strictly increasing per source, both used.
inline void validate_schedule(const Schedule& sc, Index probe) {
    Index last_a = 0, last_b = 0;
    bool used_a = false, used_b = false;
    for (Index n = 1; n <= probe; ++n) {
        Pick p = sc.pick(n);
        Index& last = p.src == Src::A ? last_a : last_b;
        if (p.index <= last)
            throw ScheduleError("interlace: schedule '" + sc.name + "' is not strictly increasing at step " +
                                std::to_string(n));
        last = p.index;
        (p.src == Src::A ? used_a : used_b) = true;
    }
    if (!used_a || !used_b) throw ScheduleError("interlace: schedule '" + sc.name + "' does not draw from both sequences");
}

template <class P>
FDSeq<P> interlace(const FDSeq<P>& a, const FDSeq<P>& b, const Schedule& sc, Index probe = 64) {
    validate_schedule(sc, probe);
    FDSeq<P> z;
    z.space = a.space;
    z.term = [ta = a.term, tb = b.term, pick = sc.pick](Index n) {
        Pick p = pick(n);
        return p.src == Src::A ? ta(p.index) : tb(p.index);
    };
    z.tail_bound = sc.tail_bound;
    z.kind = a.kind;
    z.label = "interlace(" + a.label + ", " + b.label + ")";
    return z;
}

// a₁, b₁, a₂, b₂, … ; the certificate is supplied by the caller.
inline Schedule alternating(Bound tail) {
    return {"alternating", [](Index n) { return Pick{n % 2 ? Src::A : Src::B, (n + 1) / 2}; }, std::move(tail)};
}

// Interlacing of a sequence with itself; its series is the original one.
inline Schedule self_alternating(Bound tail_a) {
    return alternating([tail_a](Index n) { return tail_a((n + 1) / 2); });
}

// b = a∘φ; the merged sequence is a itself, terms at φ(j) taken from b.
inline Schedule subsequence_schedule(std::function<Index(Index)> phi, Bound tail_a) {
    auto pick = [phi](Index n) {
        Index lo = 1, hi = n;  // φ strictly increasing, so φ(j) ≥ j
        while (lo <= hi) {
            Index mid = lo + (hi - lo) / 2, v = phi(mid);
            if (v == n) return Pick{Src::B, mid};
            if (v < n) lo = mid + 1;
            else hi = mid - 1;
        }
        return Pick{Src::A, n};
    };
    return {"subsequence", pick, std::move(tail_a)};
}

// Blocks of the given lengths alternate between a and b (diagnostic hopping
// schedule); the certificate is supplied by the caller.
inline Schedule block_schedule(Index block, Bound tail) {
    if (block < 1) throw ScheduleError("block_schedule: block length must be ≥ 1");
    auto pick = [block](Index n) {
        Index k = (n - 1) / block, r = (n - 1) % block;
        return Pick{k % 2 ? Src::B : Src::A, (k / 2) * block + r + 1};
    };
    return {"block" + std::to_string(block), pick, std::move(tail)};
}

template <class P>
FDSeq<P> subsequence(const FDSeq<P>& a, std::function<Index(Index)> phi) {
    FDSeq<P> s = a;
    s.term = [t = a.term, phi](Index j) { return t(phi(j)); };
    s.tail_bound = [t = a.tail_bound, phi](Index j) { return t(phi(j)); };
    if (a.back_tail) s.back_tail = [t = a.back_tail, phi](Index j) { return t(phi(j)); };
    s.label = a.label + "∘φ";
    return s;
}

// Proven or Unknown; never refuted. A failed witness records the measured
// separation d(a_k, b_k) + d(b_k, a_k) over the probed tail as obstruction.
template <class P>
FdReport fd_equivalent(const FDSeq<P>& a, const FDSeq<P>& b, const Schedule& witness, Index budget) {
    FdReport out;
    out.probed_to = budget;
    FdReport ra = is_fd(a, budget), rb = is_fd(b, budget);
    if (!ra.proven || !rb.proven) {
        out.violations.push_back("inputs are not both proven FD");
        return out;
    }
    FDSeq<P> z = interlace(a, b, witness, std::min<Index>(budget, 64));
    try {
        FdReport rz = is_fd(z, budget);
        if (rz.proven) {
            out.proven = true;
            out.bound = rz.bound;
            return out;
        }
        out.violations = rz.violations;
    } catch (const CertificateViolation& e) {
        out.violations.push_back(e.what());
    }
    double sep = std::numeric_limits<double>::infinity();
    for (Index k = std::max<Index>(1, budget / 2); k <= budget; ++k) {
        P x = a.term(k), y = b.term(k);
        sep = std::min(sep, a.space(x, y) + a.space(y, x));
    }
    if (sep > 0) out.obstruction = {{"kind", "separation"}, {"min_symmetric_distance", sep}};
    return out;
}

// ---------------------------------------------------------------------------
// Completion points

template <class P>
struct CompletionPoint {
    FDSeq<P> rep;
    std::string label;
};

template <class P>
CompletionPoint<P> embed_point(const MetricOracle<P>& o, const P& x, std::string label = "") {
    FDSeq<P> s;
    s.space = o;
    s.term = [x](Index) { return x; };
    s.tail_bound = [](Index) { return 0.0; };
    s.back_tail = [](Index) { return 0.0; };
    s.label = label.empty() ? "const" : label;
    return {s, s.label};
}

struct Interval {
    double lo = 0, hi = std::numeric_limits<double>::infinity();
    bool hi_certified = false;   // false: hi is the value along the representatives
    double along = 0;            // d(x_k, y_k)
};

inline void to_json(nlohmann::json& j, const Interval& v) {
    j = {{"lo", v.lo}, {"hi", v.hi}, {"hi_certified", v.hi_certified}, {"along", v.along}};
}

// d̄(ξ, η) along the given representatives, probed to k.
//   hi = min_j d(x_j, y_j) + back_x(j) + tail_y(j)   (needs a backward certificate on x)
//   lo = max(0, d(x_k, y_k) − tail_x(k) − back_y(k)) (needs one on y)
template <class P>
Interval extended_distance(const CompletionPoint<P>& xi, const CompletionPoint<P>& eta, Index k) {
    const FDSeq<P>& x = xi.rep;
    const FDSeq<P>& y = eta.rep;
    if (!is_fd(x, k).proven || !is_fd(y, k).proven)
        throw std::domain_error("extended_distance: representatives must be proven FD");
    Interval out;
    out.along = x.space(x.term(k), y.term(k));
    if (!xi.label.empty() && xi.label == eta.label) {
        out.lo = 0;
        out.hi = 0;
        out.hi_certified = true;
        return out;
    }
    if (x.back_tail) {
        out.hi_certified = true;
        for (Index j = 1; j <= k; ++j)
            out.hi = std::min(out.hi, x.space(x.term(j), y.term(j)) + x.back_tail(j) + y.tail_bound(j));
    } else {
        out.hi = out.along;
        for (Index j = std::max<Index>(1, k / 2); j <= k; ++j) out.hi = std::min(out.hi, x.space(x.term(j), y.term(j)));
    }
    if (y.back_tail) out.lo = std::max(0.0, out.along - x.tail_bound(k) - y.back_tail(k));
    out.lo = std::min(out.lo, out.hi);
    return out;
}

// ---------------------------------------------------------------------------
// Symmetric oracles: Cauchy bridging

struct CauchyReport {
    bool pass = true;
    double worst_excess = 0;  // max over probes of d(x_n, x_m) − tail(i)
    Index pairs = 0;
};

template <class P>
CauchyReport cauchy_check(const FDSeq<P>& s, Index budget, double tol = 1e-12) {
    CauchyReport r;
    r.worst_excess = -std::numeric_limits<double>::infinity();
    for (Index i : probe_indices(budget)) {
        double t = s.tail_bound(i);
        std::vector<Index> idx;
        for (Index n = i; n <= budget; n = std::max(n + 1, n + (budget - i) / 16)) idx.push_back(n);
        for (std::size_t a = 0; a < idx.size(); ++a)
            for (std::size_t b = a + 1; b < idx.size(); ++b) {
                P u = s.term(idx[a]), v = s.term(idx[b]);
                double d = std::max(s.space(u, v), s.space(v, u));
                r.worst_excess = std::max(r.worst_excess, d - t);
                ++r.pairs;
                if (d > t + tol * (1 + t)) r.pass = false;
            }
    }
    return r;
}

// FD subsequence of a Cauchy sequence with modulus N(ε): n_k ≥ N(2^{-k}),
// so consecutive gaps are ≤ 2^{-k} and the tail from k is ≤ 2^{1-k}.
template <class P>
FDSeq<P> cauchy_subsequence(const MetricOracle<P>& o, std::function<P(Index)> term, std::function<Index(double)> modulus,
                            std::string label = "cauchy") {
    auto nk = [modulus](Index k) {
        Index n = 0;
        for (Index j = 1; j <= k; ++j) n = std::max(n + 1, modulus(std::ldexp(1.0, -int(j))));
        return n;
    };
    FDSeq<P> s;
    s.space = o;
    s.term = [term, nk](Index k) { return term(nk(k)); };
    s.tail_bound = [](Index k) { return std::ldexp(1.0, 1 - int(k)); };
    s.label = label;
    return s;
}

// Image of an FD-sequence under a K-Lipschitz map into another space.
template <class P, class Q>
FDSeq<Q> map_lipschitz(const FDSeq<P>& s, std::function<Q(const P&)> f, double K, const MetricOracle<Q>& target) {
    if (!(K >= 0)) throw std::domain_error("map_lipschitz: K must be ≥ 0");
    FDSeq<Q> out;
    out.space = target;
    out.term = [t = s.term, f](Index n) { return f(t(n)); };
    out.tail_bound = [t = s.tail_bound, K](Index i) { return K * t(i); };
    if (s.back_tail) out.back_tail = [t = s.back_tail, K](Index i) { return K * t(i); };
    out.kind = s.kind;
    out.label = "f(" + s.label + ")";
    return out;
}

// ---------------------------------------------------------------------------
// The ℕ example: d(m, n) = 1/m − 1/n for m ≤ n, 1 otherwise.

MetricOracle<Index> nat_example_space();
boost::multiprecision::cpp_rational nat_distance_exact(Index m, Index n);
boost::multiprecision::cpp_rational nat_partial_exact(Index n);  // series of (n) up to n
// The sequence (n) with tail 1/i and backward certificate 1.
FDSeq<Index> nat_sequence();

// ---------------------------------------------------------------------------
// Pinch paths as FD-sequences

struct SlopeLimit {
    Slope slope;
    std::string status;   // "converges" or "diverges"
    double last = 0;      // last sampled length
    double certificate = 0;  // tail bound (converges) or collar lower bound (diverges)
};

struct PinchSequence {
    FDSeq<Index> seq;                    // points are sample indices
    std::vector<MarkedSurface> samples;  // each about half the previous ℓ_α
    std::vector<double> cumulative;      // path magnitude up to each sample
    double remainder = 0;                // bound on the magnitude beyond the last sample
    std::vector<SlopeLimit> limits;
};

// Samples the path each time ℓ_α halves. The oracle is the path magnitude
// between samples (an upper bound on d_e) forward, +inf backward; the tail
// certificate is the remaining path magnitude plus the pinching bound below
// the final length.
PinchSequence pinch_sequence(const PinchResult& r, double theta, int slope_depth = 3);

}  // namespace quake::fd
