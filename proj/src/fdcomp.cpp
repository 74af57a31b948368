#include "quake/fdcomp.hpp"

#include <algorithm>
#include <cmath>

namespace quake::fd {

using boost::multiprecision::cpp_rational;

MetricOracle<Index> nat_example_space() {
    return {"N", [](const Index& m, const Index& n) {
                if (m < 1 || n < 1) throw std::domain_error("nat_example_space: points are positive integers");
                return m <= n ? 1.0 / double(m) - 1.0 / double(n) : 1.0;
            }};
}

cpp_rational nat_distance_exact(Index m, Index n) {
    if (m < 1 || n < 1) throw std::domain_error("nat_distance_exact: points are positive integers");
    if (m > n) return 1;
    return cpp_rational(1, m) - cpp_rational(1, n);
}

cpp_rational nat_partial_exact(Index n) {
    if (n < 1) throw std::domain_error("nat_partial_exact: n must be ≥ 1");
    cpp_rational sum = 0;
    for (Index k = 1; k < n; ++k) sum += nat_distance_exact(k, k + 1);
    return sum;
}

FDSeq<Index> nat_sequence() {
    FDSeq<Index> s;
    s.space = nat_example_space();
    s.term = [](Index n) { return n; };
    s.tail_bound = [](Index i) { return 1.0 / double(i); };
    s.back_tail = [](Index) { return 1.0; };
    s.label = "(n)";
    return s;
}

PinchSequence pinch_sequence(const PinchResult& r, double theta, int slope_depth) {
    PinchSequence out;
    const Slope alpha = r.alpha;
    std::vector<MarkedSurface> way = r.path.waypoints();
    // cumulative magnitude at each waypoint
    std::vector<double> cum{0};
    for (const auto& st : r.ledger) cum.push_back(st.magnitude);
    double next = r.ell0;
    for (std::size_t i = 0; i < way.size(); ++i) {
        double l = length_of_slope(way[i], alpha);
        if (i == 0 || l <= next || i + 1 == way.size()) {
            out.samples.push_back(way[i]);
            out.cumulative.push_back(cum[i]);
            next = l / 2;
        }
    }
    const double l_end = length_of_slope(out.samples.back(), alpha);
    const double c = std::abs(std::cos(theta));
    out.remainder = 2 / c * l_end * (std::log(1 / l_end) + 1 + std::log(4.0) + std::log(1 / std::sin(theta)));

    const Index n = static_cast<Index>(out.samples.size());
    auto cumulative = out.cumulative;
    const double rem = out.remainder;
    out.seq.space = {"pinch path magnitude", [cumulative](const Index& i, const Index& j) {
                         if (i <= j) return cumulative[j - 1] - cumulative[i - 1];
                         return std::numeric_limits<double>::infinity();
                     }};
    out.seq.term = [n](Index k) { return std::min(k, n); };
    out.seq.tail_bound = [cumulative, rem, n](Index i) {
        Index k = std::min(i, n);
        return cumulative[n - 1] - cumulative[k - 1] + rem;
    };
    out.seq.label = "pinch";

    for (const Slope& g : enumerate_slopes(slope_depth)) {
        SlopeLimit lim;
        lim.slope = g;
        lim.last = length_of_slope(out.samples.back(), g);
        std::int64_t i = intersection_number(g, alpha);
        if (i == 0) {
            // ℓ_α over the samples halves each time; the tail is at most twice the last value.
            lim.status = "converges";
            lim.certificate = 2 * lim.last;
        } else {
            // collar lemma: ℓ_γ ≥ 2 i(γ, α) w(ℓ_α), and w(ℓ) → ∞ as ℓ → 0
            lim.status = "diverges";
            lim.certificate = 2 * double(i) * width(l_end);
        }
        out.limits.push_back(lim);
    }
    return out;
}

}  // namespace quake::fd
