#pragma once

// Cesaro averages of the metric along Folner sets, windowed estimates of the
// Besicovitch and Weyl mean pseudometrics, and a mean-equicontinuity probe.

#include "core.hpp"
#include "folner.hpp"
#include "space.hpp"

#include <functional>
#include <string>
#include <vector>

namespace meandyn {

/// (1/|F_n|) sum_{g in F_n} d(g.x, g.x'), exact.
inline Rational cesaro_metric(const Space& space, const Point& x, const Point& y, const FolnerFamily& family,
                              std::uint64_t n, const Budget& budget = {})
{
    if (family.group() == GroupKind::Lamplighter && space.group() != GroupKind::Lamplighter)
        throw DescriptorMismatch("lamplighter family averaged over a Z-space");
    auto a = space.canonical(x);
    auto b = space.canonical(y);
    if (a == b)
        return 0;
    auto elems = enumerate(family, n, budget);
    Rational total = 0;
    for (const auto& g : elems)
        total += metric(space, act(space, g, a), act(space, g, b));
    return total / static_cast<long>(elems.size());
}

inline double cesaro_metric_approx(const Space& space, const Point& x, const Point& y, const FolnerFamily& family,
                                   std::uint64_t n, ElementCache& cache)
{
    auto a = space.canonical(x);
    auto b = space.canonical(y);
    if (a == b)
        return 0.0;
    double total = 0.0;
    std::uint64_t size = 0;
    if (auto iv = interval_of(family, n)) {
        for (auto g = iv->first; g <= iv->second; ++g) {
            auto e = GroupElement::integer(g);
            total += metric_approx(space, act(space, e, a), act(space, e, b));
        }
        size = static_cast<std::uint64_t>(iv->second - iv->first + 1);
    } else {
        const auto& elems = cache.get(family, n);
        for (const auto& g : elems)
            total += metric_approx(space, act(space, g, a), act(space, g, b));
        size = elems.size();
    }
    return total / static_cast<double>(size);
}

/// First index of the upper half of [lo, hi]; the limsup proxy looks there.
inline std::uint64_t tail_start(std::uint64_t lo, std::uint64_t hi)
{
    return lo + (hi - lo + 1) / 2;
}

struct Window
{
    std::uint64_t lo = 1;
    std::uint64_t hi = 1;

    void check() const
    {
        if (lo == 0 || hi < lo)
            throw DomainError("window must satisfy 1 <= lo <= hi");
    }
    std::uint64_t size() const { return hi - lo + 1; }
};

struct AverageProfile
{
    std::string family;
    PointPair pair;
    Window window;
    std::vector<std::uint64_t> sizes;
    std::vector<double> values;
    /// Filled only for exact runs.
    std::vector<Rational> exact;
    double tail_sup = 0.0;
    /// Last quarter of the window varies by less than 1e-3.
    bool stabilized = false;
};

/// Per-n Cesaro averages over the window; tail_sup over the upper half is the
/// D_F estimate.
inline AverageProfile besicovitch_profile(const Space& space, const Point& x, const Point& y,
                                          const FolnerFamily& family, Window window, bool exact = false,
                                          const Budget& budget = {})
{
    window.check();
    AverageProfile out;
    out.family = family.name();
    out.pair = {space.canonical(x), space.canonical(y)};
    out.window = window;
    ElementCache cache(budget);
    for (auto n = window.lo; n <= window.hi; ++n) {
        out.sizes.push_back(cardinality(family, n));
        if (exact) {
            out.exact.push_back(cesaro_metric(space, x, y, family, n, budget));
            out.values.push_back(to_double(out.exact.back()));
        } else {
            out.values.push_back(cesaro_metric_approx(space, x, y, family, n, cache));
        }
    }
    const auto t0 = tail_start(window.lo, window.hi) - window.lo;
    for (auto i = t0; i < out.values.size(); ++i)
        out.tail_sup = std::max(out.tail_sup, out.values[i]);
    const auto q0 = out.values.size() - std::max<std::size_t>(1, out.values.size() / 4);
    auto [lo, hi] = std::minmax_element(out.values.begin() + static_cast<std::ptrdiff_t>(q0), out.values.end());
    out.stabilized = *hi - *lo < 1e-3;
    return out;
}

struct WeylEstimate
{
    double value = 0.0;
    std::string argmax;
    std::vector<std::pair<std::string, double>> per_family;
};

/// max over the listed families of the Besicovitch estimate; a lower bound for
/// the sup over all Folner sequences.
inline WeylEstimate weyl_estimate(const Space& space, const Point& x, const Point& y,
                                  const std::vector<FolnerFamily>& families, Window window, const Budget& budget = {})
{
    if (families.empty())
        throw DomainError("weyl_estimate needs at least one family");
    WeylEstimate out;
    for (const auto& f : families) {
        auto prof = besicovitch_profile(space, x, y, f, window, false, budget);
        out.per_family.emplace_back(f.name(), prof.tail_sup);
        if (out.argmax.empty() || prof.tail_sup > out.value) {
            out.value = prof.tail_sup;
            out.argmax = f.name();
        }
    }
    return out;
}

enum class MecVerdict : std::uint8_t { Consistent, Violation };

inline std::string_view to_string(MecVerdict v)
{
    return v == MecVerdict::Consistent ? "CONSISTENT-WITH-MEC" : "VIOLATION";
}

struct MecReport
{
    MecVerdict verdict = MecVerdict::Consistent;
    double epsilon = 0.0;
    std::vector<std::int64_t> ks;
    std::vector<double> distances;
    std::vector<double> estimates;
    std::vector<std::int64_t> violating;
    /// Profile at the witness k (the last violating one, else the last k).
    AverageProfile witness;
};

using PairSequence = std::function<PointPair(std::int64_t)>;

/// D_F estimates along an approach (x_k, y_k) with d(x_k, y_k) -> 0.
/// Consistent when every estimate in the upper half of the k list is below
/// epsilon.
inline MecReport mec_probe(const Space& space, const FolnerFamily& family, const PairSequence& approach,
                           std::vector<std::int64_t> ks, double epsilon, Window window, const Budget& budget = {})
{
    if (ks.size() < 2)
        throw DomainError("mec_probe needs at least two approach indices");
    MecReport out;
    out.epsilon = epsilon;
    out.ks = ks;
    for (auto k : ks)
        out.distances.push_back(pair_distance_approx(space, space.canonical(approach(k))));
    for (std::size_t i = 1; i < out.distances.size(); ++i)
        if (out.distances[i] > out.distances[i - 1])
            throw DomainError("approach sequence is not converging: distances increase");
    if (!(out.distances.back() < out.distances.front()) && out.distances.back() != 0.0)
        throw DomainError("approach sequence is not converging");

    std::size_t witness = ks.size() - 1;
    const std::size_t half = ks.size() / 2;
    std::vector<AverageProfile> profiles;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        auto p = approach(ks[i]);
        profiles.push_back(besicovitch_profile(space, p.first, p.second, family, window, false, budget));
        out.estimates.push_back(profiles.back().tail_sup);
        if (out.estimates.back() >= epsilon) {
            out.violating.push_back(ks[i]);
            if (i >= half) {
                out.verdict = MecVerdict::Violation;
                witness = i;
            }
        }
    }
    out.witness = std::move(profiles[witness]);
    return out;
}

} // namespace meandyn
