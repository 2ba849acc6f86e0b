#pragma once

// Hitting-time sets G_U(y,y') and finite upper asymptotic / upper Banach
// density estimators.

#include "averaging.hpp"
#include "core.hpp"
#include "folner.hpp"
#include "space.hpp"

#include <string>
#include <vector>

namespace meandyn {

inline bool hits(const Space& space, const PointPair& pair, const Neighborhood& u, const GroupElement& g)
{
    return contains(space, u, act(space, g, pair));
}

/// {g in elements : (g.y, g.y') in U}, in input order.
inline std::vector<GroupElement> hitting_set(const Space& space, const PointPair& pair, const Neighborhood& u,
                                             const std::vector<GroupElement>& elements)
{
    std::vector<GroupElement> out;
    auto p = space.canonical(pair);
    for (const auto& g : elements)
        if (hits(space, p, u, g))
            out.push_back(g);
    return out;
}

struct HittingRecord
{
    PointPair pair;
    std::string neighborhood;
    std::string family;
    std::uint64_t n = 0;
    std::uint64_t hits = 0;
    std::uint64_t size = 0;
    Rational ratio;
};

namespace detail {

/// Hit indicator over the integer range [lo, hi] with prefix sums.
class HitPrefix
{
public:
    HitPrefix(const Space& space, const PointPair& pair, const Neighborhood& u, std::int64_t lo, std::int64_t hi)
        : lo_(lo), prefix_(static_cast<std::size_t>(hi - lo + 2), 0)
    {
        for (auto g = lo; g <= hi; ++g) {
            auto i = static_cast<std::size_t>(g - lo);
            prefix_[i + 1] = prefix_[i] + (hits(space, pair, u, GroupElement::integer(g)) ? 1 : 0);
        }
    }

    /// Hits in [a, b]; the range must lie inside the constructed one.
    std::uint64_t count(std::int64_t a, std::int64_t b) const
    {
        return prefix_[static_cast<std::size_t>(b - lo_ + 1)] - prefix_[static_cast<std::size_t>(a - lo_)];
    }

private:
    std::int64_t lo_;
    std::vector<std::uint64_t> prefix_;
};

} // namespace detail

inline HittingRecord hitting_density(const Space& space, const PointPair& pair, const Neighborhood& u,
                                     const FolnerFamily& family, std::uint64_t n, ElementCache& cache)
{
    HittingRecord r;
    r.pair = space.canonical(pair);
    r.neighborhood = u.describe();
    r.family = family.name();
    r.n = n;
    if (auto iv = interval_of(family, n)) {
        for (auto g = iv->first; g <= iv->second; ++g)
            r.hits += hits(space, r.pair, u, GroupElement::integer(g)) ? 1 : 0;
        r.size = static_cast<std::uint64_t>(iv->second - iv->first + 1);
    } else {
        const auto& elems = cache.get(family, n);
        for (const auto& g : elems)
            r.hits += hits(space, r.pair, u, g) ? 1 : 0;
        r.size = elems.size();
    }
    r.ratio = make_rational(static_cast<std::int64_t>(r.hits), static_cast<std::int64_t>(r.size));
    return r;
}

inline HittingRecord hitting_density(const Space& space, const PointPair& pair, const Neighborhood& u,
                                     const FolnerFamily& family, std::uint64_t n, const Budget& budget = {})
{
    ElementCache cache(budget);
    return hitting_density(space, pair, u, family, n, cache);
}

struct DensityProfile
{
    Window window;
    std::vector<HittingRecord> records;
    Rational tail_max;
    std::uint64_t tail_argmax = 0;
};

/// Hit ratios over the window; tail_max over the upper half is the
/// ua-dens estimate.
inline DensityProfile ua_dens_estimate(const Space& space, const PointPair& pair, const Neighborhood& u,
                                       const FolnerFamily& family, Window window, ElementCache& cache)
{
    window.check();
    DensityProfile out;
    out.window = window;
    auto p = space.canonical(pair);
    const auto t0 = tail_start(window.lo, window.hi);

    // Z families: one pass over the union of the intervals.
    std::optional<detail::HitPrefix> prefix;
    if (family.group() == GroupKind::Integers) {
        std::int64_t lo = 0, hi = -1;
        bool first = true;
        for (auto n = window.lo; n <= window.hi; ++n) {
            auto iv = *interval_of(family, n);
            lo = first ? iv.first : std::min(lo, iv.first);
            hi = first ? iv.second : std::max(hi, iv.second);
            first = false;
        }
        prefix.emplace(space, p, u, lo, hi);
    }
    for (auto n = window.lo; n <= window.hi; ++n) {
        HittingRecord r;
        if (prefix) {
            auto iv = *interval_of(family, n);
            r.pair = p;
            r.neighborhood = u.describe();
            r.family = family.name();
            r.n = n;
            r.hits = prefix->count(iv.first, iv.second);
            r.size = static_cast<std::uint64_t>(iv.second - iv.first + 1);
            r.ratio = make_rational(static_cast<std::int64_t>(r.hits), static_cast<std::int64_t>(r.size));
        } else {
            r = hitting_density(space, p, u, family, n, cache);
        }
        if (n >= t0 && (out.tail_argmax == 0 || r.ratio > out.tail_max)) {
            out.tail_max = r.ratio;
            out.tail_argmax = n;
        }
        out.records.push_back(std::move(r));
    }
    return out;
}

inline DensityProfile ua_dens_estimate(const Space& space, const PointPair& pair, const Neighborhood& u,
                                       const FolnerFamily& family, Window window, const Budget& budget = {})
{
    ElementCache cache(budget);
    return ua_dens_estimate(space, pair, u, family, window, cache);
}

struct BanachEstimate
{
    std::string shape;
    std::uint64_t n = 0;
    Rational value;
    GroupElement argmax = GroupElement::integer(0);
    std::size_t translates = 0;
};

/// Default translate range {-5n, ..., 5n} (sigma^t for the lamplighter group).
inline std::vector<GroupElement> default_translates(GroupKind group, std::uint64_t n)
{
    std::vector<GroupElement> out;
    const auto r = 5 * static_cast<std::int64_t>(n);
    for (auto t = -r; t <= r; ++t)
        out.push_back(group == GroupKind::Integers ? GroupElement::integer(t) : GroupElement::lamp(t));
    return out;
}

/// max over translates t of |G_U cap F_n t| / |F_n| with F_n fixed.
/// Ties keep the first translate in the given order.
inline BanachEstimate ub_dens_estimate(const Space& space, const PointPair& pair, const Neighborhood& u,
                                       const FolnerFamily& shape, std::uint64_t n,
                                       const std::vector<GroupElement>& translates, ElementCache& cache)
{
    if (translates.empty())
        throw DomainError("ub_dens_estimate needs a nonempty translate range");
    BanachEstimate out;
    out.shape = shape.name();
    out.n = n;
    out.translates = translates.size();
    auto p = space.canonical(pair);
    bool first = true;
    auto consider = [&](std::uint64_t count, std::uint64_t size, const GroupElement& t) {
        auto v = make_rational(static_cast<std::int64_t>(count), static_cast<std::int64_t>(size));
        if (first || v > out.value) {
            out.value = v;
            out.argmax = t;
            first = false;
        }
    };
    if (auto iv = interval_of(shape, n); iv && shape.group() == GroupKind::Integers) {
        std::int64_t tlo = translates.front().shift(), thi = tlo;
        for (const auto& t : translates) {
            if (t.kind() != GroupKind::Integers)
                throw DescriptorMismatch("translate outside Z");
            tlo = std::min(tlo, t.shift());
            thi = std::max(thi, t.shift());
        }
        detail::HitPrefix prefix(space, p, u, checked_add(iv->first, tlo), checked_add(iv->second, thi));
        const auto size = static_cast<std::uint64_t>(iv->second - iv->first + 1);
        for (const auto& t : translates)
            consider(prefix.count(iv->first + t.shift(), iv->second + t.shift()), size, t);
        return out;
    }
    const auto& elems = cache.get(shape, n);
    for (const auto& t : translates) {
        std::uint64_t count = 0;
        for (const auto& f : elems)
            count += hits(space, p, u, multiply(f, t)) ? 1 : 0;
        consider(count, elems.size(), t);
    }
    return out;
}

inline BanachEstimate ub_dens_estimate(const Space& space, const PointPair& pair, const Neighborhood& u,
                                       const FolnerFamily& shape, std::uint64_t n,
                                       const std::vector<GroupElement>& translates, const Budget& budget = {})
{
    ElementCache cache(budget);
    return ub_dens_estimate(space, pair, u, shape, n, translates, cache);
}

} // namespace meandyn
