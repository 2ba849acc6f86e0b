#pragma once

// Finitely supported probability measures on X or X^2 with exact weights:
// Dirac and empirical measures, pushforwards, Wasserstein-1, supports,
// invariance defects, cluster detection and maximal-support estimates.

#include "core.hpp"
#include "folner.hpp"
#include "space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace meandyn {

template <class P>
class AtomicMeasure
{
public:
    using Atom = std::pair<P, Rational>;

    /// Canonicalizes points, merges duplicates and checks the weights.
    AtomicMeasure(Space space, const std::vector<Atom>& atoms) : space_(std::move(space))
    {
        std::map<P, Rational> merged;
        for (const auto& [p, w] : atoms) {
            if (w <= 0)
                throw DomainError("atom weights must be positive");
            merged[space_.canonical(p)] += w;
        }
        Rational total = 0;
        for (auto& [p, w] : merged) {
            total += w;
            atoms_.emplace_back(p, w);
        }
        if (total != 1)
            throw DomainError("atom weights sum to " + fraction_string(total) + ", not 1");
    }

    const Space& space() const noexcept { return space_; }
    const std::vector<Atom>& atoms() const noexcept { return atoms_; }
    std::size_t size() const noexcept { return atoms_.size(); }

    Rational weight(const P& p) const
    {
        auto q = space_.canonical(p);
        auto it = std::lower_bound(atoms_.begin(), atoms_.end(), q,
                                   [](const Atom& a, const P& key) { return a.first < key; });
        return it != atoms_.end() && it->first == q ? it->second : Rational(0);
    }

    Rational mass(const Neighborhood& u) const
    {
        Rational m = 0;
        for (const auto& [p, w] : atoms_)
            if (contains(space_, u, p))
                m += w;
        return m;
    }

    friend bool operator==(const AtomicMeasure& a, const AtomicMeasure& b)
    {
        return a.space_ == b.space_ && a.atoms_ == b.atoms_;
    }

private:
    Space space_;
    std::vector<Atom> atoms_;
};

using PointMeasure = AtomicMeasure<Point>;
using PairMeasure = AtomicMeasure<PointPair>;

template <class P>
AtomicMeasure<P> dirac(const Space& space, const P& p)
{
    return AtomicMeasure<P>(space, {{p, Rational(1)}});
}

/// Uniform weight 1/|F_n| on {g.start : g in F_n}, coinciding images merged.
template <class P>
AtomicMeasure<P> empirical(const Space& space, const P& start, const FolnerFamily& family, std::uint64_t n,
                           ElementCache& cache)
{
    auto s = space.canonical(start);
    std::map<P, std::int64_t> counts;
    std::int64_t size = 0;
    if (auto iv = interval_of(family, n)) {
        for (auto g = iv->first; g <= iv->second; ++g)
            ++counts[space.canonical(act(space, GroupElement::integer(g), s))];
        size = iv->second - iv->first + 1;
    } else {
        const auto& elems = cache.get(family, n);
        for (const auto& g : elems)
            ++counts[space.canonical(act(space, g, s))];
        size = static_cast<std::int64_t>(elems.size());
    }
    std::vector<typename AtomicMeasure<P>::Atom> atoms;
    atoms.reserve(counts.size());
    for (const auto& [p, c] : counts)
        atoms.emplace_back(p, make_rational(c, size));
    return AtomicMeasure<P>(space, atoms);
}

template <class P>
AtomicMeasure<P> empirical(const Space& space, const P& start, const FolnerFamily& family, std::uint64_t n,
                           const Budget& budget = {})
{
    ElementCache cache(budget);
    return empirical(space, start, family, n, cache);
}

/// Image measure under f; f maps atoms of `mu` into `target`.
template <class P, class F>
auto pushforward(const AtomicMeasure<P>& mu, F f, const Space& target)
{
    using Q = std::decay_t<decltype(f(std::declval<const P&>()))>;
    std::vector<typename AtomicMeasure<Q>::Atom> atoms;
    atoms.reserve(mu.size());
    for (const auto& [p, w] : mu.atoms())
        atoms.emplace_back(f(p), w);
    return AtomicMeasure<Q>(target, atoms);
}

template <class P, class F>
auto pushforward(const AtomicMeasure<P>& mu, F f)
{
    return pushforward(mu, f, mu.space());
}

/// Atoms with weight strictly above the tolerance.
template <class P>
std::vector<P> support(const AtomicMeasure<P>& mu, const Rational& tol = 0)
{
    std::vector<P> out;
    for (const auto& [p, w] : mu.atoms())
        if (w > tol)
            out.push_back(p);
    return out;
}

// ---------------------------------------------------------------------------
// Wasserstein-1

namespace detail {

/// A line coordinate that is an isometry on the given points, if one exists.
inline std::optional<std::vector<Rational>> line_coordinate(const Space& space, const std::vector<Point>& pts)
{
    if (space.kind() == SpaceKind::OnePoint)
        for (const auto& p : pts)
            if (p.copy != pts.front().copy)
                return std::nullopt;
    std::vector<Rational> out;
    out.reserve(pts.size());
    for (const auto& p : pts)
        out.push_back(embed(space, p));
    return out;
}

inline std::optional<std::vector<Rational>> line_coordinate(const Space& space, const std::vector<PointPair>& pts)
{
    std::vector<Point> a, b;
    for (const auto& p : pts) {
        a.push_back(p.first);
        b.push_back(p.second);
    }
    auto e1 = line_coordinate(space, a);
    auto e2 = line_coordinate(space, b);
    if (!e1 || !e2)
        return std::nullopt;
    auto constant = [](const std::vector<Rational>& v) {
        return std::all_of(v.begin(), v.end(), [&](const Rational& x) { return x == v.front(); });
    };
    if (constant(*e2))
        return e1;
    if (constant(*e1))
        return e2;
    // Sum metric is a line metric when the coordinates are co- or anti-monotone.
    std::vector<std::size_t> order(pts.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    for (int sign : {1, -1}) {
        std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
            if ((*e1)[i] != (*e1)[j])
                return (*e1)[i] < (*e1)[j];
            return sign > 0 ? (*e2)[i] < (*e2)[j] : (*e2)[i] > (*e2)[j];
        });
        bool ok = true;
        for (std::size_t t = 1; t < order.size() && ok; ++t) {
            const auto& prev = (*e2)[order[t - 1]];
            const auto& cur = (*e2)[order[t]];
            ok = sign > 0 ? prev <= cur : prev >= cur;
        }
        if (ok) {
            std::vector<Rational> h(pts.size());
            for (std::size_t i = 0; i < h.size(); ++i)
                if (sign > 0)
                    h[i] = (*e1)[i] + (*e2)[i];
                else
                    h[i] = (*e1)[i] - (*e2)[i];
            return h;
        }
    }
    return std::nullopt;
}

template <class P>
std::vector<P> atom_union(const AtomicMeasure<P>& mu, const AtomicMeasure<P>& nu)
{
    std::vector<P> pts;
    for (const auto& a : mu.atoms())
        pts.push_back(a.first);
    for (const auto& a : nu.atoms())
        pts.push_back(a.first);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

template <class P>
void check_same_space(const AtomicMeasure<P>& mu, const AtomicMeasure<P>& nu)
{
    if (!(mu.space() == nu.space()))
        throw DescriptorMismatch("w1 between measures on different spaces");
}

/// Integral of |F - G| along the line coordinate h.
template <class P>
Rational line_transport(const AtomicMeasure<P>& mu, const AtomicMeasure<P>& nu, const std::vector<P>& pts,
                        const std::vector<Rational>& h)
{
    std::vector<std::pair<Rational, Rational>> marks; // (position, mu - nu)
    marks.reserve(pts.size());
    std::size_t im = 0, in = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        Rational delta = 0;
        if (im < mu.size() && mu.atoms()[im].first == pts[i])
            delta += mu.atoms()[im++].second;
        if (in < nu.size() && nu.atoms()[in].first == pts[i])
            delta -= nu.atoms()[in++].second;
        marks.emplace_back(h[i], delta);
    }
    std::sort(marks.begin(), marks.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    Rational cdf = 0, total = 0;
    for (std::size_t i = 0; i + 1 < marks.size(); ++i) {
        cdf += marks[i].second;
        total += abs(cdf) * (marks[i + 1].first - marks[i].first);
    }
    return total;
}

struct FlowResult
{
    /// (source, sink, mass) for every positive flow.
    std::vector<std::tuple<std::size_t, std::size_t, Rational>> plan;
};

/// Min-cost transportation by successive shortest paths with potentials.
/// Paths are selected in double precision; masses stay exact.
inline FlowResult transport_plan(const std::vector<Rational>& supply, const std::vector<Rational>& demand,
                                 const std::vector<std::vector<double>>& cost)
{
    const std::size_t m = supply.size(), k = demand.size(), v = m + k;
    std::vector<Rational> rs = supply, rd = demand;
    std::vector<std::map<std::size_t, Rational>> into(k); // into[j][i] = flow i -> j
    std::vector<double> pot(v, 0.0);
    constexpr double inf = std::numeric_limits<double>::infinity();

    while (true) {
        std::vector<double> dist(v, inf);
        std::vector<std::size_t> prev(v, v);
        std::vector<bool> done(v, false);
        for (std::size_t i = 0; i < m; ++i)
            if (rs[i] > 0)
                dist[i] = 0.0;
        std::optional<std::size_t> target;
        for (std::size_t step = 0; step < v; ++step) {
            std::size_t u = v;
            for (std::size_t w = 0; w < v; ++w)
                if (!done[w] && dist[w] < inf && (u == v || dist[w] < dist[u]))
                    u = w;
            if (u == v)
                break;
            done[u] = true;
            if (u >= m && rd[u - m] > 0 && !target) {
                target = u;
                break;
            }
            if (u < m) {
                for (std::size_t j = 0; j < k; ++j) {
                    double r = std::max(0.0, cost[u][j] + pot[u] - pot[m + j]);
                    if (dist[u] + r < dist[m + j]) {
                        dist[m + j] = dist[u] + r;
                        prev[m + j] = u;
                    }
                }
            } else {
                for (const auto& [i, f] : into[u - m]) {
                    double r = std::max(0.0, -cost[i][u - m] + pot[u] - pot[i]);
                    if (dist[u] + r < dist[i]) {
                        dist[i] = dist[u] + r;
                        prev[i] = u;
                    }
                }
            }
        }
        if (!target)
            break;
        const double reach = dist[*target];
        for (std::size_t w = 0; w < v; ++w)
            pot[w] += std::min(dist[w], reach);

        // Bottleneck along the path.
        Rational amount = rd[*target - m];
        std::size_t w = *target;
        while (prev[w] != v) {
            std::size_t p = prev[w];
            if (w < m)
                amount = std::min(amount, into[p - m][w]);
            w = p;
        }
        amount = std::min(amount, rs[w]);
        // Apply.
        rs[w] -= amount;
        rd[*target - m] -= amount;
        w = *target;
        while (prev[w] != v) {
            std::size_t p = prev[w];
            if (w >= m) {
                into[w - m][p] += amount;
            } else {
                auto it = into[p - m].find(w);
                it->second -= amount;
                if (it->second == 0)
                    into[p - m].erase(it);
            }
            w = p;
        }
    }
    FlowResult out;
    for (std::size_t j = 0; j < k; ++j)
        for (const auto& [i, f] : into[j])
            out.plan.emplace_back(i, j, f);
    std::sort(out.plan.begin(), out.plan.end(),
              [](const auto& a, const auto& b) {
                  return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
              });
    return out;
}

} // namespace detail

/// Largest support the general solver accepts per side.
inline constexpr std::size_t max_transport_atoms = 4000;

/// One-dimensional closed form; nullopt when the atoms admit no isometric
/// line coordinate.
template <class P>
std::optional<Rational> w1_line(const AtomicMeasure<P>& mu, const AtomicMeasure<P>& nu)
{
    detail::check_same_space(mu, nu);
    auto pts = detail::atom_union(mu, nu);
    auto h = detail::line_coordinate(mu.space(), pts);
    if (!h)
        return std::nullopt;
    return detail::line_transport(mu, nu, pts, *h);
}

/// General exact solver (no line reduction).
template <class P>
Rational w1_flow(const AtomicMeasure<P>& mu, const AtomicMeasure<P>& nu)
{
    detail::check_same_space(mu, nu);
    if (mu.size() > max_transport_atoms || nu.size() > max_transport_atoms)
        throw BudgetError("w1: supports of " + std::to_string(mu.size()) + " and " + std::to_string(nu.size()) +
                          " atoms exceed the solver limit of " + std::to_string(max_transport_atoms));
    const auto& sp = mu.space();
    std::vector<Rational> a, b;
    for (const auto& x : mu.atoms())
        a.push_back(x.second);
    for (const auto& x : nu.atoms())
        b.push_back(x.second);
    std::vector<std::vector<double>> cost(a.size(), std::vector<double>(b.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            cost[i][j] = metric_approx(sp, mu.atoms()[i].first, nu.atoms()[j].first);
    auto flow = detail::transport_plan(a, b, cost);
    Rational total = 0;
    for (const auto& [i, j, f] : flow.plan)
        total += f * metric(sp, mu.atoms()[i].first, nu.atoms()[j].first);
    return total;
}

/// Merges atoms closer than `radius` (in the metric, scanning in atom order)
/// into the first atom of each run.
template <class P>
AtomicMeasure<P> coarsen(const AtomicMeasure<P>& mu, double radius)
{
    std::vector<typename AtomicMeasure<P>::Atom> out;
    for (const auto& [p, w] : mu.atoms()) {
        if (!out.empty() && metric_approx(mu.space(), out.back().first, p) < radius)
            out.back().second += w;
        else
            out.emplace_back(p, w);
    }
    return AtomicMeasure<P>(mu.space(), out);
}

/// Exact W1 with ground cost the space metric (sum metric on pairs).
template <class P>
Rational w1(const AtomicMeasure<P>& mu, const AtomicMeasure<P>& nu)
{
    if (auto line = w1_line(mu, nu))
        return *line;
    if (mu.size() > max_transport_atoms || nu.size() > max_transport_atoms)
        return w1_flow(coarsen(mu, 1e-9), coarsen(nu, 1e-9));
    return w1_flow(mu, nu);
}

/// Double-precision W1 for sweeps: closed form in doubles when available.
template <class P>
double w1_approx(const AtomicMeasure<P>& mu, const AtomicMeasure<P>& nu)
{
    detail::check_same_space(mu, nu);
    const auto& sp = mu.space();
    auto pts = detail::atom_union(mu, nu);
    if (auto h = detail::line_coordinate(sp, pts)) {
        std::vector<std::pair<double, double>> marks;
        std::size_t im = 0, in = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            double delta = 0.0;
            if (im < mu.size() && mu.atoms()[im].first == pts[i])
                delta += to_double(mu.atoms()[im++].second);
            if (in < nu.size() && nu.atoms()[in].first == pts[i])
                delta -= to_double(nu.atoms()[in++].second);
            marks.emplace_back(to_double((*h)[i]), delta);
        }
        std::sort(marks.begin(), marks.end());
        double cdf = 0.0, total = 0.0;
        for (std::size_t i = 0; i + 1 < marks.size(); ++i) {
            cdf += marks[i].second;
            total += std::fabs(cdf) * (marks[i + 1].first - marks[i].first);
        }
        return total;
    }
    return to_double(w1(mu, nu));
}

/// max over generators g of w1(g_* mu, mu).
template <class P>
Rational invariance_defect(const Space& space, const AtomicMeasure<P>& mu, const std::vector<GroupElement>& gens)
{
    if (gens.empty())
        throw DomainError("invariance_defect needs generators");
    Rational worst = 0;
    for (const auto& g : gens) {
        auto moved = pushforward(mu, [&](const P& p) { return act(space, g, p); }, space);
        worst = std::max(worst, w1(moved, mu));
    }
    return worst;
}

/// Last measure if the trailing `last` entries are pairwise within tol in W1.
template <class P>
std::optional<AtomicMeasure<P>> cluster_detect(const std::vector<AtomicMeasure<P>>& seq, double tol = 1e-3,
                                               std::size_t last = 5)
{
    if (seq.size() < 3)
        throw DomainError("cluster_detect needs at least three measures");
    const std::size_t from = seq.size() - std::min(last, seq.size());
    for (std::size_t i = from; i < seq.size(); ++i)
        for (std::size_t j = i + 1; j < seq.size(); ++j)
            if (!(w1_approx(seq[i], seq[j]) < tol))
                return std::nullopt;
    return seq.back();
}

/// Moves every atom to its nearest target (first target on ties).
template <class P>
AtomicMeasure<P> project_nearest(const AtomicMeasure<P>& mu, const std::vector<P>& targets)
{
    if (targets.empty())
        throw DomainError("project_nearest needs targets");
    return pushforward(mu, [&](const P& p) {
        std::size_t best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < targets.size(); ++i) {
            double d = metric_approx(mu.space(), p, targets[i]);
            if (d < bd) {
                bd = d;
                best = i;
            }
        }
        return targets[best];
    });
}

/// Targets whose ball of half the distance to the nearest other target
/// carries at least `mass_tol`, paired with that mass.
template <class P>
std::vector<std::pair<P, Rational>> heavy_atoms(const AtomicMeasure<P>& mu, const std::vector<P>& targets,
                                                const Rational& mass_tol)
{
    if (targets.empty())
        throw DomainError("heavy_atoms needs targets");
    const auto& sp = mu.space();
    std::vector<double> radius(targets.size(), std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < targets.size(); ++i)
        for (std::size_t j = i + 1; j < targets.size(); ++j) {
            double d = metric_approx(sp, targets[i], targets[j]) / 2;
            radius[i] = std::min(radius[i], d);
            radius[j] = std::min(radius[j], d);
        }
    std::vector<std::pair<P, Rational>> out;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        Rational m = 0;
        for (const auto& [p, w] : mu.atoms())
            if (metric_approx(sp, p, targets[i]) < radius[i])
                m += w;
        if (m >= mass_tol && m > 0)
            out.emplace_back(sp.canonical(targets[i]), m);
    }
    return out;
}

/// All pairs of limit points, the natural targets for pair-measure limits.
inline std::vector<PointPair> limit_pairs(const Space& space)
{
    std::vector<PointPair> out;
    for (const auto& a : space.limit_points())
        for (const auto& b : space.limit_points())
            out.push_back({a, b});
    return out;
}

struct SupportEntry
{
    Point start;
    std::string family;
    std::uint64_t n = 0;
    double w1_step = 0.0;
    bool stabilized = false;
    std::vector<Point> heavy;
};

struct SupportEstimate
{
    std::vector<Point> points;
    std::vector<SupportEntry> entries;
    std::int64_t truncation = 0;
    Rational mass_tol;
};

/// Union over starts and families of the heavy atoms of empirical measures at
/// n, taken over the truncation T(N). Stabilization (W1 between
/// the measures at n-1 and n below 1e-3) is reported per entry.
inline SupportEstimate support_union_estimate(const Space& space, const std::vector<Point>& starts,
                                              const std::vector<FolnerFamily>& families, std::uint64_t n,
                                              std::int64_t truncation, const Rational& mass_tol,
                                              const Budget& budget = {})
{
    if (n < 2)
        throw DomainError("support_union_estimate needs n >= 2");
    SupportEstimate out;
    out.truncation = truncation;
    out.mass_tol = mass_tol;
    auto targets = truncate(space, truncation);
    ElementCache cache(budget);
    for (const auto& s : starts)
        for (const auto& f : families) {
            SupportEntry e;
            e.start = space.canonical(s);
            e.family = f.name();
            e.n = n;
            auto mu = empirical(space, s, f, n, cache);
            e.w1_step = w1_approx(empirical(space, s, f, n - 1, cache), mu);
            e.stabilized = e.w1_step < 1e-3;
            for (const auto& [p, w] : heavy_atoms(mu, targets, mass_tol))
                e.heavy.push_back(p);
            out.points.insert(out.points.end(), e.heavy.begin(), e.heavy.end());
            out.entries.push_back(std::move(e));
        }
    std::sort(out.points.begin(), out.points.end());
    out.points.erase(std::unique(out.points.begin(), out.points.end()), out.points.end());
    return out;
}

} // namespace meandyn
