#pragma once

// Certificate-producing detectors for the sensitivity relations, proximal and
// regionally proximal evidence, structural negatives, and the closed
// invariant equivalence hull on finite combinatorial models.
//
// Verdicts are evidence at the stated finite parameters. A detector is
// POSITIVE when some witness family keeps its hit densities at or above a
// threshold c over the tail of the window for every tested radius, and c
// clears the configured floor.

#include "averaging.hpp"
#include "core.hpp"
#include "density.hpp"
#include "folner.hpp"
#include "measures.hpp"
#include "space.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace meandyn {

enum class CertKind : std::uint8_t { QrmsF, SrjmsF, SwsmF, QrmsBanach, Proximal, Qrp, NegativeForwardClosure };
enum class Verdict : std::uint8_t { Positive, Negative, Inconclusive };

inline std::string_view to_string(CertKind k)
{
    switch (k) {
    case CertKind::QrmsF: return "QRMS_F";
    case CertKind::SrjmsF: return "SRJMS_F";
    case CertKind::SwsmF: return "SWSM_F";
    case CertKind::QrmsBanach: return "QRMS_BANACH";
    case CertKind::Proximal: return "PROXIMAL";
    case CertKind::Qrp: return "QRP";
    case CertKind::NegativeForwardClosure: return "NEGATIVE_FORWARD_CLOSURE";
    }
    return "?";
}

inline std::string_view to_string(Verdict v)
{
    switch (v) {
    case Verdict::Positive: return "POSITIVE";
    case Verdict::Negative: return "NEGATIVE";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

struct WitnessRecord
{
    std::string source;
    std::int64_t index = 0;
    PointPair pair;
    double distance = 0.0;
    double radius = 0.0;
    /// Folner index (or shape size) the density refers to.
    std::uint64_t n = 0;
    Rational density;
    /// Group element realizing the record, when one is singled out.
    std::string element;
};

struct Certificate
{
    CertKind kind = CertKind::SrjmsF;
    PointPair pair;
    std::string family;
    std::vector<double> radii;
    std::vector<WitnessRecord> witnesses;
    Rational threshold;
    Verdict verdict = Verdict::Inconclusive;
    std::vector<std::pair<std::string, std::string>> parameters;
    std::string note;

    bool positive() const noexcept { return verdict == Verdict::Positive; }
    bool negative() const noexcept { return verdict == Verdict::Negative; }
};

/// A parametric asymptotically diagonal sequence k -> (x_k, x'_k).
struct WitnessFamily
{
    std::string name;
    PairSequence at;
};

struct SearchParams
{
    /// Neighborhood radii (open balls in the sum metric on X^2), decreasing.
    std::vector<double> radii{0.5, 0.35, 0.25};
    /// Witness indices; the tail is the upper half.
    Window window{1, 200};
    /// Folner indices for the ua-dens estimate of one fixed witness.
    Window density_window{1, 200};
    /// Smallest threshold read as positive; keeps 1/|F_n| decay out.
    Rational floor{1, 20};
    Budget budget{};
};

namespace detail {

inline std::string number_string(double x)
{
    std::ostringstream os;
    os << x;
    return os.str();
}

inline std::string window_string(const Window& w)
{
    return std::to_string(w.lo) + ":" + std::to_string(w.hi);
}

inline std::string radii_string(const std::vector<double>& r)
{
    std::string s;
    for (std::size_t i = 0; i < r.size(); ++i)
        s += std::string(i ? "," : "") + number_string(r[i]);
    return s;
}

inline void check_radii(const std::vector<double>& radii)
{
    if (radii.empty())
        throw DomainError("at least one radius is required");
    for (double r : radii)
        if (!(r > 0.0))
            throw DomainError("radii must be positive");
}

/// An isolated integer coordinate gives a neighborhood {x} x X (or X x {x})
/// whose hitting set meets F_n in elements of a single shift, since g.y = x
/// fixes the shift of g.
inline std::optional<Neighborhood> isolated_neighborhood(const PointPair& target)
{
    if (!target.first.is_limit() && !target.second.is_limit())
        return Neighborhood::pairs({target});
    if (!target.first.is_limit())
        return Neighborhood::product(Neighborhood::points({target.first}), Neighborhood::everything(1));
    if (!target.second.is_limit())
        return Neighborhood::product(Neighborhood::everything(1), Neighborhood::points({target.second}));
    return std::nullopt;
}

/// Constant pairs (y, y) from T(2) near the target, used when no witness
/// family is registered.
inline std::vector<WitnessFamily> fallback_witnesses(const Space& space, const PointPair& target, double radius)
{
    std::vector<WitnessFamily> out;
    for (const auto& y : truncate(space, 2)) {
        PointPair p{y, y};
        if (metric_approx(space, p, target) < radius)
            out.push_back({"constant" + to_string(p), [p](std::int64_t) { return p; }});
    }
    return out;
}

/// Score of one witness pair at index k against U: (density, index used).
using Scorer = std::function<std::pair<Rational, std::uint64_t>(const Neighborhood&, const PointPair&, std::int64_t)>;

struct Evaluation
{
    Rational threshold;
    std::vector<WitnessRecord> records;
    bool any_valid = false;
};

/// Runs every witness family against every radius and keeps, per radius, the
/// family with the largest tail minimum. Families whose pair distances
/// increase or stay above the smallest radius are skipped.
inline Evaluation evaluate(const Space& space, const PointPair& target, const std::vector<double>& radii,
                           const std::vector<WitnessFamily>& witnesses, const Window& window, const Scorer& score)
{
    const double rmin = *std::min_element(radii.begin(), radii.end());
    const auto t0 = tail_start(window.lo, window.hi);
    std::vector<bool> valid(witnesses.size(), true);
    std::vector<std::vector<PointPair>> pairs(witnesses.size());
    std::vector<std::vector<double>> dist(witnesses.size());
    for (std::size_t w = 0; w < witnesses.size(); ++w) {
        for (auto k = window.lo; k <= window.hi; ++k) {
            auto p = space.canonical(witnesses[w].at(static_cast<std::int64_t>(k)));
            pairs[w].push_back(p);
            dist[w].push_back(pair_distance_approx(space, p));
            if (dist[w].size() > 1 && dist[w].back() > dist[w][dist[w].size() - 2] + 1e-15)
                valid[w] = false;
        }
        if (!(dist[w].back() < rmin))
            valid[w] = false;
    }

    Evaluation out;
    bool first_radius = true;
    for (double r : radii) {
        auto u = Neighborhood::ball(target, r);
        std::optional<Rational> best;
        std::vector<WitnessRecord> best_records;
        for (std::size_t w = 0; w < witnesses.size(); ++w) {
            if (!valid[w])
                continue;
            out.any_valid = true;
            std::optional<Rational> tail_min;
            std::vector<WitnessRecord> recs;
            for (auto k = window.lo; k <= window.hi; ++k) {
                const auto i = k - window.lo;
                auto [density, n] = score(u, pairs[w][i], static_cast<std::int64_t>(k));
                recs.push_back({witnesses[w].name, static_cast<std::int64_t>(k), pairs[w][i], dist[w][i], r, n,
                                density, ""});
                if (k >= t0 && (!tail_min || density < *tail_min))
                    tail_min = density;
            }
            if (!best || *tail_min > *best) {
                best = tail_min;
                best_records = std::move(recs);
            }
        }
        Rational c = best ? *best : Rational(0);
        if (first_radius || c < out.threshold)
            out.threshold = c;
        first_radius = false;
        out.records.insert(out.records.end(), best_records.begin(), best_records.end());
    }
    return out;
}

inline Certificate isolated_negative(CertKind kind, const Space& space, const PointPair& target,
                                     const Neighborhood& u, const FolnerFamily& family,
                                     const std::vector<WitnessFamily>& witnesses, const Window& window,
                                     ElementCache& cache)
{
    Certificate c;
    c.kind = kind;
    c.pair = target;
    c.family = family.name();
    c.verdict = Verdict::Negative;
    c.threshold = 0;
    c.note = "isolated coordinate: U = " + u.describe() +
             " is hit by elements of one shift only, so every density is at most 1/(number of shifts in F_n)";
    bool bound_holds = true;
    for (const auto& w : witnesses)
        for (auto k = window.lo; k <= window.hi; ++k) {
            auto p = space.canonical(w.at(static_cast<std::int64_t>(k)));
            auto rec = hitting_density(space, p, u, family, k, cache);
            std::uint64_t per_shift = 1;
            if (family.group() == GroupKind::Lamplighter) {
                std::map<std::int64_t, std::uint64_t> shifts;
                for (const auto& g : cache.get(family, k))
                    per_shift = std::max(per_shift, ++shifts[g.shift()]);
            }
            bound_holds = bound_holds && rec.hits <= per_shift;
            c.witnesses.push_back({w.name, static_cast<std::int64_t>(k), p, pair_distance_approx(space, p), 0.0, k,
                                   rec.ratio, ""});
        }
    if (!bound_holds)
        throw Error("isolated-coordinate bound violated");
    return c;
}

inline void finish(Certificate& c, const Evaluation& ev, const Rational& floor)
{
    c.threshold = ev.threshold;
    c.witnesses = ev.records;
    if (!ev.any_valid) {
        c.verdict = Verdict::Inconclusive;
        c.note = "no witness family converges to the diagonal within the smallest radius";
    } else if (ev.threshold > 0 && ev.threshold >= floor) {
        c.verdict = Verdict::Positive;
    } else {
        c.verdict = Verdict::Inconclusive;
        c.note = "tail densities do not clear the floor " + fraction_string(floor);
    }
}

inline std::vector<WitnessFamily> witnesses_or_fallback(const Space& space, const PointPair& target,
                                                        const std::vector<WitnessFamily>& given,
                                                        const std::vector<double>& radii)
{
    if (!given.empty())
        return given;
    return fallback_witnesses(space, target, *std::min_element(radii.begin(), radii.end()));
}

} // namespace detail

/// S_rjms^F evidence: density of G_U(x_k, x'_k) in F_k at the matched index.
inline Certificate detect_srjms_f(const Space& space, const PointPair& pair, const FolnerFamily& family,
                                  const std::vector<WitnessFamily>& witnesses, const SearchParams& params = {})
{
    detail::check_radii(params.radii);
    params.window.check();
    auto target = space.canonical(pair);
    auto ws = detail::witnesses_or_fallback(space, target, witnesses, params.radii);
    ElementCache cache(params.budget);
    Certificate c;
    if (auto u = detail::isolated_neighborhood(target)) {
        c = detail::isolated_negative(CertKind::SrjmsF, space, target, *u, family, ws, params.window, cache);
    } else {
        auto ev = detail::evaluate(space, target, params.radii, ws, params.window,
                                   [&](const Neighborhood& u, const PointPair& p, std::int64_t k) {
                                       auto n = static_cast<std::uint64_t>(k);
                                       return std::pair{hitting_density(space, p, u, family, n, cache).ratio, n};
                                   });
        c.kind = CertKind::SrjmsF;
        detail::finish(c, ev, params.floor);
    }
    c.kind = CertKind::SrjmsF;
    c.pair = target;
    c.family = family.name();
    c.radii = params.radii;
    c.parameters = {{"window", detail::window_string(params.window)},
                    {"radii", detail::radii_string(params.radii)},
                    {"floor", fraction_string(params.floor)}};
    return c;
}

/// Q_rms^F evidence: for each fixed witness m, the ua-dens estimate of its
/// hitting set over the density window. The empirical-measure mass of U at
/// the tail maximizer is cross-checked against the hit ratio.
inline Certificate detect_qrms_f(const Space& space, const PointPair& pair, const FolnerFamily& family,
                                 const std::vector<WitnessFamily>& witnesses, const SearchParams& params = {})
{
    detail::check_radii(params.radii);
    params.window.check();
    params.density_window.check();
    auto target = space.canonical(pair);
    auto ws = detail::witnesses_or_fallback(space, target, witnesses, params.radii);
    ElementCache cache(params.budget);
    Certificate c;
    bool cross_checked = true;
    if (auto u = detail::isolated_neighborhood(target)) {
        c = detail::isolated_negative(CertKind::QrmsF, space, target, *u, family, ws, params.window, cache);
    } else {
        auto ev = detail::evaluate(
            space, target, params.radii, ws, params.window,
            [&](const Neighborhood& u, const PointPair& p, std::int64_t) {
                auto prof = ua_dens_estimate(space, p, u, family, params.density_window, cache);
                auto mu = empirical(space, p, family, prof.tail_argmax, cache);
                cross_checked = cross_checked && mu.mass(u) == prof.tail_max;
                return std::pair{prof.tail_max, prof.tail_argmax};
            });
        detail::finish(c, ev, params.floor);
    }
    if (!cross_checked)
        throw Error("hit ratio and empirical mass disagree");
    c.kind = CertKind::QrmsF;
    c.pair = target;
    c.family = family.name();
    c.radii = params.radii;
    c.parameters = {{"window", detail::window_string(params.window)},
                    {"density_window", detail::window_string(params.density_window)},
                    {"radii", detail::radii_string(params.radii)},
                    {"floor", fraction_string(params.floor)}};
    return c;
}

/// S_wsm^F evidence for an off-diagonal pair: for every radius and every
/// epsilon, the tail witnesses with d(x_k, x'_k) < epsilon keep their matched
/// densities at or above c.
inline Certificate detect_swsm_f(const Space& space, const PointPair& pair, const FolnerFamily& family,
                                 const std::vector<WitnessFamily>& witnesses, const std::vector<double>& epsilons,
                                 const SearchParams& params = {})
{
    detail::check_radii(params.radii);
    params.window.check();
    auto target = space.canonical(pair);
    if (target.is_diagonal())
        throw DomainError("weak sensitivity in the mean is defined for pairs with x != x'");
    if (epsilons.empty())
        throw DomainError("detect_swsm_f needs at least one epsilon");
    auto ws = detail::witnesses_or_fallback(space, target, witnesses, params.radii);
    ElementCache cache(params.budget);
    Certificate c;
    c.kind = CertKind::SwsmF;
    c.pair = target;
    c.family = family.name();
    c.radii = params.radii;
    c.parameters = {{"window", detail::window_string(params.window)},
                    {"radii", detail::radii_string(params.radii)},
                    {"epsilons", detail::radii_string(epsilons)},
                    {"floor", fraction_string(params.floor)}};
    if (auto u = detail::isolated_neighborhood(target)) {
        auto neg = detail::isolated_negative(CertKind::SwsmF, space, target, *u, family, ws, params.window, cache);
        neg.radii = c.radii;
        neg.parameters = c.parameters;
        return neg;
    }
    const auto t0 = tail_start(params.window.lo, params.window.hi);
    std::optional<Rational> threshold;
    for (double eps : epsilons) {
        // Each epsilon restricts the admissible tail indices.
        std::vector<WitnessFamily> restricted;
        for (const auto& w : ws) {
            std::int64_t first = -1;
            for (auto k = t0; k <= params.window.hi; ++k)
                if (pair_distance_approx(space, space.canonical(w.at(static_cast<std::int64_t>(k)))) < eps) {
                    first = static_cast<std::int64_t>(k);
                    break;
                }
            if (first >= 0)
                restricted.push_back(w);
        }
        if (restricted.empty()) {
            threshold = Rational(0);
            continue;
        }
        Window win{params.window.lo, params.window.hi};
        auto ev = detail::evaluate(space, target, params.radii, restricted, win,
                                   [&](const Neighborhood& u, const PointPair& p, std::int64_t k) {
                                       auto n = static_cast<std::uint64_t>(k);
                                       if (!(pair_distance_approx(space, p) < eps))
                                           return std::pair{Rational(1), n}; // not admissible, no constraint
                                       return std::pair{hitting_density(space, p, u, family, n, cache).ratio, n};
                                   });
        Rational cval = ev.any_valid ? ev.threshold : Rational(0);
        if (!threshold || cval < *threshold)
            threshold = cval;
        for (auto& r : ev.records)
            if (r.distance < eps)
                c.witnesses.push_back(r);
    }
    c.threshold = *threshold;
    if (c.threshold > 0 && c.threshold >= params.floor) {
        c.verdict = Verdict::Positive;
    } else {
        c.verdict = Verdict::Inconclusive;
        c.note = "no witness clears the floor for every epsilon";
    }
    return c;
}

struct ProximalResult
{
    Rational min_distance;
    GroupElement argmin = GroupElement::integer(0);
    bool evidence = false;
};

/// Exact minimum of d(g.x, g.x') over the given elements (first on ties).
inline ProximalResult detect_proximal(const Space& space, const PointPair& pair,
                                      const std::vector<GroupElement>& elements, double tol = 1e-9)
{
    if (elements.empty())
        throw DomainError("detect_proximal needs elements");
    auto p = space.canonical(pair);
    ProximalResult out;
    bool first = true;
    for (const auto& g : elements) {
        auto d = pair_distance(space, act(space, g, p));
        if (first || d < out.min_distance) {
            out.min_distance = d;
            out.argmin = g;
            first = false;
        }
    }
    out.evidence = to_double(out.min_distance) < tol;
    return out;
}

/// {e, 1, -1, 2, -2, ..., w, -w} as integer elements.
inline std::vector<GroupElement> integer_window(std::int64_t w)
{
    std::vector<GroupElement> out{GroupElement::integer(0)};
    for (std::int64_t t = 1; t <= w; ++t) {
        out.push_back(GroupElement::integer(t));
        out.push_back(GroupElement::integer(-t));
    }
    return out;
}

struct QrpParams
{
    std::vector<double> radii{0.5, 0.35, 0.25};
    std::vector<double> epsilons{0.1, 0.01};
    std::int64_t truncation = 60;
};

/// Q_rp evidence: for every (radius, epsilon) look for (y, y') in T(N) inside
/// the ball and g with d(g.y, g.y') < epsilon. NEGATIVE at the first grid
/// point with no success.
inline Certificate detect_qrp(const Space& space, const PointPair& pair, const std::vector<GroupElement>& elements,
                              const QrpParams& params = {})
{
    detail::check_radii(params.radii);
    auto target = space.canonical(pair);
    Certificate c;
    c.kind = CertKind::Qrp;
    c.pair = target;
    c.radii = params.radii;
    c.parameters = {{"radii", detail::radii_string(params.radii)},
                    {"epsilons", detail::radii_string(params.epsilons)},
                    {"truncation", std::to_string(params.truncation)},
                    {"elements", std::to_string(elements.size())}};
    auto pts = truncate(space, params.truncation);
    c.verdict = Verdict::Positive;
    for (double r : params.radii) {
        std::vector<std::pair<Point, double>> near1, near2;
        for (const auto& y : pts) {
            double a = metric_approx(space, y, target.first);
            if (a < r)
                near1.emplace_back(y, a);
            double b = metric_approx(space, y, target.second);
            if (b < r)
                near2.emplace_back(y, b);
        }
        for (double eps : params.epsilons) {
            std::optional<WitnessRecord> found;
            for (const auto& g : elements) {
                for (const auto& [y1, d1] : near1) {
                    auto gy1 = act(space, g, y1);
                    for (const auto& [y2, d2] : near2) {
                        if (!(d1 + d2 < r))
                            continue;
                        auto gy2 = act(space, g, y2);
                        double d = metric_approx(space, gy1, gy2);
                        if (d < eps) {
                            found = WitnessRecord{"search", 0, {y1, y2}, d, r, 0, Rational(0), to_string(g)};
                            break;
                        }
                    }
                    if (found)
                        break;
                }
                if (found)
                    break;
            }
            if (!found) {
                c.verdict = Verdict::Negative;
                c.note = "no pair in T(" + std::to_string(params.truncation) + ") within radius " +
                         detail::number_string(r) + " is brought within " +
                         detail::number_string(eps) + " by the listed elements";
                return c;
            }
            c.witnesses.push_back(*found);
        }
    }
    return c;
}

/// Q_rms (Banach) evidence: per-witness score is the ub-dens estimate with a
/// fixed shape F_n and a translate range. A failed regional-proximality
/// pre-screen (Z actions) yields NEGATIVE.
inline Certificate detect_qrms_banach(const Space& space, const PointPair& pair, const FolnerFamily& shape,
                                      std::uint64_t n, const std::vector<GroupElement>& translates,
                                      const std::vector<WitnessFamily>& witnesses, const SearchParams& params = {},
                                      const QrpParams& screen = {})
{
    detail::check_radii(params.radii);
    params.window.check();
    auto target = space.canonical(pair);
    auto ws = detail::witnesses_or_fallback(space, target, witnesses, params.radii);
    Certificate c;
    c.kind = CertKind::QrmsBanach;
    c.pair = target;
    c.family = shape.name();
    c.radii = params.radii;
    c.parameters = {{"window", detail::window_string(params.window)},
                    {"shape_n", std::to_string(n)},
                    {"translates", std::to_string(translates.size())},
                    {"radii", detail::radii_string(params.radii)},
                    {"floor", fraction_string(params.floor)}};
    ElementCache cache(params.budget);
    if (space.group() == GroupKind::Integers) {
        if (auto u = detail::isolated_neighborhood(target)) {
            auto neg = detail::isolated_negative(CertKind::QrmsBanach, space, target, *u, shape, ws,
                                                 Window{n, n}, cache);
            neg.family = c.family;
            neg.radii = c.radii;
            neg.parameters = c.parameters;
            return neg;
        }
        auto qrp = detect_qrp(space, target, integer_window(2 * screen.truncation), screen);
        if (qrp.negative()) {
            c.verdict = Verdict::Negative;
            c.note = "not regionally proximal: " + qrp.note;
            return c;
        }
    }
    auto ev = detail::evaluate(space, target, params.radii, ws, params.window,
                               [&](const Neighborhood& u, const PointPair& p, std::int64_t) {
                                   auto b = ub_dens_estimate(space, p, u, shape, n, translates, cache);
                                   return std::pair{b.value, n};
                               });
    detail::finish(c, ev, params.floor);
    return c;
}

struct ForwardClosureResult
{
    Certificate certificate;
    bool closure_holds = false;
    std::uint64_t pairs_checked = 0;
    std::uint64_t violations = 0;
    std::size_t elements = 0;
    /// inf of d(y, y') over (y, y') in U restricted to T(N).
    double separation = 0.0;
};

/// Exhaustive check over T(N)^2 and all g in the listed F_n that
/// g.(y,y') in U implies (y,y') in U. Together with a positive separation of
/// U from the diagonal this rules out asymptotically diagonal witnesses for
/// any neighborhood inside U, so the target is not in S_rjms^F.
inline ForwardClosureResult forward_closure_negative(const Space& space, const PointPair& pair,
                                                     const Neighborhood& u, const FolnerFamily& family,
                                                     const std::vector<std::uint64_t>& n_list,
                                                     std::int64_t truncation)
{
    if (u.kind() != Neighborhood::Kind::Product)
        throw DomainError("forward_closure_negative needs a product neighborhood");
    for (const auto* f : {&u.left(), &u.right()})
        if (f->kind() != Neighborhood::Kind::PointSet && f->kind() != Neighborhood::Kind::Everything)
            throw DomainError("forward_closure_negative needs point-set factors");
    if (family.group() != GroupKind::Integers || n_list.empty())
        throw DomainError("forward_closure_negative needs a Z family and at least one index");
    auto target = space.canonical(pair);
    if (!contains(space, u, target))
        throw DomainError("the target pair is not in U");

    std::set<std::int64_t> shifts;
    for (auto n : n_list) {
        auto iv = *interval_of(family, n);
        if (iv.first < 0)
            throw DomainError("forward_closure_negative needs nonnegative group elements");
        for (auto g = iv.first; g <= iv.second; ++g)
            shifts.insert(g);
    }
    if (*shifts.rbegin() > truncation)
        throw DomainError("truncation " + std::to_string(truncation) + " does not cover the action range up to " +
                          std::to_string(*shifts.rbegin()));

    ForwardClosureResult out;
    out.elements = shifts.size();
    auto pts = truncate(space, truncation);
    std::vector<char> in1(pts.size()), in2(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        in1[i] = contains(space, u.left(), pts[i]);
        in2[i] = contains(space, u.right(), pts[i]);
    }
    // The product structure factorizes the pair check:
    // bad pairs = A_bad x B + A x B_bad - A_bad x B_bad.
    for (auto s : shifts) {
        auto g = GroupElement::integer(s);
        std::uint64_t a = 0, a_bad = 0, b = 0, b_bad = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            auto q = act(space, g, pts[i]);
            if (contains(space, u.left(), q)) {
                ++a;
                a_bad += in1[i] ? 0 : 1;
            }
            if (contains(space, u.right(), q)) {
                ++b;
                b_bad += in2[i] ? 0 : 1;
            }
        }
        out.violations += a_bad * b + a * b_bad - a_bad * b_bad;
        out.pairs_checked += static_cast<std::uint64_t>(pts.size()) * pts.size();
    }
    out.closure_holds = out.violations == 0;

    out.separation = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (!in1[i])
            continue;
        for (std::size_t j = 0; j < pts.size(); ++j)
            if (in2[j])
                out.separation = std::min(out.separation, metric_approx(space, pts[i], pts[j]));
    }

    auto& c = out.certificate;
    c.kind = CertKind::NegativeForwardClosure;
    c.pair = target;
    c.family = family.name();
    c.parameters = {{"neighborhood", u.describe()},
                    {"n_max", std::to_string(*std::max_element(n_list.begin(), n_list.end()))},
                    {"truncation", std::to_string(truncation)},
                    {"pairs_checked", std::to_string(out.pairs_checked)},
                    {"violations", std::to_string(out.violations)},
                    {"separation", std::to_string(out.separation)}};
    if (out.closure_holds && out.separation > 1e-12) {
        c.verdict = Verdict::Negative;
        c.note = "U is closed under preimages of the listed elements and stays away from the diagonal";
    } else {
        c.verdict = Verdict::Inconclusive;
        c.note = out.closure_holds ? "closure holds but U meets the diagonal" : "closure fails";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Finite models and the closed invariant equivalence hull

struct ModelClass
{
    std::string name;
    bool limit = true;
    /// Limit classes an orbit class accumulates at (for g -> -inf, g -> +inf).
    int minus_end = -1;
    int plus_end = -1;
};

class FiniteModel
{
public:
    FiniteModel(std::vector<ModelClass> classes, std::vector<std::vector<int>> generators)
        : classes_(std::move(classes)), generators_(std::move(generators))
    {
        const int c = static_cast<int>(classes_.size());
        for (int i = 0; i < c; ++i) {
            auto& k = classes_[static_cast<std::size_t>(i)];
            if (k.limit) {
                k.minus_end = k.plus_end = i;
            } else if (k.minus_end < 0 || k.minus_end >= c || k.plus_end < 0 || k.plus_end >= c ||
                       !classes_[static_cast<std::size_t>(k.minus_end)].limit ||
                       !classes_[static_cast<std::size_t>(k.plus_end)].limit) {
                throw DomainError("orbit class " + k.name + " must accumulate at limit classes");
            }
        }
        for (const auto& perm : generators_) {
            if (static_cast<int>(perm.size()) != c)
                throw DomainError("generator permutation has the wrong length");
            std::vector<bool> seen(perm.size(), false);
            for (int t : perm) {
                if (t < 0 || t >= c || seen[static_cast<std::size_t>(t)])
                    throw DomainError("generator action on classes is not a bijection");
                seen[static_cast<std::size_t>(t)] = true;
            }
        }
    }

    const std::vector<ModelClass>& classes() const noexcept { return classes_; }
    const std::vector<std::vector<int>>& generators() const noexcept { return generators_; }
    std::size_t size() const noexcept { return classes_.size(); }

    int index(std::string_view name) const
    {
        for (std::size_t i = 0; i < classes_.size(); ++i)
            if (classes_[i].name == name)
                return static_cast<int>(i);
        throw DomainError("unknown class " + std::string(name));
    }

    /// Closure of a class: itself for limits, its two ends for orbits.
    std::vector<int> closure(int i) const
    {
        const auto& k = classes_.at(static_cast<std::size_t>(i));
        if (k.limit)
            return {i};
        return {k.minus_end, k.plus_end};
    }

private:
    std::vector<ModelClass> classes_;
    std::vector<std::vector<int>> generators_;
};

using ClassPair = std::pair<int, int>;

struct Relation
{
    /// Sorted, includes the diagonal.
    std::vector<ClassPair> pairs;
    /// Class -> smallest class index of its block.
    std::vector<int> quotient;

    bool related(int a, int b) const
    {
        return quotient.at(static_cast<std::size_t>(a)) == quotient.at(static_cast<std::size_t>(b));
    }
};

/// Smallest equivalence relation containing Q that is invariant under the
/// generators and closed: related orbit classes relate their aligned ends, and
/// an orbit class related to a limit class relates both of its ends to it.
inline Relation icer_hull(const FiniteModel& model, const std::vector<ClassPair>& q)
{
    const int c = static_cast<int>(model.size());
    std::vector<int> parent(static_cast<std::size_t>(c));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int i) {
        while (parent[static_cast<std::size_t>(i)] != i) {
            auto& link = parent[static_cast<std::size_t>(i)];
            link = parent[static_cast<std::size_t>(link)];
            i = link;
        }
        return i;
    };
    auto unite = [&](int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b)
            return false;
        if (a < b)
            parent[static_cast<std::size_t>(b)] = a;
        else
            parent[static_cast<std::size_t>(a)] = b;
        return true;
    };
    for (auto [a, b] : q) {
        if (a < 0 || a >= c || b < 0 || b >= c)
            throw DomainError("relation references an unknown class");
        unite(a, b);
    }
    const auto& cls = model.classes();
    bool changed = true;
    while (changed) {
        changed = false;
        for (int a = 0; a < c; ++a)
            for (int b = a + 1; b < c; ++b) {
                if (find(a) != find(b))
                    continue;
                for (const auto& perm : model.generators())
                    changed |= unite(perm[static_cast<std::size_t>(a)], perm[static_cast<std::size_t>(b)]);
                const auto& ka = cls[static_cast<std::size_t>(a)];
                const auto& kb = cls[static_cast<std::size_t>(b)];
                changed |= unite(ka.minus_end, kb.minus_end);
                changed |= unite(ka.plus_end, kb.plus_end);
                if (ka.limit != kb.limit) {
                    const auto& orbit = ka.limit ? kb : ka;
                    int lim = ka.limit ? a : b;
                    changed |= unite(orbit.minus_end, lim);
                    changed |= unite(orbit.plus_end, lim);
                }
            }
    }
    Relation out;
    out.quotient.resize(static_cast<std::size_t>(c));
    for (int i = 0; i < c; ++i)
        out.quotient[static_cast<std::size_t>(i)] = find(i);
    for (int a = 0; a < c; ++a)
        for (int b = 0; b < c; ++b)
            if (out.related(a, b))
                out.pairs.emplace_back(a, b);
    return out;
}

} // namespace meandyn
