#pragma once

// The five example systems with their expected-results tables. Each row is a
// claim with a checker that drives the detectors and reports MATCH, MISMATCH
// or INCONCLUSIVE together with the certificates it used.

#include "averaging.hpp"
#include "core.hpp"
#include "density.hpp"
#include "folner.hpp"
#include "measures.hpp"
#include "relations.hpp"
#include "space.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace meandyn {

struct Profile
{
    std::string name = "quick";
    /// Largest LampBox index used anywhere.
    std::uint64_t lamp_n = 8;
    /// Upper end of every Z window.
    std::uint64_t z_window = 200;
    /// Witness indices for fixed-witness (ua-dens) scores.
    std::uint64_t fixed_window = 20;
    /// Shape index for Banach scores.
    std::uint64_t banach_n = 20;
    std::int64_t truncation = 60;
};

inline Profile profile(std::string_view name)
{
    if (name == "quick")
        return {};
    if (name == "full")
        return {"full", 12, 1000, 20, 40, 60};
    throw DomainError("unknown budget profile '" + std::string(name) + "' (quick|full)");
}

enum class RowStatus : std::uint8_t { Match, Mismatch, Inconclusive };

inline std::string_view to_string(RowStatus s)
{
    switch (s) {
    case RowStatus::Match: return "MATCH";
    case RowStatus::Mismatch: return "MISMATCH";
    case RowStatus::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

struct RowResult
{
    std::string id;
    std::string claim;
    RowStatus status = RowStatus::Inconclusive;
    std::string detail;
    std::vector<Certificate> certificates;
    std::vector<std::pair<std::string, std::string>> values;
};

class DetectorCache;
struct GalleryEntry;

struct ExpectedRow
{
    std::string id;
    std::string claim;
    std::function<RowResult(const GalleryEntry&, const Profile&, DetectorCache&)> check;
};

/// A registered asymptotically diagonal family aimed at one target pair.
/// `fixed` is used with a fixed index against a window of Folner sets,
/// `matched` with index k against F_k.
struct PairWitness
{
    PointPair target;
    std::string name;
    PairSequence fixed;
    PairSequence matched;
};

/// Neighborhood for a forward-closure negative at a target pair.
struct ClosureNeighborhood
{
    PointPair target;
    Neighborhood u;
};

struct GalleryEntry
{
    std::string name;
    std::string description;
    Space space;
    std::vector<FolnerFamily> families;
    std::vector<PairWitness> witnesses;
    std::vector<ClosureNeighborhood> closures;
    std::optional<FiniteModel> model;
    /// Limit point -> model class; orbit classes follow in the model.
    std::map<Point, int> limit_class;
    /// Support estimate parameters.
    std::int64_t support_truncation = 30;
    Rational support_mass{1, 10};
    std::vector<ExpectedRow> rows;
    /// Pairs exercised by the cross-detector property checks.
    std::vector<PointPair> probes;

    FolnerFamily family(std::string_view name_) const
    {
        for (const auto& f : families)
            if (f.name() == name_)
                return f;
        throw DomainError("family " + std::string(name_) + " is not registered for " + name);
    }

    std::vector<WitnessFamily> fixed_witnesses(const PointPair& pair) const
    {
        std::vector<WitnessFamily> out;
        auto t = space.canonical(pair);
        for (const auto& w : witnesses)
            if (w.target == t)
                out.push_back({w.name, w.fixed});
        return out;
    }

    std::vector<WitnessFamily> matched_witnesses(const PointPair& pair) const
    {
        std::vector<WitnessFamily> out;
        auto t = space.canonical(pair);
        for (const auto& w : witnesses)
            if (w.target == t)
                out.push_back({w.name, w.matched});
        return out;
    }

    const ClosureNeighborhood* closure_for(const PointPair& pair) const
    {
        auto t = space.canonical(pair);
        for (const auto& c : closures)
            if (c.target == t)
                return &c;
        return nullptr;
    }
};

namespace detail {

/// Registers a Z witness k -> f(k) and its swap; the matched version runs
/// along k/4 so that the orbit has room to travel inside F_k.
inline void add_z_witness(GalleryEntry& e, PointPair target, std::string name, PairSequence f)
{
    auto matched = [f](std::int64_t k) { return f(std::max<std::int64_t>(1, k / 4)); };
    auto swap = [](PairSequence g) {
        return [g](std::int64_t k) {
            auto p = g(k);
            return PointPair{p.second, p.first};
        };
    };
    target = e.space.canonical(target);
    e.witnesses.push_back({target, name, f, matched});
    PointPair back{target.second, target.first};
    if (!(back == target))
        e.witnesses.push_back({back, name + "-swapped", swap(f), swap(matched)});
}

inline SearchParams params_for(const FolnerFamily& f, const Profile& p, CertKind kind)
{
    SearchParams s;
    s.radii = {0.5, 0.4, 0.3};
    const bool lamp = f.group() == GroupKind::Lamplighter;
    const std::uint64_t top = lamp ? p.lamp_n : p.z_window;
    if (kind == CertKind::QrmsF || kind == CertKind::QrmsBanach)
        s.window = {1, lamp ? top : p.fixed_window};
    else
        s.window = {1, top};
    s.density_window = {1, top};
    return s;
}

inline std::vector<GroupElement> lamp_search_elements()
{
    std::vector<GroupElement> out;
    for (std::int64_t t = -20; t <= 20; ++t)
        out.push_back(GroupElement::lamp(t));
    for (const auto& g : enumerate(FolnerFamily::lamp_box(), 2)) {
        out.push_back(g);
        out.push_back(inverse(g));
    }
    return out;
}

} // namespace detail

/// Runs one detector for a gallery pair with the entry's witnesses and the
/// profile's windows.
inline Certificate run_detector(const GalleryEntry& e, CertKind kind, const PointPair& pair,
                                const FolnerFamily& family, const Profile& p)
{
    const auto& x = e.space;
    auto params = detail::params_for(family, p, kind);
    switch (kind) {
    case CertKind::SrjmsF: return detect_srjms_f(x, pair, family, e.matched_witnesses(pair), params);
    case CertKind::QrmsF: return detect_qrms_f(x, pair, family, e.fixed_witnesses(pair), params);
    case CertKind::SwsmF:
        return detect_swsm_f(x, pair, family, e.matched_witnesses(pair), {0.1, 0.05}, params);
    case CertKind::QrmsBanach: {
        const bool lamp = family.group() == GroupKind::Lamplighter;
        auto n = lamp ? std::min<std::uint64_t>(p.lamp_n, 6) : p.banach_n;
        QrpParams screen;
        screen.truncation = p.truncation;
        return detect_qrms_banach(x, pair, family, n, default_translates(family.group(), n),
                                  e.fixed_witnesses(pair), params, screen);
    }
    case CertKind::Qrp: {
        QrpParams q;
        q.truncation = p.truncation;
        auto elems = x.group() == GroupKind::Integers ? integer_window(2 * p.truncation)
                                                      : detail::lamp_search_elements();
        return detect_qrp(x, pair, elems, q);
    }
    case CertKind::Proximal: {
        auto elems = x.group() == GroupKind::Integers ? integer_window(2 * p.truncation)
                                                      : detail::lamp_search_elements();
        auto r = detect_proximal(x, pair, elems);
        Certificate c;
        c.kind = CertKind::Proximal;
        c.pair = x.canonical(pair);
        c.threshold = r.min_distance;
        c.verdict = r.evidence ? Verdict::Positive : Verdict::Inconclusive;
        c.parameters = {{"elements", std::to_string(elems.size())},
                        {"min_distance", fraction_string(r.min_distance)},
                        {"argmin", to_string(r.argmin)}};
        return c;
    }
    case CertKind::NegativeForwardClosure: {
        const auto* cl = e.closure_for(pair);
        if (!cl)
            throw DomainError("no forward-closure neighborhood registered for " + to_string(pair));
        std::vector<std::uint64_t> ns;
        const std::uint64_t top = std::min<std::uint64_t>(50, p.z_window);
        for (std::uint64_t n = 1; n <= top; ++n)
            ns.push_back(n);
        return forward_closure_negative(x, pair, cl->u, family, ns, 4 * static_cast<std::int64_t>(top))
            .certificate;
    }
    }
    throw DomainError("unknown detector");
}

/// Memoized detector runs shared by the rows of one verification.
class DetectorCache
{
public:
    const Certificate& get(const GalleryEntry& e, CertKind kind, const PointPair& pair, const FolnerFamily& f,
                           const Profile& p)
    {
        auto key = std::tuple{kind, f.name(), e.space.canonical(pair)};
        auto it = store_.find(key);
        if (it == store_.end())
            it = store_.emplace(key, run_detector(e, kind, pair, f, p)).first;
        return it->second;
    }

private:
    std::map<std::tuple<CertKind, std::string, PointPair>, Certificate> store_;
};

/// A structural negative for a pair outside a relation: forward closure
/// (nonnegative families with a registered neighborhood) or a failed
/// regional-proximality search.
inline std::optional<Certificate> structural_negative(const GalleryEntry& e, const PointPair& pair,
                                                      const FolnerFamily& f, const Profile& p, DetectorCache& cache)
{
    if (f.kind() == FolnerFamily::Kind::ZInitial && e.closure_for(pair)) {
        const auto& c = cache.get(e, CertKind::NegativeForwardClosure, pair, f, p);
        if (c.negative())
            return c;
    }
    const auto& q = cache.get(e, CertKind::Qrp, pair, f, p);
    if (q.negative())
        return q;
    return std::nullopt;
}

namespace detail {

inline RowStatus worst(RowStatus a, RowStatus b)
{
    if (a == RowStatus::Mismatch || b == RowStatus::Mismatch)
        return RowStatus::Mismatch;
    if (a == RowStatus::Inconclusive || b == RowStatus::Inconclusive)
        return RowStatus::Inconclusive;
    return RowStatus::Match;
}

inline RowResult start_row(const ExpectedRow& row)
{
    RowResult r;
    r.id = row.id;
    r.claim = row.claim;
    r.status = RowStatus::Match;
    return r;
}

/// Membership row: every pair in `inside` is POSITIVE and every pair in
/// `outside` has negative evidence.
inline ExpectedRow membership_row(std::string id, std::string claim, CertKind kind, std::string family,
                                  std::vector<PointPair> inside, std::vector<PointPair> outside)
{
    ExpectedRow row{std::move(id), std::move(claim), {}};
    row.check = [kind, family, inside, outside, id = row.id, claim = row.claim](
                    const GalleryEntry& e, const Profile& p, DetectorCache& cache) {
        RowResult r;
        r.id = id;
        r.claim = claim;
        r.status = RowStatus::Match;
        auto f = e.family(family);
        std::size_t pos = 0, neg = 0;
        for (const auto& pair : inside) {
            const auto& c = cache.get(e, kind, pair, f, p);
            r.certificates.push_back(c);
            if (c.positive()) {
                ++pos;
                continue;
            }
            auto s = c.negative() ? std::optional<Certificate>(c) : structural_negative(e, pair, f, p, cache);
            if (s && !c.negative())
                r.certificates.push_back(*s);
            r.status = worst(r.status, s ? RowStatus::Mismatch : RowStatus::Inconclusive);
            r.detail += "expected positive: " + to_string(pair) + " is " +
                        std::string(to_string(s ? Verdict::Negative : c.verdict)) + "; ";
        }
        for (const auto& pair : outside) {
            const auto& c = cache.get(e, kind, pair, f, p);
            if (c.positive()) {
                r.certificates.push_back(c);
                r.status = RowStatus::Mismatch;
                r.detail += "expected outside: " + to_string(pair) + " is POSITIVE; ";
                continue;
            }
            if (c.negative()) {
                r.certificates.push_back(c);
                ++neg;
                continue;
            }
            if (auto s = structural_negative(e, pair, f, p, cache)) {
                r.certificates.push_back(*s);
                ++neg;
            } else {
                r.certificates.push_back(c);
                r.status = worst(r.status, RowStatus::Inconclusive);
                r.detail += "no negative evidence for " + to_string(pair) + "; ";
            }
        }
        r.values = {{"positive", std::to_string(pos) + "/" + std::to_string(inside.size())},
                    {"negative", std::to_string(neg) + "/" + std::to_string(outside.size())}};
        return r;
    };
    return row;
}

inline std::vector<PointPair> all_pairs(const std::vector<Point>& pts)
{
    std::vector<PointPair> out;
    for (const auto& a : pts)
        for (const auto& b : pts)
            out.push_back({a, b});
    return out;
}

inline ExpectedRow support_row(std::string claim, std::vector<Point> expected, std::uint64_t lamp_n_cap = 0)
{
    ExpectedRow row{"support", std::move(claim), {}};
    row.check = [expected, lamp_n_cap, claim = row.claim](const GalleryEntry& e, const Profile& p, DetectorCache&) {
        RowResult r;
        r.id = "support";
        r.claim = claim;
        const bool lamp = e.space.group() == GroupKind::Lamplighter;
        const auto n = lamp ? std::min(p.lamp_n, lamp_n_cap ? lamp_n_cap : p.lamp_n) : p.z_window;
        auto est = support_union_estimate(e.space, truncate(e.space, 2), e.families, n, e.support_truncation,
                                          e.support_mass);
        std::string got;
        for (const auto& q : est.points)
            got += to_string(q) + " ";
        r.values = {{"n", std::to_string(n)},
                    {"truncation", std::to_string(est.truncation)},
                    {"mass_tol", fraction_string(est.mass_tol)},
                    {"support", got}};
        r.status = est.points == expected ? RowStatus::Match : RowStatus::Mismatch;
        return r;
    };
    return row;
}

/// Expected icer hull: all limit classes related, every orbit class alone.
inline ExpectedRow icer_row(std::string claim, std::string family)
{
    ExpectedRow row{"icer", std::move(claim), {}};
    row.check = [family, claim = row.claim](const GalleryEntry& e, const Profile& p, DetectorCache& cache) {
        RowResult r;
        r.id = "icer";
        r.claim = claim;
        const auto& m = *e.model;
        auto f = e.family(family);
        std::vector<ClassPair> q;
        auto limits = e.space.limit_points();
        for (const auto& pair : all_pairs(limits)) {
            const auto& c = cache.get(e, CertKind::QrmsF, pair, f, p);
            if (c.positive())
                q.emplace_back(e.limit_class.at(pair.first), e.limit_class.at(pair.second));
        }
        auto hull = icer_hull(m, q);
        std::vector<ClassPair> expect;
        for (int a = 0; a < static_cast<int>(m.size()); ++a)
            for (int b = 0; b < static_cast<int>(m.size()); ++b)
                if (a == b || (m.classes()[static_cast<std::size_t>(a)].limit &&
                               m.classes()[static_cast<std::size_t>(b)].limit))
                    expect.emplace_back(a, b);
        std::string got;
        for (auto [a, b] : hull.pairs)
            got += "(" + m.classes()[static_cast<std::size_t>(a)].name + "," +
                   m.classes()[static_cast<std::size_t>(b)].name + ") ";
        r.values = {{"generating_pairs", std::to_string(q.size())}, {"hull", got}};
        r.status = hull.pairs == expect ? RowStatus::Match : RowStatus::Mismatch;
        return r;
    };
    return row;
}

inline GalleryEntry entry(std::string name, std::string description, Space space, std::vector<FolnerFamily> families)
{
    GalleryEntry e{std::move(name), std::move(description), std::move(space), std::move(families), {}, {}, {}, {}, 30,
                   Rational(1, 10), {}, {}};
    e.probes = all_pairs(e.space.limit_points());
    return e;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Systems

/// Lamp copies of the one-point systems.
inline constexpr int up_copy = 1;
inline constexpr int down_copy = 0;

/// ZxZ -> one-point compactification of Z with translation, inf fixed.
inline GalleryEntry literature_dock()
{
    auto e = detail::entry(
        "literature-dock", "one-point compactification of Z, g.x = x + g, inf fixed",
        Space::one_point(1, ActionKind::Translate), {FolnerFamily::z_initial(), FolnerFamily::z_centered()});
    e.probes.push_back({Point::integer(0), Point::inf()});
    e.probes.push_back({Point::integer(1), Point::integer(-1)});
    e.rows.push_back(detail::support_row("the maximal support is {inf}", {Point::inf()}));

    std::vector<PointPair> isolated;
    for (std::int64_t s = -3; s <= 3; ++s)
        isolated.push_back({Point::integer(s), Point::integer(s)});
    e.rows.push_back(detail::membership_row("srjms_f_diagonal",
                                            "S_rjms^F meets the diagonal exactly in (inf,inf)", CertKind::SrjmsF,
                                            "z_initial", {{Point::inf(), Point::inf()}}, isolated));

    ExpectedRow f1{"diagonal_first_set", "every neighborhood of a diagonal pair is hit by all of F_1", {}};
    f1.check = [](const GalleryEntry& g, const Profile&, DetectorCache&) {
        RowResult r;
        r.id = "diagonal_first_set";
        r.claim = "every neighborhood of a diagonal pair is hit by all of F_1";
        r.status = RowStatus::Match;
        for (const auto& y : truncate(g.space, 3)) {
            PointPair p{y, y};
            for (double rad : {0.5, 0.1, 0.01}) {
                auto rec = hitting_density(g.space, p, Neighborhood::ball(p, rad), FolnerFamily::z_initial(), 1);
                if (rec.ratio != 1)
                    r.status = RowStatus::Mismatch;
            }
        }
        bool rejected = false;
        try {
            detect_swsm_f(g.space, {Point::integer(0), Point::integer(0)}, FolnerFamily::z_initial(), {}, {0.1});
        } catch (const DomainError&) {
            rejected = true;
        }
        if (!rejected)
            r.status = RowStatus::Mismatch;
        r.values = {{"swsm_diagonal_rejected", rejected ? "true" : "false"}};
        return r;
    };
    e.rows.push_back(std::move(f1));
    return e;
}

/// Two copies of the one-point compactification with Z acting by sigma.
inline GalleryEntry lamplighter_z()
{
    auto e = detail::entry(
        "lamplighter-z", "two copies of the one-point compactification of Z, sigma(s) = s - 1",
        Space::one_point(2, ActionKind::Sigma),
        {FolnerFamily::z_shifted(), FolnerFamily::z_centered(), FolnerFamily::z_initial()});
    e.probes.push_back({Point::integer(0, up_copy), Point::integer(7, up_copy)});
    e.probes.push_back({Point::integer(-2, down_copy), Point::inf(up_copy)});
    e.rows.push_back(detail::support_row("the maximal support is {up inf, down inf}",
                                         {Point::inf(down_copy), Point::inf(up_copy)}));

    ExpectedRow d{"d_a_zero", "D_A vanishes on each copy", {}};
    d.check = [](const GalleryEntry& g, const Profile&, DetectorCache&) {
        RowResult r;
        r.id = "d_a_zero";
        r.claim = "D_A vanishes on each copy";
        r.status = RowStatus::Match;
        const std::vector<std::pair<Point, Point>> pairs{{Point::integer(0, up_copy), Point::integer(7, up_copy)},
                                                         {Point::integer(-2, down_copy), Point::inf(down_copy)}};
        for (auto [a, b] : pairs) {
            auto prof = besicovitch_profile(g.space, a, b, FolnerFamily::z_shifted(), {1, 60});
            bool decreasing = true;
            for (std::size_t i = 31; i < prof.values.size(); ++i)
                decreasing = decreasing && prof.values[i] < prof.values[i - 1];
            if (!(prof.tail_sup < 0.02) || !decreasing)
                r.status = RowStatus::Mismatch;
            r.values.emplace_back("tail_sup" + to_string(PointPair{a, b}), std::to_string(prof.tail_sup));
        }
        return r;
    };
    e.rows.push_back(std::move(d));

    ExpectedRow m{"mean_equicontinuous", "the action is mean equicontinuous (probe at up inf)", {}};
    m.check = [](const GalleryEntry& g, const Profile& p, DetectorCache&) {
        RowResult r;
        r.id = "mean_equicontinuous";
        r.claim = "the action is mean equicontinuous (probe at up inf)";
        auto rep = mec_probe(
            g.space, FolnerFamily::z_shifted(),
            [](std::int64_t k) { return PointPair{Point::integer(k, up_copy), Point::inf(up_copy)}; },
            {1, 2, 4, 8, 16, 32, 64}, 1e-2, {1, std::min<std::uint64_t>(p.z_window, 500)});
        r.status = rep.verdict == MecVerdict::Consistent ? RowStatus::Match : RowStatus::Mismatch;
        r.values = {{"verdict", std::string(to_string(rep.verdict))},
                    {"max_estimate", std::to_string(*std::max_element(rep.estimates.begin(), rep.estimates.end()))}};
        return r;
    };
    e.rows.push_back(std::move(m));
    return e;
}

namespace detail {

inline PairMeasure corner_measure(const Space& x)
{
    std::vector<PairMeasure::Atom> atoms;
    for (int a : {up_copy, down_copy})
        for (int b : {up_copy, down_copy})
            atoms.emplace_back(PointPair{Point::inf(a), Point::inf(b)}, Rational(1, 4));
    return PairMeasure(x, atoms);
}

/// 1/4 sum over b in {n, n+1} of the A_n-empirical measure of tau_b (up n, up n+1).
inline PairMeasure corner_decomposition(const Space& x, std::uint64_t n)
{
    const auto s = static_cast<std::int64_t>(n);
    std::map<PointPair, Rational> acc;
    for (const auto& b : std::vector<LampSet>{{}, {s}, {s + 1}, {s, s + 1}}) {
        auto tb = GroupElement::lamp(0, b);
        auto start = act(x, tb, PointPair{Point::integer(s, up_copy), Point::integer(s + 1, up_copy)});
        auto mu = empirical(x, start, FolnerFamily::z_shifted(), n);
        for (const auto& [p, w] : mu.atoms())
            acc[p] += w / 4;
    }
    std::vector<PairMeasure::Atom> atoms(acc.begin(), acc.end());
    return PairMeasure(x, atoms);
}

} // namespace detail

/// Lamplighter group <sigma, tau> on two copies of the one-point compactification.
inline GalleryEntry lamplighter()
{
    auto e = detail::entry(
        "lamplighter", "lamplighter group <sigma, tau> on two copies of the one-point compactification",
        Space::one_point(2, ActionKind::Lamplighter), {FolnerFamily::lamp_box()});
    e.support_truncation = 5;
    e.support_mass = Rational(1, 4);
    auto adjacent = [](std::int64_t k) {
        return PointPair{Point::integer(k, up_copy), Point::integer(k + 1, up_copy)};
    };
    auto adjacent_swapped = [](std::int64_t k) {
        return PointPair{Point::integer(k + 1, up_copy), Point::integer(k, up_copy)};
    };
    PointPair corner{Point::inf(up_copy), Point::inf(down_copy)};
    e.witnesses.push_back({corner, "adjacent", adjacent, adjacent});
    PointPair back{Point::inf(down_copy), Point::inf(up_copy)};
    e.witnesses.push_back({back, "adjacent-swapped", adjacent_swapped, adjacent_swapped});
    e.probes.push_back({Point::integer(3, up_copy), Point::integer(5, down_copy)});

    e.rows.push_back(detail::support_row("the maximal support is {up inf, down inf}",
                                         {Point::inf(down_copy), Point::inf(up_copy)}));

    ExpectedRow fol{"folner", "F_n is a Folner sequence with |F_n| = (n+1) 2^(n+1)", {}};
    fol.check = [](const GalleryEntry&, const Profile& p, DetectorCache&) {
        RowResult r;
        r.id = "folner";
        r.claim = "F_n is a Folner sequence with |F_n| = (n+1) 2^(n+1)";
        r.status = RowStatus::Match;
        auto f = FolnerFamily::lamp_box();
        for (std::uint64_t n = 1; n <= p.lamp_n; ++n) {
            auto expect = (n + 1) << (n + 1);
            if (cardinality(f, n) != expect || enumerate(f, n).size() != expect)
                r.status = RowStatus::Mismatch;
            if (defect(f, n, {GroupElement::lamp(1)}) != make_rational(1, static_cast<std::int64_t>(n + 1)))
                r.status = RowStatus::Mismatch;
        }
        for (const auto& g : enumerate(f, 3))
            if (defect(f, 3, {g}) > lamp_defect_bound(g, 3))
                r.status = RowStatus::Mismatch;
        r.values = {{"n_max", std::to_string(p.lamp_n)},
                    {"defect_sigma_at_n_max", fraction_string(defect(f, p.lamp_n, {GroupElement::lamp(1)}))}};
        return r;
    };
    e.rows.push_back(std::move(fol));

    ExpectedRow fmec{"f_mean_equicontinuous", "F-averages equal A-averages, so the action is F-mean equicontinuous",
                     {}};
    fmec.check = [](const GalleryEntry& g, const Profile& p, DetectorCache&) {
        RowResult r;
        r.id = "f_mean_equicontinuous";
        r.claim = "F-averages equal A-averages, so the action is F-mean equicontinuous";
        r.status = RowStatus::Match;
        const auto x = Point::integer(3, up_copy), y = Point::integer(5, down_copy);
        for (std::uint64_t n = 6; n <= p.lamp_n; ++n)
            if (cesaro_metric(g.space, x, y, FolnerFamily::lamp_box(), n) !=
                cesaro_metric(g.space, x, y, FolnerFamily::z_shifted(), n))
                r.status = RowStatus::Mismatch;
        auto rep = mec_probe(
            g.space, FolnerFamily::z_shifted(),
            [](std::int64_t k) { return PointPair{Point::integer(k, up_copy), Point::inf(up_copy)}; },
            {1, 2, 4, 8, 16, 32}, 1e-2, {1, std::min<std::uint64_t>(p.z_window, 500)});
        if (rep.verdict != MecVerdict::Consistent)
            r.status = RowStatus::Mismatch;
        r.values = {{"a_probe", std::string(to_string(rep.verdict))}};
        return r;
    };
    e.rows.push_back(std::move(fmec));

    ExpectedRow dec{"decomposition", "the F_n-empirical measure of (up n, up n+1) splits into four A_n-averages", {}};
    dec.check = [](const GalleryEntry& g, const Profile& p, DetectorCache&) {
        RowResult r;
        r.id = "decomposition";
        r.claim = "the F_n-empirical measure of (up n, up n+1) splits into four A_n-averages";
        r.status = RowStatus::Match;
        const auto top = std::min<std::uint64_t>(p.lamp_n, 10);
        for (std::uint64_t n = 1; n <= top; ++n) {
            const auto s = static_cast<std::int64_t>(n);
            auto lhs = empirical(g.space, PointPair{Point::integer(s, up_copy), Point::integer(s + 1, up_copy)},
                                 FolnerFamily::lamp_box(), n);
            if (!(lhs == detail::corner_decomposition(g.space, n)))
                r.status = RowStatus::Mismatch;
        }
        r.values = {{"n_max", std::to_string(top)}};
        return r;
    };
    e.rows.push_back(std::move(dec));

    ExpectedRow lim{"corner_limit", "the empirical measures converge to the uniform measure on the four corners", {}};
    lim.check = [](const GalleryEntry& g, const Profile& p, DetectorCache&) {
        RowResult r;
        r.id = "corner_limit";
        r.claim = "the empirical measures converge to the uniform measure on the four corners";
        r.status = RowStatus::Match;
        auto corner = detail::corner_measure(g.space);
        Rational prev = -1;
        for (std::uint64_t n = 4; n <= p.lamp_n; ++n) {
            const auto s = static_cast<std::int64_t>(n);
            auto mu = empirical(g.space, PointPair{Point::integer(s, up_copy), Point::integer(s + 1, up_copy)},
                                FolnerFamily::lamp_box(), n);
            auto d = w1(mu, corner);
            if (prev >= 0 && !(d < prev))
                r.status = RowStatus::Mismatch;
            prev = d;
            r.values.emplace_back("w1_n" + std::to_string(n), fraction_string(d));
        }
        if (invariance_defect(g.space, corner, {GroupElement::lamp(1), GroupElement::lamp(0, {0})}) != 0)
            r.status = RowStatus::Mismatch;
        return r;
    };
    e.rows.push_back(std::move(lim));

    e.rows.push_back(detail::membership_row("srjms_f", "(up inf, down inf) is in S_rjms^F", CertKind::SrjmsF,
                                            "lamp_box", {corner}, {}));
    e.rows.push_back(detail::membership_row("swsm_f", "(up inf, down inf) is in S_wsm^F", CertKind::SwsmF, "lamp_box",
                                            {corner}, {}));
    return e;
}

/// Two-point compactification of Z with translation, both ends fixed.
inline GalleryEntry two_point()
{
    auto e = detail::entry(
        "two-point", "two-point compactification of Z, g.x = x + g, both ends fixed",
        Space::two_point(1), {FolnerFamily::z_initial(), FolnerFamily::z_centered()});
    const auto lo = Point::minus_inf(1), hi = Point::plus_inf(1);
    detail::add_z_witness(e, {hi, lo}, "left-walk",
                          [lo](std::int64_t k) { return PointPair{Point::integer(-k, 1), lo}; });
    e.model = FiniteModel({{"-inf", true}, {"+inf", true}, {"Z", false, 0, 1}}, {{0, 1, 2}});
    e.limit_class = {{lo, 0}, {hi, 1}};
    e.probes.push_back({Point::integer(0, 1), hi});
    e.probes.push_back({Point::integer(-1, 1), Point::integer(3, 1)});

    e.rows.push_back(detail::support_row("the maximal support is {-inf, +inf}", {lo, hi}));
    auto limits = detail::all_pairs({lo, hi});
    std::vector<PointPair> others{{Point::integer(0, 1), Point::integer(0, 1)},
                                  {Point::integer(0, 1), hi},
                                  {lo, Point::integer(2, 1)},
                                  {Point::integer(-1, 1), Point::integer(3, 1)}};
    e.rows.push_back(detail::membership_row("qrms_f", "Q_rms^F = {-inf, +inf}^2", CertKind::QrmsF, "z_initial",
                                            limits, others));
    e.rows.push_back(detail::membership_row("srjms_f", "S_rjms^F = {-inf, +inf}^2", CertKind::SrjmsF, "z_initial",
                                            limits, others));
    e.rows.push_back(detail::membership_row("qrms", "Q_rms = {-inf, +inf}^2", CertKind::QrmsBanach, "z_initial",
                                            limits, others));
    e.rows.push_back(detail::icer_row("R_me = {-inf, +inf}^2 with the diagonal", "z_initial"));

    ExpectedRow lim{"limit", "empirical measures of (-3, -inf) along F converge to the Dirac mass at (+inf, -inf)", {}};
    lim.check = [lo, hi](const GalleryEntry& g, const Profile& p, DetectorCache&) {
        RowResult r;
        r.id = "limit";
        r.claim = "empirical measures of (-3, -inf) along F converge to the Dirac mass at (+inf, -inf)";
        auto target = dirac(g.space, PointPair{hi, lo});
        std::vector<PairMeasure> seq;
        std::vector<double> dist;
        for (auto k = p.z_window - 4; k <= p.z_window; ++k) {
            seq.push_back(empirical(g.space, PointPair{Point::integer(-3, 1), lo}, FolnerFamily::z_initial(), k));
            dist.push_back(w1_approx(seq.back(), target));
        }
        auto cand = cluster_detect(seq);
        bool decreasing = std::is_sorted(dist.rbegin(), dist.rend());
        r.status = cand && decreasing && dist.back() < 0.05 ? RowStatus::Match : RowStatus::Mismatch;
        r.values = {{"w1_at_window_top", std::to_string(dist.back())}, {"cluster", cand ? "found" : "none"}};
        return r;
    };
    e.rows.push_back(std::move(lim));
    return e;
}

/// Three copies of the two-point compactification with +inf1 = +inf3 and
/// -inf2 = -inf3.
inline GalleryEntry three_glued()
{
    auto e = detail::entry(
        "three-glued",
        "three two-point compactifications of Z glued at +inf(1) = +inf(3) and -inf(2) = -inf(3)",
        Space::two_point(3,
                         {{Point::plus_inf(1), Point::plus_inf(3)}, {Point::minus_inf(2), Point::minus_inf(3)}}),
        {FolnerFamily::z_initial(), FolnerFamily::z_centered()});
    const auto a = Point::minus_inf(1), b = Point::plus_inf(1), c = Point::minus_inf(2), d = Point::plus_inf(2);
    detail::add_z_witness(e, {b, a}, "walk-1", [a](std::int64_t k) { return PointPair{Point::integer(-k, 1), a}; });
    detail::add_z_witness(e, {b, c}, "walk-3", [c](std::int64_t k) { return PointPair{Point::integer(-k, 3), c}; });
    detail::add_z_witness(e, {d, c}, "walk-2", [c](std::int64_t k) { return PointPair{Point::integer(-k, 2), c}; });
    detail::add_z_witness(e, {b, d}, "walk-3-2",
                          [](std::int64_t k) { return PointPair{Point::integer(-k, 3), Point::integer(-k, 2)}; });
    detail::add_z_witness(e, {a, c}, "walk-1-3",
                          [](std::int64_t k) { return PointPair{Point::integer(k, 1), Point::integer(k, 3)}; });

    auto u1 = Neighborhood::points({a}, {Tail{1, -1, -1}});
    auto u2 = Neighborhood::points({c}, {Tail{2, -1, -1}, Tail{3, -1, -1}});
    e.closures.push_back({PointPair{a, c}, Neighborhood::product(u1, u2)});
    e.closures.push_back({PointPair{c, a}, Neighborhood::product(u2, u1)});

    e.model = FiniteModel({{"-inf1", true}, {"+inf1", true}, {"-inf2", true}, {"+inf2", true}, {"Z1", false, 0, 1},
                           {"Z2", false, 2, 3}, {"Z3", false, 2, 1}},
                          {{0, 1, 2, 3, 4, 5, 6}});
    e.limit_class = {{a, 0}, {b, 1}, {c, 2}, {d, 3}};
    e.probes.push_back({Point::integer(0, 1), Point::integer(0, 3)});
    e.probes.push_back({Point::integer(-2, 2), c});

    e.rows.push_back(detail::support_row("the maximal support is the four limit points", {a, b, c, d}));
    e.rows.push_back(detail::icer_row("R_me = R with the diagonal, R the square of the support", "z_initial"));

    auto all = detail::all_pairs({a, b, c, d});
    auto without = [](std::vector<PointPair> v, std::vector<PointPair> drop) {
        std::vector<PointPair> in;
        for (const auto& p : v)
            if (std::find(drop.begin(), drop.end(), p) == drop.end())
                in.push_back(p);
        return in;
    };
    std::vector<PointPair> ad{{a, d}, {d, a}};
    std::vector<PointPair> ac{{a, c}, {c, a}};
    auto qrms = without(all, ad);
    auto qrms_f = without(qrms, ac);
    std::vector<PointPair> out_f = ad;
    out_f.insert(out_f.end(), ac.begin(), ac.end());

    e.rows.push_back(detail::membership_row("qrms", "Q_rms = R without (-inf1, +inf2) and its swap",
                                            CertKind::QrmsBanach, "z_initial", qrms, ad));
    e.rows.push_back(detail::membership_row("qrms_f_prime", "Q_rms^F' = Q_rms", CertKind::QrmsF, "z_centered", qrms,
                                            ad));
    e.rows.push_back(detail::membership_row("srjms_f_prime", "S_rjms^F' = Q_rms", CertKind::SrjmsF, "z_centered",
                                            qrms, ad));
    e.rows.push_back(detail::membership_row("qrms_f", "Q_rms^F = Q_rms without (-inf1, -inf2) and its swap",
                                            CertKind::QrmsF, "z_initial", qrms_f, out_f));
    e.rows.push_back(detail::membership_row("srjms_f", "S_rjms^F = Q_rms^F", CertKind::SrjmsF, "z_initial", qrms_f,
                                            out_f));

    ExpectedRow half{"half_limit", "F'-empirical measures of (k(1), k(3)) split evenly between (+inf1, +inf1) and "
                                   "(-inf1, -inf2)",
                     {}};
    half.check = [a, b, c](const GalleryEntry& g, const Profile& p, DetectorCache&) {
        RowResult r;
        r.id = "half_limit";
        r.claim = "F'-empirical measures of (k(1), k(3)) split evenly between (+inf1, +inf1) and (-inf1, -inf2)";
        std::vector<PairMeasure> seq;
        for (auto m = p.z_window - 4; m <= p.z_window; ++m)
            seq.push_back(empirical(g.space, PointPair{Point::integer(5, 1), Point::integer(5, 3)},
                                    FolnerFamily::z_centered(), m));
        auto cand = cluster_detect(seq);
        r.status = RowStatus::Mismatch;
        if (cand) {
            auto heavy = heavy_atoms(*cand, limit_pairs(g.space), Rational(1, 10));
            bool ok = heavy.size() == 2;
            for (const auto& [q, w] : heavy) {
                ok = ok && (q == PointPair{a, c} || q == PointPair{b, b}) && std::fabs(to_double(w) - 0.5) < 0.02;
                r.values.emplace_back("mass" + to_string(q), fraction_string(w));
            }
            r.status = ok ? RowStatus::Match : RowStatus::Mismatch;
        }
        return r;
    };
    e.rows.push_back(std::move(half));

    ExpectedRow mec{"not_mean_equicontinuous", "D_F stays away from 0 along (-k(3), -k(2)) -> (-inf2, -inf2)", {}};
    mec.check = [](const GalleryEntry& g, const Profile& p, DetectorCache&) {
        RowResult r;
        r.id = "not_mean_equicontinuous";
        r.claim = "D_F stays away from 0 along (-k(3), -k(2)) -> (-inf2, -inf2)";
        auto rep = mec_probe(
            g.space, FolnerFamily::z_initial(),
            [](std::int64_t k) { return PointPair{Point::integer(-k, 3), Point::integer(-k, 2)}; },
            {4, 8, 16, 32, 64}, 1e-2, {1, p.z_window});
        r.status = rep.verdict == MecVerdict::Violation ? RowStatus::Match : RowStatus::Mismatch;
        r.values = {{"verdict", std::string(to_string(rep.verdict))},
                    {"min_estimate", std::to_string(*std::min_element(rep.estimates.begin(), rep.estimates.end()))}};
        return r;
    };
    e.rows.push_back(std::move(mec));

    ExpectedRow tr{"not_transitive", "Q_rms^F is not transitive", {}};
    tr.check = [a, b, c](const GalleryEntry& g, const Profile& p, DetectorCache& cache) {
        RowResult r;
        r.id = "not_transitive";
        r.claim = "Q_rms^F is not transitive";
        auto f = FolnerFamily::z_initial();
        const auto& ab = cache.get(g, CertKind::QrmsF, {a, b}, f, p);
        const auto& bc = cache.get(g, CertKind::QrmsF, {b, c}, f, p);
        auto neg = structural_negative(g, {a, c}, f, p, cache);
        r.status = ab.positive() && bc.positive() && neg ? RowStatus::Match : RowStatus::Inconclusive;
        if (neg)
            r.certificates.push_back(*neg);
        r.values = {{"(-inf1,+inf1)", std::string(to_string(ab.verdict))},
                    {"(+inf1,-inf2)", std::string(to_string(bc.verdict))},
                    {"(-inf1,-inf2)", neg ? "NEGATIVE" : "no certificate"}};
        return r;
    };
    e.rows.push_back(std::move(tr));
    return e;
}

struct PropertyCase
{
    std::string system;
    std::string family;
    PointPair pair;
    bool ok = true;
    std::string detail;
};

struct PropertyReport
{
    std::string name;
    std::vector<PropertyCase> cases;

    std::size_t failures() const
    {
        return static_cast<std::size_t>(
            std::count_if(cases.begin(), cases.end(), [](const PropertyCase& c) { return !c.ok; }));
    }
    bool holds() const { return !cases.empty() && failures() == 0; }
};

/// Off the diagonal, S_rjms^F and S_wsm^F verdicts agree.
inline PropertyReport li_yu_agreement(const GalleryEntry& e, const Profile& p, DetectorCache& cache)
{
    PropertyReport rep{"li-yu agreement", {}};
    for (const auto& f : e.families)
        for (const auto& pair : e.probes) {
            if (e.space.canonical(pair).is_diagonal())
                continue;
            const auto& a = cache.get(e, CertKind::SrjmsF, pair, f, p);
            const auto& b = cache.get(e, CertKind::SwsmF, pair, f, p);
            rep.cases.push_back({e.name, f.name(), pair, a.verdict == b.verdict,
                                 std::string(to_string(a.verdict)) + " vs " + std::string(to_string(b.verdict))});
        }
    return rep;
}

/// Q_rms^F positives are S_rjms^F positives and Banach (Q_rms) positives.
inline PropertyReport inclusion_chain(const GalleryEntry& e, const Profile& p, DetectorCache& cache)
{
    PropertyReport rep{"inclusion chain", {}};
    for (const auto& f : e.families)
        for (const auto& pair : e.probes) {
            const auto& q = cache.get(e, CertKind::QrmsF, pair, f, p);
            if (!q.positive())
                continue;
            const auto& s = cache.get(e, CertKind::SrjmsF, pair, f, p);
            const auto& b = cache.get(e, CertKind::QrmsBanach, pair, f, p);
            rep.cases.push_back({e.name, f.name(), pair, s.positive() && b.positive(),
                                 "srjms " + std::string(to_string(s.verdict)) + ", banach " +
                                     std::string(to_string(b.verdict))});
        }
    return rep;
}

/// (y, y) is a Q_rms^F positive exactly when y is in the support estimate.
inline PropertyReport diagonal_support_law(const GalleryEntry& e, const Profile& p, DetectorCache& cache)
{
    PropertyReport rep{"diagonal-support law", {}};
    const bool lamp = e.space.group() == GroupKind::Lamplighter;
    auto est = support_union_estimate(e.space, truncate(e.space, 2), e.families, lamp ? p.lamp_n : p.z_window,
                                      e.support_truncation, e.support_mass);
    for (const auto& f : e.families)
        for (const auto& y : truncate(e.space, 2)) {
            const auto& c = cache.get(e, CertKind::QrmsF, {y, y}, f, p);
            const bool in = std::find(est.points.begin(), est.points.end(), y) != est.points.end();
            rep.cases.push_back({e.name, f.name(), {y, y}, c.positive() == in,
                                 std::string(to_string(c.verdict)) + (in ? ", in support" : ", off support")});
        }
    return rep;
}

inline std::vector<std::string> gallery_names()
{
    return {"literature-dock", "lamplighter-z", "lamplighter", "two-point", "three-glued"};
}

inline GalleryEntry build(std::string_view name)
{
    if (name == "literature-dock")
        return literature_dock();
    if (name == "lamplighter-z")
        return lamplighter_z();
    if (name == "lamplighter")
        return lamplighter();
    if (name == "two-point")
        return two_point();
    if (name == "three-glued")
        return three_glued();
    throw DomainError("unknown gallery system '" + std::string(name) + "'");
}

struct Report
{
    std::string system;
    Profile profile;
    std::vector<RowResult> rows;

    bool all_match() const
    {
        return std::all_of(rows.begin(), rows.end(), [](const RowResult& r) { return r.status == RowStatus::Match; });
    }
    bool any_mismatch() const
    {
        return std::any_of(rows.begin(), rows.end(),
                           [](const RowResult& r) { return r.status == RowStatus::Mismatch; });
    }
};

/// Checks every expected row in table order.
inline Report verify(const GalleryEntry& e, const Profile& p)
{
    Report rep{e.name, p, {}};
    DetectorCache cache;
    for (const auto& row : e.rows)
        rep.rows.push_back(row.check(e, p, cache));
    return rep;
}

} // namespace meandyn
