#pragma once

// Compact metric models: copies of the one-point or two-point
// compactification of Z, optionally glued at limit points, together with
// the group action, a fixed compatible metric, truncations and neighborhoods.
//
// Metric conventions:
//  * one-point copies: phi(inf) = 0, phi(s) = 1/(2s+1) for s >= 0 and
//    1/(2s-1) for s < 0; d = |phi(p) - phi(q)| + |copy(p) - copy(q)|.
//  * two-point copies: psi(s) = (1 + s/(1+|s|))/2 places Z inside (0,1)
//    with -inf at 0 and +inf at 1. Copies are laid out on the real line one
//    unit segment each (possibly reversed); segments glued at an endpoint
//    touch, unglued ones are separated by a gap of 1. d is the distance on
//    the line.

#include "core.hpp"
#include "group.hpp"

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace meandyn {

enum class Coord : std::uint8_t { MinusInf, Int, PlusInf, Inf };

struct Point
{
    int copy = 0;
    Coord coord = Coord::Int;
    std::int64_t s = 0;

    static Point integer(std::int64_t s, int copy = 0) { return {copy, Coord::Int, s}; }
    static Point plus_inf(int copy = 0) { return {copy, Coord::PlusInf, 0}; }
    static Point minus_inf(int copy = 0) { return {copy, Coord::MinusInf, 0}; }
    static Point inf(int copy = 0) { return {copy, Coord::Inf, 0}; }

    bool is_limit() const noexcept { return coord != Coord::Int; }

    friend auto operator<=>(const Point&, const Point&) = default;
    friend bool operator==(const Point&, const Point&) = default;
};

struct PointPair
{
    Point first;
    Point second;

    bool is_diagonal() const noexcept { return first == second; }
    PointPair swapped() const { return {second, first}; }

    friend auto operator<=>(const PointPair&, const PointPair&) = default;
    friend bool operator==(const PointPair&, const PointPair&) = default;
};

inline std::string to_string(const Point& p)
{
    std::string c;
    switch (p.coord) {
    case Coord::Int: c = std::to_string(p.s); break;
    case Coord::PlusInf: c = "+inf"; break;
    case Coord::MinusInf: c = "-inf"; break;
    case Coord::Inf: c = "inf"; break;
    }
    return c + "@" + std::to_string(p.copy);
}

inline std::string to_string(const PointPair& p)
{
    return "(" + to_string(p.first) + "," + to_string(p.second) + ")";
}

enum class SpaceKind : std::uint8_t { OnePoint, TwoPoint };

/// How the acting group moves integer coordinates.
/// Translate: g.s = s + g (Z). Sigma: sigma^g.s = s - g (Z).
/// Lamplighter: sigma^a tau_b toggles the copy at sites in b, then shifts by -a.
enum class ActionKind : std::uint8_t { Translate, Sigma, Lamplighter };

inline std::string_view to_string(ActionKind a)
{
    switch (a) {
    case ActionKind::Translate: return "translate";
    case ActionKind::Sigma: return "sigma";
    case ActionKind::Lamplighter: return "lamplighter";
    }
    return "?";
}

struct Segment
{
    int copy = 1;
    bool reversed = false;
    std::int64_t offset = 0;

    friend bool operator==(const Segment&, const Segment&) = default;
};

class Space
{
public:
    /// Copies are indexed 0..copies-1.
    static Space one_point(int copies, ActionKind action)
    {
        if (copies < 1)
            throw DomainError("a space needs at least one copy");
        if (action == ActionKind::Lamplighter && copies != 2)
            throw DomainError("the lamplighter action needs exactly two one-point copies");
        Space sp;
        sp.kind_ = SpaceKind::OnePoint;
        sp.copies_ = copies;
        sp.action_ = action;
        return sp;
    }

    /// Copies are indexed 1..copies. Each gluing identifies two limit points;
    /// the canonical representative is the smaller one. When `layout` is empty
    /// segments are chained automatically along glued endpoints.
    static Space two_point(int copies, std::vector<std::pair<Point, Point>> gluings = {},
                           ActionKind action = ActionKind::Translate, std::vector<Segment> layout = {})
    {
        if (copies < 1)
            throw DomainError("a space needs at least one copy");
        if (action == ActionKind::Lamplighter)
            throw DomainError("the lamplighter action is defined on one-point copies only");
        Space sp;
        sp.kind_ = SpaceKind::TwoPoint;
        sp.copies_ = copies;
        sp.action_ = action;
        for (const auto& [a, b] : gluings) {
            for (const auto& p : {a, b})
                if ((p.coord != Coord::PlusInf && p.coord != Coord::MinusInf) || p.copy < 1 || p.copy > copies)
                    throw DomainError("gluings may only identify limit points of existing copies");
        }
        sp.gluings_ = std::move(gluings);
        sp.build_representatives();
        sp.segments_ = layout.empty() ? sp.auto_layout() : std::move(layout);
        sp.validate_layout();
        return sp;
    }

    SpaceKind kind() const noexcept { return kind_; }
    int copies() const noexcept { return copies_; }
    ActionKind action() const noexcept { return action_; }
    GroupKind group() const noexcept
    {
        return action_ == ActionKind::Lamplighter ? GroupKind::Lamplighter : GroupKind::Integers;
    }
    const std::vector<std::pair<Point, Point>>& gluings() const noexcept { return gluings_; }
    const std::vector<Segment>& segments() const noexcept { return segments_; }

    int first_copy() const noexcept { return kind_ == SpaceKind::OnePoint ? 0 : 1; }

    bool has_copy(int c) const noexcept { return c >= first_copy() && c < first_copy() + copies_; }

    bool is_member(const Point& p) const
    {
        if (!has_copy(p.copy))
            return false;
        if (kind_ == SpaceKind::OnePoint)
            return p.coord == Coord::Int || p.coord == Coord::Inf;
        return p.coord != Coord::Inf;
    }

    /// Canonical representative; throws DomainError for points not in the space.
    Point canonical(const Point& p) const
    {
        if (!is_member(p))
            throw DomainError("point " + to_string(p) + " is not in the space");
        if (p.coord == Coord::Int)
            return p;
        for (const auto& [from, to] : representatives_)
            if (from == p)
                return to;
        return p;
    }

    PointPair canonical(const PointPair& p) const { return {canonical(p.first), canonical(p.second)}; }

    /// Canonical limit points in sorted order.
    std::vector<Point> limit_points() const
    {
        std::vector<Point> out;
        for (int c = first_copy(); c < first_copy() + copies_; ++c) {
            if (kind_ == SpaceKind::OnePoint) {
                out.push_back(Point::inf(c));
            } else {
                out.push_back(canonical(Point::minus_inf(c)));
                out.push_back(canonical(Point::plus_inf(c)));
            }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    friend bool operator==(const Space& a, const Space& b)
    {
        return a.kind_ == b.kind_ && a.copies_ == b.copies_ && a.action_ == b.action_ && a.gluings_ == b.gluings_ &&
               a.segments_ == b.segments_;
    }

    const Segment& segment_of(int copy) const
    {
        for (const auto& seg : segments_)
            if (seg.copy == copy)
                return seg;
        throw DomainError("copy " + std::to_string(copy) + " has no layout segment");
    }

private:
    Space() = default;

    void build_representatives()
    {
        // Union-find over the handful of limit points; smallest point wins.
        std::vector<Point> nodes;
        for (int c = 1; c <= copies_; ++c) {
            nodes.push_back(Point::minus_inf(c));
            nodes.push_back(Point::plus_inf(c));
        }
        std::vector<std::size_t> parent(nodes.size());
        for (std::size_t i = 0; i < parent.size(); ++i)
            parent[i] = i;
        auto index = [&](const Point& p) {
            return static_cast<std::size_t>(std::find(nodes.begin(), nodes.end(), p) - nodes.begin());
        };
        auto find = [&](std::size_t i) {
            while (parent[i] != i)
                i = parent[i] = parent[parent[i]];
            return i;
        };
        for (const auto& [a, b] : gluings_) {
            auto ra = find(index(a));
            auto rb = find(index(b));
            if (ra == rb)
                continue;
            if (nodes[ra] < nodes[rb])
                parent[rb] = ra;
            else
                parent[ra] = rb;
        }
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            auto r = find(i);
            if (r != i)
                representatives_.emplace_back(nodes[i], nodes[r]);
        }
    }

    Point left_end(const Segment& seg) const
    {
        return canonical(seg.reversed ? Point::plus_inf(seg.copy) : Point::minus_inf(seg.copy));
    }

    Point right_end(const Segment& seg) const
    {
        return canonical(seg.reversed ? Point::minus_inf(seg.copy) : Point::plus_inf(seg.copy));
    }

    std::vector<Segment> auto_layout() const
    {
        std::vector<Segment> out;
        std::vector<bool> used(static_cast<std::size_t>(copies_) + 1, false);
        std::int64_t offset = 0;
        while (static_cast<int>(out.size()) < copies_) {
            std::optional<Segment> next;
            if (!out.empty()) {
                auto joint = right_end(out.back());
                for (int c = 1; c <= copies_ && !next; ++c) {
                    if (used[static_cast<std::size_t>(c)])
                        continue;
                    if (canonical(Point::minus_inf(c)) == joint)
                        next = Segment{c, false, offset + 1};
                    else if (canonical(Point::plus_inf(c)) == joint)
                        next = Segment{c, true, offset + 1};
                }
            }
            if (!next) {
                int c = 1;
                while (used[static_cast<std::size_t>(c)])
                    ++c;
                next = Segment{c, false, out.empty() ? 0 : offset + 2};
            }
            used[static_cast<std::size_t>(next->copy)] = true;
            offset = next->offset;
            out.push_back(*next);
        }
        return out;
    }

    void validate_layout() const
    {
        if (static_cast<int>(segments_.size()) != copies_)
            throw DomainError("layout must place every copy exactly once");
        // Glued endpoints must coincide on the line and distinct limit points must not.
        std::vector<std::pair<Point, std::int64_t>> ends;
        for (const auto& seg : segments_) {
            if (!has_copy(seg.copy))
                throw DomainError("layout references an unknown copy");
            ends.emplace_back(left_end(seg), 2 * seg.offset);
            ends.emplace_back(right_end(seg), 2 * seg.offset + 2);
        }
        for (std::size_t i = 0; i < ends.size(); ++i)
            for (std::size_t j = i + 1; j < ends.size(); ++j) {
                bool same_point = ends[i].first == ends[j].first;
                bool same_place = ends[i].second == ends[j].second;
                if (same_point != same_place)
                    throw DomainError("gluings are not representable by the segment layout");
            }
        for (std::size_t i = 0; i < segments_.size(); ++i)
            for (std::size_t j = i + 1; j < segments_.size(); ++j)
                if (std::llabs(segments_[i].offset - segments_[j].offset) < 1)
                    throw DomainError("layout segments overlap");
    }

    SpaceKind kind_ = SpaceKind::OnePoint;
    int copies_ = 1;
    ActionKind action_ = ActionKind::Translate;
    std::vector<std::pair<Point, Point>> gluings_;
    std::vector<std::pair<Point, Point>> representatives_;
    std::vector<Segment> segments_;
};

// ---------------------------------------------------------------------------
// Embedding and metric

namespace detail {

inline Rational phi(std::int64_t s)
{
    // 1/(2s+1) for s >= 0, 1/(2s-1) for s < 0
    Rational den = Rational(static_cast<long>(s)) * 2 + (s >= 0 ? 1 : -1);
    return Rational(1) / den;
}

inline double phi_d(std::int64_t s)
{
    return s >= 0 ? 1.0 / (2.0 * static_cast<double>(s) + 1.0) : 1.0 / (2.0 * static_cast<double>(s) - 1.0);
}

inline Rational psi(std::int64_t s)
{
    Rational a(static_cast<long>(s));
    Rational frac = a / (1 + abs(a));
    return (1 + frac) / 2;
}

inline double psi_d(std::int64_t s)
{
    double a = static_cast<double>(s);
    return (1.0 + a / (1.0 + std::fabs(a))) / 2.0;
}

/// Position inside a copy: phi for one-point, psi (0 at -inf, 1 at +inf) for two-point.
inline Rational local_coordinate(SpaceKind kind, const Point& p)
{
    switch (p.coord) {
    case Coord::Inf: return 0;
    case Coord::MinusInf: return 0;
    case Coord::PlusInf: return 1;
    case Coord::Int: return kind == SpaceKind::OnePoint ? phi(p.s) : psi(p.s);
    }
    return 0;
}

inline double local_coordinate_d(SpaceKind kind, const Point& p)
{
    switch (p.coord) {
    case Coord::Inf: return 0.0;
    case Coord::MinusInf: return 0.0;
    case Coord::PlusInf: return 1.0;
    case Coord::Int: return kind == SpaceKind::OnePoint ? phi_d(p.s) : psi_d(p.s);
    }
    return 0.0;
}

} // namespace detail

/// Real coordinate of a point. One-point copy c sits at 2c + phi (spacing 2
/// keeps copies disjoint); two-point copies sit on their layout segment.
inline Rational embed(const Space& space, const Point& p)
{
    auto q = space.canonical(p);
    auto u = detail::local_coordinate(space.kind(), q);
    if (space.kind() == SpaceKind::OnePoint)
        return 2 * q.copy + u;
    const auto& seg = space.segment_of(q.copy);
    return Rational(static_cast<long>(seg.offset)) + (seg.reversed ? 1 - u : u);
}

inline double embed_approx(const Space& space, const Point& p)
{
    auto u = detail::local_coordinate_d(space.kind(), p);
    if (space.kind() == SpaceKind::OnePoint)
        return 2.0 * p.copy + u;
    const auto& seg = space.segment_of(p.copy);
    return static_cast<double>(seg.offset) + (seg.reversed ? 1.0 - u : u);
}

inline Rational metric(const Space& space, const Point& p, const Point& q)
{
    if (space.kind() == SpaceKind::OnePoint) {
        auto a = space.canonical(p);
        auto b = space.canonical(q);
        Rational d = abs(detail::local_coordinate(space.kind(), a) - detail::local_coordinate(space.kind(), b));
        return d + std::abs(a.copy - b.copy);
    }
    return abs(embed(space, p) - embed(space, q));
}

/// Floating-point metric, no membership validation.
inline double metric_approx(const Space& space, const Point& p, const Point& q)
{
    if (space.kind() == SpaceKind::OnePoint) {
        double d = std::fabs(detail::local_coordinate_d(space.kind(), p) - detail::local_coordinate_d(space.kind(), q));
        return d + std::abs(p.copy - q.copy);
    }
    return std::fabs(embed_approx(space, p) - embed_approx(space, q));
}

/// Sum metric on X^2.
inline Rational metric(const Space& space, const PointPair& p, const PointPair& q)
{
    return metric(space, p.first, q.first) + metric(space, p.second, q.second);
}

inline double metric_approx(const Space& space, const PointPair& p, const PointPair& q)
{
    return metric_approx(space, p.first, q.first) + metric_approx(space, p.second, q.second);
}

/// Distance between the two coordinates of a pair.
inline Rational pair_distance(const Space& space, const PointPair& p)
{
    return metric(space, p.first, p.second);
}

inline double pair_distance_approx(const Space& space, const PointPair& p)
{
    return metric_approx(space, p.first, p.second);
}

// ---------------------------------------------------------------------------
// Action

inline Point act(const Space& space, const GroupElement& g, const Point& p)
{
    if (g.kind() == GroupKind::Lamplighter && space.group() != GroupKind::Lamplighter)
        throw DescriptorMismatch("lamplighter element acting on a Z-space");
    if (p.coord != Coord::Int)
        return p;
    Point out = p;
    switch (space.action()) {
    case ActionKind::Translate: out.s = checked_add(p.s, g.shift()); break;
    case ActionKind::Sigma: out.s = checked_sub(p.s, g.shift()); break;
    case ActionKind::Lamplighter:
        // Integer elements act through the subgroup generated by sigma.
        if (std::binary_search(g.lamps().begin(), g.lamps().end(), p.s))
            out.copy = 1 - p.copy;
        out.s = checked_sub(p.s, g.shift());
        break;
    }
    return out;
}

/// Diagonal action on X^2.
inline PointPair act(const Space& space, const GroupElement& g, const PointPair& p)
{
    return {act(space, g, p.first), act(space, g, p.second)};
}

/// All canonical points with |integer coordinate| <= n plus all limit points.
inline std::vector<Point> truncate(const Space& space, std::int64_t n)
{
    if (n < 0)
        throw DomainError("truncation radius must be nonnegative");
    std::vector<Point> out;
    for (int c = space.first_copy(); c < space.first_copy() + space.copies(); ++c)
        for (std::int64_t s = -n; s <= n; ++s)
            out.push_back(Point::integer(s, c));
    for (const auto& l : space.limit_points())
        out.push_back(l);
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Neighborhoods

/// Integer points of one copy on one side: s >= bound (sign > 0) or s <= bound (sign < 0).
struct Tail
{
    int copy = 0;
    int sign = 1;
    std::int64_t bound = 0;

    bool contains(const Point& p) const
    {
        return p.coord == Coord::Int && p.copy == copy && (sign > 0 ? p.s >= bound : p.s <= bound);
    }
};

class Neighborhood
{
public:
    enum class Kind : std::uint8_t { Ball, PointSet, PairSet, Product, Everything };

    /// Open ball (strict inequality) around a point of X.
    static Neighborhood ball(const Point& center, double radius)
    {
        Neighborhood u(Kind::Ball, 1);
        u.center_ = PointPair{center, center};
        u.set_radius(radius);
        return u;
    }

    /// Open ball in the sum metric on X^2.
    static Neighborhood ball(const PointPair& center, double radius)
    {
        Neighborhood u(Kind::Ball, 2);
        u.center_ = center;
        u.set_radius(radius);
        return u;
    }

    static Neighborhood points(std::vector<Point> pts, std::vector<Tail> tails = {})
    {
        Neighborhood u(Kind::PointSet, 1);
        std::sort(pts.begin(), pts.end());
        u.points_ = std::move(pts);
        u.tails_ = std::move(tails);
        return u;
    }

    static Neighborhood pairs(std::vector<PointPair> prs)
    {
        Neighborhood u(Kind::PairSet, 2);
        std::sort(prs.begin(), prs.end());
        u.pairs_ = std::move(prs);
        return u;
    }

    static Neighborhood product(Neighborhood left, Neighborhood right)
    {
        if (left.dimension() != 1 || right.dimension() != 1)
            throw DomainError("product neighborhoods take two single-space factors");
        Neighborhood u(Kind::Product, 2);
        u.factors_ = std::make_shared<std::pair<Neighborhood, Neighborhood>>(std::move(left), std::move(right));
        return u;
    }

    static Neighborhood everything(int dimension) { return Neighborhood(Kind::Everything, dimension); }

    Kind kind() const noexcept { return kind_; }
    int dimension() const noexcept { return dimension_; }
    double radius() const noexcept { return radius_; }
    const Rational& exact_radius() const noexcept { return exact_radius_; }
    const PointPair& pair_center() const noexcept { return center_; }
    const Point& center() const noexcept { return center_.first; }
    const std::vector<Point>& point_list() const noexcept { return points_; }
    const std::vector<Tail>& tails() const noexcept { return tails_; }
    const std::vector<PointPair>& pair_list() const noexcept { return pairs_; }
    const Neighborhood& left() const { return factors_->first; }
    const Neighborhood& right() const { return factors_->second; }

    std::string describe() const
    {
        switch (kind_) {
        case Kind::Ball:
        {
            std::ostringstream r;
            r << radius_;
            return "ball(" + (dimension_ == 1 ? to_string(center_.first) : to_string(center_)) + ", r=" + r.str() +
                   ")";
        }
        case Kind::PointSet: {
            std::string s = "{";
            for (const auto& p : points_)
                s += to_string(p) + " ";
            for (const auto& t : tails_)
                s += "s" + std::string(t.sign > 0 ? ">=" : "<=") + std::to_string(t.bound) + "@" +
                     std::to_string(t.copy) + " ";
            return s + "}";
        }
        case Kind::PairSet: return "pairs[" + std::to_string(pairs_.size()) + "]";
        case Kind::Product: return left().describe() + " x " + right().describe();
        case Kind::Everything: return "everything";
        }
        return "?";
    }

private:
    Neighborhood(Kind k, int dim) : kind_(k), dimension_(dim) {}

    void set_radius(double r)
    {
        if (!(r >= 0.0) || !std::isfinite(r))
            throw DomainError("ball radius must be a finite nonnegative number");
        radius_ = r;
        exact_radius_ = Rational(r);
    }

    Kind kind_;
    int dimension_;
    PointPair center_{};
    double radius_ = 0.0;
    Rational exact_radius_{0};
    std::vector<Point> points_;
    std::vector<Tail> tails_;
    std::vector<PointPair> pairs_;
    std::shared_ptr<const std::pair<Neighborhood, Neighborhood>> factors_;
};

namespace detail {

/// Strict d < r with a floating-point fast path and an exact tie-break.
template <class P>
bool strictly_within(const Space& space, const P& a, const P& b, const Neighborhood& u)
{
    double approx = metric_approx(space, a, b);
    if (approx < u.radius() - 1e-9)
        return true;
    if (approx > u.radius() + 1e-9)
        return false;
    return metric(space, a, b) < u.exact_radius();
}

} // namespace detail

inline bool contains(const Space& space, const Neighborhood& u, const Point& p)
{
    switch (u.kind()) {
    case Neighborhood::Kind::Ball:
        if (u.dimension() != 1)
            break;
        return detail::strictly_within(space, u.center(), p, u);
    case Neighborhood::Kind::PointSet: {
        auto q = space.canonical(p);
        if (std::binary_search(u.point_list().begin(), u.point_list().end(), q))
            return true;
        return std::any_of(u.tails().begin(), u.tails().end(), [&](const Tail& t) { return t.contains(q); });
    }
    case Neighborhood::Kind::Everything:
        if (u.dimension() != 1)
            break;
        return true;
    default: break;
    }
    throw DomainError("neighborhood of X^2 queried with a single point");
}

inline bool contains(const Space& space, const Neighborhood& u, const PointPair& p)
{
    switch (u.kind()) {
    case Neighborhood::Kind::Ball:
        if (u.dimension() != 2)
            break;
        return detail::strictly_within(space, u.pair_center(), p, u);
    case Neighborhood::Kind::PairSet:
        return std::binary_search(u.pair_list().begin(), u.pair_list().end(), space.canonical(p));
    case Neighborhood::Kind::Product:
        return contains(space, u.left(), p.first) && contains(space, u.right(), p.second);
    case Neighborhood::Kind::Everything:
        if (u.dimension() != 2)
            break;
        return true;
    default: break;
    }
    throw DomainError("neighborhood of X queried with a pair");
}

} // namespace meandyn
