#pragma once

// Normal-form arithmetic for Z and the lamplighter group.
//
// A lamplighter element is sigma^a tau_b with b a finite set of sites; the
// product rule is
//     sigma^a tau_b * sigma^c tau_d = sigma^(a+c) tau_((b+c) symdiff d)
// which follows from tau_d sigma^a = sigma^a tau_(d+a).

#include "core.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <iterator>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace meandyn {

enum class GroupKind : std::uint8_t { Integers, Lamplighter };

inline std::string_view to_string(GroupKind g)
{
    return g == GroupKind::Integers ? "integers" : "lamplighter";
}

/// Sorted, duplicate-free set of lamp sites.
using LampSet = std::vector<std::int64_t>;

class GroupElement
{
public:
    GroupElement() = default;

    static GroupElement integer(std::int64_t a)
    {
        GroupElement g;
        g.kind_ = GroupKind::Integers;
        g.shift_ = a;
        return g;
    }

    /// Throws DomainError unless `lamps` is strictly increasing.
    static GroupElement lamp(std::int64_t a, LampSet lamps = {})
    {
        for (std::size_t i = 1; i < lamps.size(); ++i)
            if (lamps[i - 1] >= lamps[i])
                throw DomainError("lamp set must be strictly increasing");
        GroupElement g;
        g.kind_ = GroupKind::Lamplighter;
        g.shift_ = a;
        g.lamps_ = std::move(lamps);
        return g;
    }

    GroupKind kind() const noexcept { return kind_; }
    std::int64_t shift() const noexcept { return shift_; }
    const LampSet& lamps() const noexcept { return lamps_; }

    bool is_identity() const noexcept { return shift_ == 0 && lamps_.empty(); }

    friend auto operator<=>(const GroupElement&, const GroupElement&) = default;
    friend bool operator==(const GroupElement&, const GroupElement&) = default;

private:
    GroupKind kind_ = GroupKind::Integers;
    std::int64_t shift_ = 0;
    LampSet lamps_;
};

inline GroupElement identity(GroupKind group)
{
    return group == GroupKind::Integers ? GroupElement::integer(0) : GroupElement::lamp(0);
}

/// Generators: {1} for Z, {sigma, tau} for the lamplighter group.
inline std::vector<GroupElement> generators(GroupKind group)
{
    if (group == GroupKind::Integers)
        return {GroupElement::integer(1)};
    return {GroupElement::lamp(1), GroupElement::lamp(0, {0})};
}

namespace detail {

inline LampSet shifted(std::span<const std::int64_t> b, std::int64_t by)
{
    LampSet out;
    out.reserve(b.size());
    for (auto v : b)
        out.push_back(checked_add(v, by));
    return out;
}

inline LampSet symmetric_difference(std::span<const std::int64_t> x, std::span<const std::int64_t> y)
{
    LampSet out;
    out.reserve(x.size() + y.size());
    std::set_symmetric_difference(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
    return out;
}

} // namespace detail

inline GroupElement multiply(const GroupElement& g, const GroupElement& h)
{
    if (g.kind() != h.kind())
        throw DescriptorMismatch("multiply: elements of different groups");
    if (g.kind() == GroupKind::Integers)
        return GroupElement::integer(checked_add(g.shift(), h.shift()));
    auto moved = detail::shifted(g.lamps(), h.shift());
    return GroupElement::lamp(checked_add(g.shift(), h.shift()), detail::symmetric_difference(moved, h.lamps()));
}

inline GroupElement inverse(const GroupElement& g)
{
    if (g.kind() == GroupKind::Integers)
        return GroupElement::integer(checked_neg(g.shift()));
    // (sigma^a tau_b)^-1 = tau_b sigma^-a = sigma^-a tau_(b-a)
    return GroupElement::lamp(checked_neg(g.shift()), detail::shifted(g.lamps(), checked_neg(g.shift())));
}

/// "s^a" for Z, "s^a t{b1,b2,...}" for the lamplighter group.
inline std::string to_string(const GroupElement& g)
{
    std::string out = "s^" + std::to_string(g.shift());
    if (g.kind() == GroupKind::Lamplighter) {
        out += " t{";
        for (std::size_t i = 0; i < g.lamps().size(); ++i) {
            if (i)
                out += ',';
            out += std::to_string(g.lamps()[i]);
        }
        out += '}';
    }
    return out;
}

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
        s.remove_suffix(1);
    return s;
}

inline std::int64_t parse_int(std::string_view s)
{
    s = trim(s);
    if (s.empty())
        throw ParseError("expected an integer");
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(std::string(s), &pos);
    } catch (const std::exception&) {
        throw ParseError("not an integer: '" + std::string(s) + "'");
    }
    if (pos != s.size())
        throw ParseError("not an integer: '" + std::string(s) + "'");
    return v;
}

} // namespace detail

/// Parses the textual rendering. Accepts "e", "s^a", "t{...}", "s^a t{...}";
/// lamp lists may be unsorted and are canonicalized (duplicates rejected).
inline GroupElement parse_element(std::string_view text, GroupKind group)
{
    auto s = detail::trim(text);
    std::int64_t shift = 0;
    LampSet lamps;
    bool saw_lamps = false;
    if (s == "e" || s == "id")
        return identity(group);
    if (s.starts_with("s^")) {
        s.remove_prefix(2);
        auto end = s.find_first_of(" t");
        shift = detail::parse_int(s.substr(0, end));
        s = end == std::string_view::npos ? std::string_view{} : detail::trim(s.substr(end));
    }
    if (s.starts_with("t{")) {
        auto close = s.find('}');
        if (close == std::string_view::npos)
            throw ParseError("unterminated lamp set in '" + std::string(text) + "'");
        auto body = s.substr(2, close - 2);
        while (!detail::trim(body).empty()) {
            auto comma = body.find(',');
            lamps.push_back(detail::parse_int(body.substr(0, comma)));
            if (comma == std::string_view::npos)
                break;
            body.remove_prefix(comma + 1);
        }
        saw_lamps = true;
        s = detail::trim(s.substr(close + 1));
    }
    if (!s.empty())
        throw ParseError("trailing input in group element '" + std::string(text) + "'");
    if (group == GroupKind::Integers) {
        if (saw_lamps)
            throw DescriptorMismatch("lamp set given for an element of Z");
        return GroupElement::integer(shift);
    }
    std::sort(lamps.begin(), lamps.end());
    if (std::adjacent_find(lamps.begin(), lamps.end()) != lamps.end())
        throw ParseError("duplicate lamp site in '" + std::string(text) + "'");
    return GroupElement::lamp(shift, std::move(lamps));
}

} // namespace meandyn
