#pragma once

// Folner-sequence descriptors with exact enumeration and defects.
// Haar measure is counting measure, so |F| is the set size.

#include "core.hpp"
#include "group.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace meandyn {

struct Budget
{
    /// Largest Folner set that may be materialized.
    std::uint64_t max_atoms = 4'000'000;
};

class FolnerFamily
{
public:
    enum class Kind : std::uint8_t { ZInitial, ZCentered, ZShifted, LampBox, Interleaved, Subsequence };

    /// {0, ..., n-1}
    static FolnerFamily z_initial() { return FolnerFamily(Kind::ZInitial); }
    /// {-n, ..., n}
    static FolnerFamily z_centered() { return FolnerFamily(Kind::ZCentered); }
    /// {n, ..., 2n}
    static FolnerFamily z_shifted() { return FolnerFamily(Kind::ZShifted); }
    /// {sigma^a tau_b : {a} u b in {n, ..., 2n}}
    static FolnerFamily lamp_box() { return FolnerFamily(Kind::LampBox); }

    /// F_{kL+i} := F_k^{(i)} for L families, i in 1..L.
    static FolnerFamily interleaved(std::vector<FolnerFamily> parts)
    {
        if (parts.empty())
            throw DomainError("interleave needs at least one family");
        for (const auto& p : parts)
            if (p.group() != parts.front().group())
                throw DescriptorMismatch("interleave: families act in different groups");
        FolnerFamily f(Kind::Interleaved);
        f.parts_ = std::move(parts);
        return f;
    }

    /// F'_m := F_{indices[m-1]}; indices are 1-based and strictly increasing.
    static FolnerFamily subsequence(FolnerFamily base, std::vector<std::uint64_t> indices)
    {
        if (indices.empty())
            throw DomainError("subsequence needs at least one index");
        for (std::size_t i = 0; i < indices.size(); ++i)
            if (indices[i] == 0 || (i > 0 && indices[i - 1] >= indices[i]))
                throw DomainError("subsequence indices must be positive and strictly increasing");
        FolnerFamily f(Kind::Subsequence);
        f.parts_.push_back(std::move(base));
        f.indices_ = std::move(indices);
        return f;
    }

    Kind kind() const noexcept { return kind_; }
    const std::vector<FolnerFamily>& parts() const noexcept { return parts_; }
    const std::vector<std::uint64_t>& indices() const noexcept { return indices_; }

    GroupKind group() const
    {
        switch (kind_) {
        case Kind::LampBox: return GroupKind::Lamplighter;
        case Kind::Interleaved:
        case Kind::Subsequence: return parts_.front().group();
        default: return GroupKind::Integers;
        }
    }

    std::string name() const
    {
        switch (kind_) {
        case Kind::ZInitial: return "z_initial";
        case Kind::ZCentered: return "z_centered";
        case Kind::ZShifted: return "z_shifted";
        case Kind::LampBox: return "lamp_box";
        case Kind::Interleaved: {
            std::string s = "interleaved[";
            for (std::size_t i = 0; i < parts_.size(); ++i)
                s += (i ? "," : "") + parts_[i].name();
            return s + "]";
        }
        case Kind::Subsequence: return "subsequence[" + parts_.front().name() + "]";
        }
        return "?";
    }

    /// Base family and index that F_n refers to.
    std::pair<const FolnerFamily*, std::uint64_t> resolve(std::uint64_t n) const
    {
        if (n == 0)
            throw DomainError("Folner index must be at least 1");
        switch (kind_) {
        case Kind::Interleaved: {
            const std::uint64_t count = parts_.size();
            // n = k*count + i with i in 1..count; k = 0 is mapped to k = 1.
            std::uint64_t k = (n - 1) / count;
            std::uint64_t i = (n - 1) % count;
            return parts_[i].resolve(std::max<std::uint64_t>(k, 1));
        }
        case Kind::Subsequence:
            if (n > indices_.size())
                throw DomainError("subsequence index " + std::to_string(n) + " beyond its " +
                                  std::to_string(indices_.size()) + " entries");
            return parts_.front().resolve(indices_[n - 1]);
        default: return {this, n};
        }
    }

    friend bool operator==(const FolnerFamily&, const FolnerFamily&) = default;

private:
    explicit FolnerFamily(Kind k) : kind_(k) {}

    Kind kind_;
    std::vector<FolnerFamily> parts_;
    std::vector<std::uint64_t> indices_;
};

/// Closed integer interval [lo, hi] of F_n for the Z families, nullopt for LampBox.
inline std::optional<std::pair<std::int64_t, std::int64_t>> interval_of(const FolnerFamily& family, std::uint64_t n)
{
    auto [base, m] = family.resolve(n);
    const auto k = static_cast<std::int64_t>(m);
    switch (base->kind()) {
    case FolnerFamily::Kind::ZInitial: return std::pair{std::int64_t{0}, k - 1};
    case FolnerFamily::Kind::ZCentered: return std::pair{-k, k};
    case FolnerFamily::Kind::ZShifted: return std::pair{k, checked_add(k, k)};
    default: return std::nullopt;
    }
}

inline std::uint64_t cardinality(const FolnerFamily& family, std::uint64_t n)
{
    auto [base, m] = family.resolve(n);
    switch (base->kind()) {
    case FolnerFamily::Kind::ZInitial: return m;
    case FolnerFamily::Kind::ZCentered: return 2 * m + 1;
    case FolnerFamily::Kind::ZShifted: return m + 1;
    case FolnerFamily::Kind::LampBox: {
        // |A_m| * 2^|A_m| with |A_m| = m + 1
        if (m + 1 >= 58)
            throw OverflowError("lamp_box cardinality exceeds 64 bits");
        return (m + 1) << (m + 1);
    }
    default: break;
    }
    throw DomainError("unresolved family");
}

/// Exact F_n, sorted, duplicate-free.
inline std::vector<GroupElement> enumerate(const FolnerFamily& family, std::uint64_t n, const Budget& budget = {})
{
    const auto size = cardinality(family, n);
    if (size > budget.max_atoms)
        throw BudgetError(family.name() + " at n=" + std::to_string(n) + " has " + std::to_string(size) +
                          " elements, above the limit of " + std::to_string(budget.max_atoms));
    std::vector<GroupElement> out;
    out.reserve(size);
    if (auto iv = interval_of(family, n)) {
        for (auto a = iv->first; a <= iv->second; ++a)
            out.push_back(GroupElement::integer(a));
        return out;
    }
    const auto m = static_cast<std::int64_t>(family.resolve(n).second);
    const int width = static_cast<int>(m + 1);
    for (std::int64_t a = m; a <= 2 * m; ++a) {
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << width); ++mask) {
            LampSet lamps;
            for (int bit = 0; bit < width; ++bit)
                if (mask >> bit & 1U)
                    lamps.push_back(m + bit);
            out.push_back(GroupElement::lamp(a, std::move(lamps)));
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Memoized enumerations keyed by the resolved base family and index.
class ElementCache
{
public:
    explicit ElementCache(Budget budget = {}) : budget_(budget) {}

    const std::vector<GroupElement>& get(const FolnerFamily& family, std::uint64_t n)
    {
        auto [base, m] = family.resolve(n);
        auto key = std::pair{base->kind(), m};
        auto it = store_.find(key);
        if (it == store_.end())
            it = store_.emplace(key, enumerate(*base, m, budget_)).first;
        return it->second;
    }

    const Budget& budget() const noexcept { return budget_; }

private:
    Budget budget_;
    std::map<std::pair<FolnerFamily::Kind, std::uint64_t>, std::vector<GroupElement>> store_;
};

namespace detail {

inline std::vector<GroupElement> left_translate_all(const std::vector<GroupElement>& ks,
                                                    const std::vector<GroupElement>& set)
{
    std::vector<GroupElement> out;
    out.reserve(ks.size() * set.size());
    for (const auto& k : ks)
        for (const auto& f : set)
            out.push_back(multiply(k, f));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline void check_defect_inputs(const FolnerFamily& family, const std::vector<GroupElement>& k)
{
    if (k.empty())
        throw DomainError("defect needs a nonempty set K");
    for (const auto& g : k)
        if (g.kind() != family.group())
            throw DescriptorMismatch("defect: K and the family live in different groups");
}

} // namespace detail

/// One-sided Folner defect |K F_n \ F_n| / |F_n|. For K = {g} this equals
/// |F_n \ g^-1 F_n| / |F_n|.
inline Rational defect(const FolnerFamily& family, std::uint64_t n, const std::vector<GroupElement>& k,
                       const Budget& budget = {})
{
    detail::check_defect_inputs(family, k);
    auto f = enumerate(family, n, budget);
    auto kf = detail::left_translate_all(k, f);
    std::vector<GroupElement> gained;
    std::set_difference(kf.begin(), kf.end(), f.begin(), f.end(), std::back_inserter(gained));
    return make_rational(static_cast<std::int64_t>(gained.size()), static_cast<std::int64_t>(f.size()));
}

/// |K F_n symdiff F_n| / |F_n|.
inline Rational symmetric_defect(const FolnerFamily& family, std::uint64_t n, const std::vector<GroupElement>& k,
                                 const Budget& budget = {})
{
    detail::check_defect_inputs(family, k);
    auto f = enumerate(family, n, budget);
    auto kf = detail::left_translate_all(k, f);
    std::vector<GroupElement> diff;
    std::set_symmetric_difference(kf.begin(), kf.end(), f.begin(), f.end(), std::back_inserter(diff));
    return make_rational(static_cast<std::int64_t>(diff.size()), static_cast<std::int64_t>(f.size()));
}

/// Upper bound on the lamp_box defect of g = sigma^c tau_d:
/// sum over d' in {c} u d of |(d' + A_n) \ A_n| / |A_n| with A_n = {n..2n}.
inline Rational lamp_defect_bound(const GroupElement& g, std::uint64_t n)
{
    if (g.kind() != GroupKind::Lamplighter)
        throw DescriptorMismatch("lamp_defect_bound needs a lamplighter element");
    if (n == 0)
        throw DomainError("Folner index must be at least 1");
    LampSet sites = g.lamps();
    if (!std::binary_search(sites.begin(), sites.end(), g.shift()))
        sites.insert(std::upper_bound(sites.begin(), sites.end(), g.shift()), g.shift());
    const auto size = static_cast<std::int64_t>(n) + 1;
    std::int64_t total = 0;
    for (auto d : sites) {
        // |(d + A) \ A| for an interval A of length `size`
        total += std::min<std::int64_t>(d < 0 ? -d : d, size);
    }
    return make_rational(total, size);
}

inline FolnerFamily interleave(std::vector<FolnerFamily> families)
{
    return FolnerFamily::interleaved(std::move(families));
}

} // namespace meandyn
