#include "oracles.hpp"

#include <meandyn/folner.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace meandyn;

namespace {

// |F \ g^-1 F| / |F| counted through the permutation oracle.
Rational oracle_defect(const std::vector<GroupElement>& f, const GroupElement& g)
{
    auto gm = oracle::word(g.shift(), g.lamps());
    std::set<GroupElement> fs(f.begin(), f.end());
    std::int64_t escaped = 0;
    for (const auto& h : f) {
        auto prod = oracle::compose(gm, oracle::word(h.shift(), h.lamps()));
        auto [a, lamps] = oracle::read_normal_form(prod, 80);
        if (!fs.contains(GroupElement::lamp(a, lamps)))
            ++escaped;
    }
    return make_rational(escaped, static_cast<std::int64_t>(f.size()));
}

} // namespace

TEST(Folner, EnumerateZFamilies)
{
    auto f = enumerate(FolnerFamily::z_initial(), 3);
    ASSERT_EQ(f.size(), 3u);
    EXPECT_EQ(f.front(), GroupElement::integer(0));
    EXPECT_EQ(f.back(), GroupElement::integer(2));
    EXPECT_EQ(enumerate(FolnerFamily::z_centered(), 2).size(), 5u);
    auto s = enumerate(FolnerFamily::z_shifted(), 4);
    EXPECT_EQ(s.front(), GroupElement::integer(4));
    EXPECT_EQ(s.back(), GroupElement::integer(8));
}

TEST(Folner, Cardinalities)
{
    EXPECT_EQ(cardinality(FolnerFamily::lamp_box(), 1), 8u);
    EXPECT_EQ(cardinality(FolnerFamily::lamp_box(), 4), 160u);
    EXPECT_EQ(cardinality(FolnerFamily::z_centered(), 3), 7u);
    for (std::uint64_t n = 1; n <= 6; ++n) {
        auto f = enumerate(FolnerFamily::lamp_box(), n);
        EXPECT_EQ(f.size(), cardinality(FolnerFamily::lamp_box(), n));
        EXPECT_TRUE(std::adjacent_find(f.begin(), f.end()) == f.end());
        for (const auto& g : f) {
            EXPECT_GE(g.shift(), static_cast<std::int64_t>(n));
            EXPECT_LE(g.shift(), static_cast<std::int64_t>(2 * n));
            for (auto b : g.lamps()) {
                EXPECT_GE(b, static_cast<std::int64_t>(n));
                EXPECT_LE(b, static_cast<std::int64_t>(2 * n));
            }
        }
    }
}

TEST(Folner, LampBoxSigmaDefect)
{
    auto sigma = GroupElement::lamp(1);
    EXPECT_EQ(defect(FolnerFamily::lamp_box(), 9, {sigma}), Rational(1, 10));
    auto f = enumerate(FolnerFamily::lamp_box(), 5);
    EXPECT_EQ(defect(FolnerFamily::lamp_box(), 5, {sigma}), oracle_defect(f, sigma));
}

TEST(Folner, DefectMatchesOracleOnRandomElements)
{
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> shift(-3, 3), bit(0, 1);
    const std::uint64_t n = 4;
    auto f = enumerate(FolnerFamily::lamp_box(), n);
    for (int i = 0; i < 25; ++i) {
        LampSet b;
        for (int s = -2; s <= 6; ++s)
            if (bit(rng))
                b.push_back(s);
        auto g = GroupElement::lamp(shift(rng), b);
        auto d = defect(FolnerFamily::lamp_box(), n, {g});
        EXPECT_EQ(d, oracle_defect(f, g)) << to_string(g);
        EXPECT_LE(d, lamp_defect_bound(g, n)) << to_string(g);
    }
}

TEST(Folner, OneSidedAndSymmetricDefect)
{
    auto one = GroupElement::integer(1);
    EXPECT_EQ(defect(FolnerFamily::z_initial(), 10, {one}), Rational(1, 10));
    EXPECT_EQ(symmetric_defect(FolnerFamily::z_initial(), 10, {one}), Rational(1, 5));
    EXPECT_EQ(defect(FolnerFamily::z_initial(), 10, {GroupElement::integer(0)}), 0);
}

TEST(Folner, DefectTendsToZero)
{
    std::vector<GroupElement> k{GroupElement::lamp(1), GroupElement::lamp(0, {0}), GroupElement::lamp(-1, {2})};
    Rational prev = 10;
    for (std::uint64_t n = 2; n <= 10; n += 2) {
        auto d = defect(FolnerFamily::lamp_box(), n, k);
        EXPECT_LE(d, prev);
        prev = d;
    }
    EXPECT_LT(prev, Rational(1, 2));
    EXPECT_LT(defect(FolnerFamily::z_centered(), 1000, {GroupElement::integer(5)}), Rational(1, 100));
}

TEST(Folner, DefectBoundExamples)
{
    EXPECT_EQ(lamp_defect_bound(GroupElement::lamp(0, {0}), 9), 0);
    EXPECT_EQ(lamp_defect_bound(GroupElement::lamp(0, {-1}), 9), Rational(1, 10));
    EXPECT_EQ(lamp_defect_bound(GroupElement::lamp(1), 9), Rational(1, 10));
    EXPECT_THROW(lamp_defect_bound(GroupElement::integer(1), 9), DescriptorMismatch);
}

TEST(Folner, DefectBoundDominatesExhaustively)
{
    for (std::uint64_t n = 1; n <= 4; ++n)
        for (const auto& g : enumerate(FolnerFamily::lamp_box(), 2)) {
            auto h = inverse(g);
            EXPECT_LE(defect(FolnerFamily::lamp_box(), n, {g}), lamp_defect_bound(g, n));
            EXPECT_LE(defect(FolnerFamily::lamp_box(), n, {h}), lamp_defect_bound(h, n));
        }
}

TEST(Folner, Interleave)
{
    auto f = interleave({FolnerFamily::z_initial(), FolnerFamily::z_centered(), FolnerFamily::z_shifted()});
    EXPECT_EQ(f.name(), "interleaved[z_initial,z_centered,z_shifted]");
    // n = k*3 + i, i in 1..3, with k = 0 read as k = 1
    EXPECT_EQ(interval_of(f, 1), (std::pair<std::int64_t, std::int64_t>{0, 0}));
    EXPECT_EQ(interval_of(f, 2), (std::pair<std::int64_t, std::int64_t>{-1, 1}));
    EXPECT_EQ(interval_of(f, 3), (std::pair<std::int64_t, std::int64_t>{1, 2}));
    EXPECT_EQ(interval_of(f, 4), (std::pair<std::int64_t, std::int64_t>{0, 0}));
    EXPECT_EQ(interval_of(f, 5), (std::pair<std::int64_t, std::int64_t>{-1, 1}));
    EXPECT_EQ(interval_of(f, 7), (std::pair<std::int64_t, std::int64_t>{0, 1}));
    EXPECT_EQ(interval_of(f, 8), (std::pair<std::int64_t, std::int64_t>{-2, 2}));
    auto two = interleave({FolnerFamily::z_initial(), FolnerFamily::z_centered()});
    EXPECT_EQ(interval_of(two, 4), (std::pair<std::int64_t, std::int64_t>{-1, 1}));
    EXPECT_THROW(interleave({FolnerFamily::z_initial(), FolnerFamily::lamp_box()}), DescriptorMismatch);
    EXPECT_THROW(interleave({}), DomainError);
}

TEST(Folner, InterleaveOfFolnerIsFolner)
{
    auto f = interleave({FolnerFamily::z_initial(), FolnerFamily::z_shifted()});
    EXPECT_LT(defect(f, 2000, {GroupElement::integer(1)}), Rational(1, 100));
    EXPECT_LT(defect(f, 2001, {GroupElement::integer(1)}), Rational(1, 100));
}

TEST(Folner, Subsequence)
{
    auto f = FolnerFamily::subsequence(FolnerFamily::z_centered(), {2, 5, 9});
    EXPECT_EQ(interval_of(f, 2), (std::pair<std::int64_t, std::int64_t>{-5, 5}));
    EXPECT_EQ(cardinality(f, 3), 19u);
    EXPECT_THROW(interval_of(f, 4), DomainError);
    EXPECT_THROW(FolnerFamily::subsequence(FolnerFamily::z_centered(), {3, 3}), DomainError);
    EXPECT_THROW(FolnerFamily::subsequence(FolnerFamily::z_centered(), {0}), DomainError);
}

TEST(Folner, IndexZeroRejected)
{
    EXPECT_THROW(cardinality(FolnerFamily::z_initial(), 0), DomainError);
}

TEST(Folner, BudgetEnforced)
{
    EXPECT_THROW(enumerate(FolnerFamily::lamp_box(), 20), BudgetError);
    EXPECT_THROW(enumerate(FolnerFamily::lamp_box(), 6, Budget{100}), BudgetError);
    EXPECT_NO_THROW(enumerate(FolnerFamily::lamp_box(), 6, Budget{896}));
}
