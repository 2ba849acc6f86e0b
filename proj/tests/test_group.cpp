#include "oracles.hpp"

#include <meandyn/folner.hpp>
#include <meandyn/group.hpp>
#include <meandyn/space.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace meandyn;

namespace {

GroupElement via_oracle(const GroupElement& g, const GroupElement& h)
{
    auto f = oracle::compose(oracle::word(g.shift(), g.lamps()), oracle::word(h.shift(), h.lamps()));
    auto [a, lamps] = oracle::read_normal_form(f, 40);
    return GroupElement::lamp(a, lamps);
}

} // namespace

TEST(Group, Identity)
{
    EXPECT_EQ(identity(GroupKind::Integers), GroupElement::integer(0));
    EXPECT_EQ(identity(GroupKind::Lamplighter), GroupElement::lamp(0));
    auto g = GroupElement::lamp(2, {3});
    EXPECT_EQ(multiply(identity(GroupKind::Lamplighter), g), g);
    EXPECT_EQ(multiply(g, identity(GroupKind::Lamplighter)), g);
}

TEST(Group, MultiplyIntegers)
{
    EXPECT_EQ(multiply(GroupElement::integer(3), GroupElement::integer(5)), GroupElement::integer(8));
}

TEST(Group, MultiplyLamplighterMatchesPermutationOracle)
{
    auto g = GroupElement::lamp(1, {0});
    auto h = GroupElement::lamp(2, {1});
    // frozen from the permutation oracle
    EXPECT_EQ(via_oracle(g, h), GroupElement::lamp(3, {1, 2}));
    EXPECT_EQ(multiply(g, h), GroupElement::lamp(3, {1, 2}));
}

TEST(Group, TauIsAnInvolution)
{
    auto t = GroupElement::lamp(0, {0});
    EXPECT_EQ(multiply(t, t), GroupElement::lamp(0));
}

TEST(Group, Inverse)
{
    EXPECT_EQ(inverse(GroupElement::integer(4)), GroupElement::integer(-4));
    auto g = GroupElement::lamp(2, {3});
    EXPECT_EQ(inverse(g), GroupElement::lamp(-2, {1}));
    EXPECT_EQ(via_oracle(g, GroupElement::lamp(-2, {1})), GroupElement::lamp(0));
    EXPECT_EQ(inverse(identity(GroupKind::Lamplighter)), identity(GroupKind::Lamplighter));
}

TEST(Group, MixedGroupsRejected)
{
    EXPECT_THROW(multiply(GroupElement::integer(1), GroupElement::lamp(1)), DescriptorMismatch);
}

TEST(Group, NonCanonicalLampsRejected)
{
    EXPECT_THROW(GroupElement::lamp(0, {2, 1}), DomainError);
    EXPECT_THROW(GroupElement::lamp(0, {1, 1}), DomainError);
}

TEST(Group, OverflowDetected)
{
    auto big = GroupElement::integer(std::numeric_limits<std::int64_t>::max());
    EXPECT_THROW(multiply(big, GroupElement::integer(1)), OverflowError);
    EXPECT_THROW(inverse(GroupElement::integer(std::numeric_limits<std::int64_t>::min())), OverflowError);
}

TEST(Group, AssociativityExhaustiveLampBox3)
{
    // n=3 has 64 elements; 64^3 triples run in well under a second
    auto f3 = enumerate(FolnerFamily::lamp_box(), 3);
    std::size_t checked = 0;
    for (const auto& g : f3)
        for (const auto& h : f3)
            for (const auto& k : f3) {
                ASSERT_EQ(multiply(multiply(g, h), k), multiply(g, multiply(h, k)));
                ++checked;
            }
    EXPECT_EQ(checked, 64u * 64u * 64u);
}

TEST(Group, ProductAgreesWithOracleOnRandomElements)
{
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> shift(-6, 6), bit(0, 1);
    auto random_lamp = [&] {
        LampSet b;
        for (int s = -5; s <= 5; ++s)
            if (bit(rng))
                b.push_back(s);
        return GroupElement::lamp(shift(rng), b);
    };
    for (int i = 0; i < 300; ++i) {
        auto g = random_lamp();
        auto h = random_lamp();
        ASSERT_EQ(multiply(g, h), via_oracle(g, h)) << to_string(g) << " * " << to_string(h);
        ASSERT_EQ(multiply(g, inverse(g)), GroupElement::lamp(0));
    }
}

TEST(Group, TauTranslatesCommute)
{
    for (int b = -4; b <= 4; ++b)
        for (int c = -4; c <= 4; ++c) {
            auto x = GroupElement::lamp(0, {b});
            auto y = GroupElement::lamp(0, {c});
            EXPECT_EQ(multiply(x, y), multiply(y, x));
        }
}

TEST(Group, NormalFormFaithfulOnTruncatedSpace)
{
    // Two elements are equal iff they act identically on a truncation that
    // covers every coordinate involved.
    auto space = Space::one_point(2, ActionKind::Lamplighter);
    auto elems = enumerate(FolnerFamily::lamp_box(), 3);
    auto pts = truncate(space, 12);
    for (std::size_t i = 0; i < elems.size(); ++i)
        for (std::size_t j = 0; j < elems.size(); ++j) {
            bool same_action = true;
            for (const auto& p : pts)
                if (act(space, elems[i], p) != act(space, elems[j], p)) {
                    same_action = false;
                    break;
                }
            ASSERT_EQ(same_action, i == j);
        }
}

TEST(Group, TextRoundTrip)
{
    auto g = GroupElement::lamp(-3, {-1, 4, 9});
    EXPECT_EQ(to_string(g), "s^-3 t{-1,4,9}");
    EXPECT_EQ(parse_element(to_string(g), GroupKind::Lamplighter), g);
    EXPECT_EQ(parse_element("t{2,1}", GroupKind::Lamplighter), GroupElement::lamp(0, {1, 2}));
    EXPECT_EQ(parse_element("s^7", GroupKind::Integers), GroupElement::integer(7));
    EXPECT_EQ(parse_element("e", GroupKind::Lamplighter), GroupElement::lamp(0));
    EXPECT_THROW(parse_element("s^x", GroupKind::Integers), ParseError);
    EXPECT_THROW(parse_element("t{1,1}", GroupKind::Lamplighter), ParseError);
    EXPECT_THROW(parse_element("t{1}", GroupKind::Integers), DescriptorMismatch);
}
