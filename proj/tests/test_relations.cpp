#include <meandyn/relations.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace meandyn;

namespace {

constexpr int up = 1;
constexpr int down = 0;

Space dock()
{
    return Space::one_point(1, ActionKind::Translate);
}

Space lamplighter_space()
{
    return Space::one_point(2, ActionKind::Lamplighter);
}

Space three_glued()
{
    return Space::two_point(3,
                            {{Point::plus_inf(1), Point::plus_inf(3)}, {Point::minus_inf(2), Point::minus_inf(3)}});
}

std::int64_t isqrt(std::int64_t k)
{
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(k)));
    while (r * r > k)
        --r;
    while ((r + 1) * (r + 1) <= k)
        ++r;
    return r;
}

SearchParams params(Window w, Window dens = {1, 200})
{
    SearchParams p;
    p.radii = {0.5, 0.4, 0.3};
    p.window = w;
    p.density_window = dens;
    return p;
}

// limit classes A B C D, orbit classes for copies 1..3
FiniteModel glued_model()
{
    return FiniteModel({{"A", true}, {"B", true}, {"C", true}, {"D", true}, {"O1", false, 0, 1},
                        {"O2", false, 2, 3}, {"O3", false, 2, 1}},
                       {{0, 1, 2, 3, 4, 5, 6}});
}

FiniteModel two_point_model()
{
    return FiniteModel({{"-inf", true}, {"+inf", true}, {"O", false, 0, 1}}, {{0, 1, 2}});
}

bool is_equivalence_closed(const FiniteModel& m, const Relation& r)
{
    const int c = static_cast<int>(m.size());
    auto cls = [&](int i) { return m.classes()[static_cast<std::size_t>(i)]; };
    for (int a = 0; a < c; ++a) {
        if (!r.related(a, a))
            return false;
        for (int b = 0; b < c; ++b) {
            if (r.related(a, b) != r.related(b, a))
                return false;
            if (!r.related(a, b))
                continue;
            for (int d = 0; d < c; ++d)
                if (r.related(b, d) && !r.related(a, d))
                    return false;
            for (const auto& g : m.generators())
                if (!r.related(g[static_cast<std::size_t>(a)], g[static_cast<std::size_t>(b)]))
                    return false;
            if (!r.related(cls(a).minus_end, cls(b).minus_end) || !r.related(cls(a).plus_end, cls(b).plus_end))
                return false;
            if (cls(b).limit && !cls(a).limit &&
                (!r.related(cls(a).minus_end, b) || !r.related(cls(a).plus_end, b)))
                return false;
        }
    }
    return true;
}

} // namespace

TEST(Relations, LamplighterCornerPairIsJointSensitive)
{
    auto x = lamplighter_space();
    WitnessFamily w{"adjacent", [](std::int64_t k) { return PointPair{Point::integer(k, up), Point::integer(k + 1, up)}; }};
    PointPair target{Point::inf(up), Point::inf(down)};
    auto c = detect_srjms_f(x, target, FolnerFamily::lamp_box(), {w}, params({1, 8}));
    EXPECT_EQ(c.verdict, Verdict::Positive) << c.note;
    EXPECT_GE(c.threshold, Rational(1, 20));
    for (const auto& r : c.witnesses) {
        if (r.index >= 5) {
            EXPECT_GE(r.density, c.threshold);
        }
    }

    auto s = detect_swsm_f(x, target, FolnerFamily::lamp_box(), {w}, {0.2, 0.1}, params({1, 8}));
    EXPECT_EQ(s.verdict, c.verdict);
}

TEST(Relations, IsolatedDiagonalIsNegative)
{
    auto x = dock();
    PointPair target{Point::integer(3), Point::integer(3)};
    auto c = detect_srjms_f(x, target, FolnerFamily::z_initial(), {}, params({1, 200}));
    EXPECT_EQ(c.verdict, Verdict::Negative);
    ASSERT_FALSE(c.witnesses.empty());
    for (const auto& r : c.witnesses)
        EXPECT_LE(r.density, make_rational(1, static_cast<std::int64_t>(r.n)));
}

TEST(Relations, FixedPointHasDensityOne)
{
    auto x = dock();
    auto c = detect_srjms_f(x, {Point::inf(), Point::inf()}, FolnerFamily::z_initial(), {}, params({1, 50}));
    EXPECT_EQ(c.verdict, Verdict::Positive);
    EXPECT_EQ(c.threshold, 1);
}

TEST(Relations, SwsmRejectsDiagonal)
{
    auto x = three_glued();
    EXPECT_THROW(detect_swsm_f(x, {Point::plus_inf(3), Point::plus_inf(1)}, FolnerFamily::z_initial(), {}, {0.1}),
                 DomainError);
}

TEST(Relations, TwoPointEndsAreSensitive)
{
    auto x = Space::two_point(1);
    PointPair target{Point::plus_inf(1), Point::minus_inf(1)};
    WitnessFamily fixed{"fixed", [](std::int64_t k) { return PointPair{Point::integer(-k, 1), Point::minus_inf(1)}; }};
    WitnessFamily matched{"matched",
                          [](std::int64_t k) { return PointPair{Point::integer(-isqrt(k), 1), Point::minus_inf(1)}; }};

    auto q = detect_qrms_f(x, target, FolnerFamily::z_initial(), {fixed}, params({1, 20}));
    EXPECT_EQ(q.verdict, Verdict::Positive) << q.note;
    auto s = detect_srjms_f(x, target, FolnerFamily::z_initial(), {matched}, params({1, 200}));
    EXPECT_EQ(s.verdict, Verdict::Positive) << s.note;
    auto w = detect_swsm_f(x, target, FolnerFamily::z_initial(), {matched}, {0.1, 0.05}, params({1, 200}));
    EXPECT_EQ(w.verdict, Verdict::Positive) << w.note;
    auto b = detect_qrms_banach(x, target, FolnerFamily::z_initial(), 20,
                                default_translates(GroupKind::Integers, 20), {fixed}, params({1, 20}));
    EXPECT_EQ(b.verdict, Verdict::Positive) << b.note;
    EXPECT_GE(b.threshold, q.threshold);
}

TEST(Relations, GluedPositives)
{
    auto x = three_glued();
    WitnessFamily bd{"bd", [](std::int64_t k) { return PointPair{Point::integer(-k, 3), Point::integer(-k, 2)}; }};
    auto c = detect_qrms_f(x, {Point::plus_inf(1), Point::plus_inf(2)}, FolnerFamily::z_initial(), {bd},
                           params({1, 20}));
    EXPECT_EQ(c.verdict, Verdict::Positive) << c.note;

    WitnessFamily ac{"ac", [](std::int64_t k) { return PointPair{Point::integer(k, 1), Point::integer(k, 3)}; }};
    auto h = detect_qrms_f(x, {Point::minus_inf(1), Point::minus_inf(2)}, FolnerFamily::z_centered(), {ac},
                           params({1, 20}));
    EXPECT_EQ(h.verdict, Verdict::Positive) << h.note;
    EXPECT_LT(to_double(h.threshold), 0.55);
    EXPECT_GT(to_double(h.threshold), 0.4);
}

TEST(Relations, NotRegionallyProximal)
{
    auto x = three_glued();
    PointPair target{Point::minus_inf(1), Point::plus_inf(2)};
    auto q = detect_qrp(x, target, integer_window(120));
    EXPECT_EQ(q.verdict, Verdict::Negative);
    auto b = detect_qrms_banach(x, target, FolnerFamily::z_initial(), 20, default_translates(GroupKind::Integers, 20),
                                {}, params({1, 20}));
    EXPECT_EQ(b.verdict, Verdict::Negative);
    // diagonal pairs are always regionally proximal
    EXPECT_EQ(detect_qrp(x, {Point::plus_inf(2), Point::plus_inf(2)}, integer_window(5)).verdict, Verdict::Positive);
    EXPECT_EQ(detect_qrp(Space::two_point(1), {Point::plus_inf(1), Point::minus_inf(1)}, integer_window(120)).verdict,
              Verdict::Positive);
}

TEST(Relations, Proximal)
{
    auto z = Space::two_point(1);
    auto d = detect_proximal(z, {Point::integer(4, 1), Point::integer(4, 1)}, integer_window(3));
    EXPECT_EQ(d.min_distance, 0);
    EXPECT_EQ(d.argmin, GroupElement::integer(0));
    EXPECT_TRUE(d.evidence);
    auto ends = detect_proximal(z, {Point::plus_inf(1), Point::minus_inf(1)}, integer_window(200));
    EXPECT_EQ(ends.min_distance, 1);
    EXPECT_FALSE(ends.evidence);
    Rational prev = 2;
    for (std::int64_t w : {10, 100, 1000}) {
        auto r = detect_proximal(z, {Point::integer(0, 1), Point::minus_inf(1)}, integer_window(w));
        EXPECT_LT(r.min_distance, prev);
        EXPECT_EQ(r.argmin, GroupElement::integer(-w));
        prev = r.min_distance;
    }
}

TEST(Relations, ForwardClosureNegative)
{
    auto x = three_glued();
    auto u1 = Neighborhood::points({Point::minus_inf(1)}, {Tail{1, -1, -1}});
    auto u2 = Neighborhood::points({Point::minus_inf(2)}, {Tail{2, -1, -1}, Tail{3, -1, -1}});
    auto u = Neighborhood::product(u1, u2);
    std::vector<std::uint64_t> ns(50);
    std::iota(ns.begin(), ns.end(), 1);
    auto r = forward_closure_negative(x, {Point::minus_inf(1), Point::minus_inf(2)}, u, FolnerFamily::z_initial(), ns,
                                      200);
    EXPECT_EQ(r.certificate.verdict, Verdict::Negative);
    EXPECT_TRUE(r.closure_holds);
    EXPECT_GT(r.separation, 1.0);
    EXPECT_EQ(r.elements, 50u);
    EXPECT_EQ(r.pairs_checked, 50u * 1207u * 1207u);

    // whole space: closure is vacuous but the diagonal is inside
    auto all = Neighborhood::product(Neighborhood::everything(1), Neighborhood::everything(1));
    auto v = forward_closure_negative(x, {Point::minus_inf(1), Point::minus_inf(2)}, all, FolnerFamily::z_initial(),
                                      {10}, 20);
    EXPECT_EQ(v.certificate.verdict, Verdict::Inconclusive);

    auto z = Space::two_point(1);
    auto w = Neighborhood::points({Point::minus_inf(1)}, {Tail{1, -1, -1}});
    auto a = forward_closure_negative(z, {Point::minus_inf(1), Point::minus_inf(1)}, Neighborhood::product(w, w),
                                      FolnerFamily::z_initial(), {1, 5, 10}, 30);
    EXPECT_TRUE(a.closure_holds);
    EXPECT_EQ(a.certificate.verdict, Verdict::Inconclusive);

    EXPECT_THROW(forward_closure_negative(x, {Point::minus_inf(1), Point::minus_inf(2)}, u, FolnerFamily::z_initial(),
                                          {50}, 20),
                 DomainError);
    EXPECT_THROW(forward_closure_negative(x, {Point::minus_inf(1), Point::minus_inf(2)}, u,
                                          FolnerFamily::z_centered(), {5}, 20),
                 DomainError);
}

TEST(Relations, ClosureFailureIsReported)
{
    // positive tails are not closed under forward shifts
    auto z = Space::two_point(1);
    auto w = Neighborhood::points({Point::plus_inf(1)}, {Tail{1, 1, 5}});
    auto a = forward_closure_negative(z, {Point::plus_inf(1), Point::plus_inf(1)}, Neighborhood::product(w, w),
                                      FolnerFamily::z_initial(), {10}, 30);
    EXPECT_FALSE(a.closure_holds);
    EXPECT_GT(a.violations, 0u);
}

TEST(Relations, IcerEmptyIsDiagonal)
{
    auto m = glued_model();
    auto r = icer_hull(m, {});
    EXPECT_EQ(r.pairs.size(), m.size());
}

TEST(Relations, IcerTwoPoint)
{
    auto m = two_point_model();
    auto r = icer_hull(m, {{1, 0}});
    std::vector<ClassPair> expect{{0, 0}, {0, 1}, {1, 0}, {1, 1}, {2, 2}};
    EXPECT_EQ(r.pairs, expect);
    EXPECT_TRUE(is_equivalence_closed(m, r));
}

TEST(Relations, IcerGlued)
{
    auto m = glued_model();
    auto r = icer_hull(m, {{0, 1}, {1, 2}, {2, 3}});
    std::vector<ClassPair> expect;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b)
            expect.emplace_back(a, b);
    for (int o = 4; o < 7; ++o)
        expect.emplace_back(o, o);
    std::sort(expect.begin(), expect.end());
    EXPECT_EQ(r.pairs, expect);
    EXPECT_TRUE(is_equivalence_closed(m, r));
}

TEST(Relations, IcerOrbitRules)
{
    auto m = glued_model();
    // an orbit class related to a limit pulls in both of its ends
    auto r = icer_hull(m, {{m.index("O1"), m.index("C")}});
    EXPECT_TRUE(r.related(m.index("A"), m.index("B")));
    EXPECT_TRUE(r.related(m.index("A"), m.index("C")));
    EXPECT_FALSE(r.related(m.index("D"), m.index("C")));
    // two orbit classes relate their aligned ends
    auto s = icer_hull(m, {{m.index("O1"), m.index("O2")}});
    EXPECT_TRUE(s.related(m.index("A"), m.index("C")));
    EXPECT_TRUE(s.related(m.index("B"), m.index("D")));
    EXPECT_FALSE(s.related(m.index("A"), m.index("B")));
    EXPECT_TRUE(is_equivalence_closed(m, s));
}

TEST(Relations, IcerCorollaryOnModels)
{
    auto m = glued_model();
    std::vector<ClassPair> rms, rp;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            bool ad = (a == 0 && b == 3) || (a == 3 && b == 0);
            if (!ad) {
                rms.emplace_back(a, b);
                rp.emplace_back(a, b);
            }
        }
    EXPECT_EQ(icer_hull(m, rms).pairs, icer_hull(m, rp).pairs);
}

TEST(Relations, ModelValidation)
{
    EXPECT_THROW(FiniteModel({{"A", true}, {"O", false, 0, 5}}, {}), DomainError);
    EXPECT_THROW(FiniteModel({{"A", true}, {"B", true}}, {{0, 0}}), DomainError);
    EXPECT_THROW(icer_hull(two_point_model(), {{0, 9}}), DomainError);
    EXPECT_THROW(two_point_model().index("Z"), DomainError);
}

TEST(Relations, LamplighterIsolatedDiagonalBoundedByShiftCount)
{
    auto x = lamplighter_space();
    PointPair p{Point::integer(-2, down), Point::integer(-2, down)};
    SearchParams sp = params({1, 8});
    auto c = detect_qrms_f(x, p, FolnerFamily::lamp_box(), {}, sp);
    EXPECT_EQ(c.verdict, Verdict::Negative) << c.note;
    for (const auto& r : c.witnesses)
        EXPECT_LE(r.density, make_rational(1, static_cast<std::int64_t>(r.n + 1)));
}
