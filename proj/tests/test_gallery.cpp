#include <meandyn/gallery.hpp>

#include <gtest/gtest.h>

#include <regex>
#include <set>

using namespace meandyn;

namespace {

class GalleryQuick : public ::testing::TestWithParam<std::string>
{
};

std::string row_summary(const Report& r)
{
    std::string out;
    for (const auto& row : r.rows)
        out += row.id + "=" + std::string(to_string(row.status)) + " " + row.detail + "\n";
    return out;
}

} // namespace

TEST(Gallery, NamesAndProfiles)
{
    EXPECT_EQ(gallery_names().size(), 5u);
    for (const auto& n : gallery_names())
        EXPECT_EQ(build(n).name, n);
    EXPECT_THROW(build("three-point"), DomainError);
    EXPECT_EQ(profile("quick").lamp_n, 8u);
    EXPECT_EQ(profile("full").lamp_n, 12u);
    EXPECT_EQ(profile("full").z_window, 1000u);
    EXPECT_THROW(profile("huge"), DomainError);
}

TEST_P(GalleryQuick, EveryRowMatches)
{
    auto e = build(GetParam());
    auto rep = verify(e, profile("quick"));
    ASSERT_EQ(rep.rows.size(), e.rows.size());
    EXPECT_TRUE(rep.all_match()) << row_summary(rep);
    EXPECT_FALSE(rep.any_mismatch());
}

TEST_P(GalleryQuick, RowIdsUniqueAndClaimsPlain)
{
    auto e = build(GetParam());
    std::set<std::string> ids;
    std::regex located(R"((Example|Section|Theorem|Lemma|Prop)\s*\d)");
    for (const auto& row : e.rows) {
        EXPECT_TRUE(ids.insert(row.id).second) << row.id;
        EXPECT_FALSE(std::regex_search(row.claim, located)) << row.claim;
        EXPECT_FALSE(row.claim.empty());
    }
}

TEST_P(GalleryQuick, CrossDetectorProperties)
{
    auto e = build(GetParam());
    auto p = profile("quick");
    DetectorCache cache;
    for (const auto& rep : {li_yu_agreement(e, p, cache), inclusion_chain(e, p, cache),
                            diagonal_support_law(e, p, cache)}) {
        EXPECT_TRUE(rep.holds()) << e.name << " " << rep.name << " failures " << rep.failures();
        for (const auto& c : rep.cases)
            EXPECT_TRUE(c.ok) << rep.name << " " << c.family << " " << to_string(c.pair) << " " << c.detail;
    }
}

INSTANTIATE_TEST_SUITE_P(Systems, GalleryQuick,
                         ::testing::Values("literature-dock", "lamplighter-z", "lamplighter", "two-point",
                                           "three-glued"),
                         [](const auto& info) {
                             auto s = info.param;
                             std::replace(s.begin(), s.end(), '-', '_');
                             return s;
                         });

TEST(Gallery, WitnessSwapsRegistered)
{
    auto e = build("three-glued");
    auto a = Point::minus_inf(1), b = Point::plus_inf(1);
    EXPECT_EQ(e.fixed_witnesses({b, a}).size(), 1u);
    EXPECT_EQ(e.fixed_witnesses({a, b}).size(), 1u);
    auto w = e.fixed_witnesses({a, b}).front().at(7);
    EXPECT_EQ(w.first, a);
    EXPECT_EQ(w.second, Point::integer(-7, 1));
    // -inf2 and -inf3 are the same point, so both spellings find the witness.
    EXPECT_EQ(e.matched_witnesses({b, Point::minus_inf(3)}).size(), 1u);
    EXPECT_TRUE(e.matched_witnesses({Point::integer(0, 1), b}).empty());
}

TEST(Gallery, WrongClaimIsReportedAsMismatch)
{
    auto e = build("three-glued");
    auto a = Point::minus_inf(1), d = Point::plus_inf(2);
    e.rows = {detail::membership_row("bad", "(-inf1, +inf2) in Q_rms^F'", CertKind::QrmsF, "z_centered", {{a, d}}, {}),
              detail::membership_row("bad_out", "(+inf1, +inf1) outside Q_rms^F'", CertKind::QrmsF, "z_centered", {},
                                     {{Point::plus_inf(1), Point::plus_inf(1)}})};
    auto rep = verify(e, profile("quick"));
    EXPECT_EQ(rep.rows[0].status, RowStatus::Mismatch) << rep.rows[0].detail;
    EXPECT_EQ(rep.rows[1].status, RowStatus::Mismatch) << rep.rows[1].detail;
    EXPECT_TRUE(rep.any_mismatch());
}

TEST(Gallery, StructuralNegativesForExcludedPairs)
{
    auto e = build("three-glued");
    auto p = profile("quick");
    DetectorCache cache;
    auto a = Point::minus_inf(1), c = Point::minus_inf(2), d = Point::plus_inf(2);
    auto fc = structural_negative(e, {a, c}, e.family("z_initial"), p, cache);
    ASSERT_TRUE(fc);
    EXPECT_EQ(fc->kind, CertKind::NegativeForwardClosure);
    auto qrp = structural_negative(e, {a, d}, e.family("z_centered"), p, cache);
    ASSERT_TRUE(qrp);
    EXPECT_EQ(qrp->kind, CertKind::Qrp);
    // Centered families have negative shifts, so no closure certificate applies.
    EXPECT_FALSE(structural_negative(e, {a, c}, e.family("z_centered"), p, cache));
}

TEST(Gallery, DetectorCacheReusesRuns)
{
    auto e = build("two-point");
    auto p = profile("quick");
    DetectorCache cache;
    PointPair pair{Point::plus_inf(1), Point::minus_inf(1)};
    const auto& c1 = cache.get(e, CertKind::QrmsF, pair, e.family("z_initial"), p);
    const auto& c2 = cache.get(e, CertKind::QrmsF, pair, e.family("z_initial"), p);
    EXPECT_EQ(&c1, &c2);
    EXPECT_TRUE(c1.positive());
    EXPECT_THROW(e.family("lamp_box"), DomainError);
}

TEST(Gallery, FullProfileLamplighterRows)
{
    auto rep = verify(build("lamplighter"), profile("full"));
    EXPECT_TRUE(rep.all_match()) << row_summary(rep);
}
