#include "gillab/family.hpp"

#include "oracle.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

using namespace gillab;

namespace {

IntervalSet from_cover(const oracle::Cover& c)
{
    std::vector<ClosedInterval> parts;
    for (const auto& [lo, hi] : c) parts.emplace_back(lo, hi);
    return IntervalSet(std::move(parts));
}

const CantorFamily& family2()
{
    static const CantorFamily fam = build_family(2, 6);
    return fam;
}

std::filesystem::path scratch_dir(const std::string& name)
{
    auto p = std::filesystem::temp_directory_path() / ("gillab-test-" + name + "-" + std::to_string(::getpid()));
    std::filesystem::remove_all(p);
    return p;
}

}  // namespace

TEST(MiddleThirds, StageCovers)
{
    auto c1 = middle_thirds(core_base());
    EXPECT_EQ(c1.stage(0), IntervalSet::parse("1/4..3/4"));
    EXPECT_EQ(c1.stage(1), IntervalSet::parse("1/4..5/12;7/12..3/4"));
    for (int d = 0; d <= 8; ++d) {
        EXPECT_EQ(c1.stage(d), from_cover(oracle::middle_thirds(rat(1, 4), rat(3, 4), d))) << d;
        EXPECT_EQ(c1.stage(d).size(), std::size_t(1) << d);
    }
    EXPECT_THROW(middle_thirds(ClosedInterval::point(rat(1, 2))), PreconditionError);
}

TEST(MiddleThirds, Membership)
{
    auto c1 = middle_thirds(core_base());
    EXPECT_EQ(c1.membership(rat(1, 4), 10).verdict, Verdict::In);
    auto half = c1.membership(rat(1, 2), 10);
    EXPECT_EQ(half.verdict, Verdict::Out);
    EXPECT_EQ(half.decidedAtStage, 1);
    EXPECT_EQ(c1.membership(rat(5, 12), 10).verdict, Verdict::In);
    EXPECT_EQ(c1.membership(rat(0), 10).verdict, Verdict::Out);
}

TEST(MiddleThirds, EndpointOrder)
{
    auto c1 = middle_thirds(core_base());
    auto e = c1.endpoints(4);
    ASSERT_EQ(e.size(), 4u);
    EXPECT_EQ(e[0].value, rat(1, 4));
    EXPECT_EQ(e[0].side, EndSide::Left);
    EXPECT_EQ(e[1].value, rat(3, 4));
    EXPECT_EQ(e[1].side, EndSide::Right);
    EXPECT_EQ(e[2].value, rat(5, 12));
    EXPECT_EQ(e[2].side, EndSide::Right);
    EXPECT_EQ(e[3].value, rat(7, 12));
    EXPECT_EQ(e[3].side, EndSide::Left);
    EXPECT_TRUE(c1.endpoints(0).empty());
    for (const auto& p : c1.endpoints(64)) {
        ASSERT_TRUE(p.address);
        EXPECT_EQ(p.address->value(), p.value);
    }
}

TEST(AddressBracket, Examples)
{
    CantorAddress alt{ClosedInterval::unit(), Address("", "LR")};
    EXPECT_EQ(address_bracket(alt, 0), ClosedInterval::unit());
    EXPECT_EQ(alt.value(), rat(1, 4));
    EXPECT_EQ(alt.value(), oracle::word_value("", "LR"));
    CantorAddress left{core_base(), Address("", "L")};
    EXPECT_EQ(left.value(), rat(1, 4));
    for (int s = 0; s < 12; ++s) {
        auto b = address_bracket(alt, s), b2 = address_bracket(alt, s + 1);
        EXPECT_TRUE(b.contains(b2));
        EXPECT_TRUE(b.contains(rat(1, 4)));
        EXPECT_EQ(b.width(), Rational(1) / oracle::pow3(s));
        EXPECT_TRUE(address_bracket(left, s).contains(rat(1, 4)));
        EXPECT_EQ(address_bracket(left, s).lo, rat(1, 4));
    }
    EXPECT_EQ(CantorAddress::parse(alt.str()), alt);
}

TEST(C0, StageCoversMatchOracle)
{
    auto c0 = build_C0(middle_thirds(core_base()));
    auto s0 = c0.stage(0);
    for (const char* part : {"1/8..1/6", "1/4..3/4", "5/6..7/8"})
        EXPECT_TRUE(s0.contains(parse_interval(part))) << part;
    for (int d = 0; d <= 7; ++d) {
        EXPECT_EQ(c0.stage(d), from_cover(oracle::c0_stage(d))) << d;
        EXPECT_EQ(c0.stage(d).min(), rat(1, 8));
        EXPECT_EQ(c0.stage(d).max(), rat(7, 8));
    }
}

TEST(C0, MembershipMatchesOracle)
{
    auto c0 = build_C0(middle_thirds(core_base()));
    auto half = c0.membership(rat(1, 2), 10);
    EXPECT_EQ(half.verdict, Verdict::Out);
    // 1/2 sits in the gap (17/36, 19/36) between the pieces glued into (5/12, 7/12)
    auto gaps = oracle::gaps(oracle::c0_stage(1), {rat(5, 12), rat(7, 12)});
    bool found = false;
    for (const auto& g : gaps) found |= g.first == rat(17, 36) && g.second == rat(19, 36);
    EXPECT_TRUE(found);
    EXPECT_EQ(c0.membership(rat(17, 36), 10).verdict, Verdict::In);
    EXPECT_EQ(c0.membership(rat(1, 8), 10).verdict, Verdict::In);
    EXPECT_EQ(c0.membership(rat(0), 10).verdict, Verdict::Out);
    EXPECT_EQ(c0.membership(rat(15, 16), 10).verdict, Verdict::Out);

    // Out verdicts are exactly the points missing from some oracle stage.
    for (int k = 0; k <= 486; ++k) {
        Rational t = rat(k, 486);
        auto m = c0.membership(t, 5);
        bool missing = false;
        for (int d = 0; d <= 5 && !missing; ++d) missing = !oracle::contains(oracle::c0_stage(d), t);
        if (m.verdict == Verdict::Out) {
            ASSERT_TRUE(missing) << t;
            ASSERT_FALSE(oracle::contains(oracle::c0_stage(*m.decidedAtStage), t)) << t;
        } else {
            ASSERT_FALSE(missing) << t;
        }
    }
}

TEST(C0, EndpointsAndCoreInterior)
{
    auto c1 = middle_thirds(core_base());
    auto c0 = build_C0(c1);
    auto e = c0.endpoints(8);
    bool lo = false, hi = false;
    for (const auto& p : e) {
        lo |= p.value == rat(1, 8) && p.side == EndSide::Left;
        hi |= p.value == rat(7, 8) && p.side == EndSide::Right;
    }
    EXPECT_TRUE(lo);
    EXPECT_TRUE(hi);
    // stage endpoints of the core cover sit strictly inside C_0 components
    for (int d = 0; d <= 6; ++d) {
        const auto& cover = c0.stage(d + 1);
        for (const auto& iv : c1.stage(d)) {
            for (const auto& x : {iv.lo, iv.hi}) {
                bool interior = false;
                for (const auto& comp : cover) interior |= comp.lo < x && x < comp.hi;
                ASSERT_TRUE(interior) << x << " at stage " << d;
            }
        }
    }
}

TEST(Family, LevelMembers)
{
    auto f0 = build_family(0, 4);
    EXPECT_EQ(f0.members.size(), 2u);
    EXPECT_EQ(f0.c1().kind(), CantorGen::Kind::MiddleThirds);
    EXPECT_EQ(f0.c0().kind(), CantorGen::Kind::GapAttached);
    const auto& fam = family2();
    std::vector<Rational> expect{0, rat(1, 4), rat(1, 2), rat(3, 4), 1};
    EXPECT_EQ(fam.indices(), expect);
    EXPECT_THROW(build_family(-1, 4), PreconditionError);
}

TEST(Family, StrictChainAtEveryStage)
{
    const auto& fam = family2();
    for (int d = 0; d <= 6; ++d) {
        for (std::size_t i = 0; i + 1 < fam.members.size(); ++i) {
            auto idx = fam.indices();
            const auto& inner = fam.at(idx[i + 1]).stage(d);
            const auto& outer = fam.at(idx[i]).stage(d);
            ASSERT_TRUE(outer.contains(inner)) << idx[i + 1] << " in " << idx[i] << " at " << d;
            ASSERT_LT(inner.measure(), outer.measure()) << idx[i + 1] << " vs " << idx[i] << " at " << d;
        }
    }
}

TEST(Family, StageCoversMatchOracle)
{
    const auto& fam = family2();
    for (const auto& theta : {rat(1, 4), rat(1, 2), rat(3, 4)})
        for (int d = 0; d <= 5; ++d) EXPECT_EQ(fam.at(theta).stage(d), from_cover(oracle::family_stage(theta, d))) << theta << " stage " << d;
}

TEST(Family, BudgetFreezesRemovals)
{
    auto fam = build_family(1, 2);
    const auto& half = fam.at(rat(1, 2));
    // past the budget only the outer refinement continues
    auto expect = interval_set_subtract_open(fam.c0().stage(4), half.removals_for_stage(2));
    EXPECT_EQ(half.stage(4), expect);
    EXPECT_EQ(half.removals_for_stage(4).size(), half.removals_for_stage(2).size());
}

TEST(Family, NestingPerStage)
{
    const auto& fam = family2();
    for (const auto& [r, g] : fam.members)
        for (int d = 0; d < 6; ++d) ASSERT_TRUE(g.stage(d).contains(g.stage(d + 1))) << r << " at " << d;
}

TEST(Family, CoverAgreesWithMembership)
{
    const auto& fam = family2();
    std::mt19937_64 rng(5);
    for (const auto& [r, g] : fam.members) {
        for (int it = 0; it < 300; ++it) {
            Rational t = rat(static_cast<long>(rng() % 100001), 100000);
            auto m = g.membership(t, 6);
            bool inAll = true;
            for (int d = 0; d <= 6; ++d) inAll &= g.stage(d).contains(t);
            if (m.verdict == Verdict::Out) ASSERT_FALSE(g.stage(*m.decidedAtStage).contains(t)) << r << " " << t;
            if (m.verdict == Verdict::In) ASSERT_TRUE(inAll) << r << " " << t;
            if (!inAll) ASSERT_EQ(m.verdict, Verdict::Out) << r << " " << t;
        }
    }
}

TEST(Intermediate, RejectsEqualInputs)
{
    auto c1 = middle_thirds(core_base());
    EXPECT_THROW(build_intermediate(c1, c1, 4), PreconditionError);
    auto c0 = build_C0(c1);
    EXPECT_THROW(build_intermediate(c0, c0, 4), PreconditionError);
    EXPECT_THROW(build_intermediate(c0, c1, 4), PreconditionError);
}

TEST(Intermediate, FirstOuterEndpointIsRemoved)
{
    const auto& fam = family2();
    const auto& half = fam.at(rat(1, 2));
    const auto& c0 = fam.c0();
    const auto& c1 = fam.c1();
    for (const auto& p : c0.endpoints(40)) {
        if (c1.membership(p.value, 12).verdict != Verdict::Out) continue;
        for (int d = p.stage; d <= 6; ++d) EXPECT_FALSE(half.stage(d).contains(p.value)) << p.value << " at " << d;
        EXPECT_EQ(half.membership(p.value, 12).verdict, Verdict::Out);
        break;
    }
}

TEST(Intermediate, ScheduleInvariants)
{
    const auto& fam = family2();
    for (const auto& theta : {rat(1, 4), rat(1, 2), rat(3, 4)}) {
        const auto& g = fam.at(theta);
        auto sch = g.schedule(4);
        ASSERT_FALSE(sch.entries.empty());
        const auto& outer = g.outer();
        const auto& inner = g.inner();
        for (std::size_t i = 0; i < sch.removals.size(); ++i) {
            const auto& w = sch.removals[i];
            ASSERT_LT(w.window.lo, w.window.hi);
            if (i) ASSERT_LE(sch.removals[i - 1].stage, w.stage);
            // window ends are non-endpoint points of the outer set kept by the result
            for (const auto& end : {w.lo, w.hi}) {
                if (!end) continue;
                ASSERT_FALSE(end->word.eventually_constant());
                const Rational v = end->value();
                ASSERT_EQ(outer.membership(v, 12).verdict == Verdict::Out, false) << v;
                ASSERT_NE(g.membership(v, 12).verdict, Verdict::Out) << v;
            }
            // windows miss the inner set
            const Rational mid = (max_of(w.window.lo, Rational(0)) + min_of(w.window.hi, Rational(1))) / 2;
            ASSERT_EQ(inner.membership(mid, 12).verdict, Verdict::Out) << mid;
            for (std::size_t j = 0; j < i; ++j) {
                const auto& o = sch.removals[j];
                ASSERT_TRUE(o.window.hi <= w.window.lo || w.window.hi <= o.window.lo) << "windows overlap";
            }
        }
        for (const auto& e : sch.entries) {
            ASSERT_LT(e.removal, sch.removals.size());
            const auto& w = sch.removals[e.removal].window;
            ASSERT_TRUE(w.lo < e.point.value && e.point.value < w.hi) << e.point.value;
        }
    }
}

TEST(Family, Deterministic)
{
    auto a = build_family(2, 4), b = build_family(2, 4);
    EXPECT_EQ(serialize_family(a), serialize_family(b));
}

TEST(FamilyCache, RoundTripIsByteIdentical)
{
    auto dir = scratch_dir("cache");
    auto fam = build_family(2, 4);
    EXPECT_THROW(load_family_cache(dir, 2, 4), CacheNotBuilt);
    save_family_cache(fam, dir);
    auto path = family_cache_path(dir, 2, 4);
    ASSERT_TRUE(std::filesystem::exists(path));
    std::ifstream in(path, std::ios::binary);
    std::string first((std::istreambuf_iterator<char>(in)), {});
    auto loaded = load_family_cache(dir, 2, 4);
    EXPECT_EQ(serialize_family(loaded), first);
    for (const auto& [r, g] : loaded.members) EXPECT_TRUE(g.stage_cached(4)) << r;
    save_family_cache(loaded, dir);
    std::ifstream again(path, std::ios::binary);
    std::string second((std::istreambuf_iterator<char>(again)), {});
    EXPECT_EQ(first, second);
    std::filesystem::remove_all(dir);
}

TEST(FamilyCache, CorruptionIsDetected)
{
    auto dir = scratch_dir("corrupt");
    save_family_cache(build_family(1, 3), dir);
    auto path = family_cache_path(dir, 1, 3);
    std::string text;
    {
        std::ifstream in(path, std::ios::binary);
        text.assign(std::istreambuf_iterator<char>(in), {});
    }
    auto pos = text.find("stage 1 ");
    ASSERT_NE(pos, std::string::npos);
    text[pos + 8] = text[pos + 8] == '1' ? '2' : '1';
    {
        std::ofstream out(path, std::ios::binary);
        out << text;
    }
    try {
        load_family_cache(dir, 1, 3);
        FAIL() << "corrupt cache accepted";
    } catch (const CacheNotBuilt&) {
        FAIL() << "corruption reported as missing";
    } catch (const CacheError&) {
    }
    std::filesystem::remove_all(dir);
}

TEST(FamilyCache, KeyDependsOnParameters)
{
    EXPECT_NE(family_cache_key(2, 6), family_cache_key(2, 7));
    EXPECT_NE(family_cache_key(1, 6), family_cache_key(2, 6));
    EXPECT_EQ(family_cache_key(2, 6), family_cache_key(2, 6));
}
