#include "gillab/address.hpp"
#include "gillab/interval_set.hpp"

#include "oracle.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace gillab;

namespace {

IntervalSet S(std::string_view text) { return IntervalSet::parse(text); }

// Random finite union with small dyadic-and-triadic denominators.
IntervalSet random_set(std::mt19937_64& rng)
{
    std::vector<ClosedInterval> parts;
    const int n = static_cast<int>(rng() % 5);
    for (int i = 0; i < n; ++i) {
        Rational a = rat(static_cast<long>(rng() % 37), 36);
        Rational b = rat(static_cast<long>(rng() % 37), 36);
        if (b < a) std::swap(a, b);
        parts.emplace_back(a, b);
    }
    return IntervalSet(std::move(parts));
}

bool member(const IntervalSet& s, const Rational& x) { return s.contains(x); }

}  // namespace

TEST(Rational, ParsesLowestTerms)
{
    EXPECT_EQ(to_string(parse_rational("6/8")), "3/4");
    EXPECT_EQ(to_string(parse_rational(" 2 ")), "2");
    EXPECT_THROW(parse_rational("1/0"), Error);
    EXPECT_THROW(parse_rational("x"), Error);
    EXPECT_THROW(parse_rational(""), Error);
}

TEST(IntervalSet, UnionExamples)
{
    EXPECT_EQ(interval_set_union(S("0..1/4"), S("1/4..1/2")), S("0..1/2"));
    EXPECT_EQ(interval_set_union(S("0..1/8"), IntervalSet{}), S("0..1/8"));
    EXPECT_EQ(interval_set_union(S("1/4..5/12;7/12..3/4"), S("5/12..7/12")), S("1/4..3/4"));
    EXPECT_EQ(interval_set_union(S("0..1/4"), S("1/4..1/2")).size(), 1u);
}

TEST(IntervalSet, IntersectExamples)
{
    EXPECT_EQ(interval_set_intersect(S("0..1/2"), S("1/4..3/4")), S("1/4..1/2"));
    EXPECT_TRUE(interval_set_intersect(S("0..1/3"), S("2/3..1")).empty());
    auto a = S("1/8..1/6;1/4..5/12;7/12..3/4");
    EXPECT_EQ(interval_set_intersect(a, a), a);
}

TEST(IntervalSet, ComplementExamples)
{
    EXPECT_EQ(interval_set_complement_in(S("1/4..3/4"), {rat(1, 8), rat(7, 8)}), S("1/8..1/4;3/4..7/8"));
    EXPECT_EQ(interval_set_complement_in(IntervalSet{}, ClosedInterval::unit()), S("0..1"));
    EXPECT_EQ(interval_set_complement_in(S("1/4..5/12;7/12..3/4"), {rat(1, 4), rat(3, 4)}), S("5/12..7/12"));
}

TEST(IntervalSet, MeasureExamples)
{
    EXPECT_EQ(interval_set_measure(S("1/4..5/12;7/12..3/4")), rat(1, 3));
    EXPECT_EQ(interval_set_measure(IntervalSet{}), 0);
    for (int d = 0; d <= 8; ++d) {
        oracle::Cover c = oracle::middle_thirds(rat(1, 4), rat(3, 4), d);
        std::vector<ClosedInterval> parts;
        for (auto& [lo, hi] : c) parts.emplace_back(lo, hi);
        Rational expect(1, 2);
        for (int i = 0; i < d; ++i) expect *= Rational(2, 3);
        EXPECT_EQ(interval_set_measure(IntervalSet(parts)), expect) << d;
        EXPECT_EQ(oracle::measure(c), expect) << d;
    }
}

TEST(IntervalSet, TextRoundTrip)
{
    auto a = S("1/4..5/12;7/12..3/4");
    EXPECT_EQ(a.str(), "1/4..5/12;7/12..3/4");
    EXPECT_EQ(S(a.str()), a);
    EXPECT_EQ(IntervalSet{}.str(), "");
    EXPECT_THROW(S("1/2..1/4"), Error);
    EXPECT_THROW(S("1/2"), Error);
}

TEST(IntervalSet, SubtractOpenKeepsWindowEnds)
{
    std::vector<OpenInterval> rem{{rat(1, 3), rat(2, 3)}};
    EXPECT_EQ(interval_set_subtract_open(S("0..1"), rem), S("0..1/3;2/3..1"));
    std::vector<OpenInterval> past{{rat(-1), rat(1, 2)}};
    EXPECT_EQ(interval_set_subtract_open(S("0..1"), past), S("1/2..1"));
}

TEST(IntervalSetProperty, CanonicalFormIgnoresOrder)
{
    std::mt19937_64 rng(7);
    for (int it = 0; it < 300; ++it) {
        std::vector<ClosedInterval> parts;
        for (int i = 0; i < 6; ++i) {
            Rational a = rat(static_cast<long>(rng() % 25), 24), b = rat(static_cast<long>(rng() % 25), 24);
            if (b < a) std::swap(a, b);
            parts.emplace_back(a, b);
        }
        auto shuffled = parts;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        IntervalSet x(parts), y(shuffled);
        ASSERT_EQ(x, y);
        for (std::size_t i = 0; i + 1 < x.size(); ++i) ASSERT_LT(x[i].hi, x[i + 1].lo);
        ASSERT_EQ(S(x.str()), x);
    }
}

TEST(IntervalSetProperty, LatticeLaws)
{
    std::mt19937_64 rng(11);
    const ClosedInterval unit = ClosedInterval::unit();
    for (int it = 0; it < 300; ++it) {
        auto a = random_set(rng), b = random_set(rng);
        auto u = interval_set_union(a, b), n = interval_set_intersect(a, b);
        ASSERT_TRUE(u.contains(a));
        ASSERT_TRUE(u.contains(b));
        ASSERT_TRUE(a.contains(n));
        ASSERT_TRUE(b.contains(n));
        ASSERT_LE(u.measure(), a.measure() + b.measure());
        ASSERT_EQ(u.measure() + n.measure(), a.measure() + b.measure());
        ASSERT_EQ(interval_set_union(a, b), interval_set_union(b, a));
        ASSERT_EQ(interval_set_intersect(a, b), interval_set_intersect(b, a));
        // complement is measure-exact inside the window
        ASSERT_EQ(interval_set_complement_in(a, unit).measure() + a.measure(), 1);
        for (int k = 0; k <= 72; ++k) {
            Rational x = rat(k, 72);
            ASSERT_EQ(member(u, x), member(a, x) || member(b, x)) << x;
            ASSERT_EQ(member(n, x), member(a, x) && member(b, x)) << x;
        }
        // points strictly inside gaps of a are in the complement and not in a
        for (std::size_t i = 0; i + 1 < a.size(); ++i) {
            Rational mid = (a[i].hi + a[i + 1].lo) / 2;
            ASSERT_FALSE(a.contains(mid));
            ASSERT_TRUE(interval_set_complement_in(a, unit).contains(mid));
        }
    }
}

TEST(IntervalSetProperty, DeMorganOnClosures)
{
    std::mt19937_64 rng(13);
    const ClosedInterval unit = ClosedInterval::unit();
    for (int it = 0; it < 200; ++it) {
        auto a = random_set(rng), b = random_set(rng);
        auto lhs = interval_set_complement_in(interval_set_union(a, b), unit);
        auto rhs = interval_set_intersect(interval_set_complement_in(a, unit), interval_set_complement_in(b, unit));
        // closures agree up to isolated points, so measures and interiors agree
        ASSERT_EQ(lhs.measure(), rhs.measure());
        ASSERT_TRUE(rhs.contains(lhs));
    }
}

TEST(Address, CanonicalFormAndValue)
{
    EXPECT_EQ(Address("LL", "L").str(), "(L)");
    EXPECT_EQ(Address("", "LRLR").str(), "(LR)");
    EXPECT_EQ(Address("RLR", "LR").str(), "(RL)");
    EXPECT_EQ(Address("RR", "LR").str(), "R(RL)");
    EXPECT_EQ(Address::parse("R(L)").unit_value(), rat(2, 3));
    EXPECT_EQ(Address::parse("(LR)").unit_value(), rat(1, 4));
    EXPECT_EQ(Address::parse("(R)").unit_value(), 1);
    EXPECT_THROW(Address::parse("LX(L)"), Error);
    EXPECT_THROW(Address::parse("L()"), Error);
}

TEST(AddressProperty, ValueMatchesSeriesOracle)
{
    std::mt19937_64 rng(3);
    auto word = [&](std::size_t n) {
        std::string w;
        for (std::size_t i = 0; i < n; ++i) w += rng() % 2 ? 'R' : 'L';
        return w;
    };
    for (int it = 0; it < 300; ++it) {
        std::string pre = word(rng() % 6), per = word(1 + rng() % 4);
        Address a(pre, per);
        ASSERT_EQ(a.unit_value(), oracle::word_value(pre, per)) << pre << "(" << per << ")";
        ASSERT_EQ(Address::parse(a.str()), a);
        // order isomorphism: lexicographic order of long heads matches value order
        std::string pre2 = word(rng() % 6), per2 = word(1 + rng() % 4);
        Address b(pre2, per2);
        if (a == b) continue;
        const std::string ha = a.head(64), hb = b.head(64);
        ASSERT_EQ(ha < hb, a.unit_value() < b.unit_value()) << a.str() << " vs " << b.str();
    }
}

TEST(Ternary, StageMembershipMatchesOracle)
{
    for (int d = 0; d <= 5; ++d) {
        auto c = oracle::middle_thirds(0, 1, d);
        for (int k = 0; k <= 243; ++k) {
            Rational u = rat(k, 243);
            ASSERT_EQ(ternary_in_stage(u, d), oracle::contains(c, u)) << u << " at " << d;
        }
    }
}
