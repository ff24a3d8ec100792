#include "fixtures.hpp"

#include <gtest/gtest.h>

using namespace gillab;

namespace {

std::vector<Rational> qs(std::initializer_list<std::pair<long, long>> xs)
{
    std::vector<Rational> out;
    for (auto [n, d] : xs) out.push_back(rat(n, d));
    return out;
}

}  // namespace

TEST(Cycle, SmallPeriods)
{
    auto m = fixture::zero();
    EXPECT_EQ(make_cycle(m, 1).points, qs({{1, 4}}));
    EXPECT_EQ(make_cycle(m, 3).points, qs({{1, 4}, {5, 12}, {3, 4}}));
    EXPECT_THROW(make_cycle(m, 0), PreconditionError);
}

TEST(Cycle, AllPeriodsVerify)
{
    for (auto m : {fixture::zero(), fixture::tent()}) {
        for (int n = 1; n <= 12; ++n) {
            auto c = make_cycle(m, n);
            ASSERT_EQ(c.points.size(), static_cast<std::size_t>(n));
            auto sorted = c.points;
            ASSERT_TRUE(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
            for (const auto& p : c.points) ASSERT_EQ(m.c1().membership(p, 64).verdict, Verdict::In);
            auto rep = verify_orbit(m, c.points, true);
            ASSERT_TRUE(rep.passed) << n;
            ASSERT_EQ(least_rotation_period(c.points), static_cast<std::size_t>(n));
        }
    }
}

TEST(Iterate, Examples)
{
    EXPECT_EQ(iterate_f({BaseMode::Zero}, rat(1, 2), 3), qs({{0, 1}, {0, 1}, {0, 1}}));
    EXPECT_EQ(iterate_f({BaseMode::Tent}, rat(1, 16), 3), qs({{1, 32}, {1, 64}, {1, 128}}));
    EXPECT_EQ(iterate_f({BaseMode::Tent}, rat(1, 4), 2), qs({{0, 1}, {0, 1}}));
    // past the first step every iterate halves
    auto its = iterate_f({BaseMode::Tent}, rat(15, 16), 6);
    for (std::size_t i = 1; i < its.size(); ++i) EXPECT_EQ(its[i], its[i - 1] / 2);
}

TEST(Orbit, Examples)
{
    auto m = fixture::zero();
    EXPECT_TRUE(verify_orbit(m, qs({{0, 1}, {0, 1}, {0, 1}})).passed);
    auto rep = verify_orbit(m, qs({{1, 4}, {3, 4}, {1, 4}, {3, 4}}));
    EXPECT_TRUE(rep.passed);
    EXPECT_TRUE(rep.detail["repeated_values"].get<bool>());
    auto bad = verify_orbit(m, qs({{1, 2}, {3, 4}}));
    EXPECT_FALSE(bad.passed);
    ASSERT_EQ(bad.failures.size(), 1u);
    EXPECT_NE(bad.failures[0].find("step 0"), std::string::npos);
    EXPECT_EQ(least_rotation_period(qs({{1, 4}, {3, 4}, {1, 4}, {3, 4}})), 2u);
}

TEST(Thread, PureTail)
{
    auto m = fixture::zero();
    auto th = make_thread(m, 0, make_cycle(m, 2), 0);
    EXPECT_EQ(th.head(4), qs({{1, 4}, {3, 4}, {1, 4}, {3, 4}}));
    EXPECT_EQ(tail_index(m, th), 0u);
    for (const auto& c : th.certificates) EXPECT_TRUE(c.ok);
}

TEST(Thread, ZeroPivotPrefix)
{
    auto m = fixture::zero();
    auto th = make_thread(m, 0, make_cycle(m, 1), 2);
    EXPECT_EQ(th.head(4), qs({{0, 1}, {0, 1}, {1, 4}, {1, 4}}));
    EXPECT_EQ(tail_index(m, th), 2u);
}

TEST(Thread, TentPivot)
{
    auto m = fixture::tent();
    auto th = make_thread(m, rat(1, 16), make_cycle(m, 1), 3);
    EXPECT_EQ(th.head(5), qs({{1, 64}, {1, 32}, {1, 16}, {1, 4}, {1, 4}}));
    EXPECT_EQ(tail_index(m, th), 3u);
    EXPECT_EQ(th.certificates.size(), th.represented() - 1);
    for (const auto& c : th.certificates) EXPECT_TRUE(c.ok);
}

TEST(Thread, Rejections)
{
    auto m = fixture::zero();
    auto cyc = make_cycle(m, 1);
    EXPECT_THROW(make_thread(m, rat(1, 4), cyc, 1), PreconditionError);  // pivot in C_0
    Cycle outside{{rat(1, 2)}, {}};
    EXPECT_THROW(make_thread(m, 0, outside, 0), PreconditionError);
    // 1/8 lies in C_0 but is not a core point, so it cannot carry a tail
    Cycle edge{{rat(1, 8)}, {}};
    EXPECT_THROW(make_thread(m, 0, edge, 0), PreconditionError);
}

TEST(Thread, JsonRoundTrip)
{
    auto m = fixture::tent();
    auto th = make_thread(m, rat(15, 16), make_cycle(m, 3), 2);
    auto back = Thread::from_json(th.to_json());
    EXPECT_EQ(back.head(12), th.head(12));
    EXPECT_EQ(back.tailStart, th.tailStart);
    EXPECT_TRUE(Thread::from_json(zero_thread().to_json()).zero);
    EXPECT_THROW(Thread::from_json(Json::parse(R"({"prefix":["0"],"tailStart":2,"tailPeriod":["1/4"]})")), Error);
}

TEST(Thread, TailDichotomyOnCannedThreads)
{
    for (auto m : {fixture::zero(), fixture::tent()}) {
        auto threads = canned_threads(m, 20);
        for (std::size_t i = 0; i < threads.size(); ++i) {
            const auto& th = threads[i];
            ASSERT_EQ(tail_index(m, th), th.tailStart);
            ASSERT_EQ(th.tailStart, i % 6);
            for (std::size_t k = 0; k < th.represented(); ++k)
                ASSERT_EQ(m.c0().membership(th.coord(k), 64).verdict, k < th.tailStart ? Verdict::Out : Verdict::In);
        }
        EXPECT_FALSE(tail_index(m, zero_thread()));
    }
}

TEST(Arc, EndsAndJoints)
{
    auto m = fixture::zero();
    auto th = make_thread(m, 0, make_cycle(m, 2), 0);
    auto sys = make_arc_system(m, th);
    EXPECT_EQ(sys.first_arc(), 0u);
    // t = 0 gives the joint y^{n+1}
    EXPECT_EQ(sys.arc_point(2, 0, 6), sys.joint(3, 6));
    EXPECT_EQ(sys.joint(3, 6), qs({{0, 1}, {0, 1}, {0, 1}, {3, 4}, {1, 4}, {3, 4}}));
    // t = x_n on the first arc is the thread itself
    EXPECT_EQ(sys.arc_point(0, th.coord(0), 6), th.head(6));
    EXPECT_THROW(sys.arc_point(1, rat(1), 6), PreconditionError);
    auto pts = arc_points(sys, 1, {0, rat(1, 2), rat(3, 4)}, {0, 1});
    ASSERT_EQ(pts.size(), 3u);
    // Zero mode: coordinate 0 is f(t) = 0, coordinate 1 runs up the vertical segment
    for (const auto& p : pts) {
        EXPECT_EQ(p.a, 0);
        EXPECT_EQ(p.b, p.param);
    }
}

TEST(Arc, PivotThreadStartsAtTheThread)
{
    auto m = fixture::tent();
    auto th = make_thread(m, rat(1, 16), make_cycle(m, 3), 2);
    auto sys = make_arc_system(m, th);
    EXPECT_EQ(sys.first_arc(), 1u);
    EXPECT_EQ(sys.arc_point(1, th.coord(1), 8), th.head(8));
    EXPECT_THROW(sys.arc_point(0, 0, 8), PreconditionError);
}

TEST(Arc, ChainVerifies)
{
    for (auto m : {fixture::zero(), fixture::tent()}) {
        for (const auto& th : arc_threads(m)) {
            auto rep = verify_arc_chain(m, make_arc_system(m, th), 6);
            ASSERT_TRUE(rep.passed) << rep.to_json().dump();
            for (const auto& j : rep.detail["joints"]) ASSERT_EQ(j["max_leading"], "0");
        }
        auto pure = make_thread(m, 0, make_cycle(m, 2), 0);
        EXPECT_TRUE(verify_arc_chain(m, make_arc_system(m, pure), 4).passed);
        EXPECT_THROW(make_arc_system(m, zero_thread()), PreconditionError);
    }
}

TEST(Mahavier, OneStepIsTheGraphCover)
{
    auto m = fixture::zero();
    auto bc = mahavier_cover(m, 1, 3, 2);
    auto gc = graph_cover(m, 3, 2);
    EXPECT_EQ(bc.dimension, 2u);
    EXPECT_EQ(bc.boxes.size(), gc.boxes.size());
    for (const auto& b : gc.boxes) {
        std::vector<ClosedInterval> swapped{b.y, b.x};
        EXPECT_NE(std::find(bc.boxes.begin(), bc.boxes.end(), swapped), bc.boxes.end());
    }
    EXPECT_THROW(mahavier_cover(m, 0, 3, 2), PreconditionError);
}

TEST(Mahavier, ContainsThreadsAndProjectsOntoUnit)
{
    for (auto m : {fixture::zero(), fixture::tent()}) {
        for (std::size_t n : {2u, 3u}) {
            auto bc = mahavier_cover(m, n, 2, 2);
            for (const auto& th : canned_threads(m, 12)) ASSERT_TRUE(bc.contains(th.head(n + 1)));
            ASSERT_TRUE(bc.contains(zero_thread().head(n + 1)));
            auto proj = bc.projection(n);
            ASSERT_EQ(proj.size(), 1u);
            ASSERT_EQ(proj[0], ClosedInterval::unit());
            for (const auto& box : bc.boxes) ASSERT_EQ(box.size(), n + 1);
        }
    }
}

TEST(Mahavier, CeilingIsEnforced)
{
    auto m = fixture::zero();
    EXPECT_THROW(mahavier_cover(m, 3, 3, 2, 10), Error);
}
