#pragma once

// Points of the inverse limit X = lim {[0,1], F}, arcs inside it, and outer
// box covers of its finite projections.
//
// A thread (x_0, x_1, ...) satisfies x_{i-1} in F(x_i). Every thread other than
// the zero thread has a tail index N with x_n in C_0 exactly for n >= N; the
// threads built here take x_N, x_{N+1}, ... from a cycle of core points
// repeated forever, x_{N-1} = a pivot outside C_0, and the earlier coordinates
// are forward f-iterates of the pivot.

#include "gillab/dynamics.hpp"

#include <algorithm>
#include <optional>

namespace gillab {

struct Thread {
    std::vector<Rational> prefix;     // x_0 .. x_{N-1}
    std::size_t tailStart = 0;        // N
    std::vector<Rational> tailPeriod; // x_N, x_{N+1}, ... repeat this list
    bool zero = false;                // the constant thread (0, 0, ...)
    std::vector<StepCertificate> certificates; // x_{i-1} in F(x_i), i = 1 .. N + period

    const Rational& coord(std::size_t i) const
    {
        static const Rational zero_value(0);
        if (zero) return zero_value;
        if (i < tailStart) return prefix[i];
        return tailPeriod[(i - tailStart) % tailPeriod.size()];
    }

    // Coordinates 0 .. represented()-1 determine the thread.
    std::size_t represented() const { return zero ? 1 : tailStart + tailPeriod.size() + 1; }

    std::vector<Rational> head(std::size_t n) const
    {
        std::vector<Rational> out;
        out.reserve(n);
        for (std::size_t i = 0; i < n; ++i) out.push_back(coord(i));
        return out;
    }

    Json to_json() const
    {
        Json j;
        j["prefix"] = jrats(prefix);
        j["tailStart"] = tailStart;
        j["tailPeriod"] = jrats(tailPeriod);
        if (zero) j["zero"] = true;
        return j;
    }

    static Thread from_json(const Json& j)
    {
        Thread t;
        if (j.contains("zero") && j["zero"].get<bool>()) {
            t.zero = true;
            return t;
        }
        for (const auto& s : j.at("prefix")) t.prefix.push_back(parse_rational(s.get<std::string>()));
        t.tailStart = j.at("tailStart").get<std::size_t>();
        for (const auto& s : j.at("tailPeriod")) t.tailPeriod.push_back(parse_rational(s.get<std::string>()));
        if (t.tailStart != t.prefix.size()) throw Error("thread: tailStart must equal prefix length");
        if (t.tailPeriod.empty()) throw Error("thread: empty tail period");
        return t;
    }
};

inline Thread zero_thread()
{
    Thread t;
    t.zero = true;
    return t;
}

inline void certify_thread(const SetValuedMap& m, Thread& th)
{
    th.certificates.clear();
    if (th.zero) {
        th.certificates.push_back(certify_step(m, 0, 0));
        return;
    }
    for (std::size_t i = 1; i < th.represented(); ++i) th.certificates.push_back(certify_step(m, th.coord(i), th.coord(i - 1)));
}

// Thread whose coordinates from prefixLen on cycle through tailCycle; the
// coordinate just before the tail is the pivot and earlier ones are its
// forward f-iterates.
inline Thread make_thread(const SetValuedMap& m, const Rational& pivot, const Cycle& tailCycle, std::size_t prefixLen)
{
    if (tailCycle.points.empty()) throw PreconditionError("make_thread: empty tail cycle");
    for (const auto& p : tailCycle.points)
        if (m.c1().membership(p, m.max_stage).verdict != Verdict::In)
            throw PreconditionError("make_thread: tail point " + to_string(p) + " is not in the core");
    Thread th;
    th.tailStart = prefixLen;
    th.tailPeriod = tailCycle.points;
    if (prefixLen > 0) {
        auto piv = m.c0().membership(pivot, m.max_stage);
        if (piv.verdict == Verdict::In) throw PreconditionError("make_thread: pivot " + to_string(pivot) + " lies in C_0");
        if (piv.verdict != Verdict::Out) throw PreconditionError("make_thread: pivot membership undecided");
        if (!eval_F(m, th.tailPeriod.front()).certifies(pivot))
            throw PreconditionError("make_thread: pivot not certified in F(x_N)");
        auto its = iterate_f(m.base, pivot, static_cast<int>(prefixLen) - 1, m.max_stage);
        th.prefix.assign(its.rbegin(), its.rend());
        th.prefix.push_back(pivot);
    }
    certify_thread(m, th);
    for (const auto& c : th.certificates)
        if (!c.ok) throw Error("make_thread: step " + to_string(c.from) + " -> " + to_string(c.to) + " not certified");
    return th;
}

// The tail index N, after re-checking that x_n is outside C_0 for n < N and
// inside for n >= N. None for the zero thread.
inline std::optional<std::size_t> tail_index(const SetValuedMap& m, const Thread& th)
{
    if (th.zero) {
        if (m.c0().membership(0, 0).verdict != Verdict::Out) throw Error("tail_index: 0 is not outside C_0");
        return std::nullopt;
    }
    for (std::size_t i = 0; i < th.represented(); ++i) {
        auto v = m.c0().membership(th.coord(i), m.max_stage).verdict;
        const Verdict expected = i < th.tailStart ? Verdict::Out : Verdict::In;
        if (v != expected)
            throw Error("tail_index: coordinate " + std::to_string(i) + " = " + to_string(th.coord(i)) + " is " + to_string(v) +
                        ", expected " + to_string(expected));
    }
    return th.tailStart;
}

// ---------------------------------------------------------------------------
// Arcs
//
// For n >= max(N - 1, 0),
//     K_n = {(f^n(t), ..., f(t), t, x_{n+1}, x_{n+2}, ...) : 0 <= t <= x_n},
// and the joint y^i = (0, ..., 0, x_i, x_{i+1}, ...) has i leading zeros.

struct ArcSystem {
    Thread thread;
    BaseMap base;
    int max_stage = 64;

    std::size_t first_arc() const { return thread.tailStart ? thread.tailStart - 1 : 0; }

    // Coordinates 0 .. width-1 of the K_n point with parameter t.
    std::vector<Rational> arc_point(std::size_t n, const Rational& t, std::size_t width) const
    {
        if (n < first_arc()) throw PreconditionError("arc index below the first arc");
        if (t < 0 || t > thread.coord(n)) throw PreconditionError("arc parameter outside [0, x_n]");
        std::vector<Rational> out(width);
        Rational v = t;
        for (std::size_t k = 0; k <= n; ++k) {
            std::size_t i = n - k;
            if (i < width) out[i] = v;
            if (k < n) {
                auto fv = eval_f(base, v, max_stage);
                if (!fv.exact()) throw Error("arc_point: f(" + to_string(v) + ") undecided");
                v = fv.lo;
            }
        }
        for (std::size_t i = n + 1; i < width; ++i) out[i] = thread.coord(i);
        return out;
    }

    std::vector<Rational> joint(std::size_t i, std::size_t width) const
    {
        std::vector<Rational> out(width, Rational(0));
        for (std::size_t k = i; k < width; ++k) out[k] = thread.coord(k);
        return out;
    }
};

inline ArcSystem make_arc_system(const SetValuedMap& m, const Thread& th)
{
    if (th.zero) throw PreconditionError("arc system needs a thread other than the zero thread");
    return {th, m.base, m.max_stage};
}

struct PlanarPoint {
    Rational param;
    Rational a;
    Rational b;
};

inline std::vector<PlanarPoint> arc_points(const ArcSystem& sys, std::size_t n, const std::vector<Rational>& params,
                                           std::pair<std::size_t, std::size_t> coords)
{
    const std::size_t width = std::max({coords.first, coords.second, n}) + 1;
    std::vector<PlanarPoint> out;
    for (const auto& t : params) {
        auto p = sys.arc_point(n, t, width);
        out.push_back({t, p[coords.first], p[coords.second]});
    }
    return out;
}

// Exact breakpoint parameters for K_n: 0, x_n, and in Tent mode the
// breakpoints of f^k inside [0, x_n] that the first iterate exposes.
inline std::vector<Rational> arc_parameters(const ArcSystem& sys, std::size_t n)
{
    const Rational xn = sys.thread.coord(n);
    std::vector<Rational> ps{Rational(0), xn / 2, xn};
    if (sys.base.mode == BaseMode::Tent) {
        for (const auto& q : {Rational(1, 32), Rational(1, 16), Rational(3, 32), Rational(1, 8)})
            if (q < xn) ps.push_back(q);
    }
    std::sort(ps.begin(), ps.end());
    ps.erase(std::unique(ps.begin(), ps.end()), ps.end());
    return ps;
}

inline Report verify_arc_chain(const SetValuedMap& m, const ArcSystem& sys, std::size_t M)
{
    Report r{"arc_chain"};
    const auto& th = sys.thread;
    if (th.zero) {
        r.fail("zero thread has no arc");
        return r;
    }
    if (M < th.tailStart) throw PreconditionError("verify_arc_chain: M below the tail index");
    const std::size_t W = M + 3 + th.tailPeriod.size();
    const std::size_t n0 = sys.first_arc();
    const Rational eighth(1, 8);
    r.require(sys.base.sup_value() < eighth, "sup f is not below 1/8");

    // The first arc ends at the thread itself.
    r.require(sys.arc_point(n0, th.coord(n0), W) == th.head(W), "K_first(x_first) differs from the thread");

    Json joints = Json::array();
    for (std::size_t n = n0; n <= M; ++n) {
        const auto y = sys.joint(n + 1, W);
        // K_n(0) and K_{n+1}(x_{n+1}) are both y^{n+1}
        r.require(sys.arc_point(n, 0, W) == y, "K_" + std::to_string(n) + "(0) != y^" + std::to_string(n + 1));
        r.require(sys.arc_point(n + 1, th.coord(n + 1), W) == y,
                  "K_" + std::to_string(n + 1) + "(x_" + std::to_string(n + 1) + ") != y^" + std::to_string(n + 1));
        // Coordinate n: x_n on every earlier arc, at most sup f < 1/8 <= x_n on K_{n+1}.
        if (n > n0) {
            r.require(eighth <= th.coord(n), "x_" + std::to_string(n) + " below 1/8");
            for (std::size_t i = n0; i < n; ++i)
                for (const auto& t : arc_parameters(sys, i))
                    r.require(sys.arc_point(i, t, W)[n] == th.coord(n), "K_" + std::to_string(i) + " leaves x_" + std::to_string(n));
            for (const auto& t : arc_parameters(sys, n + 1))
                r.require(sys.arc_point(n + 1, t, W)[n] < eighth, "K_" + std::to_string(n + 1) + " reaches 1/8 at coordinate " + std::to_string(n));
        }
        // Coordinate n+1 is injective on K_{n+1} and constant x_{n+1} on K_n, so
        // the two arcs meet only where t = x_{n+1}.
        r.require(sys.arc_point(n + 1, th.coord(n + 1), W)[n + 1] == th.coord(n + 1), "coordinate n+1 mismatch");
        // Sampled arc points are points of X.
        for (std::size_t k : {n, n + 1}) {
            for (const auto& t : arc_parameters(sys, k)) {
                auto p = sys.arc_point(k, t, W);
                for (std::size_t i = 1; i < W; ++i) {
                    auto c = certify_step(m, p[i], p[i - 1]);
                    if (!c.ok) {
                        r.fail("K_" + std::to_string(k) + "(" + to_string(t) + ") coordinate " + std::to_string(i) + ": " + c.how);
                        break;
                    }
                }
            }
        }
        Rational lead(0);
        for (std::size_t i = 0; i < n + 1; ++i) lead = max_of(lead, y[i]);
        r.require(lead == 0, "joint has a nonzero leading coordinate");
        Json jj;
        jj["joint"] = n + 1;
        jj["max_leading"] = jrat(lead);
        jj["first_tail"] = jrat(y[n + 1]);
        joints.push_back(jj);
    }
    r.detail["thread"] = th.to_json();
    r.detail["M"] = M;
    r.detail["first_arc"] = n0;
    r.detail["joints"] = std::move(joints);
    return r;
}

// ---------------------------------------------------------------------------
// Finite Mahavier products

struct BoxCover {
    std::size_t dimension = 0; // n + 1
    std::vector<std::vector<ClosedInterval>> boxes;
    int stage = 0;
    int level = 0;

    bool contains(const std::vector<Rational>& pt) const
    {
        for (const auto& b : boxes) {
            bool in = true;
            for (std::size_t i = 0; i < dimension && in; ++i) in = b[i].contains(pt[i]);
            if (in) return true;
        }
        return false;
    }

    IntervalSet projection(std::size_t i) const
    {
        std::vector<ClosedInterval> parts;
        for (const auto& b : boxes) parts.push_back(b[i]);
        return IntervalSet(std::move(parts));
    }
};

inline constexpr std::size_t kBoxCeiling = 1000000;

inline BoxCover mahavier_cover(const SetValuedMap& m, std::size_t n, int stage, int level, std::size_t ceiling = kBoxCeiling)
{
    if (n < 1) throw PreconditionError("mahavier_cover: n must be at least 1");
    const GraphCover gc = graph_cover(m, stage, level);
    const auto& gb = gc.boxes;

    struct Partial {
        std::vector<ClosedInterval> coords; // coordinates k .. n, reversed
        ClosedInterval pending;             // constraint on coordinate k - 1
    };
    std::vector<Partial> cur;
    for (const auto& b : gb) cur.push_back({{b.x}, b.y});

    for (std::size_t k = n - 1; k >= 1; --k) {
        std::vector<Partial> next;
        for (auto& p : cur) {
            auto first = std::lower_bound(gb.begin(), gb.end(), p.pending.lo, [](const Box& b, const Rational& v) { return b.x.hi < v; });
            for (auto it = first; it != gb.end() && it->x.lo <= p.pending.hi; ++it) {
                ClosedInterval c{max_of(it->x.lo, p.pending.lo), min_of(it->x.hi, p.pending.hi)};
                auto coords = p.coords;
                coords.push_back(std::move(c));
                next.push_back({std::move(coords), it->y});
                if (next.size() > ceiling) throw Error("mahavier_cover: box count ceiling exceeded");
            }
        }
        cur = std::move(next);
    }

    BoxCover bc;
    bc.dimension = n + 1;
    bc.stage = stage;
    bc.level = level;
    for (auto& p : cur) {
        p.coords.push_back(p.pending);
        std::reverse(p.coords.begin(), p.coords.end());
        bc.boxes.push_back(std::move(p.coords));
    }
    std::sort(bc.boxes.begin(), bc.boxes.end());
    return bc;
}

}  // namespace gillab
