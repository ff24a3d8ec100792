#pragma once

// Orbits and cycles of F.

#include "gillab/bonding_map.hpp"
#include "gillab/report.hpp"

#include <algorithm>
#include <vector>

namespace gillab {

// Evidence for one step to in F(from).
struct StepCertificate {
    Rational from;
    Rational to;
    bool ok = false;
    std::string how; // "singleton", "interval", "refuted" or "undecided"
    FBracket image;

    Json to_json() const
    {
        Json j;
        j["from"] = jrat(from);
        j["to"] = jrat(to);
        j["ok"] = ok;
        j["how"] = how;
        if (image.kind == FBracket::Kind::Singleton)
            j["image"] = "{" + to_string(*image.pointValue) + "}";
        else
            j["image"] = "[0," + to_string(image.lowerMax) + "]..[0," + to_string(image.upperMax) + "]";
        return j;
    }
};

inline StepCertificate certify_step(const SetValuedMap& m, const Rational& from, const Rational& to)
{
    StepCertificate c{from, to, false, "", eval_F(m, from)};
    if (c.image.certifies(to)) {
        c.ok = true;
        c.how = c.image.kind == FBracket::Kind::Singleton ? "singleton" : "interval";
    } else {
        c.how = c.image.refutes(to) ? "refuted" : "undecided";
    }
    return c;
}

struct Cycle {
    std::vector<Rational> points;
    std::vector<StepCertificate> certificates; // points[i] -> points[(i+1) % n]
};

struct Orbit {
    std::vector<Rational> points;
    std::string selector = "max";
    std::vector<StepCertificate> certificates;
};

// Forward iterates f(t), ..., f^k(t); throws when an iterate is undecided.
inline std::vector<Rational> iterate_f(const BaseMap& base, const Rational& t, int k, int maxStage = 64)
{
    std::vector<Rational> out;
    out.reserve(static_cast<std::size_t>(std::max(k, 0)));
    Rational x = t;
    for (int i = 0; i < k; ++i) {
        auto v = eval_f(base, x, maxStage);
        if (!v.exact()) throw Error("iterate_f: f(" + to_string(x) + ") undecided at stage " + std::to_string(maxStage));
        x = v.lo;
        out.push_back(x);
    }
    return out;
}

// n distinct points of the core, the first n endpoints in discovery order,
// listed in increasing order. F is [0,1] at each, so any ordering is a cycle.
inline Cycle make_cycle(const SetValuedMap& m, int n)
{
    if (n < 1) throw PreconditionError("make_cycle: n must be positive");
    Cycle c;
    for (const auto& e : m.c1().endpoints(static_cast<std::size_t>(n))) c.points.push_back(e.value);
    std::sort(c.points.begin(), c.points.end());
    for (std::size_t i = 0; i < c.points.size(); ++i)
        c.certificates.push_back(certify_step(m, c.points[i], c.points[(i + 1) % c.points.size()]));
    return c;
}

// Follows F choosing the largest certified value at each step.
inline Orbit make_orbit(const SetValuedMap& m, const Rational& t, int steps)
{
    Orbit o;
    o.points.push_back(t);
    for (int i = 0; i < steps; ++i) {
        auto b = eval_F(m, o.points.back());
        Rational next = b.kind == FBracket::Kind::Singleton ? *b.pointValue : b.lowerMax;
        o.certificates.push_back(certify_step(m, o.points.back(), next));
        o.points.push_back(next);
    }
    return o;
}

// Smallest p dividing n with points[i] == points[(i + p) % n] for all i.
inline std::size_t least_rotation_period(const std::vector<Rational>& pts)
{
    const std::size_t n = pts.size();
    for (std::size_t p = 1; p < n; ++p) {
        if (n % p) continue;
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) ok = pts[i] == pts[(i + p) % n];
        if (ok) return p;
    }
    return n;
}

// Checks x_{i+1} in F(x_i) along the list; with `closed` also the step from
// the last point back to the first.
inline Report verify_orbit(const SetValuedMap& m, const std::vector<Rational>& points, bool closed = false)
{
    Report r{"orbit"};
    Json steps = Json::array();
    const std::size_t n = points.size();
    const std::size_t count = closed ? n : (n ? n - 1 : 0);
    for (std::size_t i = 0; i < count; ++i) {
        auto c = certify_step(m, points[i], points[(i + 1) % n]);
        if (!c.ok) r.fail("step " + std::to_string(i) + ": " + to_string(c.to) + " not certified in F(" + to_string(c.from) + ") (" + c.how + ")");
        steps.push_back(c.to_json());
    }
    std::vector<Rational> sorted = points;
    std::sort(sorted.begin(), sorted.end());
    const bool repeats = std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
    r.detail["points"] = jrats(points);
    r.detail["closed"] = closed;
    r.detail["length"] = n;
    r.detail["least_rotation_period"] = closed && n ? least_rotation_period(points) : n;
    r.detail["repeated_values"] = repeats;
    r.detail["steps"] = std::move(steps);
    return r;
}

}  // namespace gillab
