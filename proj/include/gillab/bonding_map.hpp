#pragma once

// The base map f and the set-valued map
//
//     F(t) = [0, sup{r : t in C_r}]   for t in C_0
//     F(t) = {f(t)}                   otherwise
//
// f vanishes on {0} u C_0 u {1}. In Tent mode it is, on every maximal gap
// (a, b) of that closed set, the tent with apex at the midpoint and height
// min((b - a)/4, 1/32); in Zero mode it is identically 0.

#include "gillab/family.hpp"

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace gillab {

enum class BaseMode { Zero, Tent };

inline const char* to_string(BaseMode m) { return m == BaseMode::Zero ? "zero" : "tent"; }

inline BaseMode parse_mode(std::string_view s)
{
    if (s == "zero") return BaseMode::Zero;
    if (s == "tent") return BaseMode::Tent;
    throw Error("unknown mode '" + std::string(s) + "'");
}

inline const Rational& tent_cap()
{
    static const Rational c(1, 32);
    return c;
}

// Largest tent over a gap that the stage-d cover of C_0 has not yet exposed.
inline Rational height_bound(int d)
{
    Rational h = Rational(1, 8) * third_pow(static_cast<unsigned long>(d + 2));
    return min_of(h, tent_cap());
}

// A maximal open gap (a, b) of {0} u C_0 u {1}, with the stage at which the
// C_0 covers first expose it.
struct Gap {
    Rational a;
    Rational b;
    int stage = 0;
};

inline std::optional<Gap> containing_gap(const Rational& t)
{
    if (t <= 0 || t >= 1) return std::nullopt;
    if (t < c0_window().lo) return Gap{0, c0_window().lo, 0};
    if (t > c0_window().hi) return Gap{c0_window().hi, 1, 0};
    auto loc = locate_c0(t);
    if (loc.kind != C0Location::Kind::PieceGap) return std::nullopt;
    auto g = piece_gap(loc.piece, loc.node);
    return Gap{g.lo, g.hi, discovery_stage(loc.piece, loc.node.size())};
}

// Every maximal gap of width >= minWidth, sorted by position.
inline std::vector<Gap> gaps_wider_than(const Rational& minWidth)
{
    if (minWidth <= 0) throw PreconditionError("gaps_wider_than: width must be positive");
    std::vector<Gap> out;
    const Rational side = c0_window().lo;
    if (side >= minWidth) {
        out.push_back({0, c0_window().lo, 0});
        out.push_back({c0_window().hi, 1, 0});
    }
    auto scan_piece = [&](const Piece& p) {
        const Rational w = p.base().width();
        for (std::size_t k = 0; w * third_pow(k + 1) >= minWidth; ++k)
            for_each_word(k, [&](const std::string& word) {
                auto g = piece_gap(p, word);
                out.push_back({g.lo, g.hi, discovery_stage(p, k)});
            });
    };
    scan_piece(Piece::left());
    scan_piece(Piece::right());
    std::function<void(const std::string&)> walk = [&](const std::string& v) {
        Piece p = Piece::inner(v);
        if (p.base().width() / 3 < minWidth) return;
        scan_piece(p);
        walk(v + 'L');
        walk(v + 'R');
    };
    walk("");
    std::sort(out.begin(), out.end(), [](const Gap& x, const Gap& y) { return x.a < y.a; });
    return out;
}

// Gaps the stage-d cover of C_0 has exposed, sorted by position.
inline std::vector<Gap> gaps_through(int stage)
{
    std::vector<Gap> out{{0, c0_window().lo, 0}, {c0_window().hi, 1, 0}};
    for (const auto& p : pieces_through(stage))
        for (int k = 0; k <= stage; ++k)
            if (discovery_stage(p, static_cast<std::size_t>(k)) <= stage)
                for_each_word(static_cast<std::size_t>(k), [&](const std::string& word) {
                    auto g = piece_gap(p, word);
                    out.push_back({g.lo, g.hi, discovery_stage(p, static_cast<std::size_t>(k))});
                });
    std::sort(out.begin(), out.end(), [](const Gap& x, const Gap& y) { return x.a < y.a; });
    return out;
}

inline Rational tent_height(const Rational& a, const Rational& b) { return min_of((b - a) / 4, tent_cap()); }

// Points of the gap where the tent takes the value y (0 < y <= height).
inline std::vector<Rational> tent_solutions(const Gap& g, const Rational& y)
{
    const Rational h = tent_height(g.a, g.b);
    if (y <= 0 || y > h) return {};
    const Rational mid = (g.a + g.b) / 2;
    if (y == h) return {mid};
    return {g.a + (mid - g.a) * y / h, g.b - (g.b - mid) * y / h};
}

inline Rational tent_value(const Rational& a, const Rational& b, const Rational& t)
{
    const Rational half = (b - a) / 2;
    const Rational mid = (a + b) / 2;
    Rational dist = t < mid ? mid - t : t - mid;
    return tent_height(a, b) * (1 - dist / half);
}

struct BaseMap {
    BaseMode mode = BaseMode::Zero;

    // sup of f over [0, 1]
    Rational sup_value() const { return mode == BaseMode::Zero ? Rational(0) : tent_cap(); }
};

// Exact value when lo == hi, otherwise a certified bracket.
struct FValue {
    Rational lo;
    Rational hi;

    bool exact() const { return lo == hi; }
    const Rational& value() const
    {
        if (!exact()) throw Error("f value not decided at this stage");
        return lo;
    }
};

inline FValue eval_f(const BaseMap& base, const Rational& t, int maxStage)
{
    if (t < 0 || t > 1) throw PreconditionError("eval_f: t outside [0,1]");
    if (base.mode == BaseMode::Zero) return {0, 0};
    auto gap = containing_gap(t);
    if (!gap) return {0, 0};
    if (gap->stage > maxStage) return {0, height_bound(maxStage)};
    Rational v = tent_value(gap->a, gap->b, t);
    return {v, v};
}

struct SetValuedMap {
    BaseMap base;
    std::shared_ptr<const CantorFamily> family;
    int level = 0;       // dyadic level used by default evaluations
    int max_stage = 64;  // stage ceiling for default evaluations

    const CantorGen& c0() const { return family->c0(); }
    const CantorGen& c1() const { return family->c1(); }

    // Family indices that are dyadics of the given level, ascending.
    std::vector<Rational> levels(int level) const
    {
        if (level > family->level) throw PreconditionError("level exceeds the family's level");
        std::vector<Rational> out;
        const Integer den = pow_int(2, static_cast<unsigned long>(level));
        for (const auto& r : family->indices()) {
            Rational scaled = r * den;
            if (scaled.get_den() == 1) out.push_back(r);
        }
        return out;
    }
};

inline SetValuedMap make_map(BaseMode mode, std::shared_ptr<const CantorFamily> fam)
{
    const int level = fam->level;
    return {{mode}, std::move(fam), level, 64};
}

struct FBracket {
    enum class Kind { Singleton, Interval, Undecided };
    Kind kind = Kind::Undecided;
    Rational lowerMax; // Interval: [0, lowerMax] inside F(t)
    Rational upperMax; // F(t) inside [0, upperMax]
    std::optional<Rational> pointValue;

    // Certifies y in F(t).
    bool certifies(const Rational& y) const
    {
        if (kind == Kind::Singleton) return y == *pointValue;
        if (kind == Kind::Interval) return 0 <= y && y <= lowerMax;
        return false;
    }
    // Certifies y not in F(t).
    bool refutes(const Rational& y) const
    {
        if (kind == Kind::Singleton) return y != *pointValue;
        return y < 0 || y > upperMax;
    }
    bool nondegenerate() const { return kind == Kind::Interval && lowerMax > 0; }
};

inline const char* to_string(FBracket::Kind k)
{
    switch (k) {
    case FBracket::Kind::Singleton: return "singleton";
    case FBracket::Kind::Interval: return "interval";
    default: return "undecided";
    }
}

inline FBracket eval_F(const SetValuedMap& m, const Rational& t, int level, int maxStage)
{
    if (t < 0 || t > 1) throw PreconditionError("eval_F: t outside [0,1]");
    FBracket out;
    auto in_c0 = m.c0().membership(t, maxStage);
    if (in_c0.verdict == Verdict::Out) {
        auto v = eval_f(m.base, t, maxStage);
        out.kind = FBracket::Kind::Singleton;
        out.pointValue = v.value();
        out.lowerMax = out.upperMax = v.value();
        return out;
    }

    Rational lower(0);
    std::optional<Rational> upper;
    for (const auto& r : m.levels(level)) {
        if (r == 0) continue;
        auto mem = m.family->at(r).membership(t, maxStage);
        if (mem.verdict == Verdict::In) lower = r;
        if (mem.verdict == Verdict::Out) {
            upper = r;
            break;
        }
    }
    if (in_c0.verdict == Verdict::In) {
        out.kind = FBracket::Kind::Interval;
        out.lowerMax = lower;
        out.upperMax = upper ? *upper : Rational(1);
    } else {
        out.kind = FBracket::Kind::Undecided;
        out.lowerMax = 0;
        out.upperMax = max_of(upper ? *upper : Rational(1), height_bound(maxStage));
    }
    return out;
}

inline FBracket eval_F(const SetValuedMap& m, const Rational& t) { return eval_F(m, t, m.level, m.max_stage); }

// ---------------------------------------------------------------------------
// Outer box cover of the graph

struct Box {
    ClosedInterval x;
    ClosedInterval y;

    Rational area() const { return x.width() * y.width(); }
    bool contains(const Rational& px, const Rational& py) const { return x.contains(px) && y.contains(py); }
};

struct GraphCover {
    std::vector<Box> boxes; // sorted by x.lo; C_0 components and complement gaps alternate
    std::vector<bool> over_c0;
    int stage = 0;
    int level = 0;
    BaseMode mode = BaseMode::Zero;
    Rational core_area; // area over the stage cover of the core

    Rational area() const
    {
        Rational a(0);
        for (const auto& b : boxes) a += b.area();
        return a;
    }

    bool contains(const Rational& px, const Rational& py) const
    {
        auto it = std::upper_bound(boxes.begin(), boxes.end(), px, [](const Rational& v, const Box& b) { return v < b.x.lo; });
        for (int back = 0; back < 2 && it != boxes.begin(); ++back) {
            --it;
            if (it->contains(px, py)) return true;
        }
        return false;
    }
};

inline GraphCover graph_cover(const SetValuedMap& m, int stage, int level)
{
    GraphCover gc;
    gc.stage = stage;
    gc.level = level;
    gc.mode = m.base.mode;
    const IntervalSet& c0s = m.c0().stage(stage);
    const IntervalSet& c1s = m.c1().stage(stage);
    const IntervalSet gaps = interval_set_complement_in(c0s, ClosedInterval::unit());
    std::vector<const IntervalSet*> higher;
    std::vector<Rational> rs;
    for (const auto& r : m.levels(level)) {
        if (r == 0) continue;
        rs.push_back(r);
        higher.push_back(&m.family->at(r).stage(stage));
    }
    const Rational hb = height_bound(stage);

    std::vector<std::pair<Box, bool>> all;
    all.reserve(c0s.size() + gaps.size());
    std::size_t j = 0;
    gc.core_area = 0;
    for (const auto& comp : c0s) {
        Rational ub(1);
        for (std::size_t k = 0; k < rs.size(); ++k) {
            if (!higher[k]->intersects(comp)) {
                ub = rs[k];
                break;
            }
        }
        Rational h = m.base.mode == BaseMode::Tent ? max_of(ub, hb) : ub;
        while (j < c1s.size() && c1s[j].hi < comp.lo) ++j;
        for (std::size_t k = j; k < c1s.size() && c1s[k].lo <= comp.hi; ++k) {
            if (comp.contains(c1s[k])) gc.core_area += c1s[k].width() * h;
        }
        all.push_back({Box{comp, ClosedInterval{0, h}}, true});
    }
    for (const auto& g : gaps) {
        Rational h(0);
        if (m.base.mode == BaseMode::Tent && !g.degenerate()) {
            auto gap = containing_gap((g.lo + g.hi) / 2);
            if (!gap || gap->a != g.lo || gap->b != g.hi) throw Error("graph_cover: stage gap is not a gap of C_0");
            h = tent_height(gap->a, gap->b);
        }
        all.push_back({Box{g, ClosedInterval{0, h}}, false});
    }
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.first.x < b.first.x; });
    gc.boxes.reserve(all.size());
    for (auto& [b, c] : all) {
        gc.boxes.push_back(std::move(b));
        gc.over_c0.push_back(c);
    }
    return gc;
}

}  // namespace gillab
