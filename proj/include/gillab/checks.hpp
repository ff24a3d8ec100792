#pragma once

// Finite checks of the properties of F and of the inverse limit. Every check
// returns a Report whose detail carries the witnesses it used.

#include "gillab/inverse_limit.hpp"

#include <cstdint>
#include <random>

namespace gillab {

struct CheckConfig {
    int level = 2;
    int stage = 6;
    std::uint64_t seed = 1;
    int max_period = 12;
    int ceiling = 12; // stage ceiling for Out verdicts on endpoints
    std::vector<Thread> threads; // replaces the canned threads when non-empty
};

// ---------------------------------------------------------------------------
// Cantor family

inline Report check_nesting(const CantorFamily& fam, int stage)
{
    Report r{"nesting"};
    const auto idx = fam.indices();
    Json pairs = Json::array();
    for (int d = 0; d <= stage; ++d) {
        for (std::size_t i = 0; i < idx.size(); ++i) {
            const auto& gi = fam.at(idx[i]);
            if (d < stage) r.require(gi.stage(d).contains(gi.stage(d + 1)), "stage " + std::to_string(d + 1) + " of C_" + to_string(idx[i]) + " leaves stage " + std::to_string(d));
            for (std::size_t j = i + 1; j < idx.size(); ++j)
                r.require(gi.stage(d).contains(fam.at(idx[j]).stage(d)),
                          "stage " + std::to_string(d) + ": C_" + to_string(idx[j]) + " not inside C_" + to_string(idx[i]));
        }
    }
    // strictness: an endpoint of the larger set lies outside the smaller one
    for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
        const auto& outer = fam.at(idx[i]);
        const auto& inner = fam.at(idx[i + 1]);
        Json pj;
        pj["outer"] = jrat(idx[i]);
        pj["inner"] = jrat(idx[i + 1]);
        for (const auto& e : outer.endpoints(64)) {
            auto mem = inner.membership(e.value, fam.budget);
            if (mem.verdict == Verdict::Out) {
                pj["witness"] = jrat(e.value);
                pj["out_at_stage"] = *mem.decidedAtStage;
                break;
            }
        }
        r.require(pj.contains("witness"), "no strictness witness for C_" + to_string(idx[i + 1]) + " in C_" + to_string(idx[i]));
        pairs.push_back(std::move(pj));
    }
    Json counts = Json::array();
    for (const auto& q : idx) {
        Json c;
        c["index"] = jrat(q);
        c["components"] = fam.at(q).stage(stage).size();
        c["measure"] = jrat(fam.at(q).stage(stage).measure());
        counts.push_back(std::move(c));
    }
    r.detail["level"] = fam.level;
    r.detail["stages"] = stage + 1;
    r.detail["members"] = std::move(counts);
    r.detail["strict"] = std::move(pairs);
    return r;
}

inline Report check_endpoints(const CantorFamily& fam, const std::vector<Rational>& sources, std::size_t count, int ceiling)
{
    Report r{"endpoints"};
    Json per = Json::array();
    for (const auto& s : sources) {
        if (!fam.members.count(s)) {
            r.fail("family has no member " + to_string(s));
            continue;
        }
        int worst = 0;
        std::size_t checked = 0;
        for (const auto& e : fam.at(s).endpoints(count)) {
            for (const auto& q : fam.indices()) {
                if (q <= s) continue;
                auto mem = fam.at(q).membership(e.value, ceiling);
                ++checked;
                if (mem.verdict != Verdict::Out)
                    r.fail("endpoint " + to_string(e.value) + " of C_" + to_string(s) + " is " + to_string(mem.verdict) + " in C_" + to_string(q));
                else
                    worst = std::max(worst, *mem.decidedAtStage);
            }
        }
        Json j;
        j["source"] = jrat(s);
        j["endpoints"] = count;
        j["verdicts"] = checked;
        j["latest_out_stage"] = worst;
        per.push_back(std::move(j));
    }
    r.detail["ceiling"] = ceiling;
    r.detail["sources"] = std::move(per);
    return r;
}

// ---------------------------------------------------------------------------
// F on the core

inline Report check_sup_on_core(const SetValuedMap& m, std::size_t count)
{
    Report r{"sup"};
    std::size_t n = 0;
    for (const auto& e : m.c1().endpoints(count)) {
        auto b = eval_F(m, e.value);
        ++n;
        r.require(b.kind == FBracket::Kind::Interval && b.lowerMax == 1 && b.upperMax == 1,
                  "F(" + to_string(e.value) + ") is not [0,1]: " + to_string(b.kind) + " " + to_string(b.lowerMax) + ".." + to_string(b.upperMax));
    }
    r.detail["points"] = n;
    return r;
}

inline Report check_cycles(const SetValuedMap& m, int maxPeriod)
{
    Report r{"cycles"};
    Json cycles = Json::array();
    for (int n = 1; n <= maxPeriod; ++n) {
        auto c = make_cycle(m, n);
        auto v = verify_orbit(m, c.points, true);
        const auto lrp = v.detail["least_rotation_period"].get<std::size_t>();
        r.require(v.passed, "period " + std::to_string(n) + ": " + (v.failures.empty() ? "" : v.failures.front()));
        r.require(c.points.size() == static_cast<std::size_t>(n), "period " + std::to_string(n) + ": wrong length");
        r.require(!v.detail["repeated_values"].get<bool>(), "period " + std::to_string(n) + ": repeated points");
        r.require(lrp == static_cast<std::size_t>(n), "period " + std::to_string(n) + ": least rotation period " + std::to_string(lrp));
        Json j;
        j["period"] = n;
        j["points"] = jrats(c.points);
        j["least_rotation_period"] = lrp;
        cycles.push_back(std::move(j));
    }
    r.detail["cycles"] = std::move(cycles);
    return r;
}

// ---------------------------------------------------------------------------
// Weak continuity

// A point of C_s on the given side of t (side < 0: left) at distance below
// tol, found among eventually alternating addresses next to t.
inline std::optional<Rational> weak_witness(const SetValuedMap& m, const Rational& t, const Rational& s, int side, const Rational& tol, int ceiling)
{
    const auto& target = m.family->at(s);
    auto accept = [&](const Rational& c) {
        if (c == t || (side < 0) != (c < t)) return false;
        const Rational dist = c < t ? t - c : c - t;
        if (dist >= tol) return false;
        return target.membership(c, ceiling).verdict == Verdict::In;
    };
    auto loc = locate_c0(t);
    using K = C0Location::Kind;
    if (loc.kind != K::Core && loc.kind != K::InPiece) return std::nullopt;
    const ClosedInterval base = loc.kind == K::Core ? core_base() : loc.piece.base();
    const Address& a = loc.address;
    for (std::size_t k = 1; k <= 80; ++k) {
        for (const char* tail : {"LR", "RL"}) {
            Rational c = affine(base, Address(a.head(k), tail).unit_value());
            if (accept(c)) return c;
        }
    }
    if (loc.kind != K::Core || !a.eventually_constant()) return std::nullopt;
    // t is a glue point: the neighbouring piece fills the core gap beside it
    const bool gap_left = a.period == "L";
    if (gap_left != (side < 0)) return std::nullopt;
    Piece p;
    if (a.prefix.empty())
        p = gap_left ? Piece::left() : Piece::right();
    else
        p = Piece::inner(a.prefix.substr(0, a.prefix.size() - 1));
    for (std::size_t k = 1; k <= 80; ++k) {
        Rational c = affine(p.base(), gap_left ? Address(std::string(k, 'R'), "RL").unit_value() : Address(std::string(k, 'L'), "LR").unit_value());
        if (accept(c)) return c;
    }
    return std::nullopt;
}

inline Report check_weak_continuity(const SetValuedMap& m, const std::vector<Rational>& points, int ceiling, const Rational& tol = Rational(1, 64))
{
    Report r{"weak_continuity"};
    std::size_t searches = 0;
    Json samples = Json::array();
    for (const auto& t : points) {
        auto mem = m.c0().membership(t, ceiling);
        if (mem.verdict != Verdict::In) throw PreconditionError("weak continuity: " + to_string(t) + " is not a decided point of C_0");
        const bool core = locate_c0(t).kind == C0Location::Kind::Core;
        const auto b = eval_F(m, t, m.level, ceiling);
        for (const auto& s : m.levels(m.level)) {
            if (s >= b.lowerMax) continue;
            int found = 0;
            for (int side : {-1, 1}) {
                ++searches;
                auto w = weak_witness(m, t, s, side, tol, ceiling);
                if (w) {
                    ++found;
                    if (samples.size() < 8) {
                        Json j;
                        j["t"] = jrat(t);
                        j["s"] = jrat(s);
                        j["side"] = side < 0 ? "left" : "right";
                        j["witness"] = jrat(*w);
                        samples.push_back(std::move(j));
                    }
                } else if (core) {
                    r.fail("no " + std::string(side < 0 ? "left" : "right") + " witness in C_" + to_string(s) + " near " + to_string(t));
                }
            }
            if (!core) r.require(found > 0, "no witness in C_" + to_string(s) + " near " + to_string(t));
        }
    }
    r.detail["points"] = points.size();
    r.detail["searches"] = searches;
    r.detail["tolerance"] = jrat(tol);
    r.detail["samples"] = std::move(samples);
    return r;
}

// ---------------------------------------------------------------------------
// Upper semicontinuity

inline Report check_usc(const SetValuedMap& m, int samples, int stage, std::uint64_t seed)
{
    Report r{"usc"};
    std::mt19937_64 rng(seed);
    std::vector<GraphCover> covers;
    for (int d = 0; d <= stage; ++d) covers.push_back(graph_cover(m, d, m.level));
    std::vector<Rational> core_pts;
    for (const auto& e : m.c1().endpoints(64)) core_pts.push_back(e.value);
    const auto gaps = gaps_through(3);
    constexpr int kTerms = 8;

    std::array<int, 4> kinds{};
    for (int i = 0; i < samples; ++i) {
        const int kind = i % 4;
        ++kinds[static_cast<std::size_t>(kind)];
        std::vector<std::pair<Rational, Rational>> terms;
        Rational lt, ly;
        if (kind == 0) {
            // core points carrying F = [0,1], heights climbing to 1
            lt = core_pts[rng() % core_pts.size()];
            const Address a = ternary_locate(unaffine(core_base(), lt)).address;
            for (int n = 1; n <= kTerms; ++n) {
                Rational tn = affine(core_base(), Address(a.head(static_cast<std::size_t>(n + 3)), "LR").unit_value());
                if (tn == lt) tn = affine(core_base(), Address(a.head(static_cast<std::size_t>(n + 3)), "RL").unit_value());
                terms.push_back({tn, 1 - half_pow(static_cast<unsigned long>(n))});
            }
            ly = 1;
        } else if (kind == 1) {
            // inside a gap along the graph of f
            const Gap& g = gaps[rng() % gaps.size()];
            const Rational w = g.b - g.a;
            lt = g.a + w * Rational(static_cast<long>(1 + rng() % 15), 16);
            for (int n = 1; n <= kTerms; ++n) {
                Rational tn = lt + w * half_pow(static_cast<unsigned long>(n + 4));
                terms.push_back({tn, eval_f(m.base, tn, m.max_stage).value()});
            }
            ly = eval_f(m.base, lt, m.max_stage).value();
        } else if (kind == 2) {
            // into a gap end from inside the gap
            const Gap& g = gaps[rng() % gaps.size()];
            const bool from_left = rng() % 2 == 0;
            lt = from_left ? g.a : g.b;
            if (lt == 0 || lt == 1) lt = from_left ? g.b : g.a;
            const Rational w = g.b - g.a;
            for (int n = 1; n <= kTerms; ++n) {
                const Rational step = w * half_pow(static_cast<unsigned long>(n + 1));
                Rational tn = lt == g.a ? Rational(g.a + step) : Rational(g.b - step);
                terms.push_back({tn, eval_f(m.base, tn, m.max_stage).value()});
            }
            ly = 0;
        } else {
            lt = 0;
            ly = 0;
            for (int n = 1; n <= kTerms; ++n) terms.push_back({Rational(0), Rational(0)});
        }
        for (const auto& [tn, yn] : terms) {
            auto c = certify_step(m, tn, yn);
            r.require(c.ok, "sequence " + std::to_string(i) + ": term (" + to_string(tn) + ", " + to_string(yn) + ") not on the graph");
        }
        auto lim = certify_step(m, lt, ly);
        r.require(lim.ok, "sequence " + std::to_string(i) + ": limit (" + to_string(lt) + ", " + to_string(ly) + ") not on the graph");
        for (const auto& gc : covers)
            r.require(gc.contains(lt, ly), "sequence " + std::to_string(i) + ": limit (" + to_string(lt) + ", " + to_string(ly) +
                                               ") outside the stage " + std::to_string(gc.stage) + " cover");
    }
    r.detail["seed"] = seed;
    r.detail["sequences"] = samples;
    r.detail["terms"] = kTerms;
    r.detail["stages"] = stage + 1;
    r.detail["by_kind"] = {{"core", kinds[0]}, {"gap", kinds[1]}, {"gap_end", kinds[2]}, {"origin", kinds[3]}};
    return r;
}

// ---------------------------------------------------------------------------
// Intermediate value property

// The value of F(t) that a spot check pairs with t: the singleton value or
// the certified top of the interval.
inline std::optional<Rational> top_value(const FBracket& b)
{
    if (b.kind == FBracket::Kind::Singleton) return *b.pointValue;
    if (b.kind == FBracket::Kind::Interval) return b.lowerMax;
    return std::nullopt;
}

// Some x strictly between x1 < x2 with y in F(x).
inline std::optional<Rational> ivp_witness(const SetValuedMap& m, const Rational& x1, const Rational& x2, const Rational& y, int ceiling)
{
    if (!(x1 < x2)) throw PreconditionError("ivp witness needs x1 < x2");
    auto ok = [&](const Rational& c) { return x1 < c && c < x2 && certify_step(m, c, y).ok; };
    // points of C_s next to an end, s the least level dyadic >= y
    std::optional<Rational> s;
    for (const auto& q : m.levels(m.level))
        if (q >= y) {
            s = q;
            break;
        }
    if (s) {
        for (const auto& [e, side] : {std::pair{x1, 1}, std::pair{x2, -1}}) {
            if (m.c0().membership(e, ceiling).verdict != Verdict::In) continue;
            if (auto w = weak_witness(m, e, *s, side, x2 - x1, ceiling); w && ok(*w)) return w;
        }
        for (const auto& ep : m.family->at(*s).endpoints(256))
            if (ok(ep.value)) return ep.value;
    }
    if (y == 0) {
        Rational mid = (x1 + x2) / 2;
        if (ok(mid)) return mid;
    }
    if (m.base.mode == BaseMode::Tent && y > 0 && y <= tent_cap()) {
        for (const auto& g : gaps_wider_than(4 * y)) {
            if (g.b <= x1 || g.a >= x2) continue;
            for (const auto& c : tent_solutions(g, y))
                if (ok(c)) return c;
        }
    }
    return std::nullopt;
}

inline Report check_ivp_consistency(const SetValuedMap& m, int grid, int stage, std::uint64_t seed)
{
    Report r{"ivp"};
    if (grid < 1) throw PreconditionError("ivp grid must be positive");
    std::vector<Rational> xs;
    std::vector<std::optional<Rational>> tops;
    std::size_t undecided = 0;
    for (int k = 0; k <= grid; ++k) {
        Rational t(k, grid);
        t.canonicalize();
        auto b = eval_F(m, t, m.level, m.max_stage);
        if (b.kind == FBracket::Kind::Undecided) ++undecided;
        if (b.kind == FBracket::Kind::Interval) r.require(0 <= b.lowerMax && b.lowerMax <= b.upperMax, "F(" + to_string(t) + ") bracket malformed");
        if (b.kind == FBracket::Kind::Singleton) r.require(*b.pointValue >= 0, "F(" + to_string(t) + ") negative");
        xs.push_back(t);
        tops.push_back(top_value(b));
    }
    std::vector<std::tuple<Rational, Rational, Rational>> spots{{Rational(1, 4), Rational(1, 2), Rational(1, 2)}};
    for (std::size_t i = 0; i < xs.size(); ++i)
        for (std::size_t gap : {1, 2}) {
            if (i + gap >= xs.size() || !tops[i] || !tops[i + gap]) continue;
            if (*tops[i] == *tops[i + gap]) continue;
            spots.emplace_back(xs[i], xs[i + gap], (*tops[i] + *tops[i + gap]) / 2);
        }
    Json witnesses = Json::array();
    std::size_t found = 0;
    for (const auto& [x1, x2, y] : spots) {
        auto w = ivp_witness(m, x1, x2, y, stage);
        if (!w) {
            r.fail("no x in (" + to_string(x1) + ", " + to_string(x2) + ") with " + to_string(y) + " in F(x)");
            continue;
        }
        ++found;
        if (witnesses.size() < 8) witnesses.push_back({{"x1", jrat(x1)}, {"x2", jrat(x2)}, {"y", jrat(y)}, {"x", jrat(*w)}});
    }
    // the cited equivalence needs usc and weak continuity next to connected values
    auto usc = check_usc(m, 20, std::min(stage, 4), seed);
    std::vector<Rational> pts;
    for (const auto& e : m.c1().endpoints(10)) pts.push_back(e.value);
    auto weak = check_weak_continuity(m, pts, stage);
    r.require(usc.passed, "usc check failed");
    r.require(weak.passed, "weak continuity check failed");
    r.detail["grid"] = grid;
    r.detail["undecided"] = undecided;
    r.detail["spot_checks"] = spots.size();
    r.detail["spot_witnesses_found"] = found;
    r.detail["spot_samples"] = std::move(witnesses);
    r.detail["values_connected"] = r.passed;
    r.detail["usc"] = usc.passed;
    r.detail["weakly_continuous"] = weak.passed;
    r.detail["ivp_via"] = "connected values, usc and weak continuity";
    return r;
}

// ---------------------------------------------------------------------------
// Lightness

inline Report check_light(const SetValuedMap& m, int yGrid, int stage)
{
    Report r{"light"};
    r.detail["mode"] = to_string(m.base.mode);
    const auto& c0s = m.c0().stage(stage);
    if (m.base.mode == BaseMode::Zero) {
        // an open gap of C_0 maps to 0 in its entirety
        const IntervalSet gaps = interval_set_complement_in(m.c0().stage(1), core_base());
        std::optional<ClosedInterval> witness;
        for (const auto& g : gaps)
            if (g.contains(Rational(1, 2))) witness = g;
        r.require(witness.has_value(), "no stage-1 gap around 1/2");
        if (witness) {
            const Rational mid = (witness->lo + witness->hi) / 2;
            auto b = eval_F(m, mid, m.level, stage);
            r.require(b.kind == FBracket::Kind::Singleton && *b.pointValue == 0, "F is not {0} on the witness gap");
            r.require(m.c0().membership(mid, stage).verdict == Verdict::Out, "witness gap meets C_0");
            r.detail["witness_gap"] = witness->str();
        }
        r.detail["f_light"] = false;
        r.detail["F_light"] = false;
        r.detail["preimage_of"] = "0";
        return r;
    }

    // Tent mode: {t : y in F(t)} lies in stage(C_r) for the largest level
    // dyadic r below y, plus the finitely many tent points at height y.
    std::vector<Rational> ys;
    for (int k = 1; k <= yGrid; ++k) {
        Rational y(k, yGrid);
        y.canonicalize();
        ys.push_back(y);
    }
    for (unsigned long j = 5; j <= 8; ++j) ys.push_back(half_pow(j));
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

    std::vector<Rational> samples;
    for (int k = 0; k <= 256; ++k) samples.push_back(Rational(k, 256));
    for (auto& q : samples) q.canonicalize();
    for (const auto& e : m.c1().endpoints(32)) samples.push_back(e.value);
    for (const auto& g : gaps_through(2)) {
        samples.push_back((g.a + g.b) / 2);
        samples.push_back((3 * g.a + g.b) / 4);
    }
    std::vector<FBracket> brackets;
    for (const auto& t : samples) brackets.push_back(eval_F(m, t, m.level, stage));

    const auto levels = m.levels(m.level);
    Json rows = Json::array();
    for (const auto& y : ys) {
        Rational r_below(0);
        for (const auto& q : levels)
            if (q < y) r_below = q;
        const IntervalSet& cover = m.family->at(r_below).stage(stage);
        std::vector<Rational> tent_pts;
        if (y <= tent_cap())
            for (const auto& g : gaps_wider_than(4 * y))
                for (const auto& c : tent_solutions(g, y)) tent_pts.push_back(c);
        std::sort(tent_pts.begin(), tent_pts.end());
        std::vector<ClosedInterval> pts;
        for (const auto& c : tent_pts) pts.push_back(ClosedInterval::point(c));
        const IntervalSet pre = interval_set_union(cover, IntervalSet(std::move(pts)));
        r.require(pre.measure() <= cover.measure(), "preimage cover of " + to_string(y) + " gained measure from tent points");
        for (std::size_t i = 0; i < samples.size(); ++i) {
            if (brackets[i].refutes(y)) continue;
            r.require(pre.contains(samples[i]), "t = " + to_string(samples[i]) + " may map to " + to_string(y) + " outside the preimage cover");
        }
        Json row;
        row["y"] = jrat(y);
        row["cover_index"] = jrat(r_below);
        row["cover_measure"] = jrat(cover.measure());
        row["tent_points"] = tent_pts.size();
        row["preimage_measure"] = jrat(pre.measure());
        rows.push_back(std::move(row));
    }
    r.detail["stage"] = stage;
    r.detail["rows"] = std::move(rows);
    r.detail["zero_preimage"] = "{0} u C_0 u {1} u tent feet, measure " + to_string(c0s.measure()) + " at stage " + std::to_string(stage);
    r.detail["f_light"] = true;
    r.detail["F_light"] = true;
    return r;
}

// ---------------------------------------------------------------------------
// Fissile points

inline Report check_not_almost_nonfissile(const SetValuedMap& m, int stage)
{
    Report r{"nonfissile"};
    const auto& c1s = m.c1().stage(stage);
    const int at = c1s.locate(Rational(1, 4));
    r.require(at >= 0, "1/4 outside the core cover");
    if (at < 0) return r;
    const ClosedInterval box_x = c1s[static_cast<std::size_t>(at)];
    const Rational ylo(1, 2), yhi(1);
    // every nonfissile point (t, f(t)) sits at height <= sup f < 1/2
    r.require(m.base.sup_value() < ylo, "sup f reaches the box");
    std::size_t graph_points = 0;
    for (const auto& e : m.c1().endpoints(256)) {
        if (!box_x.contains(e.value)) continue;
        auto b = eval_F(m, e.value);
        r.require(b.nondegenerate(), "core point " + to_string(e.value) + " is not fissile");
        const Rational y = (ylo + yhi) / 2;
        if (b.certifies(y)) ++graph_points;
    }
    r.require(graph_points > 0, "no graph point found in the box");
    auto quarter = eval_F(m, Rational(1, 4));
    r.require(quarter.kind == FBracket::Kind::Interval && quarter.lowerMax == 1, "F(1/4) is not [0,1]");
    auto half = eval_F(m, Rational(1, 2));
    r.require(half.kind == FBracket::Kind::Singleton, "F(1/2) is not a singleton");
    std::size_t fissile = 0, sampled = 0;
    for (int k = 0; k <= 512; ++k) {
        Rational t(k, 512);
        t.canonicalize();
        auto b = eval_F(m, t);
        ++sampled;
        if (b.kind == FBracket::Kind::Interval && b.lowerMax > 0) ++fissile;
        if (b.kind == FBracket::Kind::Singleton) r.require(certify_step(m, t, eval_f(m.base, t, m.max_stage).value()).ok, "f(t) not in F(t)");
    }
    r.detail["open_set"] = {{"x", box_x.str()}, {"y_open", to_string(ylo) + ".." + to_string(yhi)}};
    r.detail["graph_points_in_box"] = graph_points;
    r.detail["sampled"] = sampled;
    r.detail["fissile_sampled"] = fissile;
    r.detail["half"] = {{"t", "1/2"}, {"image", to_string(*half.pointValue)}};
    return r;
}

// ---------------------------------------------------------------------------
// Empty interior of the graph

inline Report check_empty_interior(const SetValuedMap& m, const std::vector<int>& stages)
{
    Report r{"interior"};
    if (!std::is_sorted(stages.begin(), stages.end()) || std::adjacent_find(stages.begin(), stages.end()) != stages.end())
        throw PreconditionError("stages must increase");
    Json rows = Json::array();
    std::optional<Rational> prev;
    for (int d : stages) {
        auto gc = graph_cover(m, d, m.level);
        const Rational total = gc.area();
        const Rational core_measure = m.c1().stage(d).measure();
        r.require(gc.core_area == core_measure, "stage " + std::to_string(d) + ": core area differs from the core measure");
        if (prev) r.require(total < *prev, "stage " + std::to_string(d) + ": area did not decrease");
        prev = total;
        Json row;
        row["stage"] = d;
        row["boxes"] = gc.boxes.size();
        row["area"] = jrat(total);
        row["core_area"] = jrat(gc.core_area);
        row["c0_measure"] = jrat(m.c0().stage(d).measure());
        rows.push_back(std::move(row));
    }
    // every open box of an 8x8 grid holds a point off the graph
    const int last = stages.empty() ? 0 : stages.back();
    auto gc = graph_cover(m, last, m.level);
    std::size_t escaped = 0;
    const int n = 8;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const Rational xlo(i, n), xhi(i + 1, n), ylo(j, n), yhi(j + 1, n);
            std::optional<Rational> gx;
            for (int d = 0; d <= std::max(last, 8) && !gx; ++d) {
                for (const auto& g : interval_set_complement_in(m.c0().stage(d), ClosedInterval::unit())) {
                    const Rational lo = max_of(g.lo, xlo), hi = min_of(g.hi, xhi);
                    if (lo < hi) {
                        gx = (lo + hi) / 2;
                        break;
                    }
                }
            }
            if (!gx) {
                r.fail("no gap inside x-range " + to_string(xlo) + ".." + to_string(xhi));
                continue;
            }
            const Rational fx = eval_f(m.base, *gx, 64).value();
            Rational y = (ylo + yhi) / 2;
            if (y == fx) y = ylo + (yhi - ylo) / 3;
            r.require(certify_step(m, *gx, y).how == "refuted", "point (" + to_string(*gx) + ", " + to_string(y) + ") not certified off the graph");
            if (!gc.contains(*gx, y)) ++escaped;
        }
    }
    r.detail["rows"] = std::move(rows);
    r.detail["grid_boxes"] = n * n;
    r.detail["off_graph_witnesses"] = r.passed;
    r.detail["escaped_last_cover"] = escaped;
    return r;
}

// ---------------------------------------------------------------------------
// Tree-likeness hypotheses

// Largest component of the stage-d cover of C_0: a core cylinder with the
// depth-(d+1) piece cylinders glued to both of its ends.
inline Rational c0_width_bound(int d)
{
    const Rational core = Rational(1, 2) * third_pow(static_cast<unsigned long>(d));
    const Rational piece = Rational(1, 6) * third_pow(static_cast<unsigned long>(d + 1));
    return core + 2 * piece;
}

inline Report check_treelike_hypotheses(const SetValuedMap& m, int stage)
{
    Report r{"treelike"};
    const Rational eighth(1, 8);
    r.require(m.base.sup_value() < eighth, "sup f is not below 1/8");
    Json widths = Json::array();
    std::optional<Rational> prev;
    for (int d = 0; d <= stage; ++d) {
        const auto& cs = m.c0().stage(d);
        r.require(cs.min() == eighth, "stage " + std::to_string(d) + " of C_0 does not start at 1/8");
        const Rational w = cs.max_width();
        r.require(w <= c0_width_bound(d), "stage " + std::to_string(d) + ": component wider than the bound");
        if (prev) r.require(w < *prev, "stage " + std::to_string(d) + ": max width did not shrink");
        prev = w;
        widths.push_back({{"stage", d}, {"max_width", jrat(w)}, {"bound", jrat(c0_width_bound(d))}, {"core_max_width", jrat(m.c1().stage(d).max_width())}});
    }
    const Rational core_bound = Rational(1, 2) * Rational(pow_int(2, static_cast<unsigned long>(stage)), pow_int(3, static_cast<unsigned long>(stage)));
    r.require(m.c1().stage(stage).max_width() <= core_bound, "core component wider than (1/2)(2/3)^d");

    // singleton values miss stage(C_0), and nondegenerate values sit over C_0
    const auto& cs = m.c0().stage(stage);
    std::size_t singletons = 0, nondegenerate = 0;
    std::vector<Rational> ts;
    for (int k = 0; k <= 512; ++k) ts.push_back(Rational(k, 512));
    for (const auto& g : gaps_through(3)) ts.push_back((g.a + g.b) / 2);
    for (const auto& e : m.c0().endpoints(64)) ts.push_back(e.value);
    for (auto& t : ts) {
        t.canonicalize();
        auto b = eval_F(m, t, m.level, stage);
        if (b.kind == FBracket::Kind::Singleton) {
            ++singletons;
            r.require(*b.pointValue < eighth, "F(" + to_string(t) + ") = " + to_string(*b.pointValue) + " is not below 1/8");
            r.require(!cs.contains(*b.pointValue), "F(" + to_string(t) + ") meets stage(C_0)");
        }
        if (b.nondegenerate()) {
            ++nondegenerate;
            r.require(m.c0().membership(t, stage).verdict == Verdict::In, to_string(t) + " has a nondegenerate value outside C_0");
        }
    }
    r.detail["stage"] = stage;
    r.detail["widths"] = std::move(widths);
    r.detail["core_bound"] = jrat(core_bound);
    r.detail["sampled_singletons"] = singletons;
    r.detail["sampled_nondegenerate"] = nondegenerate;
    r.detail["closed_set"] = "C_0";
    return r;
}

// ---------------------------------------------------------------------------
// Threads, arcs, products

inline std::vector<Thread> canned_threads(const SetValuedMap& m, std::size_t count)
{
    const std::vector<Rational> pivots{Rational(0), Rational(1, 2), Rational(1, 16), Rational(15, 16), Rational(1, 32)};
    std::vector<Thread> out;
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t prefix = i % 6;
        const int period = 1 + static_cast<int>((i / 2) % 4);
        out.push_back(make_thread(m, pivots[i % pivots.size()], make_cycle(m, period), prefix));
    }
    return out;
}

inline std::vector<Thread> arc_threads(const SetValuedMap& m)
{
    return {make_thread(m, 0, make_cycle(m, 2), 0), make_thread(m, Rational(1, 2), make_cycle(m, 1), 1),
            make_thread(m, Rational(1, 16), make_cycle(m, 3), 2), make_thread(m, 0, make_cycle(m, 2), 3),
            make_thread(m, Rational(15, 16), make_cycle(m, 4), 4)};
}

inline Report check_tail(const SetValuedMap& m, const std::vector<Thread>& threads)
{
    Report r{"tail"};
    Json rows = Json::array();
    for (std::size_t i = 0; i < threads.size(); ++i) {
        const auto& th = threads[i];
        std::optional<std::size_t> n;
        try {
            n = tail_index(m, th);
        } catch (const Error& e) {
            r.fail("thread " + std::to_string(i) + ": " + e.what());
            continue;
        }
        r.require(th.zero ? !n : (n && *n == th.tailStart), "thread " + std::to_string(i) + ": tail index differs from construction");
        for (std::size_t k = 0; k < th.represented(); ++k)
            if (k < th.tailStart) r.require(th.coord(k) < Rational(1, 8) || k + 1 == th.tailStart, "thread " + std::to_string(i) + ": prefix coordinate at or above 1/8");
        Thread copy = th;
        certify_thread(m, copy);
        for (const auto& c : copy.certificates)
            r.require(c.ok, "thread " + std::to_string(i) + ": step " + to_string(c.from) + " -> " + to_string(c.to) + " not certified");
        rows.push_back({{"thread", th.to_json()}, {"N", n ? Json(*n) : Json(nullptr)}});
    }
    // two threads with one tail agree past their last differing coordinate
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < threads.size(); ++i)
        for (std::size_t j = i + 1; j < threads.size(); ++j) {
            const auto& a = threads[i];
            const auto& b = threads[j];
            if (a.zero || b.zero || a.tailPeriod != b.tailPeriod) continue;
            const std::size_t p = a.tailPeriod.size();
            if (a.tailStart % p != b.tailStart % p) continue;
            const std::size_t shift = std::max(a.tailStart, b.tailStart);
            std::size_t last = 0;
            for (std::size_t k = 0; k < shift + 2 * p; ++k)
                if (a.coord(k) != b.coord(k)) last = k + 1;
            r.require(last <= shift, "threads " + std::to_string(i) + "," + std::to_string(j) + " differ beyond their prefixes");
            ++pairs;
        }
    r.detail["threads"] = std::move(rows);
    r.detail["shared_tail_pairs"] = pairs;
    return r;
}

inline Report check_arcs(const SetValuedMap& m, const std::vector<Thread>& threads, std::size_t M)
{
    Report r{"arcs"};
    Json rows = Json::array();
    for (const auto& th : threads) {
        auto sys = make_arc_system(m, th);
        auto rep = verify_arc_chain(m, sys, M);
        for (const auto& f : rep.failures) r.fail(f);
        if (!rep.passed && rep.failures.empty()) r.fail("arc chain failed");
        rows.push_back(rep.to_json());
    }
    bool rejected = false;
    try {
        make_arc_system(m, zero_thread());
    } catch (const PreconditionError&) {
        rejected = true;
    }
    r.require(rejected, "the zero thread was accepted as an arc base");
    r.detail["M"] = M;
    r.detail["chains"] = std::move(rows);
    return r;
}

inline Report check_mahavier(const SetValuedMap& m, const std::vector<Thread>& threads, std::size_t n, int stage)
{
    Report r{"mahavier"};
    auto bc = mahavier_cover(m, n, stage, m.level);
    for (std::size_t i = 0; i < threads.size(); ++i)
        r.require(bc.contains(threads[i].head(n + 1)), "thread " + std::to_string(i) + " truncation outside the cover");
    r.require(bc.contains(zero_thread().head(n + 1)), "zero thread outside the cover");
    const auto proj = bc.projection(n);
    r.require(proj.size() == 1 && proj[0] == ClosedInterval::unit(), "projection to the last coordinate is " + proj.str());
    auto one = mahavier_cover(m, 1, stage, m.level);
    const auto gc = graph_cover(m, stage, m.level);
    bool same = one.boxes.size() == gc.boxes.size();
    for (std::size_t i = 0; same && i < gc.boxes.size(); ++i) {
        const auto& b = gc.boxes[i];
        same = std::find(one.boxes.begin(), one.boxes.end(), std::vector<ClosedInterval>{b.y, b.x}) != one.boxes.end();
    }
    r.require(same, "the one-step product differs from the graph cover");
    r.detail["n"] = n;
    r.detail["stage"] = stage;
    r.detail["boxes"] = bc.boxes.size();
    return r;
}

// ---------------------------------------------------------------------------
// Suites

inline const std::vector<std::string>& suite_names()
{
    static const std::vector<std::string> names{"nesting", "endpoints", "sup",  "cycles", "usc",      "ivp",     "light",
                                                "nonfissile", "interior", "treelike", "tail", "arcs", "mahavier"};
    return names;
}

inline Report run_suite(const std::string& name, const SetValuedMap& m, const CheckConfig& cfg)
{
    const auto& fam = *m.family;
    if (name == "nesting") return check_nesting(fam, cfg.stage);
    if (name == "endpoints") {
        std::vector<Rational> sources{Rational(0)};
        if (fam.level >= 1) sources.push_back(Rational(1, 2));
        return check_endpoints(fam, sources, 50, cfg.ceiling);
    }
    if (name == "sup") return check_sup_on_core(m, 100);
    if (name == "cycles") return check_cycles(m, cfg.max_period);
    if (name == "usc") {
        auto r = check_usc(m, 200, cfg.stage, cfg.seed);
        std::vector<Rational> pts;
        for (const auto& e : m.c1().endpoints(50)) pts.push_back(e.value);
        auto w = check_weak_continuity(m, pts, cfg.ceiling);
        for (const auto& f : w.failures) r.fail(f);
        r.detail["weak_continuity"] = w.to_json();
        return r;
    }
    if (name == "ivp") return check_ivp_consistency(m, 16, cfg.stage, cfg.seed);
    if (name == "light") return check_light(m, 16, cfg.stage);
    if (name == "nonfissile") return check_not_almost_nonfissile(m, cfg.stage);
    if (name == "interior") {
        std::vector<int> stages;
        for (int d = 0; d <= cfg.stage; ++d) stages.push_back(d);
        return check_empty_interior(m, stages);
    }
    if (name == "treelike") return check_treelike_hypotheses(m, cfg.stage);
    if (name == "tail") return check_tail(m, cfg.threads.empty() ? canned_threads(m, 20) : cfg.threads);
    if (name == "arcs") {
        if (cfg.threads.empty()) return check_arcs(m, arc_threads(m), 6);
        std::vector<Thread> nonzero;
        for (const auto& th : cfg.threads)
            if (!th.zero) nonzero.push_back(th);
        std::size_t M = 6;
        for (const auto& th : nonzero) M = std::max(M, th.tailStart);
        return check_arcs(m, nonzero, M);
    }
    if (name == "mahavier") return check_mahavier(m, cfg.threads.empty() ? canned_threads(m, 20) : cfg.threads, 2, std::min(cfg.stage, 3));
    throw PreconditionError("unknown suite '" + name + "'");
}

}  // namespace gillab
