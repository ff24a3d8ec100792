#pragma once

// Refinable Cantor set generators.
//
//   middle_thirds(base)      the standard construction on a closed interval
//   build_C0(core)           core = middle_thirds([1/4,3/4]) plus a full
//                            middle-thirds set on every gap of the core inside
//                            [1/8, 7/8] (including the two side gaps)
//   build_intermediate(i,o)  outer minus a union of open removal windows, one
//                            per gap of the outer set, chosen so that the result
//                            sits strictly between inner and outer
//
// Each generator exposes nested stage covers (normalized IntervalSets),
// three-valued membership and endpoint enumeration in discovery order.
//
// Addressing inside C_0. A "piece" is one gap [a, b] of the core together with
// the middle-thirds set on it; its generation is 0 for the side gaps and |v|+1
// for the gap below core node v. A piece node w (a word) owns the gap
// node_gap(w) in piece coordinates and is discovered at stage max(gen, |w|).
//
// Family sets carry a dyadic parameter theta: 0 for C_0, 1 for the core. A set
// with 0 < theta < 1 removes, for every piece node w, the open window
//     (w L R^3 s(theta), w R L^3 s'(theta))
// around the gap of w, plus one-sided windows at the two extremes of C_0. Here
// s(theta) spells the binary digits of theta as blocks (1 -> LR, 0 -> RL)
// followed by (RL) forever, and s' swaps the letters. Windows grow with theta,
// never split a node's two grandchild cylinders, and their ends are
// eventually-alternating words, so every membership question has an exact
// answer.

#include "gillab/address.hpp"
#include "gillab/interval_set.hpp"
#include "gillab/rational.hpp"

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace gillab {

inline constexpr int kWindowRun = 3;

enum class Verdict { In, Out, Unknown };

inline const char* to_string(Verdict v)
{
    switch (v) {
    case Verdict::In: return "in";
    case Verdict::Out: return "out";
    default: return "unknown";
    }
}

struct Membership {
    Verdict verdict = Verdict::Unknown;
    std::optional<int> decidedAtStage;

    static Membership in() { return {Verdict::In, std::nullopt}; }
    static Membership out(int stage) { return {Verdict::Out, stage}; }
    static Membership unknown() { return {Verdict::Unknown, std::nullopt}; }
};

// A point of a middle-thirds set on `base`, named by its branch word.
struct CantorAddress {
    ClosedInterval base;
    Address word;

    Rational value() const { return affine(base, word.unit_value()); }

    // Hull of the stage-`stage` cylinder containing the point.
    ClosedInterval bracket(int stage) const
    {
        auto h = cylinder_hull(word.head(static_cast<std::size_t>(stage)));
        return {affine(base, h.lo), affine(base, h.hi)};
    }

    std::string str() const { return base.str() + ":" + word.str(); }

    static CantorAddress parse(std::string_view text)
    {
        auto colon = text.find(':');
        if (colon == std::string_view::npos) throw Error("malformed cantor address: '" + std::string(text) + "'");
        return {parse_interval(text.substr(0, colon)), Address::parse(text.substr(colon + 1))};
    }

    friend bool operator==(const CantorAddress& a, const CantorAddress& b)
    {
        return a.base == b.base && a.word == b.word;
    }
};

inline ClosedInterval address_bracket(const CantorAddress& addr, int stage) { return addr.bracket(stage); }

// ---------------------------------------------------------------------------
// C_0 geometry

inline const ClosedInterval& core_base()
{
    static const ClosedInterval b{Rational(1, 4), Rational(3, 4)};
    return b;
}

inline const ClosedInterval& c0_window()
{
    static const ClosedInterval w{Rational(1, 8), Rational(7, 8)};
    return w;
}

class Piece {
public:
    int side = -1;     // -1 left side gap, +1 right side gap, 0 a gap of the core
    std::string node;  // core node owning the gap when side == 0

    Piece() : Piece(-1, {}) {}
    Piece(int s, std::string v) : side(s), node(std::move(v)), base_(make_base(side, node)) {}

    static Piece left() { return {-1, {}}; }
    static Piece right() { return {1, {}}; }
    static Piece inner(std::string v) { return {0, std::move(v)}; }

    int generation() const { return side ? 0 : static_cast<int>(node.size()) + 1; }
    const ClosedInterval& base() const { return base_; }

    std::string str() const
    {
        if (side < 0) return "left";
        if (side > 0) return "right";
        return "core:" + node;
    }

    static Piece parse(std::string_view text)
    {
        if (text == "left") return left();
        if (text == "right") return right();
        if (text.starts_with("core:")) return inner(std::string(text.substr(5)));
        throw Error("malformed piece: '" + std::string(text) + "'");
    }

    friend bool operator==(const Piece& a, const Piece& b) { return a.side == b.side && a.node == b.node; }

private:
    static ClosedInterval make_base(int side, const std::string& node)
    {
        if (side < 0) return {c0_window().lo, core_base().lo};
        if (side > 0) return {core_base().hi, c0_window().hi};
        auto g = node_gap(node);
        return {affine(core_base(), g.lo), affine(core_base(), g.hi)};
    }

    ClosedInterval base_;
};

inline int discovery_stage(const Piece& p, std::size_t depth)
{
    return std::max(p.generation(), static_cast<int>(depth));
}

inline OpenInterval piece_gap(const Piece& p, std::string_view w)
{
    auto base = p.base();
    auto g = node_gap(w);
    return {affine(base, g.lo), affine(base, g.hi)};
}

// Words of length k in lexicographic (= value) order.
inline void for_each_word(std::size_t k, const std::function<void(const std::string&)>& fn)
{
    std::string w(k, 'L');
    const unsigned long long n = 1ULL << k;
    for (unsigned long long j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < k; ++i) w[i] = (j >> (k - 1 - i)) & 1 ? 'R' : 'L';
        fn(w);
    }
}

// Pieces of generation <= g, ordered by position.
inline std::vector<Piece> pieces_through(int g)
{
    std::vector<Piece> out{Piece::left()};
    std::function<void(const std::string&)> walk = [&](const std::string& v) {
        if (static_cast<int>(v.size()) + 1 > g) return;
        walk(v + 'L');
        out.push_back(Piece::inner(v));
        walk(v + 'R');
    };
    walk("");
    out.push_back(Piece::right());
    return out;
}

struct C0Location {
    enum class Kind { Below, Above, Core, InPiece, PieceGap };
    Kind kind = Kind::Below;
    Address address;  // Core: core coordinates; InPiece: piece coordinates
    Piece piece;
    std::string node; // PieceGap: piece node whose gap holds the point
};

inline C0Location locate_piece(const Piece& p, const Rational& t)
{
    C0Location loc;
    loc.piece = p;
    auto path = ternary_locate(unaffine(p.base(), t));
    if (path.in_set) {
        loc.kind = C0Location::Kind::InPiece;
        loc.address = std::move(path.address);
    } else {
        loc.kind = C0Location::Kind::PieceGap;
        loc.node = std::move(path.gap_node);
    }
    return loc;
}

inline C0Location locate_c0(const Rational& t)
{
    C0Location loc;
    if (t < c0_window().lo) return loc;
    if (t > c0_window().hi) {
        loc.kind = C0Location::Kind::Above;
        return loc;
    }
    if (t < core_base().lo) return locate_piece(Piece::left(), t);
    if (t > core_base().hi) return locate_piece(Piece::right(), t);
    auto path = ternary_locate(unaffine(core_base(), t));
    if (path.in_set) {
        loc.kind = C0Location::Kind::Core;
        loc.address = std::move(path.address);
        return loc;
    }
    return locate_piece(Piece::inner(path.gap_node), t);
}

// ---------------------------------------------------------------------------
// Removal windows for a family parameter

inline std::string theta_blocks(const Rational& theta, bool swapped)
{
    if (!is_dyadic(theta) || theta <= 0 || theta >= 1) throw PreconditionError("window parameter must be a dyadic in (0,1)");
    std::string out;
    Rational x = theta;
    while (x != 0) {
        x *= 2;
        bool one = x >= 1;
        if (one) x -= 1;
        out += (one != swapped) ? "LR" : "RL";
    }
    return out;
}

struct WindowShape {
    Rational theta;
    Address lo_word;       // L R^K s(theta), relative to the node cylinder
    Address hi_word;       // R L^K s'(theta)
    Address left_extreme;  // L^K s'(theta), in the left side piece
    Address right_extreme; // R^K s(theta), in the right side piece
    Rational lo, hi, left_extreme_value, right_extreme_value;

    explicit WindowShape(const Rational& t) : theta(t)
    {
        const std::string run_r(kWindowRun, 'R');
        const std::string run_l(kWindowRun, 'L');
        const std::string s = theta_blocks(t, false);
        const std::string sw = theta_blocks(t, true);
        lo_word = Address("L" + run_r + s, "RL");
        hi_word = Address("R" + run_l + sw, "LR");
        left_extreme = Address(run_l + sw, "LR");
        right_extreme = Address(run_r + s, "RL");
        lo = lo_word.unit_value();
        hi = hi_word.unit_value();
        left_extreme_value = left_extreme.unit_value();
        right_extreme_value = right_extreme.unit_value();
    }

    CantorAddress window_lo(const Piece& p, const std::string& w) const
    {
        return {p.base(), Address(w + lo_word.prefix, lo_word.period)};
    }
    CantorAddress window_hi(const Piece& p, const std::string& w) const
    {
        return {p.base(), Address(w + hi_word.prefix, hi_word.period)};
    }
};

// When a point leaves the stage covers.
struct Exclusion {
    std::optional<int> core;    // stage at which it leaves the C_0 covers
    std::optional<int> removal; // discovery stage of the first removal window holding it
};

// Exclusion of a point already located in a piece; u is its piece coordinate.
inline Exclusion piece_exclusion(const C0Location& loc, const Rational& u, const WindowShape* shape)
{
    using K = C0Location::Kind;
    Exclusion ex;
    const int g = loc.piece.generation();
    if (loc.kind == K::PieceGap) ex.core = discovery_stage(loc.piece, loc.node.size());
    if (!shape) return ex;

    if ((loc.piece.side < 0 && u < shape->left_extreme_value) || (loc.piece.side > 0 && u > shape->right_extreme_value)) {
        ex.removal = 0;
        return ex;
    }
    // Window at prefix w holds t iff t's coordinate inside cylinder(w) lies in
    // (lo, hi). Past prefix+period the local coordinates repeat.
    const std::size_t limit = loc.kind == K::InPiece ? loc.address.prefix.size() + loc.address.period.size()
                                                     : loc.node.size() + 1;
    Rational x = u;
    for (std::size_t k = 0; k < limit; ++k) {
        if (shape->lo < x && x < shape->hi) {
            ex.removal = std::max(g, static_cast<int>(k));
            return ex;
        }
        char c = loc.kind == K::InPiece ? loc.address.at(k) : (k < loc.node.size() ? loc.node[k] : 'L');
        if (c == 'L')
            x *= 3;
        else
            x = 3 * x - 2;
    }
    return ex;
}

inline Exclusion exclusion_of(const Rational& t, const WindowShape* shape)
{
    Exclusion ex;
    auto loc = locate_c0(t);
    using K = C0Location::Kind;
    if (loc.kind == K::Below || loc.kind == K::Above) {
        ex.core = 0;
        if (shape) ex.removal = 0;
        return ex;
    }
    if (loc.kind == K::Core) return ex;
    return piece_exclusion(loc, unaffine(loc.piece.base(), t), shape);
}

// ---------------------------------------------------------------------------
// Endpoints and schedules

enum class EndSide { Left, Right };

inline const char* to_string(EndSide s) { return s == EndSide::Left ? "left" : "right"; }

struct EndpointDescriptor {
    Rational value;
    EndSide side = EndSide::Left;
    int stage = 0;
    int depth = 0;                        // tree depth; -1 for the extremes
    bool extreme = false;
    Piece piece;                          // owning piece (C_0 and family sets)
    std::string node;                     // owning piece node
    std::optional<CantorAddress> address; // branch-word form when available
};

struct Removal {
    OpenInterval window; // extremes use a window reaching past [0,1]
    std::optional<CantorAddress> lo;
    std::optional<CantorAddress> hi;
    Piece piece;
    std::string node;
    bool extreme = false;
    int stage = 0;
};

struct ScheduleEntry {
    EndpointDescriptor point; // endpoint of the outer set
    std::size_t removal = 0;  // index into the removal list
    bool reused = false;      // point already lay in an earlier window
};

struct RemovalSchedule {
    std::deque<ScheduleEntry> entries;
    std::deque<Removal> removals;
};

class CantorGen;

namespace detail {

struct GenState;
using GenPtr = std::shared_ptr<GenState>;

enum class GenKind { MiddleThirds, GapAttached, Intermediate };

struct GenState {
    GenKind kind = GenKind::MiddleThirds;
    ClosedInterval base = ClosedInterval::unit();
    GenPtr core;  // GapAttached: the core generator
    GenPtr inner; // Intermediate
    GenPtr outer; // Intermediate
    GenPtr c0;    // Intermediate: the C_0 generator underneath
    std::optional<WindowShape> shape;
    int budget = 0;

    mutable std::recursive_mutex mu;
    mutable std::map<int, IntervalSet> covers;
    mutable RemovalSchedule schedule;
    mutable std::map<Rational, std::size_t> window_index; // window lo -> removal
    mutable int scheduled_through = -1;
};

// Left ends of the depth-k middle-thirds cylinders of [0,1], in order.
inline std::vector<Rational> cylinder_lefts(int k)
{
    std::vector<Rational> xs{Rational(0)};
    for (int i = 1; i <= k; ++i) {
        Rational step = 2 * third_pow(static_cast<unsigned long>(i));
        std::vector<Rational> next;
        next.reserve(xs.size() * 2);
        for (const auto& x : xs) {
            next.push_back(x);
            next.push_back(x + step);
        }
        xs = std::move(next);
    }
    return xs;
}

inline void append_cylinders(std::vector<ClosedInterval>& out, const ClosedInterval& base, const std::vector<Rational>& lefts, int k)
{
    const Rational w = base.width() * third_pow(static_cast<unsigned long>(k));
    const Rational span = base.width();
    for (const auto& x : lefts) {
        Rational lo = base.lo + span * x;
        out.emplace_back(lo, lo + w);
    }
}

inline Membership middle_thirds_membership(const ClosedInterval& base, const Rational& t)
{
    if (!base.contains(t)) return Membership::out(0);
    auto path = ternary_locate(unaffine(base, t));
    if (path.in_set) return Membership::in();
    return Membership::out(static_cast<int>(path.gap_node.size()) + 1);
}

}  // namespace detail

class CantorGen {
public:
    enum class Kind { MiddleThirds, GapAttached, Intermediate };

    CantorGen() = default;

    explicit operator bool() const { return static_cast<bool>(s_); }
    bool same(const CantorGen& o) const { return s_ == o.s_; }

    Kind kind() const { return static_cast<Kind>(state().kind); }
    const ClosedInterval& base() const { return state().base; }
    int budget() const { return state().budget; }
    CantorGen inner() const { return CantorGen(state().inner); }
    CantorGen outer() const { return CantorGen(state().outer); }
    CantorGen core() const { return CantorGen(state().core); }

    // Family parameter: 1 for the core, 0 for C_0, theta for intermediates;
    // none for middle-thirds sets on other bases.
    std::optional<Rational> theta() const
    {
        const auto& s = state();
        switch (s.kind) {
        case detail::GenKind::MiddleThirds:
            if (s.base == core_base()) return Rational(1);
            return std::nullopt;
        case detail::GenKind::GapAttached: return Rational(0);
        default: return s.shape->theta;
        }
    }

    const IntervalSet& stage(int d) const;
    Membership membership(const Rational& t, int maxStage) const;
    // Same verdict for a point given by its branch word inside a C_0 piece.
    Membership membership_at(const Piece& piece, const Address& word, int maxStage) const;
    std::vector<EndpointDescriptor> endpoints_at_stage(int s) const;
    std::vector<EndpointDescriptor> endpoints(std::size_t count) const;

    // Removal schedule of an intermediate set, materialized through `stage`.
    RemovalSchedule schedule(int stage) const;

    // Removal windows applied to the stage-d cover.
    std::vector<OpenInterval> removals_for_stage(int d) const;

    // Install a cover read from a cache. Ignored when already computed.
    void preload_stage(int d, IntervalSet cover) const
    {
        const auto& s = state();
        std::lock_guard lock(s.mu);
        s.covers.emplace(d, std::move(cover));
    }

    bool stage_cached(int d) const
    {
        const auto& s = state();
        std::lock_guard lock(s.mu);
        return s.covers.count(d) > 0;
    }

private:
    explicit CantorGen(detail::GenPtr s) : s_(std::move(s)) {}

    const detail::GenState& state() const
    {
        if (!s_) throw Error("empty CantorGen handle");
        return *s_;
    }

    void materialize_schedule(int stage) const;

    detail::GenPtr s_;

    friend CantorGen middle_thirds(const ClosedInterval& base);
    friend CantorGen build_C0(const CantorGen& core);
    friend CantorGen build_intermediate(const CantorGen& inner, const CantorGen& outer, int budget);
};

inline CantorGen middle_thirds(const ClosedInterval& base)
{
    if (base.degenerate()) throw PreconditionError("middle_thirds: degenerate base " + base.str());
    auto s = std::make_shared<detail::GenState>();
    s->kind = detail::GenKind::MiddleThirds;
    s->base = base;
    return CantorGen(s);
}

inline CantorGen build_C0(const CantorGen& core)
{
    if (!core || core.kind() != CantorGen::Kind::MiddleThirds || !(core.base() == core_base()))
        throw PreconditionError("build_C0: expects the middle-thirds set on [1/4,3/4]");
    auto s = std::make_shared<detail::GenState>();
    s->kind = detail::GenKind::GapAttached;
    s->base = c0_window();
    s->core = core.s_;
    return CantorGen(s);
}

inline const IntervalSet& CantorGen::stage(int d) const
{
    if (d < 0) throw Error("negative stage");
    const auto& s = state();
    std::lock_guard lock(s.mu);
    if (auto it = s.covers.find(d); it != s.covers.end()) return it->second;

    IntervalSet cover;
    switch (s.kind) {
    case detail::GenKind::MiddleThirds: {
        std::vector<ClosedInterval> parts;
        detail::append_cylinders(parts, s.base, detail::cylinder_lefts(d), d);
        cover = IntervalSet::from_sorted_disjoint(std::move(parts));
        break;
    }
    case detail::GenKind::GapAttached: {
        std::vector<ClosedInterval> parts;
        detail::append_cylinders(parts, core_base(), detail::cylinder_lefts(d), d);
        auto lefts = detail::cylinder_lefts(d + 1);
        for (const auto& p : pieces_through(d)) detail::append_cylinders(parts, p.base(), lefts, d + 1);
        cover = IntervalSet(std::move(parts));
        break;
    }
    case detail::GenKind::Intermediate: {
        const auto& base_cover = CantorGen(s.c0).stage(d);
        auto rem = removals_for_stage(d);
        cover = interval_set_subtract_open(base_cover, rem);
        break;
    }
    }
    return s.covers.emplace(d, std::move(cover)).first->second;
}

inline std::vector<OpenInterval> CantorGen::removals_for_stage(int d) const
{
    const auto& s = state();
    if (s.kind != detail::GenKind::Intermediate) return {};
    const int upto = std::min(d, s.budget);
    std::lock_guard lock(s.mu);
    materialize_schedule(upto);
    std::vector<OpenInterval> rem;
    for (const auto& [lo, idx] : s.window_index) {
        const auto& r = s.schedule.removals[idx];
        if (r.stage <= upto) rem.push_back(r.window);
    }
    return rem;
}

inline Membership CantorGen::membership(const Rational& t, int maxStage) const
{
    const auto& s = state();
    switch (s.kind) {
    case detail::GenKind::MiddleThirds: return detail::middle_thirds_membership(s.base, t);
    case detail::GenKind::GapAttached: {
        auto ex = exclusion_of(t, nullptr);
        if (!ex.core) return Membership::in();
        if (*ex.core <= maxStage) return Membership::out(*ex.core);
        return Membership::unknown();
    }
    case detail::GenKind::Intermediate: {
        auto ex = exclusion_of(t, &*s.shape);
        if (!ex.core && !ex.removal) return Membership::in();
        std::optional<int> leaves = ex.core;
        if (ex.removal && *ex.removal <= s.budget && (!leaves || *ex.removal < *leaves)) leaves = ex.removal;
        if (leaves && *leaves <= maxStage) return Membership::out(*leaves);
        return Membership::unknown();
    }
    }
    return Membership::unknown();
}

inline Membership CantorGen::membership_at(const Piece& piece, const Address& word, int maxStage) const
{
    const auto& s = state();
    switch (s.kind) {
    case detail::GenKind::MiddleThirds: {
        if (!(s.base == core_base())) return membership(affine(piece.base(), word.unit_value()), maxStage);
        const bool at_lo = word == Address("", "L");
        const bool at_hi = word == Address("", "R");
        if ((at_lo && piece.side >= 0) || (at_hi && piece.side <= 0)) return Membership::in();
        return piece.generation() <= maxStage ? Membership::out(piece.generation()) : Membership::unknown();
    }
    case detail::GenKind::GapAttached: return Membership::in();
    case detail::GenKind::Intermediate: {
        C0Location loc;
        loc.kind = C0Location::Kind::InPiece;
        loc.piece = piece;
        loc.address = word;
        auto ex = piece_exclusion(loc, word.unit_value(), &*s.shape);
        if (!ex.removal) return Membership::in();
        if (*ex.removal <= s.budget && *ex.removal <= maxStage) return Membership::out(*ex.removal);
        return Membership::unknown();
    }
    }
    return Membership::unknown();
}

inline std::vector<EndpointDescriptor> CantorGen::endpoints_at_stage(int st) const
{
    const auto& s = state();
    std::vector<EndpointDescriptor> out;
    switch (s.kind) {
    case detail::GenKind::MiddleThirds: {
        if (st == 0) {
            out.push_back({s.base.lo, EndSide::Left, 0, 0, false, {}, {}, CantorAddress{s.base, Address("", "L")}});
            out.push_back({s.base.hi, EndSide::Right, 0, 0, false, {}, {}, CantorAddress{s.base, Address("", "R")}});
            break;
        }
        for_each_word(static_cast<std::size_t>(st - 1), [&](const std::string& w) {
            auto g = node_gap(w);
            out.push_back({affine(s.base, g.lo), EndSide::Right, st, st - 1, false, {}, w,
                           CantorAddress{s.base, Address(w + "L", "R")}});
            out.push_back({affine(s.base, g.hi), EndSide::Left, st, st - 1, false, {}, w,
                           CantorAddress{s.base, Address(w + "R", "L")}});
        });
        break;
    }
    case detail::GenKind::GapAttached: {
        if (st == 0) {
            out.push_back({c0_window().lo, EndSide::Left, 0, -1, true, Piece::left(), {},
                           CantorAddress{Piece::left().base(), Address("", "L")}});
            out.push_back({c0_window().hi, EndSide::Right, 0, -1, true, Piece::right(), {},
                           CantorAddress{Piece::right().base(), Address("", "R")}});
        }
        auto pieces = pieces_through(st);
        out.reserve(2 + (std::size_t(2) << st) * pieces.size() * 2);
        for (int k = 0; k <= st; ++k) {
            for (const auto& p : pieces) {
                if (k < st && p.generation() != st) continue;
                auto base = p.base();
                for_each_word(static_cast<std::size_t>(k), [&](const std::string& w) {
                    auto g = node_gap(w);
                    out.push_back({affine(base, g.lo), EndSide::Right, st, k, false, p, w,
                                   CantorAddress{base, Address(w + "L", "R")}});
                    out.push_back({affine(base, g.hi), EndSide::Left, st, k, false, p, w,
                                   CantorAddress{base, Address(w + "R", "L")}});
                });
            }
        }
        break;
    }
    case detail::GenKind::Intermediate: {
        std::lock_guard lock(s.mu);
        materialize_schedule(st);
        for (const auto& r : s.schedule.removals) {
            if (r.stage != st) continue;
            const int depth = r.extreme ? -1 : static_cast<int>(r.node.size());
            if (r.lo && r.window.lo >= 0)
                out.push_back({r.window.lo, EndSide::Right, st, depth, r.extreme, r.piece, r.node, r.lo});
            if (r.hi && r.window.hi <= 1)
                out.push_back({r.window.hi, EndSide::Left, st, depth, r.extreme, r.piece, r.node, r.hi});
        }
        break;
    }
    }
    return out;
}

inline std::vector<EndpointDescriptor> CantorGen::endpoints(std::size_t count) const
{
    std::vector<EndpointDescriptor> out;
    for (int st = 0; out.size() < count; ++st) {
        for (auto& e : endpoints_at_stage(st)) {
            if (out.size() == count) break;
            out.push_back(std::move(e));
        }
        if (st > 64) throw Error("endpoint enumeration exceeded stage 64");
    }
    return out;
}

inline void CantorGen::materialize_schedule(int stage) const
{
    const auto& s = state();
    std::lock_guard lock(s.mu);
    if (s.kind != detail::GenKind::Intermediate) return;
    const WindowShape& shape = *s.shape;
    CantorGen outer_gen(s.outer);
    CantorGen inner_gen(s.inner);

    for (int st = s.scheduled_through + 1; st <= stage; ++st) {
        for (auto& p : outer_gen.endpoints_at_stage(st)) {
            // Already inside a window?
            auto it = s.window_index.upper_bound(p.value);
            if (it != s.window_index.begin()) {
                auto prev = std::prev(it);
                const auto& r = s.schedule.removals[prev->second];
                if (p.value < r.window.hi) {
                    s.schedule.entries.push_back({std::move(p), prev->second, true});
                    continue;
                }
            }

            Removal r;
            r.piece = p.piece;
            r.node = p.node;
            r.extreme = p.extreme;
            r.stage = st;
            auto base = p.piece.base();
            if (p.extreme) {
                if (p.piece.side < 0) {
                    r.hi = CantorAddress{base, shape.left_extreme};
                    r.window = {Rational(-1), r.hi->value()};
                } else {
                    r.lo = CantorAddress{base, shape.right_extreme};
                    r.window = {r.lo->value(), Rational(2)};
                }
            } else {
                r.lo = shape.window_lo(p.piece, p.node);
                r.hi = shape.window_hi(p.piece, p.node);
                r.window = {r.lo->value(), r.hi->value()};
            }
            if (!(r.window.lo < p.value && p.value < r.window.hi))
                throw Error("bracket search failed: window at stage " + std::to_string(st) + " misses " + to_string(p.value));
            // Window ends must already be gone from the inner set's cover.
            for (const auto& end : {r.lo, r.hi}) {
                if (!end) continue;
                auto m = inner_gen.membership_at(r.piece, end->word, st);
                if (m.verdict != Verdict::Out)
                    throw Error("bracket search failed: window end " + end->str() + " not excluded from inner set by stage " +
                                std::to_string(st));
            }
            const std::size_t idx = s.schedule.removals.size();
            s.window_index.emplace(r.window.lo, idx);
            s.schedule.removals.push_back(std::move(r));
            s.schedule.entries.push_back({std::move(p), idx, false});
        }
        s.scheduled_through = st;
    }
}

inline RemovalSchedule CantorGen::schedule(int stage) const
{
    const auto& s = state();
    std::lock_guard lock(s.mu);
    materialize_schedule(stage);
    RemovalSchedule out;
    std::vector<std::size_t> remap(s.schedule.removals.size(), 0);
    for (std::size_t i = 0; i < s.schedule.removals.size(); ++i) {
        if (s.schedule.removals[i].stage > stage) continue;
        remap[i] = out.removals.size();
        out.removals.push_back(s.schedule.removals[i]);
    }
    for (const auto& e : s.schedule.entries) {
        if (e.point.stage > stage) continue;
        out.entries.push_back({e.point, remap[e.removal], e.reused});
    }
    return out;
}

inline CantorGen build_intermediate(const CantorGen& inner, const CantorGen& outer, int budget)
{
    if (!inner || !outer) throw PreconditionError("build_intermediate: empty generator");
    if (budget < 0) throw PreconditionError("build_intermediate: negative budget");

    // Inner stage covers inside outer ones.
    for (int d = 0; d <= std::min(budget, 3); ++d)
        if (!outer.stage(d).contains(inner.stage(d)))
            throw PreconditionError("build_intermediate: inner stage " + std::to_string(d) + " not inside outer");
    // Outer endpoints outside inner.
    for (const auto& p : outer.endpoints(16)) {
        auto m = inner.membership(p.value, std::max(budget, p.stage));
        if (m.verdict != Verdict::Out)
            throw PreconditionError("build_intermediate: outer endpoint " + to_string(p.value) + " is not outside inner");
    }

    auto ti = inner.theta();
    auto to = outer.theta();
    if (!ti || !to) throw PreconditionError("build_intermediate: both sets must belong to the C_0 family");
    for (const auto& g : {inner, outer})
        if (g.kind() == CantorGen::Kind::Intermediate && g.budget() != budget)
            throw PreconditionError("build_intermediate: stage budgets differ");

    auto s = std::make_shared<detail::GenState>();
    s->kind = detail::GenKind::Intermediate;
    s->base = c0_window();
    s->inner = inner.s_;
    s->outer = outer.s_;
    s->budget = budget;
    s->shape.emplace((*ti + *to) / 2);
    s->c0 = outer.kind() == CantorGen::Kind::GapAttached ? outer.s_
          : outer.kind() == CantorGen::Kind::Intermediate ? outer.s_->c0
                                                          : throw PreconditionError("build_intermediate: bad outer");
    return CantorGen(s);
}

}  // namespace gillab
