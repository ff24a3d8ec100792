#pragma once

// Closed rational intervals and normalized finite unions of them.
//
// An IntervalSet keeps its components sorted, pairwise disjoint and never
// touching: components sharing an endpoint are merged, so two sets are equal as
// point sets exactly when their component lists are equal. Degenerate
// components [x, x] are allowed.

#include "gillab/rational.hpp"

#include <algorithm>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace gillab {

struct ClosedInterval {
    Rational lo;
    Rational hi;

    ClosedInterval() = default;
    ClosedInterval(Rational l, Rational h) : lo(std::move(l)), hi(std::move(h))
    {
        if (hi < lo) throw Error("ClosedInterval: lo > hi (" + to_string(lo) + ", " + to_string(hi) + ")");
    }

    static ClosedInterval point(const Rational& x) { return {x, x}; }
    static ClosedInterval unit() { return {Rational(0), Rational(1)}; }

    Rational width() const { return hi - lo; }
    bool degenerate() const { return lo == hi; }
    bool contains(const Rational& x) const { return lo <= x && x <= hi; }
    bool contains(const ClosedInterval& o) const { return lo <= o.lo && o.hi <= hi; }
    bool intersects(const ClosedInterval& o) const { return !(o.hi < lo || hi < o.lo); }
    bool inside_unit() const { return 0 <= lo && hi <= 1; }

    friend bool operator==(const ClosedInterval& a, const ClosedInterval& b) { return a.lo == b.lo && a.hi == b.hi; }
    friend bool operator<(const ClosedInterval& a, const ClosedInterval& b)
    {
        return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
    }

    std::string str() const { return to_string(lo) + ".." + to_string(hi); }
};

inline ClosedInterval parse_interval(std::string_view text)
{
    auto pos = text.find("..");
    if (pos == std::string_view::npos) throw Error("malformed interval: '" + std::string(text) + "'");
    return {parse_rational(text.substr(0, pos)), parse_rational(text.substr(pos + 2))};
}

// An open interval (lo, hi); used for removals. lo may equal hi (empty).
struct OpenInterval {
    Rational lo;
    Rational hi;
};

class IntervalSet {
public:
    IntervalSet() = default;

    explicit IntervalSet(std::vector<ClosedInterval> parts) : parts_(std::move(parts)) { normalize(); }
    IntervalSet(std::initializer_list<ClosedInterval> parts) : parts_(parts) { normalize(); }

    static IntervalSet from_sorted_disjoint(std::vector<ClosedInterval> parts)
    {
        IntervalSet s;
        s.parts_ = std::move(parts);
        s.merge_sorted();
        return s;
    }

    const std::vector<ClosedInterval>& components() const { return parts_; }
    std::size_t size() const { return parts_.size(); }
    bool empty() const { return parts_.empty(); }
    const ClosedInterval& operator[](std::size_t i) const { return parts_[i]; }
    auto begin() const { return parts_.begin(); }
    auto end() const { return parts_.end(); }

    const Rational& min() const
    {
        if (parts_.empty()) throw Error("IntervalSet::min on empty set");
        return parts_.front().lo;
    }
    const Rational& max() const
    {
        if (parts_.empty()) throw Error("IntervalSet::max on empty set");
        return parts_.back().hi;
    }

    Rational measure() const
    {
        Rational m(0);
        for (const auto& c : parts_) m += c.hi - c.lo;
        return m;
    }

    Rational max_width() const
    {
        Rational w(0);
        for (const auto& c : parts_) w = max_of(w, c.width());
        return w;
    }

    // Index of the component containing x, or -1.
    long locate(const Rational& x) const
    {
        auto it = std::upper_bound(parts_.begin(), parts_.end(), x,
                                   [](const Rational& v, const ClosedInterval& c) { return v < c.lo; });
        if (it == parts_.begin()) return -1;
        --it;
        return it->hi >= x ? static_cast<long>(it - parts_.begin()) : -1;
    }

    bool contains(const Rational& x) const { return locate(x) >= 0; }

    bool contains(const ClosedInterval& iv) const
    {
        long i = locate(iv.lo);
        return i >= 0 && parts_[static_cast<std::size_t>(i)].hi >= iv.hi;
    }

    // Pointwise inclusion of `other` in *this.
    bool contains(const IntervalSet& other) const
    {
        std::size_t j = 0;
        for (const auto& c : other.parts_) {
            while (j < parts_.size() && parts_[j].hi < c.lo) ++j;
            if (j == parts_.size() || !parts_[j].contains(c)) return false;
        }
        return true;
    }

    bool intersects(const ClosedInterval& iv) const
    {
        auto it = std::lower_bound(parts_.begin(), parts_.end(), iv.lo,
                                   [](const ClosedInterval& c, const Rational& v) { return c.hi < v; });
        return it != parts_.end() && it->lo <= iv.hi;
    }

    friend bool operator==(const IntervalSet& a, const IntervalSet& b) { return a.parts_ == b.parts_; }

    // Canonical text: "lo..hi;lo..hi", empty string for the empty set.
    std::string str() const
    {
        std::string out;
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            if (i) out += ';';
            out += parts_[i].str();
        }
        return out;
    }

    static IntervalSet parse(std::string_view text)
    {
        std::vector<ClosedInterval> parts;
        std::size_t start = 0;
        while (start < text.size()) {
            auto end = text.find(';', start);
            if (end == std::string_view::npos) end = text.size();
            auto piece = text.substr(start, end - start);
            if (!piece.empty()) parts.push_back(parse_interval(piece));
            start = end + 1;
        }
        return IntervalSet(std::move(parts));
    }

private:
    void normalize()
    {
        std::sort(parts_.begin(), parts_.end());
        merge_sorted();
    }

    // Assumes parts_ sorted by lo; merges overlapping or touching components.
    void merge_sorted()
    {
        if (parts_.empty()) return;
        std::vector<ClosedInterval> out;
        out.reserve(parts_.size());
        out.push_back(std::move(parts_.front()));
        for (std::size_t i = 1; i < parts_.size(); ++i) {
            auto& last = out.back();
            if (parts_[i].lo <= last.hi) {
                if (last.hi < parts_[i].hi) last.hi = std::move(parts_[i].hi);
            } else {
                out.push_back(std::move(parts_[i]));
            }
        }
        parts_ = std::move(out);
    }

    std::vector<ClosedInterval> parts_;
};

inline IntervalSet interval_set_union(const IntervalSet& a, const IntervalSet& b)
{
    std::vector<ClosedInterval> merged;
    merged.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(merged));
    return IntervalSet::from_sorted_disjoint(std::move(merged));
}

inline IntervalSet interval_set_intersect(const IntervalSet& a, const IntervalSet& b)
{
    std::vector<ClosedInterval> out;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const auto& x = a[i];
        const auto& y = b[j];
        const Rational& lo = max_of(x.lo, y.lo);
        const Rational& hi = min_of(x.hi, y.hi);
        if (lo <= hi) out.emplace_back(lo, hi);
        if (x.hi < y.hi)
            ++i;
        else
            ++j;
    }
    return IntervalSet::from_sorted_disjoint(std::move(out));
}

// Closure of window \ a. The interiors of the result's components are exactly
// the maximal open gaps of a inside the window (plus the uncovered window ends).
inline IntervalSet interval_set_complement_in(const IntervalSet& a, const ClosedInterval& window)
{
    std::vector<ClosedInterval> out;
    Rational cursor = window.lo;
    bool touched = false;
    for (const auto& c : a) {
        if (c.hi < window.lo) continue;
        if (c.lo > window.hi) break;
        touched = true;
        if (cursor < c.lo) out.emplace_back(cursor, c.lo);
        if (cursor < c.hi) cursor = c.hi;
    }
    if (!touched) return IntervalSet{window};
    if (cursor < window.hi) out.emplace_back(cursor, window.hi);
    return IntervalSet::from_sorted_disjoint(std::move(out));
}

inline Rational interval_set_measure(const IntervalSet& a) { return a.measure(); }

// Closed set minus a union of open intervals; `removals` must be sorted by lo.
inline IntervalSet interval_set_subtract_open(const IntervalSet& a, std::span<const OpenInterval> removals)
{
    // Merge overlapping removals so that both ends are increasing.
    std::vector<OpenInterval> rem;
    rem.reserve(removals.size());
    for (const auto& r : removals) {
        if (!(r.lo < r.hi)) continue;
        if (!rem.empty() && r.lo < rem.back().hi) {
            if (rem.back().hi < r.hi) rem.back().hi = r.hi;
        } else {
            rem.push_back(r);
        }
    }

    std::vector<ClosedInterval> out;
    std::size_t first = 0;
    for (const auto& c : a) {
        while (first < rem.size() && rem[first].hi <= c.lo) ++first;
        Rational cur = c.lo;
        bool alive = true;
        for (std::size_t k = first; k < rem.size() && rem[k].lo < c.hi; ++k) {
            const auto& r = rem[k];
            if (r.hi <= cur) continue;
            if (r.lo >= cur) out.emplace_back(cur, r.lo);
            cur = r.hi;
            if (cur > c.hi) {
                alive = false;
                break;
            }
        }
        if (alive) out.emplace_back(cur, c.hi);
    }
    return IntervalSet::from_sorted_disjoint(std::move(out));
}

}  // namespace gillab
