#pragma once

// CSV, SVG and JSON artifacts. CSV and JSON carry exact lowest-terms
// rationals; SVG coordinates are rounded to the nearest pixel only when drawn.

#include "gillab/inverse_limit.hpp"

#include <sstream>

namespace gillab {

inline std::string graph_cover_csv(const GraphCover& gc)
{
    std::ostringstream os;
    os << "x_lo,x_hi,y_lo,y_hi\n";
    for (const auto& b : gc.boxes) os << to_string(b.x.lo) << ',' << to_string(b.x.hi) << ',' << to_string(b.y.lo) << ',' << to_string(b.y.hi) << '\n';
    return os.str();
}

inline std::string graph_cover_svg(const GraphCover& gc, int pixels)
{
    if (pixels < 1) throw PreconditionError("svg scale must be positive");
    const Rational scale(pixels);
    auto px = [&](const Rational& v) { return round_nearest(v * scale).get_str(); };
    auto py = [&](const Rational& v) { return round_nearest((1 - v) * scale).get_str(); };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << pixels << "\" height=\"" << pixels << "\" viewBox=\"0 0 " << pixels << ' ' << pixels << "\">\n";
    os << "<metadata>stage=" << gc.stage << " level=" << gc.level << " mode=" << to_string(gc.mode) << " boxes=" << gc.boxes.size()
       << " rounding=nearest (half up) at pixel mapping; exact values in the CSV export</metadata>\n";
    os << "<rect x=\"0\" y=\"0\" width=\"" << pixels << "\" height=\"" << pixels << "\" fill=\"white\" stroke=\"black\"/>\n";
    for (std::size_t i = 0; i < gc.boxes.size(); ++i) {
        const auto& b = gc.boxes[i];
        const char* colour = gc.over_c0[i] ? "#3465a4" : "#cc0000";
        const std::string x0 = px(b.x.lo), x1 = px(b.x.hi), y0 = py(b.y.hi), y1 = py(b.y.lo);
        if (x0 == x1 || y0 == y1) {
            os << "<line x1=\"" << x0 << "\" y1=\"" << y1 << "\" x2=\"" << x1 << "\" y2=\"" << y0 << "\" stroke=\"" << colour << "\"/>\n";
        } else {
            const Integer w = round_nearest(b.x.hi * scale) - round_nearest(b.x.lo * scale);
            const Integer h = round_nearest((1 - b.y.lo) * scale) - round_nearest((1 - b.y.hi) * scale);
            os << "<rect x=\"" << x0 << "\" y=\"" << y0 << "\" width=\"" << w.get_str() << "\" height=\"" << h.get_str() << "\" fill=\"" << colour
               << "\" fill-opacity=\"0.5\"/>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

inline Json graph_cover_json(const GraphCover& gc)
{
    Json j;
    j["stage"] = gc.stage;
    j["level"] = gc.level;
    j["mode"] = to_string(gc.mode);
    j["area"] = jrat(gc.area());
    j["core_area"] = jrat(gc.core_area);
    Json boxes = Json::array();
    for (const auto& b : gc.boxes) boxes.push_back({b.x.str(), b.y.str()});
    j["boxes"] = std::move(boxes);
    return j;
}

inline std::string box_cover_csv(const BoxCover& bc)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < bc.dimension; ++i) os << (i ? "," : "") << 'x' << i << "_lo,x" << i << "_hi";
    os << '\n';
    for (const auto& box : bc.boxes) {
        for (std::size_t i = 0; i < box.size(); ++i) os << (i ? "," : "") << to_string(box[i].lo) << ',' << to_string(box[i].hi);
        os << '\n';
    }
    return os.str();
}

inline Json box_cover_json(const BoxCover& bc)
{
    Json j;
    j["dimension"] = bc.dimension;
    j["stage"] = bc.stage;
    j["level"] = bc.level;
    Json boxes = Json::array();
    for (const auto& box : bc.boxes) {
        Json row = Json::array();
        for (const auto& iv : box) row.push_back(iv.str());
        boxes.push_back(std::move(row));
    }
    j["boxes"] = std::move(boxes);
    return j;
}

inline std::string arc_csv(const std::vector<PlanarPoint>& pts, std::size_t i, std::size_t j)
{
    std::ostringstream os;
    os << "param,x" << i << ",x" << j << '\n';
    for (const auto& p : pts) os << to_string(p.param) << ',' << to_string(p.a) << ',' << to_string(p.b) << '\n';
    return os.str();
}

inline Json arc_json(const std::vector<PlanarPoint>& pts, std::size_t i, std::size_t j)
{
    Json rows = Json::array();
    for (const auto& p : pts) rows.push_back({jrat(p.param), jrat(p.a), jrat(p.b)});
    return {{"coords", {i, j}}, {"points", std::move(rows)}};
}

inline std::string cantor_text(const CantorGen& g, int stage) { return g.stage(stage).str() + "\n"; }

inline std::string cantor_csv(const CantorGen& g, int stage)
{
    std::ostringstream os;
    os << "lo,hi\n";
    for (const auto& iv : g.stage(stage)) os << to_string(iv.lo) << ',' << to_string(iv.hi) << '\n';
    return os.str();
}

inline Json cycle_json(const Cycle& c)
{
    Json steps = Json::array();
    for (const auto& s : c.certificates) steps.push_back(s.to_json());
    return {{"points", jrats(c.points)}, {"steps", std::move(steps)}};
}

inline Json orbit_json(const Orbit& o)
{
    Json steps = Json::array();
    for (const auto& s : o.certificates) steps.push_back(s.to_json());
    return {{"points", jrats(o.points)}, {"selector", o.selector}, {"steps", std::move(steps)}};
}

}  // namespace gillab
