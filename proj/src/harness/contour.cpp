#include <cmath>
#include <unordered_map>

#include "resonance/error.hpp"
#include "resonance/harness.hpp"

namespace resonance {

namespace {

// Crossing points live on grid edges. Edge keys: 2·node for the edge to the
// next column, 2·node + 1 for the edge to the next row.
struct Segment {
    std::size_t a;
    std::size_t b;
};

}  // namespace

std::vector<Contour> extract_contours(const HeatmapGrid& grid, double level) {
    const std::size_t R = grid.rows();
    const std::size_t C = grid.cols();
    require(grid.values.size() == R * C, "extract_contours: grid is not rectangular");
    std::vector<Contour> out;
    if (R < 2 || C < 2) return out;

    std::unordered_map<std::size_t, std::pair<double, double>> points;
    std::vector<Segment> segs;

    auto node = [C](std::size_t r, std::size_t c) { return r * C + c; };
    auto crossing = [&](std::size_t key, std::size_t r0, std::size_t c0, std::size_t r1, std::size_t c1) {
        if (points.count(key)) return key;
        const double va = grid.at(r0, c0);
        const double vb = grid.at(r1, c1);
        const double t = (level - va) / (vb - va);
        const double y = grid.row_values[r0] + t * (grid.row_values[r1] - grid.row_values[r0]);
        const double x = grid.col_values[c0] + t * (grid.col_values[c1] - grid.col_values[c0]);
        points.emplace(key, std::make_pair(y, x));
        return key;
    };

    for (std::size_t r = 0; r + 1 < R; ++r) {
        for (std::size_t c = 0; c + 1 < C; ++c) {
            // corners counter-clockwise from (r, c)
            const double v[4] = {grid.at(r, c), grid.at(r, c + 1), grid.at(r + 1, c + 1), grid.at(r + 1, c)};
            if (std::isnan(v[0]) || std::isnan(v[1]) || std::isnan(v[2]) || std::isnan(v[3])) continue;
            const bool in[4] = {v[0] > level, v[1] > level, v[2] > level, v[3] > level};
            const int count = in[0] + in[1] + in[2] + in[3];
            if (count == 0 || count == 4) continue;

            // edge e joins corner e and corner e+1
            auto edge = [&](int e) -> std::size_t {
                switch (e) {
                    case 0: return crossing(2 * node(r, c), r, c, r, c + 1);
                    case 1: return crossing(2 * node(r, c + 1) + 1, r, c + 1, r + 1, c + 1);
                    case 2: return crossing(2 * node(r + 1, c), r + 1, c, r + 1, c + 1);
                    default: return crossing(2 * node(r, c) + 1, r, c, r + 1, c);
                }
            };
            std::vector<int> cut;
            for (int e = 0; e < 4; ++e)
                if (in[e] != in[(e + 1) % 4]) cut.push_back(e);

            if (cut.size() == 2) {
                segs.push_back({edge(cut[0]), edge(cut[1])});
            } else {
                // saddle: the centre value decides which corners are cut off
                const bool centre_in = (v[0] + v[1] + v[2] + v[3]) / 4.0 > level;
                if (centre_in == in[0]) {
                    segs.push_back({edge(0), edge(1)});
                    segs.push_back({edge(2), edge(3)});
                } else {
                    segs.push_back({edge(3), edge(0)});
                    segs.push_back({edge(1), edge(2)});
                }
            }
        }
    }

    // Chain segments through shared edge points. Every point touches at most
    // two segments; degree-1 points are open ends on the grid boundary.
    std::unordered_map<std::size_t, std::vector<std::size_t>> touching;
    for (std::size_t i = 0; i < segs.size(); ++i) {
        touching[segs[i].a].push_back(i);
        touching[segs[i].b].push_back(i);
    }
    std::vector<bool> used(segs.size(), false);

    auto walk = [&](std::size_t start_seg, std::size_t start_key) {
        Contour poly;
        poly.level = level;
        std::size_t key = start_key;
        std::size_t seg = start_seg;
        poly.points.push_back(points.at(key));
        for (;;) {
            used[seg] = true;
            key = segs[seg].a == key ? segs[seg].b : segs[seg].a;
            poly.points.push_back(points.at(key));
            std::size_t next = segs.size();
            for (std::size_t s : touching[key])
                if (!used[s]) next = s;
            if (next == segs.size()) break;
            seg = next;
        }
        if (poly.points.size() > 2 && key == start_key) {
            poly.closed = true;
            poly.points.pop_back();
        }
        return poly;
    };

    for (std::size_t i = 0; i < segs.size(); ++i) {
        if (used[i]) continue;
        for (std::size_t key : {segs[i].a, segs[i].b})
            if (touching[key].size() == 1 && !used[i]) out.push_back(walk(i, key));
    }
    for (std::size_t i = 0; i < segs.size(); ++i)
        if (!used[i]) out.push_back(walk(i, segs[i].a));
    return out;
}

std::vector<Contour> theory_overlay(const HeatmapGrid& empirical, const HeatmapGrid& theory,
                                    const std::vector<double>& extra_levels) {
    if (!empirical.same_axes(theory))
        fail(ErrorCode::InvalidArgument, "theory_overlay: empirical and theory grids have different axes");
    std::vector<Contour> out = extract_contours(theory, 1.0);
    for (double level : extra_levels) {
        auto more = extract_contours(theory, level);
        out.insert(out.end(), more.begin(), more.end());
    }
    return out;
}

}  // namespace resonance
