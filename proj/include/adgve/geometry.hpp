#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "adgve/scene_model.hpp"

namespace adgve {

// Row-major binary occupancy grid; cell (x,y) covers [x,x+1) x [y,y+1),
// its center at (x+0.5, y+0.5).
struct Grid {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> cells;

    Grid() = default;
    Grid(int w, int h) : width(w), height(h), cells(size_t(w) * h, 0) {}

    bool at(int x, int y) const {
        if (x < 0 || y < 0 || x >= width || y >= height) return false;
        return cells[size_t(y) * width + x] != 0;
    }
    void set(int x, int y, bool v = true) {
        if (x < 0 || y < 0 || x >= width || y >= height) return;
        cells[size_t(y) * width + x] = v ? 1 : 0;
    }
    size_t count() const {
        size_t n = 0;
        for (auto c : cells) n += c != 0;
        return n;
    }
    bool empty() const { return count() == 0; }

    Grid unioned(const Grid& other) const;
};

inline double dot(const Pt& a, const Pt& b) { return a.x * b.x + a.y * b.y; }
inline Pt operator-(const Pt& a, const Pt& b) { return {a.x - b.x, a.y - b.y}; }
inline Pt operator+(const Pt& a, const Pt& b) { return {a.x + b.x, a.y + b.y}; }
inline Pt operator*(double s, const Pt& a) { return {s * a.x, s * a.y}; }
inline double norm(const Pt& a) { return std::sqrt(a.x * a.x + a.y * a.y); }
inline double cross(const Pt& a, const Pt& b) { return a.x * b.y - a.y * b.x; }

// Euclidean distance from p to segment [a,b].
double point_segment_distance(const Pt& p, const Pt& a, const Pt& b);

// Distance from p to the nearest point of a polyline; +inf for empty/degenerate.
double point_polyline_distance(const Pt& p, const std::vector<Pt>& line);

// Signed distance: magnitude as above, sign by the side of the nearest
// polyline segment (positive when p lies to the left of its direction).
double signed_point_polyline_distance(const Pt& p, const std::vector<Pt>& line);

// Proper or touching intersection of segments [a,b] and [c,d].
bool segments_intersect(const Pt& a, const Pt& b, const Pt& c, const Pt& d);

bool segment_intersects_polyline(const Pt& a, const Pt& b, const std::vector<Pt>& line);

// Even-odd point-in-polygon (ray casting).
bool point_in_polygon(const Pt& p, const std::vector<Pt>& poly);

}  // namespace adgve
