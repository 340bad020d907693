#include "adgve/geometry.hpp"

#include <algorithm>
#include <limits>

namespace adgve {

Grid Grid::unioned(const Grid& other) const {
    Grid out(std::max(width, other.width), std::max(height, other.height));
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x)
            if (at(x, y) || other.at(x, y)) out.set(x, y);
    return out;
}

double point_segment_distance(const Pt& p, const Pt& a, const Pt& b) {
    Pt ab = b - a;
    double len2 = dot(ab, ab);
    if (len2 <= 0.0) return norm(p - a);
    double t = dot(p - a, ab) / len2;
    t = std::clamp(t, 0.0, 1.0);
    Pt proj = a + t * ab;
    return norm(p - proj);
}

double point_polyline_distance(const Pt& p, const std::vector<Pt>& line) {
    if (line.empty()) return std::numeric_limits<double>::infinity();
    if (line.size() == 1) return norm(p - line[0]);
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < line.size(); ++i)
        best = std::min(best, point_segment_distance(p, line[i], line[i + 1]));
    return best;
}

double signed_point_polyline_distance(const Pt& p, const std::vector<Pt>& line) {
    if (line.size() < 2) return point_polyline_distance(p, line);
    double best = std::numeric_limits<double>::infinity();
    double sign = 1.0;
    for (size_t i = 0; i + 1 < line.size(); ++i) {
        double d = point_segment_distance(p, line[i], line[i + 1]);
        if (d < best) {
            best = d;
            double c = cross(line[i + 1] - line[i], p - line[i]);
            sign = c >= 0.0 ? 1.0 : -1.0;
        }
    }
    return sign * best;
}

namespace {

int orient(const Pt& a, const Pt& b, const Pt& c) {
    double v = cross(b - a, c - a);
    return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

bool within_box(const Pt& a, const Pt& b, const Pt& p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

}  // namespace

bool segments_intersect(const Pt& a, const Pt& b, const Pt& c, const Pt& d) {
    int o1 = orient(a, b, c), o2 = orient(a, b, d);
    int o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && within_box(a, b, c)) return true;
    if (o2 == 0 && within_box(a, b, d)) return true;
    if (o3 == 0 && within_box(c, d, a)) return true;
    if (o4 == 0 && within_box(c, d, b)) return true;
    return false;
}

bool segment_intersects_polyline(const Pt& a, const Pt& b, const std::vector<Pt>& line) {
    for (size_t i = 0; i + 1 < line.size(); ++i)
        if (segments_intersect(a, b, line[i], line[i + 1])) return true;
    return false;
}

bool point_in_polygon(const Pt& p, const std::vector<Pt>& poly) {
    bool inside = false;
    size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Pt& pi = poly[i];
        const Pt& pj = poly[j];
        if ((pi.y > p.y) != (pj.y > p.y)) {
            double xint = pj.x + (p.y - pj.y) / (pi.y - pj.y) * (pi.x - pj.x);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

}  // namespace adgve
