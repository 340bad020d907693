#include "adgve/lane_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace adgve {

const LaneGeometry& VideoGeometry::for_frame(int frame) const {
    for (const auto& c : clips) {
        if (frame >= c.start && frame < c.end) return by_key_frame.at(c.key_frame);
    }
    // out-of-range frames resolve to the nearest clip
    if (!clips.empty() && frame < clips.front().start)
        return by_key_frame.at(clips.front().key_frame);
    return by_key_frame.at(clips.back().key_frame);
}

Grid rasterize_polygon(const std::vector<Pt>& polygon, int width, int height) {
    if (polygon.size() < 3) throw GeometryError("polygon needs at least 3 vertices");
    Grid g(width, height);
    size_t n = polygon.size();
    std::vector<double> xs;
    for (int y = 0; y < height; ++y) {
        double cy = y + 0.5;
        xs.clear();
        for (size_t i = 0, j = n - 1; i < n; j = i++) {
            const Pt& pi = polygon[i];
            const Pt& pj = polygon[j];
            if ((pi.y > cy) != (pj.y > cy))
                xs.push_back(pj.x + (cy - pj.y) / (pi.y - pj.y) * (pi.x - pj.x));
        }
        if (xs.empty()) continue;
        std::sort(xs.begin(), xs.end());
        // cell center is inside iff an odd number of crossings lie strictly
        // to its right (mirrors point_in_polygon exactly)
        size_t k = 0;  // crossings with x <= cx
        for (int x = 0; x < width; ++x) {
            double cx = x + 0.5;
            while (k < xs.size() && xs[k] <= cx) ++k;
            if ((xs.size() - k) % 2 == 1) g.set(x, y);
        }
    }
    return g;
}

namespace {

struct Bounds {
    int x0, y0, x1, y1;  // inclusive
    bool valid() const { return x0 <= x1 && y0 <= y1; }
};

Bounds mask_bounds(const Grid& g) {
    Bounds b{g.width, g.height, -1, -1};
    for (int y = 0; y < g.height; ++y)
        for (int x = 0; x < g.width; ++x)
            if (g.at(x, y)) {
                b.x0 = std::min(b.x0, x);
                b.y0 = std::min(b.y0, y);
                b.x1 = std::max(b.x1, x);
                b.y1 = std::max(b.y1, y);
            }
    return b;
}

}  // namespace

Grid thin_mask(const Grid& mask) {
    Grid g = mask;
    Bounds b = mask_bounds(g);
    if (!b.valid()) return g;
    std::vector<std::pair<int, int>> to_clear;
    bool changed = true;
    while (changed) {
        changed = false;
        for (int pass = 0; pass < 2; ++pass) {
            to_clear.clear();
            for (int y = b.y0; y <= b.y1; ++y) {
                for (int x = b.x0; x <= b.x1; ++x) {
                    if (!g.at(x, y)) continue;
                    // neighbors P2..P9 clockwise from north
                    int p2 = g.at(x, y - 1), p3 = g.at(x + 1, y - 1), p4 = g.at(x + 1, y);
                    int p5 = g.at(x + 1, y + 1), p6 = g.at(x, y + 1), p7 = g.at(x - 1, y + 1);
                    int p8 = g.at(x - 1, y), p9 = g.at(x - 1, y - 1);
                    int bn = p2 + p3 + p4 + p5 + p6 + p7 + p8 + p9;
                    if (bn < 2 || bn > 6) continue;
                    int a = (p2 == 0 && p3 == 1) + (p3 == 0 && p4 == 1) + (p4 == 0 && p5 == 1) +
                            (p5 == 0 && p6 == 1) + (p6 == 0 && p7 == 1) + (p7 == 0 && p8 == 1) +
                            (p8 == 0 && p9 == 1) + (p9 == 0 && p2 == 1);
                    if (a != 1) continue;
                    if (pass == 0) {
                        if (p2 * p4 * p6 != 0 || p4 * p6 * p8 != 0) continue;
                    } else {
                        if (p2 * p4 * p8 != 0 || p2 * p6 * p8 != 0) continue;
                    }
                    to_clear.emplace_back(x, y);
                }
            }
            if (!to_clear.empty()) {
                changed = true;
                for (auto [x, y] : to_clear) g.set(x, y, false);
            }
        }
    }
    return g;
}

namespace {

// deterministic neighbor order: N, NE, E, SE, S, SW, W, NW
constexpr int kDx[8] = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr int kDy[8] = {-1, -1, 0, 1, 1, 1, 0, -1};

int degree(const Grid& g, int x, int y) {
    int d = 0;
    for (int k = 0; k < 8; ++k) d += g.at(x + kDx[k], y + kDy[k]);
    return d;
}

}  // namespace

std::vector<Polyline> trace_skeleton(const Grid& skeleton) {
    Grid visited(skeleton.width, skeleton.height);
    std::vector<Polyline> paths;

    auto walk = [&](int sx, int sy) {
        Polyline path;
        int x = sx, y = sy;
        visited.set(x, y);
        path.push_back({x + 0.5, y + 0.5});
        for (;;) {
            int nx = -1, ny = -1;
            for (int k = 0; k < 8; ++k) {
                int cx = x + kDx[k], cy = y + kDy[k];
                if (skeleton.at(cx, cy) && !visited.at(cx, cy)) {
                    nx = cx;
                    ny = cy;
                    break;
                }
            }
            if (nx < 0) break;
            x = nx;
            y = ny;
            visited.set(x, y);
            path.push_back({x + 0.5, y + 0.5});
        }
        return path;
    };

    // endpoints first so open curves trace end to end
    for (int y = 0; y < skeleton.height; ++y)
        for (int x = 0; x < skeleton.width; ++x)
            if (skeleton.at(x, y) && !visited.at(x, y) && degree(skeleton, x, y) <= 1)
                paths.push_back(walk(x, y));
    // remaining cells belong to cycles or junction leftovers
    for (int y = 0; y < skeleton.height; ++y)
        for (int x = 0; x < skeleton.width; ++x)
            if (skeleton.at(x, y) && !visited.at(x, y)) paths.push_back(walk(x, y));
    return paths;
}

namespace {

void simplify_rec(const Polyline& pts, size_t lo, size_t hi, double eps,
                  std::vector<bool>& keep) {
    if (hi <= lo + 1) return;
    double worst = -1.0;
    size_t worst_i = lo;
    for (size_t i = lo + 1; i < hi; ++i) {
        double d = point_segment_distance(pts[i], pts[lo], pts[hi]);
        if (d > worst) {
            worst = d;
            worst_i = i;
        }
    }
    if (worst > eps) {
        keep[worst_i] = true;
        simplify_rec(pts, lo, worst_i, eps, keep);
        simplify_rec(pts, worst_i, hi, eps, keep);
    }
}

}  // namespace

Polyline simplify_polyline(const Polyline& pts, double eps) {
    if (pts.size() <= 2) return pts;
    std::vector<bool> keep(pts.size(), false);
    keep.front() = keep.back() = true;
    simplify_rec(pts, 0, pts.size() - 1, eps, keep);
    Polyline out;
    for (size_t i = 0; i < pts.size(); ++i)
        if (keep[i]) out.push_back(pts[i]);
    return out;
}

std::vector<Polyline> extract_centerline(const Grid& mask, double simplify_eps) {
    if (mask.empty()) return {};
    Grid skel = thin_mask(mask);
    std::vector<Polyline> out;
    for (const auto& path : trace_skeleton(skel)) {
        Polyline s = simplify_polyline(path, simplify_eps);
        if (s.size() >= 2) out.push_back(std::move(s));
    }
    return out;
}

double estimate_lane_width(const Grid& ego_lane_grid) {
    if (ego_lane_grid.count() < 10)
        throw DegenerateLane("ego-lane mask has fewer than 10 cells");
    Grid skel = thin_mask(ego_lane_grid);
    auto paths = trace_skeleton(skel);

    std::vector<double> widths;
    const double step = 0.25;
    for (const auto& path : paths) {
        if (path.size() < 2) continue;
        for (size_t i = 0; i < path.size(); ++i) {
            // local direction by central difference over +-2 cells
            size_t a = i >= 2 ? i - 2 : 0;
            size_t b = std::min(i + 2, path.size() - 1);
            Pt dir = path[b] - path[a];
            double len = norm(dir);
            if (len <= 0.0) continue;
            dir = (1.0 / len) * dir;
            Pt perp{-dir.y, dir.x};
            double extent = 0.0;
            for (double sgn : {1.0, -1.0}) {
                double d = 0.0;
                for (;;) {
                    double nx = path[i].x + sgn * (d + step) * perp.x;
                    double ny = path[i].y + sgn * (d + step) * perp.y;
                    if (!ego_lane_grid.at(int(std::floor(nx)), int(std::floor(ny)))) break;
                    d += step;
                }
                extent += d;
            }
            // marching undershoots each side by at most one step
            widths.push_back(extent + step);
        }
    }
    if (widths.empty()) throw DegenerateLane("no measurable skeleton for lane width");
    std::sort(widths.begin(), widths.end());
    size_t n = widths.size();
    return n % 2 == 1 ? widths[n / 2] : 0.5 * (widths[n / 2 - 1] + widths[n / 2]);
}

std::vector<StyledBoundary> derive_boundaries(const std::vector<MaskInstance>& masks,
                                              const std::vector<LaneBoundary>& declared,
                                              int frame, int width, int height,
                                              double simplify_eps) {
    std::vector<StyledBoundary> out;
    bool any_declared = false;
    for (const auto& b : declared) {
        if (const BoundaryFrame* f = b.frame_at(frame)) {
            out.emplace_back(f->polyline, b.style);
            any_declared = true;
        }
    }
    if (any_declared) return out;

    // shared edges between ego_lane and other_lane rasters; solid by default
    Grid ego(width, height), other(width, height);
    bool have_ego = false, have_other = false;
    for (const auto& m : masks) {
        const MaskFrame* f = m.frame_at(frame);
        if (!f) continue;
        if (m.cls == MaskClass::ego_lane) {
            Grid g = rasterize_polygon(f->polygon, width, height);
            for (size_t i = 0; i < g.cells.size(); ++i) ego.cells[i] |= g.cells[i];
            have_ego = true;
        } else if (m.cls == MaskClass::other_lane) {
            Grid g = rasterize_polygon(f->polygon, width, height);
            for (size_t i = 0; i < g.cells.size(); ++i) other.cells[i] |= g.cells[i];
            have_other = true;
        }
    }
    if (!have_ego || !have_other) return out;

    Grid edge(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            if (ego.at(x, y) && (other.at(x - 1, y) || other.at(x + 1, y) ||
                                 other.at(x, y - 1) || other.at(x, y + 1)))
                edge.set(x, y);
    for (const auto& path : trace_skeleton(thin_mask(edge))) {
        Polyline s = simplify_polyline(path, simplify_eps);
        if (s.size() >= 2) out.emplace_back(std::move(s), BoundaryStyle::solid);
    }
    return out;
}

LaneGeometry compute_frame_geometry(const ScenePriors& priors, int frame, const Config& cfg) {
    const double eps = cfg.get_double("lane.simplify_eps", 2.0);
    const double nominal_m = cfg.get_double("lane.nominal_width_m", 3.5);
    const int W = priors.meta.width, H = priors.meta.height;

    LaneGeometry geom;
    geom.frame = frame;
    geom.ego_mask = Grid(W, H);
    geom.lane_mask = Grid(W, H);

    for (const auto& m : priors.masks) {
        if (m.cls != MaskClass::ego_lane && m.cls != MaskClass::other_lane) continue;
        const MaskFrame* f = m.frame_at(frame);
        if (!f) continue;
        Grid g = rasterize_polygon(f->polygon, W, H);
        for (size_t i = 0; i < g.cells.size(); ++i) {
            geom.lane_mask.cells[i] |= g.cells[i];
            if (m.cls == MaskClass::ego_lane) geom.ego_mask.cells[i] |= g.cells[i];
        }
        for (auto& line : extract_centerline(g, eps)) geom.centerlines.push_back(std::move(line));
    }

    try {
        geom.lane_width_px = estimate_lane_width(geom.ego_mask);
    } catch (const DegenerateLane&) {
        geom.lane_width_px = W / 8.0;  // documented fallback; flagged
        geom.width_fallback = true;
    }
    geom.px_per_meter = geom.lane_width_px / nominal_m;

    geom.boundaries = derive_boundaries(priors.masks, priors.boundaries, frame, W, H, eps);
    bool any_declared = false;
    for (const auto& b : priors.boundaries)
        if (b.frame_at(frame)) any_declared = true;
    geom.boundaries_derived = !any_declared && !geom.boundaries.empty();
    return geom;
}

VideoGeometry compute_video_geometry(const ScenePriors& priors,
                                     const std::vector<ClipRange>& clips, const Config& cfg) {
    VideoGeometry vg;
    vg.clips = clips;

    // identical mask/boundary content across key frames computes once
    std::map<std::uint64_t, int> seen;  // content hash -> key frame already computed
    for (const auto& c : clips) {
        std::string sig;
        for (const auto& m : priors.masks) {
            if (const MaskFrame* f = m.frame_at(c.key_frame)) {
                sig += to_string(m.cls) + ":";
                for (const auto& p : f->polygon)
                    sig += std::to_string(p.x) + "," + std::to_string(p.y) + ";";
            }
        }
        for (const auto& b : priors.boundaries) {
            if (const BoundaryFrame* f = b.frame_at(c.key_frame)) {
                sig += "|" + to_string(b.style) + ":";
                for (const auto& p : f->polyline)
                    sig += std::to_string(p.x) + "," + std::to_string(p.y) + ";";
            }
        }
        std::uint64_t h = fnv1a(sig);
        auto it = seen.find(h);
        if (it != seen.end()) {
            LaneGeometry copy = vg.by_key_frame.at(it->second);
            copy.frame = c.key_frame;
            vg.by_key_frame.emplace(c.key_frame, std::move(copy));
        } else {
            vg.by_key_frame.emplace(c.key_frame,
                                    compute_frame_geometry(priors, c.key_frame, cfg));
            seen.emplace(h, c.key_frame);
        }
    }

    std::vector<double> widths;
    for (const auto& [frame, g] : vg.by_key_frame) {
        widths.push_back(g.lane_width_px);
        vg.any_fallback = vg.any_fallback || g.width_fallback;
        vg.any_derived_boundaries = vg.any_derived_boundaries || g.boundaries_derived;
    }
    std::sort(widths.begin(), widths.end());
    vg.lane_width_px = widths.empty() ? priors.meta.width / 8.0
                                      : (widths.size() % 2 == 1
                                             ? widths[widths.size() / 2]
                                             : 0.5 * (widths[widths.size() / 2 - 1] +
                                                      widths[widths.size() / 2]));
    vg.px_per_meter = vg.lane_width_px / cfg.get_double("lane.nominal_width_m", 3.5);
    return vg;
}

}  // namespace adgve
