#include "adgve/lane_obedience.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace adgve {

CenteringResult lane_centering_score(const std::vector<const Tracklet*>& tracks,
                                     const VideoGeometry& geom, double alpha) {
    CenteringResult r;
    double sum = 0.0;
    for (const auto& [frame, g] : geom.by_key_frame) {
        if (g.centerlines.empty() || g.lane_width_px <= 0.0) continue;
        for (const Tracklet* t : tracks) {
            const Detection* box = t->box_at(frame);
            if (!box) continue;
            Pt bc = box->bottom_center();
            // fully off-road samples are ignored
            if (!g.lane_mask.at(int(std::floor(bc.x)), int(std::floor(bc.y)))) continue;
            double best = std::numeric_limits<double>::infinity();
            for (const auto& line : g.centerlines)
                best = std::min(best, point_polyline_distance(bc, line));
            if (!std::isfinite(best)) continue;
            sum += best / g.lane_width_px;
            ++r.samples;
        }
    }
    if (r.samples == 0) {
        r.no_evidence = true;
        r.d_norm = 0.0;
        r.s_center = 1.0;
        return r;
    }
    r.d_norm = sum / r.samples;
    r.s_center = std::exp(-alpha * r.d_norm);
    return r;
}

SolidResult solid_line_score(const std::vector<const Tracklet*>& tracks,
                             const VideoGeometry& geom) {
    SolidResult r;
    for (const Tracklet* t : tracks) {
        for (size_t i = 0; i + 1 < t->boxes.size(); ++i) {
            Pt a = t->boxes[i].bottom_center();
            Pt b = t->boxes[i + 1].bottom_center();
            if (norm(b - a) <= 1e-12) continue;  // stationary: not a valid segment
            ++r.valid_segments;
            const LaneGeometry& g = geom.for_frame(t->boxes[i].frame);
            bool crossing = false;
            for (const auto& [line, style] : g.boundaries) {
                if (style != BoundaryStyle::solid && style != BoundaryStyle::double_solid)
                    continue;
                if (segment_intersects_polyline(a, b, line)) {
                    crossing = true;
                    break;
                }
            }
            if (crossing) {
                ++r.crossing_segments;
                r.violations.push_back({"solid_cross", t->boxes[i].frame, t->track_id});
            }
        }
    }
    if (r.valid_segments == 0) {
        r.no_evidence = true;
        r.s_solid = 1.0;
        return r;
    }
    r.s_solid = clamp01(1.0 - double(r.crossing_segments) / r.valid_segments);
    return r;
}

std::vector<double> ego_frame_speeds(const Tracklet& ego, double fps, double px_per_meter) {
    std::vector<double> speeds(ego.boxes.size(), 0.0);
    if (ego.boxes.size() < 2) return speeds;
    for (size_t i = 1; i < ego.boxes.size(); ++i) {
        Pt a = ego.boxes[i - 1].bottom_center();
        Pt b = ego.boxes[i].bottom_center();
        int df = ego.boxes[i].frame - ego.boxes[i - 1].frame;
        speeds[i] = norm(b - a) / df * fps / px_per_meter;
    }
    speeds[0] = speeds[1];  // first frame takes the following difference
    return speeds;
}

namespace {

// Inside-intervals of the vertical line x = px against a polygon (even-odd):
// sorted crossing ys, paired into [y0,y1],[y2,y3],...
std::vector<double> vertical_crossings(double px, const std::vector<Pt>& poly) {
    std::vector<double> ys;
    size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Pt& a = poly[j];
        const Pt& b = poly[i];
        if ((a.x > px) != (b.x > px))
            ys.push_back(a.y + (px - a.x) / (b.x - a.x) * (b.y - a.y));
    }
    std::sort(ys.begin(), ys.end());
    return ys;
}

// True when the ego bottom-center lies within d_px upstream (toward larger y)
// of the polygon: the vertical segment [bc.y - d_px, bc.y] at x = bc.x must
// overlap an inside-interval of the polygon.
bool in_approach_region(const Pt& bc, const std::vector<Pt>& poly, double d_px) {
    std::vector<double> ys = vertical_crossings(bc.x, poly);
    for (size_t i = 0; i + 1 < ys.size(); i += 2) {
        double lo = ys[i], hi = ys[i + 1];
        if (hi >= bc.y - d_px && lo <= bc.y) return true;
    }
    return false;
}

}  // namespace

CrossResult crosswalk_score(const Tracklet& ego, const std::vector<const Tracklet*>& pedestrians,
                            const std::vector<const MaskInstance*>& crosswalks,
                            const VideoGeometry& geom, double fps, const Config& cfg) {
    CrossResult r;
    if (crosswalks.empty() || ego.boxes.empty()) {
        r.no_evidence = true;
        return r;
    }
    const double approach_m = cfg.get_double("lane.cross_approach_m", 5.25);
    const double v_yield = cfg.get_double("lane.yield_speed_mps", 1.0);
    const double d_px = approach_m * geom.px_per_meter;

    std::vector<double> speeds = ego_frame_speeds(ego, fps, geom.px_per_meter);
    std::map<int, double> speed_at;
    for (size_t i = 0; i < ego.boxes.size(); ++i) speed_at[ego.boxes[i].frame] = speeds[i];

    // per-frame: ego in approach region of an occupied crosswalk
    bool in_encounter = false;
    bool encounter_violating = false;
    int encounter_start = 0;
    auto close_encounter = [&](int end_frame) {
        ++r.encounters;
        if (encounter_violating) {
            ++r.violating;
            r.violations.push_back({"non_yield", encounter_start, ego.track_id});
        }
        (void)end_frame;
    };

    for (const auto& ebox : ego.boxes) {
        int f = ebox.frame;
        Pt bc = ebox.bottom_center();
        const LaneGeometry& g = geom.for_frame(f);
        bool active = false;
        for (const MaskInstance* cw : crosswalks) {
            const MaskFrame* mf = cw->frame_at(f);
            if (!mf) continue;
            // occupied: any pedestrian bottom-center inside the crosswalk polygon
            bool occupied = false;
            for (const Tracklet* p : pedestrians) {
                const Detection* pb = p->box_at(f);
                if (pb && point_in_polygon(pb->bottom_center(), mf->polygon)) {
                    occupied = true;
                    break;
                }
            }
            if (!occupied) continue;
            if (!in_approach_region(bc, mf->polygon, d_px)) continue;
            // intersected with the ego lane
            if (!g.ego_mask.at(int(std::floor(bc.x)), int(std::floor(bc.y)))) continue;
            active = true;
            break;
        }
        if (active) {
            if (!in_encounter) {
                in_encounter = true;
                encounter_violating = false;
                encounter_start = f;
            }
            if (speed_at[f] > v_yield) encounter_violating = true;
        } else if (in_encounter) {
            in_encounter = false;
            close_encounter(f);
        }
    }
    if (in_encounter) close_encounter(ego.boxes.back().frame);

    if (r.encounters == 0) {
        r.no_evidence = true;
        r.s_cross = 1.0;
        return r;
    }
    r.s_cross = 1.0 - double(r.violating) / r.encounters;
    return r;
}

double lane_obedience(double s_center, double s_solid, double s_cross, double w_center,
                      double w_solid, double w_cross) {
    if (w_center < 0.0 || w_solid < 0.0 || w_cross < 0.0)
        throw WeightError("lane weights must be nonnegative");
    double sum = w_center + w_solid + w_cross;
    if (std::abs(sum - 1.0) > 1e-9)
        throw WeightError("lane weights must sum to 1, got " + std::to_string(sum));
    return w_center * s_center + w_solid * s_solid + w_cross * s_cross;
}

LaneScores score_lane_obedience(const ScenePriors& priors, const VideoGeometry& geom,
                                const Config& cfg) {
    LaneScores out;
    const double alpha = cfg.get_double("lane.alpha", 1.0);
    const double w_center = cfg.get_double("lane.w_center", 0.4);
    const double w_solid = cfg.get_double("lane.w_solid", 0.3);
    const double w_cross = cfg.get_double("lane.w_cross", 0.3);

    Tracklet ego = priors.ego_track ? *priors.ego_track
                                    : make_ego_proxy(priors.meta, geom.lane_width_px);

    std::vector<const Tracklet*> vehicles;
    for (const auto& t : priors.tracklets)
        if (t.cls == ActorClass::vehicle) vehicles.push_back(&t);
    vehicles.push_back(&ego);

    std::vector<const Tracklet*> pedestrians;
    for (const auto& t : priors.tracklets)
        if (t.cls == ActorClass::pedestrian) pedestrians.push_back(&t);

    std::vector<const MaskInstance*> crosswalks;
    for (const auto& m : priors.masks)
        if (m.is_crosswalk()) crosswalks.push_back(&m);

    CenteringResult c = lane_centering_score(vehicles, geom, alpha);
    SolidResult s = solid_line_score(vehicles, geom);
    CrossResult x = crosswalk_score(ego, pedestrians, crosswalks, geom, priors.meta.fps, cfg);

    out.d_norm = c.d_norm;
    out.s_center = c.s_center;
    out.s_solid = s.s_solid;
    out.s_cross = x.s_cross;
    out.center_no_evidence = c.no_evidence;
    out.solid_no_evidence = s.no_evidence;
    out.cross_no_evidence = x.no_evidence;
    out.centering_samples = c.samples;
    out.valid_segments = s.valid_segments;
    out.crossing_segments = s.crossing_segments;
    out.encounters = x.encounters;
    out.encounter_violations = x.violating;
    out.violations = std::move(s.violations);
    out.violations.insert(out.violations.end(), x.violations.begin(), x.violations.end());
    out.s_lane = lane_obedience(out.s_center, out.s_solid, out.s_cross, w_center, w_solid,
                                w_cross);
    return out;
}

}  // namespace adgve
