#include "adgve/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace adgve {

Kinematics tracklet_kinematics(const Tracklet& t, double fps, double px_per_meter,
                               const VideoGeometry* geom) {
    Kinematics k;
    k.track_id = t.track_id;
    if (t.boxes.size() < 2) {
        k.single_sample = true;
        return k;
    }

    // per-pair speeds (px/frame scaled to m/s)
    std::vector<double> speeds;
    std::vector<double> speed_dts;  // seconds between speed samples
    std::vector<Pt> disps;
    std::vector<int> disp_gaps;
    for (size_t i = 0; i + 1 < t.boxes.size(); ++i) {
        Pt a = t.boxes[i].bottom_center();
        Pt b = t.boxes[i + 1].bottom_center();
        int df = t.boxes[i + 1].frame - t.boxes[i].frame;
        Pt d = b - a;
        disps.push_back(d);
        disp_gaps.push_back(df);
        speeds.push_back(norm(d) / df * fps / px_per_meter);
    }
    double sum = 0.0;
    for (double s : speeds) sum += s;
    k.mean_speed = sum / speeds.size();

    // heading change between consecutive displacement vectors
    for (size_t i = 0; i + 1 < disps.size(); ++i) {
        if (norm(disps[i]) < 0.5 || norm(disps[i + 1]) < 0.5) continue;
        double ang = std::atan2(std::abs(cross(disps[i], disps[i + 1])),
                                dot(disps[i], disps[i + 1]));
        k.max_heading_change = std::max(k.max_heading_change, ang / disp_gaps[i + 1]);
    }

    // mean |acceleration| over consecutive speed samples
    if (speeds.size() >= 2) {
        double acc_sum = 0.0;
        size_t n = 0;
        for (size_t i = 0; i + 1 < speeds.size(); ++i) {
            double dt = 0.5 * (disp_gaps[i] + disp_gaps[i + 1]) / fps;
            acc_sum += std::abs(speeds[i + 1] - speeds[i]) / dt;
            ++n;
        }
        k.smoothness = acc_sum / n;
    }

    // lateral drift: least-squares slope of signed centerline distance (in
    // lane widths) over time in seconds
    if (geom && !geom->by_key_frame.empty()) {
        std::vector<double> ts, ds;
        for (const auto& b : t.boxes) {
            const LaneGeometry& g = geom->for_frame(b.frame);
            if (g.centerlines.empty() || g.lane_width_px <= 0.0) continue;
            Pt p = b.bottom_center();
            double best = std::numeric_limits<double>::infinity();
            double signed_best = 0.0;
            for (const auto& line : g.centerlines) {
                double sd = signed_point_polyline_distance(p, line);
                if (std::abs(sd) < best) {
                    best = std::abs(sd);
                    signed_best = sd;
                }
            }
            if (!std::isfinite(best)) continue;
            ts.push_back(b.frame / fps);
            ds.push_back(signed_best / g.lane_width_px);
        }
        if (ts.size() >= 2) {
            double tm = 0.0, dm = 0.0;
            for (size_t i = 0; i < ts.size(); ++i) {
                tm += ts[i];
                dm += ds[i];
            }
            tm /= ts.size();
            dm /= ds.size();
            double num = 0.0, den = 0.0;
            for (size_t i = 0; i < ts.size(); ++i) {
                num += (ts[i] - tm) * (ds[i] - dm);
                den += (ts[i] - tm) * (ts[i] - tm);
            }
            if (den > 0.0) k.lateral_drift = num / den;
        }
    }
    return k;
}

MotionTokens discretize(const Kinematics& k, const Config& cfg) {
    MotionTokens m;
    double s_stationary = cfg.get_double("bins.speed_stationary", 0.5);
    double s_slow = cfg.get_double("bins.speed_slow", 5.0);
    double s_moderate = cfg.get_double("bins.speed_moderate", 15.0);
    double d_slight = cfg.get_double("bins.drift_slight", 0.05);
    double d_strong = cfg.get_double("bins.drift_strong", 0.2);
    double jerk = cfg.get_double("bins.jerky_accel", 2.0);

    double v = k.mean_speed;
    if (v < s_stationary) m.speed_regime = "stationary";
    else if (v < s_slow) m.speed_regime = "slow";
    else if (v < s_moderate) m.speed_regime = "moderate";
    else m.speed_regime = "fast";

    double d = std::abs(k.lateral_drift);
    if (d < d_slight) m.drift = "none";
    else if (d < d_strong) m.drift = "slight";
    else m.drift = "strong";

    m.smoothness = k.smoothness > jerk ? "jerky" : "smooth";
    return m;
}

namespace {

const Detection* representative_box(const Tracklet& t, const SummaryScope& scope) {
    if (scope.kind == SummaryScope::Kind::frame) return t.box_at(scope.frame);
    if (const Detection* d = t.box_at(scope.clip.key_frame)) return d;
    for (const auto& b : t.boxes)
        if (b.frame >= scope.clip.start && b.frame < scope.clip.end) return &b;
    return nullptr;
}

}  // namespace

SceneSummary build_summary(const ScenePriors& priors, const VideoGeometry& geom,
                           const std::vector<Kinematics>& kin, const SummaryScope& scope,
                           const Config& cfg) {
    SceneSummary s;
    const double W = priors.meta.width, H = priors.meta.height;
    int scope_frame =
        scope.kind == SummaryScope::Kind::frame ? scope.frame : scope.clip.key_frame;

    std::set<int> visible_ids;
    for (const auto& t : priors.tracklets) {
        const Detection* box = representative_box(t, scope);
        if (!box) continue;
        visible_ids.insert(t.track_id);
        s.counts[int(t.cls)]++;

        Pt bc = box->bottom_center();
        int col = bc.x < W / 3.0 ? 0 : (bc.x < 2.0 * W / 3.0 ? 1 : 2);
        int row = bc.y >= 2.0 * H / 3.0 ? 0 : (bc.y >= H / 3.0 ? 1 : 2);  // near from bottom
        s.layout[row][col]++;

        double area_frac = box->w * box->h / (W * H);
        s.size_bins.push_back(area_frac < 0.005 ? "small" : (area_frac < 0.03 ? "medium" : "large"));
    }

    // lane attributes from the scope frame's geometry and visible mask classes
    const LaneGeometry& g = geom.for_frame(scope_frame);
    std::set<std::string> attrs;
    for (const auto& [line, style] : g.boundaries) attrs.insert(to_string(style) + " boundary");
    for (const auto& m : priors.masks) {
        if (!m.frame_at(scope_frame)) continue;
        if (m.is_crosswalk()) attrs.insert("crosswalk");
        if (m.cls == MaskClass::hard_object && m.subtype == "arrow") attrs.insert("arrows");
        if (m.cls == MaskClass::hard_object && m.subtype == "signal") attrs.insert("signals");
    }
    s.lane_attributes.assign(attrs.begin(), attrs.end());

    // motion descriptors: distinct tokens of visible tracks, stable order
    std::set<std::string> tokens;
    for (const auto& k : kin) {
        if (!visible_ids.count(k.track_id)) continue;
        MotionTokens m = discretize(k, cfg);
        tokens.insert(m.speed_regime);
        if (m.drift != "none") tokens.insert(m.drift + "-drift");
        if (m.smoothness == "jerky") tokens.insert("jerky");
    }
    s.motion_descriptors.assign(tokens.begin(), tokens.end());

    // fixed template: counts -> layout -> lane attributes -> motion
    static const char* kRows[3] = {"near", "mid", "far"};
    static const char* kCols[3] = {"left", "center", "right"};
    std::string cells;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            if (s.layout[r][c] > 0) {
                if (!cells.empty()) cells += ", ";
                cells += std::string(kRows[r]) + "-" + kCols[c] + ":" +
                         std::to_string(s.layout[r][c]);
            }
    if (cells.empty()) cells = "empty";

    std::string attrs_text;
    for (const auto& a : s.lane_attributes) {
        if (!attrs_text.empty()) attrs_text += ", ";
        attrs_text += a;
    }
    if (attrs_text.empty()) attrs_text = "no lane markings detected";

    std::string motion_text;
    for (const auto& t : s.motion_descriptors) {
        if (!motion_text.empty()) motion_text += ", ";
        motion_text += t;
    }
    if (motion_text.empty()) motion_text = "none";

    s.rendered_text = "Scene: " + std::to_string(s.counts[0]) + " vehicles, " +
                      std::to_string(s.counts[1]) + " pedestrians, " +
                      std::to_string(s.counts[2]) + " cyclists. Layout: " + cells +
                      ". Lanes: " + attrs_text + ". Motion: " + motion_text + ".";
    return s;
}

}  // namespace adgve
