#include "adgve/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>

#include <json.hpp>

#include "adgve/geometry.hpp"

namespace adgve {

using json = nlohmann::ordered_json;

std::string to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::flicker: return "flicker";
        case ViolationKind::teleport: return "teleport";
        case ViolationKind::solid_cross: return "solid_cross";
        case ViolationKind::off_center_drift: return "off_center_drift";
        case ViolationKind::non_yield: return "non_yield";
        case ViolationKind::sidewalk_drive: return "sidewalk_drive";
        case ViolationKind::jerky_ego: return "jerky_ego";
    }
    return "flicker";
}

ViolationKind violation_kind_from_string(const std::string& s) {
    if (s == "flicker") return ViolationKind::flicker;
    if (s == "teleport") return ViolationKind::teleport;
    if (s == "solid_cross") return ViolationKind::solid_cross;
    if (s == "off_center_drift") return ViolationKind::off_center_drift;
    if (s == "non_yield") return ViolationKind::non_yield;
    if (s == "sidewalk_drive") return ViolationKind::sidewalk_drive;
    if (s == "jerky_ego") return ViolationKind::jerky_ego;
    throw SpecError("unknown violation kind '" + s + "'");
}

std::string taxonomy_label(ViolationKind k) {
    switch (k) {
        case ViolationKind::flicker: return "1.1";
        case ViolationKind::teleport:
        case ViolationKind::solid_cross:
        case ViolationKind::non_yield:
        case ViolationKind::sidewalk_drive: return "2.1";
        case ViolationKind::off_center_drift:
        case ViolationKind::jerky_ego: return "2.3";
    }
    return "1.1";
}

std::string to_string(Layout l) {
    switch (l) {
        case Layout::straight: return "straight";
        case Layout::curve: return "curve";
        case Layout::crosswalk: return "crosswalk";
        case Layout::two_lane: return "two_lane";
    }
    return "straight";
}

Layout layout_from_string(const std::string& s) {
    if (s == "straight") return Layout::straight;
    if (s == "curve") return Layout::curve;
    if (s == "crosswalk") return Layout::crosswalk;
    if (s == "two_lane") return Layout::two_lane;
    throw SpecError("unknown layout '" + s + "'");
}

namespace {

// Fixed canvas; lane width 40 px so px-per-meter ~= 11.43 under the default
// 3.5 m nominal width.
constexpr int kW = 320;
constexpr int kH = 240;
constexpr double kFps = 10.0;
constexpr double kLaneHalf = 20.0;
constexpr double kEgoCenter = 160.0;    // ego lane [140,180]
constexpr double kOtherCenter = 120.0;  // other lane [100,140]
constexpr double kSidewalkX = 208.0;    // sidewalk [188,228]

// ego-lane center at a given y (curve layout bends above y=120)
double center_x(Layout layout, double y) {
    if (layout == Layout::curve && y < 120.0) return kEgoCenter + 0.1 * (120.0 - y);
    return kEgoCenter;
}

std::vector<Pt> band_polygon(Layout layout, double off_lo, double off_hi) {
    // offsets relative to the ego-lane left edge (x=140) at a given y
    auto left_at = [&](double y) { return center_x(layout, y) - kLaneHalf; };
    if (layout == Layout::curve) {
        std::vector<double> ys = {0, 60, 120, 240};
        std::vector<Pt> poly;
        for (double y : ys) poly.push_back({left_at(y) + off_lo, y});
        for (auto it = ys.rbegin(); it != ys.rend(); ++it)
            poly.push_back({left_at(*it) + off_hi, *it});
        return poly;
    }
    double l = 140.0;
    return {{l + off_lo, 0}, {l + off_lo, 240}, {l + off_hi, 240}, {l + off_hi, 0}};
}

std::vector<Pt> band_polyline(Layout layout, double off) {
    auto x_at = [&](double y) { return center_x(layout, y) - kLaneHalf + off; };
    if (layout == Layout::curve)
        return {{x_at(0), 0}, {x_at(60), 60}, {x_at(120), 120}, {x_at(240), 240}};
    return {{140.0 + off, 0.0}, {140.0 + off, 240.0}};
}

Detection make_box(int frame, Pt bc, double w, double h) {
    Detection d;
    d.frame = frame;
    d.w = w;
    d.h = h;
    d.x = bc.x - w / 2.0;
    d.y = bc.y - h;
    d.conf = 1.0;
    return d;
}

struct ViolationPlan {
    bool flicker = false;
    int flicker_start = 0, flicker_len = 0;
    double flicker_amp = 0.35;
    bool teleport = false;
    int teleport_frame = 0;
    double teleport_jump = 60.0;
    bool solid_cross = false;
    std::vector<int> cross_segments;  // segment i joins boxes i and i+1
    bool drift = false;
    double drift_offset = 0.35;  // lane widths, toward +x
    bool sidewalk = false;
    int sidewalk_start = 0, sidewalk_len = 0;
    bool jerky = false;
    int jerky_start = 0, jerky_len = 0;
    double jerky_amp = 3.0;
    bool non_yield = false;
    int encounters = 0;
    int violating = 0;
};

ViolationPlan plan_violations(const ScenarioSpec& spec, SplitMix64& rng) {
    ViolationPlan p;
    const int T = spec.frames;
    for (const auto& v : spec.violations) {
        switch (v.kind) {
            case ViolationKind::flicker: {
                p.flicker = true;
                p.flicker_amp = v.magnitude > 0 ? v.magnitude : 0.35;
                if (p.flicker_amp <= 0.0 || p.flicker_amp >= 0.9)
                    throw SpecError("flicker magnitude must be in (0,0.9)");
                p.flicker_start = v.window_start >= 0 ? v.window_start : T / 4;
                p.flicker_len = v.window_len > 0 ? v.window_len : std::min(8, T / 4);
                break;
            }
            case ViolationKind::teleport: {
                p.teleport = true;
                p.teleport_jump = v.magnitude > 0 ? v.magnitude : 60.0;
                p.teleport_frame = v.window_start >= 0 ? v.window_start : T / 2;
                if (p.teleport_frame <= 0 || p.teleport_frame >= T - 1)
                    throw SpecError("teleport frame must be interior");
                break;
            }
            case ViolationKind::solid_cross: {
                p.solid_cross = true;
                int k = v.magnitude > 0 ? int(v.magnitude) : 2;
                int n_seg = T - 1;
                if (k < 1 || k > n_seg / 3)
                    throw SpecError("solid_cross count out of range");
                // spread excursions over the middle of the trajectory
                std::set<int> idx;
                for (int j = 0; j < k; ++j)
                    idx.insert(int(std::lround(n_seg * (0.15 + 0.4 * (j + 0.5) / k))));
                if (int(idx.size()) != k) throw SpecError("solid_cross segments collide");
                p.cross_segments.assign(idx.begin(), idx.end());
                break;
            }
            case ViolationKind::off_center_drift: {
                p.drift = true;
                p.drift_offset = v.magnitude > 0 ? v.magnitude : 0.35;
                if (p.drift_offset < 0.05 || p.drift_offset > 0.45)
                    throw SpecError("off_center_drift magnitude must be in [0.05,0.45]");
                break;
            }
            case ViolationKind::non_yield: {
                if (spec.layout != Layout::crosswalk)
                    throw SpecError("non_yield requires the crosswalk layout");
                p.non_yield = true;
                p.encounters = v.encounters;
                p.violating = v.magnitude > 0 ? int(v.magnitude) : 1;
                if (p.encounters < 1 || p.encounters > 5)
                    throw SpecError("encounters must be in [1,5]");
                if (p.violating < 0 || p.violating > p.encounters)
                    throw SpecError("violating encounters exceed total");
                break;
            }
            case ViolationKind::sidewalk_drive: {
                p.sidewalk = true;
                p.sidewalk_len = v.window_len > 0 ? v.window_len : 10;
                p.sidewalk_start = v.window_start >= 0 ? v.window_start : int(0.62 * T);
                if (p.sidewalk_start + p.sidewalk_len >= T - 1)
                    throw SpecError("sidewalk window exceeds video");
                break;
            }
            case ViolationKind::jerky_ego: {
                p.jerky = true;
                p.jerky_amp = v.magnitude > 0 ? v.magnitude : 3.0;
                p.jerky_start = v.window_start >= 0 ? v.window_start : int(0.75 * T);
                p.jerky_len = v.window_len > 0 ? v.window_len : T - 1 - p.jerky_start;
                // in the crosswalk layout the jerky window must not touch the
                // encounter schedule, or the planted s_cross stops being exact
                if (spec.layout == Layout::crosswalk && p.jerky_start < int(0.72 * T))
                    throw SpecError("jerky window overlaps the encounter schedule");
                break;
            }
        }
    }
    if (p.solid_cross && p.sidewalk && p.cross_segments.size() % 2 != 0)
        throw SpecError("odd solid_cross count cannot combine with sidewalk_drive");
    (void)rng;
    return p;
}

}  // namespace

Scenario gen_scenario(const ScenarioSpec& spec) {
    const int T = spec.frames;
    if (T < 24) throw SpecError("scenario needs at least 24 frames");
    if (spec.layout == Layout::crosswalk && T < 48)
        throw SpecError("crosswalk layout needs at least 48 frames");
    SplitMix64 rng(spec.seed);
    ViolationPlan plan = plan_violations(spec, rng);

    Scenario sc;
    ScenePriors& pr = sc.priors;
    pr.meta.video_id = "synthetic-" + to_string(spec.layout) + "-" + std::to_string(spec.seed);
    pr.meta.width = kW;
    pr.meta.height = kH;
    pr.meta.fps = kFps;
    pr.meta.num_frames = T;

    // ---- masks (static: same polygon on every frame) ----
    int next_instance = 0;
    auto add_mask = [&](MaskClass cls, const std::vector<Pt>& poly, const std::string& subtype) {
        MaskInstance m;
        m.instance_id = next_instance++;
        m.cls = cls;
        m.subtype = subtype;
        for (int f = 0; f < T; ++f) m.frames.push_back({f, poly, 1.0});
        pr.masks.push_back(std::move(m));
    };
    add_mask(MaskClass::other_lane, band_polygon(spec.layout, -40, 0), "");
    add_mask(MaskClass::ego_lane, band_polygon(spec.layout, 0, 40), "");
    if (spec.layout != Layout::curve) {
        add_mask(MaskClass::curb, band_polygon(spec.layout, 40, 48), "");
        add_mask(MaskClass::sidewalk, band_polygon(spec.layout, 48, 88), "");
    }
    std::vector<Pt> crosswalk_poly = {{138, 70}, {182, 70}, {182, 90}, {138, 90}};
    if (spec.layout == Layout::crosswalk)
        add_mask(MaskClass::crosswalk, crosswalk_poly, "");

    // ---- declared boundaries ----
    LaneBoundary solid;
    solid.boundary_id = 0;
    solid.style = BoundaryStyle::solid;
    LaneBoundary dashed;
    dashed.boundary_id = 1;
    dashed.style = BoundaryStyle::dashed;
    for (int f = 0; f < T; ++f) {
        solid.frames.push_back({f, band_polyline(spec.layout, 0)});
        dashed.frames.push_back({f, band_polyline(spec.layout, 40)});
    }
    pr.boundaries.push_back(std::move(solid));
    pr.boundaries.push_back(std::move(dashed));

    // ---- main agent vehicle ----
    // drives up the ego lane; violations perturb laterally or temporally
    Tracklet agent;
    agent.track_id = 1;
    agent.cls = ActorClass::vehicle;
    {
        double y0 = 215.0;
        double v = 2.0;  // px/frame toward smaller y
        int side = 0;    // 0 = ego lane, 1 = other lane (solid_cross excursions)
        size_t next_cross = 0;
        for (int f = 0; f < T; ++f) {
            // side toggles at the end box of each planted crossing segment
            if (next_cross < plan.cross_segments.size() &&
                f == plan.cross_segments[next_cross] + 1) {
                side = 1 - side;
                ++next_cross;
            }
            double y = y0 - v * f;
            double x;
            if (side == 1) {
                x = kOtherCenter;
            } else {
                x = center_x(spec.layout, y);
                if (plan.drift) x += plan.drift_offset * 40.0;
            }
            if (plan.sidewalk && f >= plan.sidewalk_start &&
                f < plan.sidewalk_start + plan.sidewalk_len)
                x = kSidewalkX;
            Pt bc{x, y};
            if (plan.teleport && f == plan.teleport_frame) bc.y -= plan.teleport_jump;
            double w = 16.0, h = 12.0;
            if (plan.flicker && f >= plan.flicker_start &&
                f < plan.flicker_start + plan.flicker_len && (f - plan.flicker_start) % 2 == 1) {
                w *= 1.0 + plan.flicker_amp;
                h *= 1.0 - plan.flicker_amp;
            }
            agent.boxes.push_back(make_box(f, bc, w, h));
        }
    }
    pr.tracklets.push_back(agent);

    // ---- second vehicle in the other lane ----
    if (spec.layout == Layout::two_lane || spec.layout == Layout::crosswalk) {
        Tracklet other;
        other.track_id = 3;
        other.cls = ActorClass::vehicle;
        for (int f = 0; f < T; ++f) {
            double y = 150.0 + 1.5 * f;
            if (y > 236.0) break;  // leaves the view; track ends
            other.boxes.push_back(make_box(f, {kOtherCenter, y}, 16, 12));
        }
        pr.tracklets.push_back(std::move(other));
    }

    // ---- crosswalk layout: pedestrian occupancy schedule + ego approach ----
    std::vector<std::pair<int, int>> occupied_windows;  // [start, end)
    std::vector<int> violating_windows;
    if (spec.layout == Layout::crosswalk) {
        int E = plan.non_yield ? plan.encounters : 3;
        int V = plan.non_yield ? plan.violating : 0;
        const int gap = 3, dwell = 4;
        int f = 4;
        for (int e = 0; e < E; ++e) {
            occupied_windows.emplace_back(f + gap, f + gap + dwell);
            f += gap + dwell;
        }
        if (occupied_windows.back().second >= int(0.7 * T))
            throw SpecError("encounter schedule does not fit the video");
        // choose which encounters violate (deterministic shuffle)
        std::vector<int> order(E);
        for (int i = 0; i < E; ++i) order[i] = i;
        for (int i = E - 1; i > 0; --i)
            std::swap(order[i], order[rng.below(std::uint64_t(i + 1))]);
        violating_windows.assign(order.begin(), order.begin() + V);
        std::sort(violating_windows.begin(), violating_windows.end());

        // pedestrian: inside the crosswalk polygon exactly during the windows
        Tracklet ped;
        ped.track_id = 2;
        ped.cls = ActorClass::pedestrian;
        for (int fr = 0; fr < T; ++fr) {
            bool inside = false;
            int k = 0;
            for (size_t wi = 0; wi < occupied_windows.size(); ++wi) {
                auto [a, b] = occupied_windows[wi];
                if (fr >= a && fr < b) {
                    inside = true;
                    k = fr - a;
                    break;
                }
            }
            double x = inside ? 148.0 + 8.0 * k : 128.0;
            ped.boxes.push_back(make_box(fr, {x, 80.0}, 6, 14));
        }
        pr.tracklets.push_back(std::move(ped));

        // ego: stays inside the approach region; one fast frame inside each
        // violating window, slow everywhere else
        Tracklet ego;
        ego.track_id = 99;
        ego.cls = ActorClass::vehicle;
        double y = 142.0;
        std::set<int> fast_frames;
        for (int vi : violating_windows) {
            auto [a, b] = occupied_windows[vi];
            fast_frames.insert(a + 1);  // backward difference lands inside the window
        }
        for (int fr = 0; fr < T; ++fr) {
            ego.boxes.push_back(make_box(fr, {kEgoCenter, y}, 24, 16));
            double step = fast_frames.count(fr + 1) ? 4.0 : 0.2;
            if (plan.jerky && fr >= plan.jerky_start && fr < plan.jerky_start + plan.jerky_len)
                step = (fr % 2 == 0) ? plan.jerky_amp : 0.2;
            y -= step;
        }
        pr.ego_track = std::move(ego);
    } else if (plan.jerky) {
        // jerky ego motion outside the crosswalk layout: explicit ego track
        Tracklet ego;
        ego.track_id = 99;
        ego.cls = ActorClass::vehicle;
        double y = 232.0;
        for (int fr = 0; fr < T; ++fr) {
            ego.boxes.push_back(make_box(fr, {center_x(spec.layout, y), y}, 24, 16));
            double step = 0.5;
            if (fr >= plan.jerky_start && fr < plan.jerky_start + plan.jerky_len)
                step = (fr % 2 == 0) ? plan.jerky_amp : 0.2;
            y -= step;
        }
        pr.ego_track = std::move(ego);
    }

    // ---- extra background agents (feature variety; never affect lane scores) ----
    int extra = spec.extra_agents >= 0 ? spec.extra_agents : int(rng.below(3));
    if (spec.layout == Layout::curve) extra = 0;  // no sidewalk band there
    for (int i = 0; i < extra; ++i) {
        Tracklet walker;
        walker.track_id = 10 + i;
        walker.cls = (i % 2 == 0) ? ActorClass::pedestrian : ActorClass::cyclist;
        double y0 = 90.0 + 40.0 * i + rng.uniform(0.0, 10.0);
        for (int f = 0; f < T; ++f) {
            double y = y0 + 0.8 * f;
            if (y > 236.0) break;
            walker.boxes.push_back(make_box(f, {kSidewalkX, y}, 6, 14));
        }
        if (walker.boxes.size() >= 2) pr.tracklets.push_back(std::move(walker));
    }

    // ---- exact expected component scores ----
    GroundTruth& gt = sc.truth;
    for (const auto& v : spec.violations) gt.tags.push_back(to_string(v.kind));
    std::sort(gt.tags.begin(), gt.tags.end());
    gt.tags.erase(std::unique(gt.tags.begin(), gt.tags.end()), gt.tags.end());
    gt.clean = gt.tags.empty();

    auto count_segments = [](const Tracklet& t) {
        int n = 0;
        for (size_t i = 0; i + 1 < t.boxes.size(); ++i)
            if (norm(t.boxes[i + 1].bottom_center() - t.boxes[i].bottom_center()) > 1e-12) ++n;
        return n;
    };
    int total_segments = 0;
    for (const auto& t : pr.tracklets)
        if (t.cls == ActorClass::vehicle) total_segments += count_segments(t);
    if (pr.ego_track) total_segments += count_segments(*pr.ego_track);
    int crossings = int(plan.cross_segments.size());
    gt.expected["s_solid"] =
        total_segments == 0 ? 1.0 : clamp01(1.0 - double(crossings) / total_segments);
    if (spec.layout == Layout::crosswalk) {
        int E = int(occupied_windows.size());
        int V = int(violating_windows.size());
        gt.expected["s_cross"] = E == 0 ? 1.0 : 1.0 - double(V) / E;
    } else {
        gt.expected["s_cross"] = 1.0;  // no crosswalks: NoEvidence scores 1
    }

    // human-proxy quality label
    double q = 0.92;
    for (const auto& tag : gt.tags) {
        if (tag == "flicker" || tag == "off_center_drift" || tag == "jerky_ego") q -= 0.10;
        else if (tag == "solid_cross") q -= 0.12;
        else q -= 0.15;
    }
    q += rng.uniform(-0.03, 0.03);
    pr.human_score = std::clamp(q, 0.02, 0.98);

    return sc;
}

std::string scenario_to_json(const Scenario& sc) {
    json doc = json::parse(serialize_annotation(sc.priors));
    json gt;
    gt["tags"] = sc.truth.tags;
    json exp;
    for (const auto& [k, v] : sc.truth.expected) exp[k] = v;
    gt["expected"] = std::move(exp);
    gt["clean"] = sc.truth.clean;
    doc["ground_truth"] = std::move(gt);
    return doc.dump();
}

std::vector<ScenarioSpec> batch_specs(std::uint64_t seed, int n, int n_bad) {
    if (n_bad > n) throw SpecError("n_bad exceeds batch size");
    std::vector<ScenarioSpec> specs;
    const Layout layouts[] = {Layout::straight, Layout::two_lane, Layout::curve,
                              Layout::crosswalk};
    const ViolationKind kinds[] = {
        ViolationKind::solid_cross,      ViolationKind::non_yield,
        ViolationKind::off_center_drift, ViolationKind::sidewalk_drive,
        ViolationKind::flicker,          ViolationKind::teleport,
        ViolationKind::jerky_ego};
    for (int i = 0; i < n; ++i) {
        ScenarioSpec s;
        s.seed = seed + std::uint64_t(i) * 1000003ull;
        s.frames = 60;
        s.layout = layouts[i % 4];
        if (i < n_bad) {
            ViolationSpec v;
            v.kind = kinds[i % 7];
            if (v.kind == ViolationKind::non_yield) {
                s.layout = Layout::crosswalk;
                v.magnitude = 2;  // 2 of 4 encounters violate
            }
            if (v.kind == ViolationKind::solid_cross) v.magnitude = 4;
            if (v.kind == ViolationKind::off_center_drift) v.magnitude = 0.4;
            s.violations.push_back(v);
        }
        specs.push_back(std::move(s));
    }
    return specs;
}

std::vector<ScenarioSpec> parse_scenario_specs(const std::string& bytes) {
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("scenario spec is not valid JSON: ") + e.what());
    }
    std::vector<json> items;
    if (doc.is_array())
        items.assign(doc.begin(), doc.end());
    else
        items.push_back(doc);

    std::vector<ScenarioSpec> specs;
    for (const auto& it : items) {
        ScenarioSpec s;
        if (it.contains("seed")) s.seed = it.at("seed").get<std::uint64_t>();
        if (it.contains("layout")) s.layout = layout_from_string(it.at("layout"));
        if (it.contains("frames")) s.frames = it.at("frames").get<int>();
        if (it.contains("extra_agents")) s.extra_agents = it.at("extra_agents").get<int>();
        if (it.contains("violations")) {
            for (const auto& jv : it.at("violations")) {
                ViolationSpec v;
                v.kind = violation_kind_from_string(jv.at("kind").get<std::string>());
                if (jv.contains("magnitude")) v.magnitude = jv.at("magnitude").get<double>();
                if (jv.contains("window_start")) v.window_start = jv.at("window_start").get<int>();
                if (jv.contains("window_len")) v.window_len = jv.at("window_len").get<int>();
                if (jv.contains("encounters")) v.encounters = jv.at("encounters").get<int>();
                s.violations.push_back(v);
            }
        }
        specs.push_back(std::move(s));
    }
    return specs;
}

// ---------------------------------------------------------------------------
// Instruction generation
// ---------------------------------------------------------------------------

const std::vector<FactorValue>& environment_vocab() {
    static const std::vector<FactorValue> v = {
        {"urban", 3},   {"residential", 3}, {"highway", 3},
        {"suburban", 2}, {"rural", 2},
        {"mountain", 1}, {"tunnel", 1}, {"bridge", 1}, {"roundabout", 1}, {"parking lot", 1}};
    return v;
}

const std::vector<FactorValue>& weather_vocab() {
    static const std::vector<FactorValue> v = {
        {"sunny", 3}, {"overcast", 3},
        {"rainy", 2}, {"night", 2},
        {"snowy", 1}, {"foggy", 1}, {"heavy rain/snow", 1}};
    return v;
}

const std::vector<FactorValue>& behavior_vocab() {
    static const std::vector<FactorValue> v = {
        {"cruising straight", 3}, {"lane keeping", 3},
        {"braking", 2}, {"overtaking", 2}, {"merging", 2}, {"navigating traffic", 2},
        {"stop-and-go traffic", 2}, {"approaching traffic light", 2},
        {"U-turn", 1}, {"emergency braking", 1}, {"exiting highway", 1}};
    return v;
}

const std::vector<FactorValue>& dynamics_vocab() {
    static const std::vector<FactorValue> v = {
        {"sparse traffic", 3}, {"heavy traffic", 3}, {"parked cars", 3},
        {"construction obstacle (roadwork cones, temporary barriers)", 2},
        {"visual obstruction (glare, strong headlights, smoke)", 2},
        {"pedestrians at crosswalk", 2}, {"bus stopping", 2}, {"truck blocking lane", 2},
        {"emergency vehicle", 1}, {"jaywalker", 1}, {"cyclist in ego lane", 1},
        {"animal presence", 1}, {"small obstacle on road", 1}};
    return v;
}

const std::vector<FactorConflict>& factor_conflicts() {
    // Low-mass contradictions only, so marginals stay near the priors.
    static const std::vector<FactorConflict> v = {
        {"environment", "tunnel", "weather", "snowy"},
        {"environment", "tunnel", "weather", "foggy"},
        {"environment", "tunnel", "weather", "heavy rain/snow"},
        {"environment", "tunnel", "behavior", "U-turn"},
        {"environment", "bridge", "behavior", "U-turn"},
        {"environment", "highway", "behavior", "U-turn"},
        {"environment", "highway", "dynamics", "jaywalker"},
        {"environment", "highway", "dynamics", "pedestrians at crosswalk"},
    };
    return v;
}

namespace {

const FactorValue& weighted_pick(const std::vector<FactorValue>& vocab, SplitMix64& rng) {
    int total = 0;
    for (const auto& f : vocab) total += f.weight;
    int r = int(rng.below(std::uint64_t(total)));
    for (const auto& f : vocab) {
        r -= f.weight;
        if (r < 0) return f;
    }
    return vocab.back();
}

bool conflicting(const std::string& e, const std::string& w, const std::string& b,
                 const std::string& d) {
    auto value_of = [&](const std::string& kind) -> const std::string& {
        if (kind == "environment") return e;
        if (kind == "weather") return w;
        if (kind == "behavior") return b;
        return d;
    };
    for (const auto& c : factor_conflicts())
        if (value_of(c.a_kind) == c.a_value && value_of(c.b_kind) == c.b_value) return true;
    return false;
}

std::string fill_template(int id, const std::string& e, const std::string& w,
                          const std::string& b, const std::string& d) {
    switch (id) {
        case 0:
            return "In the driver’s front–camera view of a " + e + " under " + w +
                   ", the ego vehicle " + b + " while the scene shows " + d + ".";
        case 1:
            return "Under " + w + " in a " + e + " scene, the ego car " + b + " as " + d +
                   " unfolds.";
        default:
            return d + " occurs in a " + e + " setting; with " + w +
                   " conditions, the ego vehicle " + b + ".";
    }
}

std::string normalize_text(const std::string& s) {
    std::string out;
    bool space = false;
    for (char c : s) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            space = true;
            continue;
        }
        if (space && !out.empty()) out += ' ';
        space = false;
        out += char(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

}  // namespace

std::vector<Instruction> gen_instructions(int n, std::uint64_t seed) {
    if (n < 1) throw SpecError("instruction count must be >= 1");
    SplitMix64 rng(seed);
    std::vector<Instruction> out;
    std::set<std::string> seen;
    long attempts = 0;
    const long max_attempts = 2000L * n + 10000L;
    while (int(out.size()) < n) {
        if (++attempts > max_attempts)
            throw SpecError("instruction sampling failed to converge (vocabulary exhausted?)");
        const auto& e = weighted_pick(environment_vocab(), rng);
        const auto& w = weighted_pick(weather_vocab(), rng);
        const auto& b = weighted_pick(behavior_vocab(), rng);
        const auto& d = weighted_pick(dynamics_vocab(), rng);
        int tid = int(rng.below(3));
        if (conflicting(e.value, w.value, b.value, d.value)) continue;
        Instruction ins;
        ins.environment = e.value;
        ins.weather = w.value;
        ins.behavior = b.value;
        ins.dynamics = d.value;
        ins.template_id = tid;
        ins.text = fill_template(tid, e.value, w.value, b.value, d.value);
        if (!seen.insert(normalize_text(ins.text)).second) continue;
        out.push_back(std::move(ins));
    }
    return out;
}

}  // namespace adgve
