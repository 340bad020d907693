#include "adgve/scene_model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

namespace adgve {

using json = nlohmann::ordered_json;

std::string to_string(ActorClass c) {
    switch (c) {
        case ActorClass::vehicle: return "vehicle";
        case ActorClass::pedestrian: return "pedestrian";
        case ActorClass::cyclist: return "cyclist";
    }
    return "vehicle";
}

std::string to_string(MaskClass c) {
    switch (c) {
        case MaskClass::ego_lane: return "ego_lane";
        case MaskClass::other_lane: return "other_lane";
        case MaskClass::sidewalk: return "sidewalk";
        case MaskClass::curb: return "curb";
        case MaskClass::hard_object: return "hard_object";
        case MaskClass::crosswalk: return "crosswalk";
    }
    return "hard_object";
}

std::string to_string(BoundaryStyle s) {
    switch (s) {
        case BoundaryStyle::solid: return "solid";
        case BoundaryStyle::dashed: return "dashed";
        case BoundaryStyle::double_solid: return "double_solid";
    }
    return "solid";
}

ActorClass actor_class_from_string(const std::string& s) {
    if (s == "vehicle") return ActorClass::vehicle;
    if (s == "pedestrian") return ActorClass::pedestrian;
    if (s == "cyclist") return ActorClass::cyclist;
    throw SchemaError("unknown actor class '" + s + "'");
}

MaskClass mask_class_from_string(const std::string& s) {
    if (s == "ego_lane") return MaskClass::ego_lane;
    if (s == "other_lane") return MaskClass::other_lane;
    if (s == "sidewalk") return MaskClass::sidewalk;
    if (s == "curb") return MaskClass::curb;
    if (s == "hard_object") return MaskClass::hard_object;
    if (s == "crosswalk") return MaskClass::crosswalk;
    throw SchemaError("unknown mask class '" + s + "'");
}

BoundaryStyle boundary_style_from_string(const std::string& s) {
    if (s == "solid") return BoundaryStyle::solid;
    if (s == "dashed") return BoundaryStyle::dashed;
    if (s == "double_solid") return BoundaryStyle::double_solid;
    throw SchemaError("unknown boundary style '" + s + "'");
}

const Detection* Tracklet::box_at(int frame) const {
    auto it = std::lower_bound(boxes.begin(), boxes.end(), frame,
                               [](const Detection& d, int f) { return d.frame < f; });
    if (it != boxes.end() && it->frame == frame) return &*it;
    return nullptr;
}

const MaskFrame* MaskInstance::frame_at(int frame) const {
    for (const auto& f : frames)
        if (f.frame == frame) return &f;
    return nullptr;
}

const BoundaryFrame* LaneBoundary::frame_at(int frame) const {
    for (const auto& f : frames)
        if (f.frame == frame) return &f;
    return nullptr;
}

namespace {

// ---- low-level JSON access with path-carrying errors --------------------

const json& require(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key))
        throw SchemaError("missing required field " + path + "." + key);
    return obj.at(key);
}

double require_number(const json& obj, const char* key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_number()) throw SchemaError("field " + path + "." + key + " is not a number");
    return v.get<double>();
}

int require_int(const json& obj, const char* key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_number_integer())
        throw SchemaError("field " + path + "." + key + " is not an integer");
    return v.get<int>();
}

std::string require_string(const json& obj, const char* key, const std::string& path) {
    const json& v = require(obj, key, path);
    if (!v.is_string()) throw SchemaError("field " + path + "." + key + " is not a string");
    return v.get<std::string>();
}

double optional_conf(const json& obj, const std::string& path) {
    if (!obj.contains("conf")) return 1.0;
    const json& v = obj.at("conf");
    if (!v.is_number()) throw SchemaError("field " + path + ".conf is not a number");
    double c = v.get<double>();
    if (!(c >= 0.0 && c <= 1.0))
        throw RangeError("conf outside [0,1] at " + path);
    return c;
}

std::vector<Pt> parse_points(const json& arr, size_t min_pts, const std::string& path) {
    if (!arr.is_array()) throw SchemaError("field " + path + " is not an array");
    if (arr.size() < min_pts)
        throw GeometryError(path + " needs at least " + std::to_string(min_pts) + " points");
    std::vector<Pt> pts;
    pts.reserve(arr.size());
    for (size_t i = 0; i < arr.size(); ++i) {
        const json& p = arr[i];
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw SchemaError(path + "[" + std::to_string(i) + "] is not an [x,y] pair");
        double x = p[0].get<double>(), y = p[1].get<double>();
        if (!std::isfinite(x) || !std::isfinite(y))
            throw RangeError(path + "[" + std::to_string(i) + "] is not finite");
        pts.push_back({x, y});
    }
    return pts;
}

// ---- geometric validation ------------------------------------------------

int orient(const Pt& a, const Pt& b, const Pt& c) {
    double v = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

bool on_segment(const Pt& a, const Pt& b, const Pt& p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

bool segments_cross(const Pt& a, const Pt& b, const Pt& c, const Pt& d) {
    int o1 = orient(a, b, c), o2 = orient(a, b, d);
    int o3 = orient(c, d, a), o4 = orient(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(a, b, c)) return true;
    if (o2 == 0 && on_segment(a, b, d)) return true;
    if (o3 == 0 && on_segment(c, d, a)) return true;
    if (o4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

// Simple-polygon test: no two non-adjacent edges intersect. O(n^2).
bool polygon_is_simple(const std::vector<Pt>& poly) {
    size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            // skip adjacent edges (shared endpoint)
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            if (segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]))
                return false;
        }
    }
    return true;
}

void check_polygon(const std::vector<Pt>& poly, const VideoMeta& meta, const std::string& path) {
    if (poly.size() < 3) throw GeometryError("degenerate polygon (<3 vertices) at " + path);
    double lox = -0.5 * meta.width, hix = 1.5 * meta.width;
    double loy = -0.5 * meta.height, hiy = 1.5 * meta.height;
    for (size_t i = 0; i < poly.size(); ++i) {
        if (poly[i].x < lox || poly[i].x > hix || poly[i].y < loy || poly[i].y > hiy)
            throw RangeError("vertex outside generator bounds at " + path + "[" +
                             std::to_string(i) + "]");
    }
    if (!polygon_is_simple(poly))
        throw GeometryError("self-intersecting polygon at " + path);
}

void check_frame_index(int frame, int num_frames, const std::string& path) {
    if (frame < 0 || frame >= num_frames)
        throw RangeError("frame index " + std::to_string(frame) + " outside [0," +
                         std::to_string(num_frames) + ") at " + path);
}

Detection parse_box(const json& b, const VideoMeta& meta, const std::string& path) {
    Detection d;
    d.frame = require_int(b, "frame", path);
    check_frame_index(d.frame, meta.num_frames, path);
    d.x = require_number(b, "x", path);
    d.y = require_number(b, "y", path);
    d.w = require_number(b, "w", path);
    d.h = require_number(b, "h", path);
    if (!(std::isfinite(d.x) && std::isfinite(d.y) && std::isfinite(d.w) && std::isfinite(d.h)))
        throw RangeError("non-finite box at " + path);
    if (d.w <= 0.0 || d.h <= 0.0) throw RangeError("box extent must be positive at " + path);
    // box must intersect the image rectangle
    if (d.x + d.w <= 0.0 || d.y + d.h <= 0.0 || d.x >= meta.width || d.y >= meta.height)
        throw RangeError("box does not intersect image at " + path);
    d.conf = optional_conf(b, path);
    return d;
}

Tracklet parse_track(const json& t, const VideoMeta& meta, const std::string& path) {
    Tracklet tk;
    tk.track_id = require_int(t, "track_id", path);
    tk.cls = actor_class_from_string(require_string(t, "class", path));
    const json& boxes = require(t, "boxes", path);
    if (!boxes.is_array() || boxes.empty())
        throw SchemaError(path + ".boxes must be a nonempty array");
    for (size_t i = 0; i < boxes.size(); ++i)
        tk.boxes.push_back(parse_box(boxes[i], meta, path + ".boxes[" + std::to_string(i) + "]"));
    // sort by frame, reject duplicates
    std::stable_sort(tk.boxes.begin(), tk.boxes.end(),
                     [](const Detection& a, const Detection& b) { return a.frame < b.frame; });
    for (size_t i = 1; i < tk.boxes.size(); ++i)
        if (tk.boxes[i].frame == tk.boxes[i - 1].frame)
            throw RangeError("duplicate frame " + std::to_string(tk.boxes[i].frame) + " in " + path);
    return tk;
}

json box_to_json(const Detection& d) {
    json b;
    b["frame"] = d.frame;
    b["x"] = d.x;
    b["y"] = d.y;
    b["w"] = d.w;
    b["h"] = d.h;
    b["conf"] = d.conf;
    return b;
}

json track_to_json(const Tracklet& t) {
    json jt;
    jt["track_id"] = t.track_id;
    jt["class"] = to_string(t.cls);
    json boxes = json::array();
    for (const auto& b : t.boxes) boxes.push_back(box_to_json(b));
    jt["boxes"] = std::move(boxes);
    return jt;
}

}  // namespace

ScenePriors parse_annotation(const std::string& bytes) {
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("not a valid JSON document: ") + e.what());
    }
    if (!doc.is_object()) throw SchemaError("top-level value is not an object");

    ScenePriors p;
    p.meta.video_id = require_string(doc, "video_id", "$");
    if (p.meta.video_id.empty()) throw SchemaError("video_id is empty");
    p.meta.width = require_int(doc, "width", "$");
    p.meta.height = require_int(doc, "height", "$");
    p.meta.fps = require_number(doc, "fps", "$");
    p.meta.num_frames = require_int(doc, "num_frames", "$");
    if (p.meta.width <= 0 || p.meta.height <= 0)
        throw RangeError("width/height must be positive");
    if (!(p.meta.fps > 0.0) || !std::isfinite(p.meta.fps))
        throw RangeError("fps must be positive");
    if (p.meta.num_frames <= 0) throw RangeError("num_frames must be positive");

    const json& tracks = require(doc, "tracks", "$");
    if (!tracks.is_array()) throw SchemaError("$.tracks is not an array");
    std::set<int> track_ids;
    for (size_t i = 0; i < tracks.size(); ++i) {
        std::string path = "$.tracks[" + std::to_string(i) + "]";
        Tracklet t = parse_track(tracks[i], p.meta, path);
        if (!track_ids.insert(t.track_id).second)
            throw SchemaError("duplicate track_id " + std::to_string(t.track_id) + " at " + path);
        p.tracklets.push_back(std::move(t));
    }

    const json& masks = require(doc, "masks", "$");
    if (!masks.is_array()) throw SchemaError("$.masks is not an array");
    std::set<int> instance_ids;
    for (size_t i = 0; i < masks.size(); ++i) {
        std::string path = "$.masks[" + std::to_string(i) + "]";
        const json& m = masks[i];
        MaskInstance mi;
        mi.instance_id = require_int(m, "instance_id", path);
        if (!instance_ids.insert(mi.instance_id).second)
            throw SchemaError("duplicate instance_id " + std::to_string(mi.instance_id) +
                              " at " + path);
        mi.cls = mask_class_from_string(require_string(m, "class", path));
        if (m.contains("subtype")) {
            if (!m.at("subtype").is_string())
                throw SchemaError(path + ".subtype is not a string");
            mi.subtype = m.at("subtype").get<std::string>();
        }
        const json& frames = require(m, "frames", path);
        if (!frames.is_array()) throw SchemaError(path + ".frames is not an array");
        for (size_t k = 0; k < frames.size(); ++k) {
            std::string fpath = path + ".frames[" + std::to_string(k) + "]";
            const json& f = frames[k];
            MaskFrame mf;
            mf.frame = require_int(f, "frame", fpath);
            check_frame_index(mf.frame, p.meta.num_frames, fpath);
            mf.polygon = parse_points(require(f, "polygon", fpath), 3, fpath + ".polygon");
            check_polygon(mf.polygon, p.meta, fpath + ".polygon");
            mf.conf = optional_conf(f, fpath);
            mi.frames.push_back(std::move(mf));
        }
        p.masks.push_back(std::move(mi));
    }

    const json& bnds = require(doc, "lane_boundaries", "$");
    if (!bnds.is_array()) throw SchemaError("$.lane_boundaries is not an array");
    std::set<int> boundary_ids;
    for (size_t i = 0; i < bnds.size(); ++i) {
        std::string path = "$.lane_boundaries[" + std::to_string(i) + "]";
        const json& b = bnds[i];
        LaneBoundary lb;
        lb.boundary_id = require_int(b, "boundary_id", path);
        if (!boundary_ids.insert(lb.boundary_id).second)
            throw SchemaError("duplicate boundary_id " + std::to_string(lb.boundary_id) +
                              " at " + path);
        lb.style = boundary_style_from_string(require_string(b, "style", path));
        const json& frames = require(b, "frames", path);
        if (!frames.is_array()) throw SchemaError(path + ".frames is not an array");
        for (size_t k = 0; k < frames.size(); ++k) {
            std::string fpath = path + ".frames[" + std::to_string(k) + "]";
            const json& f = frames[k];
            BoundaryFrame bf;
            bf.frame = require_int(f, "frame", fpath);
            check_frame_index(bf.frame, p.meta.num_frames, fpath);
            bf.polyline = parse_points(require(f, "polyline", fpath), 2, fpath + ".polyline");
            lb.frames.push_back(std::move(bf));
        }
        p.boundaries.push_back(std::move(lb));
    }

    if (doc.contains("ego_track") && !doc.at("ego_track").is_null()) {
        Tracklet ego = parse_track(doc.at("ego_track"), p.meta, "$.ego_track");
        p.ego_track = std::move(ego);
    }
    if (doc.contains("quality_score") && !doc.at("quality_score").is_null()) {
        const json& q = doc.at("quality_score");
        if (!q.is_number()) throw SchemaError("$.quality_score is not a number");
        double v = q.get<double>();
        if (!(v >= 0.0 && v <= 1.0)) throw RangeError("quality_score outside [0,1]");
        p.human_score = v;
    }
    return p;
}

std::string serialize_annotation(const ScenePriors& p) {
    json doc;
    doc["video_id"] = p.meta.video_id;
    doc["width"] = p.meta.width;
    doc["height"] = p.meta.height;
    doc["fps"] = p.meta.fps;
    doc["num_frames"] = p.meta.num_frames;

    json tracks = json::array();
    for (const auto& t : p.tracklets) tracks.push_back(track_to_json(t));
    doc["tracks"] = std::move(tracks);

    json masks = json::array();
    for (const auto& m : p.masks) {
        json jm;
        jm["instance_id"] = m.instance_id;
        jm["class"] = to_string(m.cls);
        if (!m.subtype.empty()) jm["subtype"] = m.subtype;
        json frames = json::array();
        for (const auto& f : m.frames) {
            json jf;
            jf["frame"] = f.frame;
            json poly = json::array();
            for (const auto& v : f.polygon) poly.push_back(json::array({v.x, v.y}));
            jf["polygon"] = std::move(poly);
            jf["conf"] = f.conf;
            frames.push_back(std::move(jf));
        }
        jm["frames"] = std::move(frames);
        masks.push_back(std::move(jm));
    }
    doc["masks"] = std::move(masks);

    json bnds = json::array();
    for (const auto& b : p.boundaries) {
        json jb;
        jb["boundary_id"] = b.boundary_id;
        jb["style"] = to_string(b.style);
        json frames = json::array();
        for (const auto& f : b.frames) {
            json jf;
            jf["frame"] = f.frame;
            json line = json::array();
            for (const auto& v : f.polyline) line.push_back(json::array({v.x, v.y}));
            jf["polyline"] = std::move(line);
            frames.push_back(std::move(jf));
        }
        jb["frames"] = std::move(frames);
        bnds.push_back(std::move(jb));
    }
    doc["lane_boundaries"] = std::move(bnds);

    if (p.ego_track) doc["ego_track"] = track_to_json(*p.ego_track);
    if (p.human_score) doc["quality_score"] = *p.human_score;
    return doc.dump();
}

ValidationReport validate_priors(const ScenePriors& p) {
    ValidationReport r;
    auto hard = [&](const std::string& m) { r.hard_errors.push_back(m); };
    auto warn = [&](const std::string& m) { r.warnings.push_back(m); };

    if (p.meta.video_id.empty()) hard("empty video_id");
    if (p.meta.width <= 0 || p.meta.height <= 0) hard("non-positive image size");
    if (!(p.meta.fps > 0.0)) hard("non-positive fps");
    if (p.meta.num_frames <= 0) hard("non-positive num_frames");

    std::set<int> track_ids;
    for (const auto& t : p.tracklets) {
        if (!track_ids.insert(t.track_id).second)
            hard("duplicate track id " + std::to_string(t.track_id));
        if (t.boxes.empty()) hard("track " + std::to_string(t.track_id) + " has no boxes");
        if (t.boxes.size() == 1)
            warn("track " + std::to_string(t.track_id) + " has a single frame");
        for (size_t i = 0; i < t.boxes.size(); ++i) {
            const auto& b = t.boxes[i];
            if (b.frame < 0 || b.frame >= p.meta.num_frames)
                hard("track " + std::to_string(t.track_id) + " frame out of range");
            if (b.w <= 0 || b.h <= 0)
                hard("track " + std::to_string(t.track_id) + " has degenerate box");
            if (!(b.conf >= 0.0 && b.conf <= 1.0))
                hard("track " + std::to_string(t.track_id) + " conf outside [0,1]");
            if (i > 0 && t.boxes[i].frame <= t.boxes[i - 1].frame)
                hard("track " + std::to_string(t.track_id) + " frames not strictly increasing");
        }
    }

    std::set<int> instance_ids;
    bool any_mask_frames = false;
    for (const auto& m : p.masks) {
        if (!instance_ids.insert(m.instance_id).second)
            hard("duplicate instance id " + std::to_string(m.instance_id));
        if (m.frames.empty())
            warn("mask " + std::to_string(m.instance_id) + " has no frames");
        for (const auto& f : m.frames) {
            any_mask_frames = true;
            if (f.frame < 0 || f.frame >= p.meta.num_frames)
                hard("mask " + std::to_string(m.instance_id) + " frame out of range");
            if (f.polygon.size() < 3)
                hard("mask " + std::to_string(m.instance_id) + " has degenerate polygon");
        }
    }
    if (p.masks.empty() || !any_mask_frames) warn("no masks: lane scores fall back to defaults");

    for (const auto& b : p.boundaries) {
        for (const auto& f : b.frames) {
            if (f.frame < 0 || f.frame >= p.meta.num_frames)
                hard("boundary " + std::to_string(b.boundary_id) + " frame out of range");
            if (f.polyline.size() < 2)
                hard("boundary " + std::to_string(b.boundary_id) + " has degenerate polyline");
        }
    }

    if (!p.ego_track) warn("no ego_track: ego scores use camera-footprint proxy");
    if (p.human_score && !(*p.human_score >= 0.0 && *p.human_score <= 1.0))
        hard("quality_score outside [0,1]");
    return r;
}

Tracklet make_ego_proxy(const VideoMeta& meta, double lane_width_px) {
    Tracklet ego;
    ego.track_id = -1;
    ego.cls = ActorClass::vehicle;
    double w = 0.6 * lane_width_px;
    double h = 0.25 * meta.height;
    double cx = meta.width / 2.0;
    ego.boxes.reserve(meta.num_frames);
    for (int f = 0; f < meta.num_frames; ++f) {
        Detection d;
        d.frame = f;
        d.w = w;
        d.h = h;
        d.x = cx - w / 2.0;
        d.y = meta.height - h;
        d.conf = 1.0;
        ego.boxes.push_back(d);
    }
    return ego;
}

std::optional<GroundTruth> parse_ground_truth(const std::string& bytes) {
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::parse_error&) {
        return std::nullopt;
    }
    if (!doc.is_object() || !doc.contains("ground_truth")) return std::nullopt;
    const json& g = doc.at("ground_truth");
    if (!g.is_object()) return std::nullopt;
    GroundTruth gt;
    if (g.contains("tags"))
        for (const auto& t : g.at("tags")) gt.tags.push_back(t.get<std::string>());
    if (g.contains("expected"))
        for (auto it = g.at("expected").begin(); it != g.at("expected").end(); ++it)
            gt.expected[it.key()] = it.value().get<double>();
    if (g.contains("clean")) gt.clean = g.at("clean").get<bool>();
    return gt;
}

}  // namespace adgve
