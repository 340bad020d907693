#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "adgve/common.hpp"

namespace adgve {

// Pixel coordinates: origin top-left, x rightward, y downward.
struct Pt {
    double x = 0.0;
    double y = 0.0;
};

enum class ActorClass { vehicle, pedestrian, cyclist };
enum class MaskClass { ego_lane, other_lane, sidewalk, curb, hard_object, crosswalk };
enum class BoundaryStyle { solid, dashed, double_solid };

std::string to_string(ActorClass c);
std::string to_string(MaskClass c);
std::string to_string(BoundaryStyle s);
ActorClass actor_class_from_string(const std::string& s);
MaskClass mask_class_from_string(const std::string& s);
BoundaryStyle boundary_style_from_string(const std::string& s);

struct VideoMeta {
    std::string video_id;
    int width = 0;
    int height = 0;
    double fps = 0.0;
    int num_frames = 0;
};

struct Detection {
    int frame = 0;
    double x = 0.0, y = 0.0, w = 0.0, h = 0.0;
    double conf = 1.0;  // defaults to 1.0 when absent

    Pt bottom_center() const { return {x + w / 2.0, y + h}; }
};

struct Tracklet {
    int track_id = 0;
    ActorClass cls = ActorClass::vehicle;
    std::vector<Detection> boxes;  // strictly increasing frame indices

    const Detection* box_at(int frame) const;
};

struct MaskFrame {
    int frame = 0;
    std::vector<Pt> polygon;  // >= 3 vertices, simple
    double conf = 1.0;
};

struct MaskInstance {
    int instance_id = 0;
    MaskClass cls = MaskClass::hard_object;
    std::string subtype;  // optional; "crosswalk" on hard_object marks a crosswalk
    std::vector<MaskFrame> frames;

    const MaskFrame* frame_at(int frame) const;
    bool is_crosswalk() const {
        return cls == MaskClass::crosswalk ||
               (cls == MaskClass::hard_object && subtype == "crosswalk");
    }
};

struct BoundaryFrame {
    int frame = 0;
    std::vector<Pt> polyline;  // >= 2 points
};

struct LaneBoundary {
    int boundary_id = 0;
    BoundaryStyle style = BoundaryStyle::solid;
    std::vector<BoundaryFrame> frames;

    const BoundaryFrame* frame_at(int frame) const;
};

struct ScenePriors {
    VideoMeta meta;
    std::vector<Tracklet> tracklets;
    std::vector<MaskInstance> masks;
    std::vector<LaneBoundary> boundaries;
    std::optional<Tracklet> ego_track;
    std::optional<double> human_score;  // "quality_score" in the file
};

struct ValidationReport {
    std::vector<std::string> hard_errors;
    std::vector<std::string> warnings;
    bool ok() const { return hard_errors.empty(); }
};

// Parses one UTF-8 annotation document. Unknown fields are ignored; all
// invariants are enforced. Throws SchemaError / RangeError / GeometryError
// naming the offending path.
ScenePriors parse_annotation(const std::string& bytes);

// Canonical serialization: fixed field order, numbers at full precision.
// parse_annotation(serialize_annotation(p)) reproduces p exactly.
std::string serialize_annotation(const ScenePriors& priors);

// Re-checks invariants on programmatically built priors; never throws.
ValidationReport validate_priors(const ScenePriors& priors);

// Ego proxy when no ego track is annotated: fixed-size box anchored at
// bottom-center of every frame (forward camera sits at bottom-center).
Tracklet make_ego_proxy(const VideoMeta& meta, double lane_width_px);

// Ground-truth sidecar emitted by the synthetic generator. Lives in the same
// document under "ground_truth" (ignored by parse_annotation).
struct GroundTruth {
    std::vector<std::string> tags;              // violation kind names
    std::map<std::string, double> expected;     // exact expected component scores
    bool clean = true;
};

std::optional<GroundTruth> parse_ground_truth(const std::string& bytes);

}  // namespace adgve
