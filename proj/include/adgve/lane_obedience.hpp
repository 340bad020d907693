#pragma once

#include <string>
#include <vector>

#include "adgve/config.hpp"
#include "adgve/lane_geometry.hpp"
#include "adgve/scene_model.hpp"

namespace adgve {

struct LaneViolation {
    std::string kind;  // "solid_cross" | "non_yield"
    int frame = 0;
    int track_id = 0;
};

struct CenteringResult {
    double d_norm = 0.0;
    double s_center = 1.0;
    bool no_evidence = false;
    int samples = 0;
};

struct SolidResult {
    double s_solid = 1.0;
    bool no_evidence = false;
    int valid_segments = 0;
    int crossing_segments = 0;
    std::vector<LaneViolation> violations;
};

struct CrossResult {
    double s_cross = 1.0;
    bool no_evidence = false;
    int encounters = 0;
    int violating = 0;
    std::vector<LaneViolation> violations;
};

struct LaneScores {
    double d_norm = 0.0;
    double s_center = 1.0;
    double s_solid = 1.0;
    double s_cross = 1.0;
    double s_lane = 1.0;
    bool center_no_evidence = false;
    bool solid_no_evidence = false;
    bool cross_no_evidence = false;
    std::vector<LaneViolation> violations;
    int centering_samples = 0;
    int valid_segments = 0;
    int crossing_segments = 0;
    int encounters = 0;
    int encounter_violations = 0;
};

// d_norm = mean over (track, key frame) samples of the distance from the box
// bottom-center to the nearest centerline, divided by the lane width; frames
// where the bottom-center lies outside every lane mask are ignored.
// s_center = exp(-alpha * d_norm).
CenteringResult lane_centering_score(const std::vector<const Tracklet*>& tracks,
                                     const VideoGeometry& geom, double alpha);

// violation_rate = crossing segments / valid segments over all vehicle
// trajectories; a valid segment joins consecutive bottom-centers with
// nonzero displacement; s_solid = clamp(1 - violation_rate, 0, 1).
SolidResult solid_line_score(const std::vector<const Tracklet*>& tracks,
                             const VideoGeometry& geom);

// An encounter is a maximal frame interval where the ego bottom-center lies
// in the approach region (crosswalk dilated toward larger y by
// cross_approach_m, intersected with the ego lane) while any pedestrian
// bottom-center is inside the crosswalk. A violation is an encounter during
// which the ego speed exceeds yield_speed_mps at any frame.
CrossResult crosswalk_score(const Tracklet& ego, const std::vector<const Tracklet*>& pedestrians,
                            const std::vector<const MaskInstance*>& crosswalks,
                            const VideoGeometry& geom, double fps, const Config& cfg);

// Weighted combination; weights must be nonnegative and sum to 1 +- 1e-9.
double lane_obedience(double s_center, double s_solid, double s_cross, double w_center,
                      double w_solid, double w_cross);

// Full per-video scoring: picks vehicle tracks plus the ego track (or the
// camera-footprint proxy when absent) and applies the configured weights.
LaneScores score_lane_obedience(const ScenePriors& priors, const VideoGeometry& geom,
                                const Config& cfg);

// Per-frame ego speed in m/s from consecutive bottom-center displacements;
// backward difference, first frame takes the following difference.
std::vector<double> ego_frame_speeds(const Tracklet& ego, double fps, double px_per_meter);

}  // namespace adgve
