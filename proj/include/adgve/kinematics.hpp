#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adgve/config.hpp"
#include "adgve/lane_geometry.hpp"
#include "adgve/scene_model.hpp"

namespace adgve {

struct Kinematics {
    int track_id = 0;
    double mean_speed = 0.0;          // m/s
    double max_heading_change = 0.0;  // radians/frame
    double lateral_drift = 0.0;       // lane-widths/second, signed
    double smoothness = 0.0;          // mean |acceleration| in m/s^2
    bool single_sample = false;       // <2 boxes: motion fields are zeros
};

struct MotionTokens {
    std::string speed_regime;  // stationary | slow | moderate | fast
    std::string drift;         // none | slight | strong
    std::string smoothness;    // smooth | jerky
};

struct SummaryScope {
    enum class Kind { frame, clip } kind = Kind::frame;
    int frame = 0;    // frame scope
    ClipRange clip;   // clip scope
};

struct SceneSummary {
    int counts[3] = {0, 0, 0};  // vehicle, pedestrian, cyclist
    int layout[3][3] = {};      // [row: near,mid,far][col: left,center,right]
    std::vector<std::string> size_bins;
    std::vector<std::string> lane_attributes;
    std::vector<std::string> motion_descriptors;
    std::string rendered_text;
};

// Speed from consecutive bottom-center displacements; heading change between
// consecutive displacement vectors (pairs with displacement < 0.5 px are
// skipped); lateral drift is the least-squares slope of signed centerline
// distance over time. Geometry may be null (drift falls back to 0).
Kinematics tracklet_kinematics(const Tracklet& t, double fps, double px_per_meter,
                               const VideoGeometry* geom = nullptr);

// Total deterministic mapping onto semantic bins; intervals are [lo, hi).
MotionTokens discretize(const Kinematics& k, const Config& cfg);

SceneSummary build_summary(const ScenePriors& priors, const VideoGeometry& geom,
                           const std::vector<Kinematics>& kin, const SummaryScope& scope,
                           const Config& cfg);

}  // namespace adgve
