#pragma once

#include <map>
#include <utility>
#include <vector>

#include "adgve/clip_segmenter.hpp"
#include "adgve/config.hpp"
#include "adgve/geometry.hpp"
#include "adgve/scene_model.hpp"

namespace adgve {

using Polyline = std::vector<Pt>;
using StyledBoundary = std::pair<Polyline, BoundaryStyle>;

// Per-frame lane geometry. Centerline points are cell centers (half-integer
// pixel coordinates).
struct LaneGeometry {
    int frame = 0;
    std::vector<Polyline> centerlines;
    std::vector<StyledBoundary> boundaries;
    double lane_width_px = 0.0;
    double px_per_meter = 0.0;
    Grid lane_mask;  // union of ego_lane and other_lane rasters (off-road test)
    Grid ego_mask;
    bool width_fallback = false;      // no usable ego-lane mask
    bool boundaries_derived = false;  // styles defaulted to solid
};

struct VideoGeometry {
    std::vector<ClipRange> clips;
    std::map<int, LaneGeometry> by_key_frame;
    double lane_width_px = 0.0;  // median over key frames
    double px_per_meter = 0.0;
    bool any_fallback = false;
    bool any_derived_boundaries = false;

    const LaneGeometry& at_key_frame(int frame) const { return by_key_frame.at(frame); }
    // Geometry of the clip containing `frame`.
    const LaneGeometry& for_frame(int frame) const;
};

// Cell true iff its center lies inside the polygon (even-odd rule), clipped
// to the image. Throws GeometryError for <3 vertices.
Grid rasterize_polygon(const std::vector<Pt>& polygon, int width, int height);

// Two-pass neighborhood thinning (Zhang-Suen) to a 1-px skeleton.
Grid thin_mask(const Grid& mask);

// Walks the skeleton into 8-connected paths, endpoints first; deterministic
// neighbor order. Points are cell centers.
std::vector<Polyline> trace_skeleton(const Grid& skeleton);

// Recursive farthest-point splitting with tolerance eps.
Polyline simplify_polyline(const Polyline& pts, double eps);

// Skeleton -> traced paths -> simplified polylines; empty mask -> empty list.
std::vector<Polyline> extract_centerline(const Grid& mask, double simplify_eps);

// Median perpendicular extent of the mask sampled along its skeleton.
// Throws DegenerateLane when the mask has fewer than 10 cells.
double estimate_lane_width(const Grid& ego_lane_grid);

// Declared boundaries pass through verbatim; otherwise shared edges between
// ego_lane and adjacent other_lane rasters, style solid.
std::vector<StyledBoundary> derive_boundaries(const std::vector<MaskInstance>& masks,
                                              const std::vector<LaneBoundary>& declared,
                                              int frame, int width, int height,
                                              double simplify_eps);

LaneGeometry compute_frame_geometry(const ScenePriors& priors, int frame, const Config& cfg);

// Geometry at every key frame; identical mask sets are computed once.
VideoGeometry compute_video_geometry(const ScenePriors& priors,
                                     const std::vector<ClipRange>& clips, const Config& cfg);

}  // namespace adgve
