#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adgve/catalog.hpp"
#include "adgve/clip_segmenter.hpp"
#include "adgve/config.hpp"
#include "adgve/lane_geometry.hpp"
#include "adgve/scene_model.hpp"

namespace adgve {

struct RasterImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major RGB

    RasterImage() = default;
    RasterImage(int w, int h, Rgb fill = {0, 0, 0});

    Rgb get(int x, int y) const;
    void set(int x, int y, Rgb c);
    bool operator==(const RasterImage& o) const = default;
};

// Binary PPM (P6): bit-exact, platform-independent.
std::string encode_ppm(const RasterImage& img);
RasterImage decode_ppm(const std::string& bytes);

struct KeyframeTriplet {
    RasterImage raw;
    RasterImage boxed;   // 2-px class-colored rectangles
    RasterImage masked;  // alpha-blended class-colored mask fills
};

// Gray road, white markings rasterized from priors; stands in for decoded
// video frames so the pipeline runs without pixel input.
RasterImage render_schematic(const ScenePriors& priors, int frame);

KeyframeTriplet render_keyframe_triplet(const RasterImage& frame,
                                        const std::vector<const Detection*>& boxes,
                                        const std::vector<const Tracklet*>& box_owners,
                                        const ScenePriors& priors, int frame_index);

// Convenience: schematic background + all boxes/masks of the frame.
KeyframeTriplet render_keyframe_triplet(const ScenePriors& priors, int frame);

// Box grown to (w*(1+2m), h*(1+2m)) about its center, clipped to the image,
// resampled aspect-preserving (single scale factor), letterboxed with black.
RasterImage crop_roi(const RasterImage& frame, double x, double y, double w, double h,
                     double margin, int target_w, int target_h);

struct ClipPair {
    std::vector<RasterImage> raw;
    std::vector<RasterImage> overlaid;  // temporally faded track polylines
};

ClipPair render_clip_pair(const ScenePriors& priors, const ClipRange& clip, int fade_window);

// level 1: full clip at stride 2; level 2: both halves at stride 1;
// clips shorter than 4 frames return only the full clip.
std::vector<std::vector<int>> sub_clips(const ClipRange& clip);

}  // namespace adgve
