#pragma once

#include <vector>

#include "adgve/common.hpp"

namespace adgve {

struct ClipRange {
    int clip_index = 0;
    int start = 0;      // inclusive
    int end = 0;        // exclusive
    int key_frame = 0;  // start + len/2
    int length() const { return end - start; }
};

// M contiguous disjoint ranges covering [0,T); the first T mod M clips get
// the extra frame; key frame is the lower-median frame of each clip.
std::vector<ClipRange> split_clips(int num_frames, int num_clips);

}  // namespace adgve
