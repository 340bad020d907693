#include "adgve/clip_segmenter.hpp"

namespace adgve {

std::vector<ClipRange> split_clips(int num_frames, int num_clips) {
    if (num_clips < 1) throw InsufficientFrames("clip count must be >= 1");
    if (num_frames < num_clips)
        throw InsufficientFrames("video has " + std::to_string(num_frames) +
                                 " frames, need at least " + std::to_string(num_clips));
    int base = num_frames / num_clips;
    int extra = num_frames % num_clips;
    std::vector<ClipRange> clips;
    clips.reserve(num_clips);
    int cursor = 0;
    for (int m = 0; m < num_clips; ++m) {
        int len = base + (m < extra ? 1 : 0);
        ClipRange c;
        c.clip_index = m;
        c.start = cursor;
        c.end = cursor + len;
        c.key_frame = c.start + len / 2;
        clips.push_back(c);
        cursor = c.end;
    }
    return clips;
}

}  // namespace adgve
