#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "adgve/catalog.hpp"
#include "adgve/config.hpp"
#include "adgve/kinematics.hpp"
#include "adgve/vlm_client.hpp"

namespace adgve {

struct VlmAnswer {
    bool yes = false;
    double confidence = 0.0;
};

struct CheckVector {
    std::string check_id;
    Vec probs;      // per-candidate, sums to 1
    double scalar = 0.0;
    std::vector<std::string> evidence_refs;
};

// One prompt per candidate: global instruction + summary + template with
// [ANSWER] substituted. Throws TemplateError when the token count is not 1.
std::vector<std::pair<std::string, std::string>> instantiate_prompts(
    const CheckSpec& spec, const SceneSummary& summary);

// Extracts the first "{'answer': Yes|No, 'confidence': <number>}" pattern,
// case-insensitive and tolerant of surrounding prose.
VlmAnswer parse_response(const std::string& text);

// Confidence for the "Yes" reading of a candidate.
inline double yes_confidence(const VlmAnswer& a) {
    return a.yes ? a.confidence : 1.0 - a.confidence;
}

// Sum-normalization; all-zero input becomes the uniform distribution.
Vec normalize_confidences(const Vec& conf);

// Expected candidate value under probs (values pinned per check).
double check_to_scalar(const Vec& probs, const CheckSpec& spec);

// ---------------------------------------------------------------------------
// Whole-video check evaluation
// ---------------------------------------------------------------------------

// Evidence payloads for one video, already rendered/referenced by the caller.
struct EvidenceSet {
    struct KeyFrameEvidence {
        int frame = 0;
        std::string payload_id;
        std::vector<std::string> data;
    };
    struct ClipEvidence {
        int clip_index = 0;
        std::string payload_id;
        std::vector<std::string> data;
    };
    struct SubClipEvidence {
        int clip_index = 0;
        int level = 0;
        std::string payload_id;
        std::vector<std::string> data;
    };
    struct RoiEvidence {
        std::string check_id;
        std::string payload_id;
        std::vector<std::string> data;
    };
    std::vector<KeyFrameEvidence> key_frames;
    std::vector<ClipEvidence> clip_pairs;
    std::vector<SubClipEvidence> sub_clip_sets;
    std::vector<RoiEvidence> rois;
    std::vector<std::string> tags;  // ground-truth tags for the oracle stub
};

struct CheckSummaries {
    std::map<int, SceneSummary> per_key_frame;
    std::map<int, SceneSummary> per_clip;
    SceneSummary video;
};

struct CheckOutputs {
    Vec psi_frame;               // Group A blocks, catalog order
    Vec psi_clip;                // Group B then C blocks, catalog order
    std::vector<double> s_clip;  // one scalar per clip
    bool degraded = false;       // some queries fell back to uniform
    int queries_issued = 0;
    int queries_failed = 0;
};

// Runs the full catalog: Group A per key frame, Group B per clip evidence,
// Group C per ROI; failed queries are retried then recorded as uniform
// distributions. Throws BackendUnavailable when more than half of all
// queries failed after retries.
CheckOutputs run_checks(const EvidenceSet& evidence, const CheckSummaries& summaries,
                        VlmBackend& backend, const Config& cfg, int num_clips);

}  // namespace adgve
