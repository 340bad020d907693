#include "adgve/catalog.hpp"

#include <algorithm>

namespace adgve {

size_t CheckSpec::best_index() const {
    size_t best = 0;
    for (size_t i = 1; i < values.size(); ++i)
        if (values[i] > values[best]) best = i;
    return best;
}

namespace {

std::vector<double> linear_values(size_t n) {
    std::vector<double> v(n);
    for (size_t i = 0; i < n; ++i) v[i] = n > 1 ? double(i) / double(n - 1) : 1.0;
    return v;
}

std::vector<CheckSpec> build_catalog() {
    std::vector<CheckSpec> cat;
    auto add = [&](const std::string& id, CheckGroup group, const std::string& name,
                   const std::string& tmpl, std::vector<std::string> cands,
                   std::vector<double> values, EvidenceKind ev,
                   std::vector<std::string> challenges) {
        CheckSpec c;
        c.check_id = id;
        c.group = group;
        c.name = name;
        c.template_text = tmpl;
        c.candidates = std::move(cands);
        c.values = values.empty() ? linear_values(c.candidates.size()) : std::move(values);
        c.evidence = ev;
        c.target_challenges = std::move(challenges);
        cat.push_back(std::move(c));
    };

    // Group A -- frame-level quality and realism (key frames).
    // A1 is peaked: values fall with distance from "well-exposed".
    add("A1", CheckGroup::frame, "Brightness / exposure",
        "This is a [ANSWER] driving image.",
        {"underexposed", "slightly-underexposed", "well-exposed", "slightly-overexposed",
         "overexposed"},
        {0.0, 0.5, 1.0, 0.5, 0.0}, EvidenceKind::key_frame_triplet, {"1.1"});
    add("A2", CheckGroup::frame, "Sharpness / clarity",
        "This is a [ANSWER] driving image in terms of sharpness and clarity.",
        {"very-blurry", "slightly-blurry", "clear", "very-sharp"}, {},
        EvidenceKind::key_frame_triplet, {"1.1", "1.2"});
    add("A3", CheckGroup::frame, "Scene completeness", "This frame shows a [ANSWER].",
        {"heavily-corrupted", "partly-missing-road", "complete-road-scene"}, {},
        EvidenceKind::key_frame_triplet, {"1.3"});
    add("A4", CheckGroup::frame, "Noise / cleanliness",
        "In terms of digital noise and grain, this is a [ANSWER] driving image.",
        {"very-noisy", "noisy", "moderate-noise", "clean"}, {},
        EvidenceKind::key_frame_triplet, {"1.3"});
    add("A5", CheckGroup::frame, "Color realism",
        "Overall, the colors and tones in this driving image are [ANSWER].",
        {"strongly-unnatural-colors", "slightly-unnatural-colors", "mostly-natural-colors",
         "very-natural-colors"},
        {}, EvidenceKind::key_frame_triplet, {"1.2", "1.3"});
    add("A6", CheckGroup::frame, "Single-frame layout plausibility",
        "Overall, the road, buildings, and horizon in this image look [ANSWER].",
        {"impossible-or-highly-distorted", "slightly-strange-layout", "geometrically-plausible"},
        {}, EvidenceKind::key_frame_triplet, {"1.2", "1.3"});

    // Group B -- clip-level temporal consistency (short clips).
    add("B1", CheckGroup::clip, "Appearance flicker",
        "Across these frames, the colors and textures exhibit [ANSWER].",
        {"strong-flicker", "mild-flicker", "no-flicker"}, {}, EvidenceKind::sub_clips, {"1.1"});
    add("B2", CheckGroup::clip, "Object identity stability",
        "Across this clip, the identities and appearances of vehicles and pedestrians are "
        "[ANSWER].",
        {"highly-inconsistent", "slightly-inconsistent", "consistent-identities"}, {},
        EvidenceKind::clip_pair, {"1.1"});
    add("B3", CheckGroup::clip, "Camera motion smoothness",
        "Across this clip, the camera motion is [ANSWER].",
        {"strongly-shaky", "slightly-shaky", "very-smooth"}, {}, EvidenceKind::sub_clips,
        {"1.1", "1.2"});
    add("B4", CheckGroup::clip, "Parallax and depth consistency",
        "The relative motion of near and far objects in this clip is [ANSWER] with real-world "
        "parallax.",
        {"clearly-inconsistent", "slightly-inconsistent", "physically-consistent"}, {},
        EvidenceKind::sub_clips, {"1.2"});
    add("B5", CheckGroup::clip, "Ego-lane centering (trajectory smoothness)",
        "Relative to the highlighted ego lane, the camera trajectory is [ANSWER].",
        {"frequently-out-of-lane", "slightly-drifting", "well-centered-in-lane"}, {},
        EvidenceKind::sub_clips, {"1.1", "2.3"});
    add("B6", CheckGroup::clip, "Agent motion naturalness (vehicles and pedestrians)",
        "Across this clip, the motions of vehicles and pedestrians are [ANSWER].",
        {"highly-unnatural-or-teleporting", "slightly-unnatural-or-jerky", "natural-and-smooth"},
        {}, EvidenceKind::clip_pair, {"1.2", "2.1"});
    add("B7", CheckGroup::clip, "Ego speed reasonableness",
        "Given the road type and surroundings, the ego-vehicle speed in this clip is [ANSWER].",
        {"too-slow-for-scene", "reasonable-for-scene", "too-fast-for-scene"}, {0.0, 1.0, 0.0},
        EvidenceKind::sub_clips, {"1.2", "2.3"});

    // Group C -- driving-rule and layout checks (ROI overlays).
    add("C1", CheckGroup::roi, "Forbidden-region occupancy (vehicle)",
        "Relative to the highlighted forbidden regions, this vehicle is [ANSWER].",
        {"entirely-in-drivable-lane", "partly-on-sidewalk", "in-opposite-lane",
         "on-shoulder-or-median"},
        {1.0, 0.0, 0.0, 0.0}, EvidenceKind::roi_crop, {"2.1", "2.3"});
    add("C2", CheckGroup::roi, "Forbidden-region occupancy (pedestrian/cyclist)",
        "Relative to the vehicle lane, this person or cyclist is [ANSWER].",
        {"mostly-in-ego-lane", "partly-in-ego-lane", "on-sidewalk-or-crosswalk"}, {},
        EvidenceKind::roi_crop, {"2.1"});
    add("C3", CheckGroup::roi, "Lane / arrow clarity",
        "The lane markings and arrows in this region are [ANSWER].",
        {"ambiguous-or-missing", "faded-or-broken", "clear-and-correct"}, {},
        EvidenceKind::roi_crop, {"2.2"});
    add("C4", CheckGroup::roi, "Traffic-signal correctness (appearance)",
        "The traffic light or sign in this region is [ANSWER].",
        {"distorted-or-unrealistic", "realistic-and-properly-placed"}, {},
        EvidenceKind::roi_crop, {"2.2"});
    add("C5", CheckGroup::roi, "Crosswalk right-of-way",
        "Considering this crosswalk scene, the vehicle behavior toward pedestrians is [ANSWER].",
        {"vehicles-yielding-properly", "vehicles-not-yielding", "no-clear-conflict"},
        {1.0, 0.0, 1.0}, EvidenceKind::roi_crop, {"2.1"});
    add("C6", CheckGroup::roi, "Solid-line respect",
        "Relative to the highlighted solid lane boundaries, the vehicle behavior is [ANSWER].",
        {"clear-or-prolonged-crossing", "brief-or-minor-crossing", "no-solid-line-crossing"},
        {}, EvidenceKind::roi_crop, {"2.1", "2.3"});
    add("C7", CheckGroup::roi, "Stopping / parking legality",
        "Relative to the lane and roadside markings, this stopped vehicle is [ANSWER].",
        {"illegally-stopped-or-blocking-lane", "briefly-stopped-in-lane",
         "properly-parked-or-in-designated-bay"},
        {}, EvidenceKind::roi_crop, {"2.1", "2.2"});
    return cat;
}

}  // namespace

const std::vector<CheckSpec>& check_catalog() {
    static const std::vector<CheckSpec> cat = build_catalog();
    return cat;
}

const CheckSpec& check_by_id(const std::string& check_id) {
    for (const auto& c : check_catalog())
        if (c.check_id == check_id) return c;
    throw SchemaError("unknown check id '" + check_id + "'");
}

const std::string& global_instruction() {
    static const std::string s =
        "You are a careful driving-scene evaluator. For each question you will see a driving "
        "image or video clip and a candidate description of the scene. Decide whether the "
        "description is consistent with the visual evidence and state how confident you are in "
        "your choice. Reply strictly in the format:{'answer': Yes/No, 'confidence': x.xx}, "
        "where confidence is in range [0,1].";
    return s;
}

std::string catalog_version() { return "adgve-catalog-v1"; }

std::string render_catalog_text() {
    std::string out = catalog_version() + "\n";
    out += "instruction: " + global_instruction() + "\n";
    for (const auto& c : check_catalog()) {
        out += "\n[" + c.check_id + "] " + c.name + "\n";
        out += "group: " +
               std::string(c.group == CheckGroup::frame
                               ? "frame"
                               : (c.group == CheckGroup::clip ? "clip" : "roi")) +
               "\n";
        out += "template: " + c.template_text + "\n";
        out += "candidates:";
        for (const auto& cand : c.candidates) out += " {" + cand + "}";
        out += "\nvalues:";
        char buf[32];
        for (double v : c.values) {
            std::snprintf(buf, sizeof buf, " %.6f", v);
            out += buf;
        }
        out += "\nchallenges:";
        for (const auto& t : c.target_challenges) out += " " + t;
        out += "\n";
    }
    return out;
}

std::string catalog_checksum() { return hex64(fnv1a(render_catalog_text())); }

int psi_frame_dim() {
    int n = 0;
    for (const auto& c : check_catalog())
        if (c.group == CheckGroup::frame) n += int(c.candidates.size());
    return n;
}

int psi_clip_dim() {
    int n = 0;
    for (const auto& c : check_catalog())
        if (c.group != CheckGroup::frame) n += int(c.candidates.size());
    return n;
}

const std::map<std::string, ViolationMapping>& violation_check_mapping() {
    static const std::map<std::string, ViolationMapping> m = {
        {"flicker", {"B1", 0}},           // strong-flicker
        {"teleport", {"B6", 0}},          // highly-unnatural-or-teleporting
        {"solid_cross", {"C6", 0}},       // clear-or-prolonged-crossing
        {"off_center_drift", {"B5", 1}},  // slightly-drifting
        {"non_yield", {"C5", 1}},         // vehicles-not-yielding
        {"sidewalk_drive", {"C1", 1}},    // partly-on-sidewalk
        {"jerky_ego", {"B3", 0}},         // strongly-shaky
    };
    return m;
}

Rgb class_color(const std::string& name) {
    if (name == "vehicle") return {0, 80, 255};
    if (name == "pedestrian") return {255, 40, 40};
    if (name == "cyclist") return {40, 200, 40};
    if (name == "ego_lane") return {100, 100, 100};
    if (name == "other_lane") return {80, 80, 90};
    if (name == "sidewalk") return {150, 140, 120};
    if (name == "curb") return {170, 170, 170};
    if (name == "hard_object") return {200, 120, 40};
    if (name == "crosswalk") return {220, 220, 220};
    return {255, 255, 255};
}

}  // namespace adgve
