#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "adgve/common.hpp"

namespace adgve {

enum class CheckGroup { frame, clip, roi };
enum class EvidenceKind { key_frame_triplet, clip_pair, sub_clips, roi_crop };

struct CheckSpec {
    std::string check_id;   // A1..A6, B1..B7, C1..C7
    CheckGroup group = CheckGroup::frame;
    std::string name;
    std::string template_text;           // contains [ANSWER] exactly once
    std::vector<std::string> candidates; // canonical worst -> best order
    std::vector<double> values;          // per-candidate quality in [0,1]
    EvidenceKind evidence = EvidenceKind::key_frame_triplet;
    std::vector<std::string> target_challenges;  // taxonomy labels

    size_t best_index() const;  // first candidate with the maximal value
};

// The fixed 20-check catalog (Groups A, B, C).
const std::vector<CheckSpec>& check_catalog();
const CheckSpec& check_by_id(const std::string& check_id);

// Shared textual prefix of every query.
const std::string& global_instruction();

// Versioned text rendering of the catalog and its pinned checksum.
std::string catalog_version();
std::string render_catalog_text();
std::string catalog_checksum();

// Fixed feature layout derived from the catalog.
int psi_frame_dim();  // sum of Group A candidate counts
int psi_clip_dim();   // sum of Group B + C candidate counts

// Violation kind -> (check_id, offending candidate index); drives the
// oracle stub and guarantees every taxonomy branch reaches >=1 check.
struct ViolationMapping {
    std::string check_id;
    size_t bad_candidate = 0;
};
const std::map<std::string, ViolationMapping>& violation_check_mapping();

// Overlay color table (RGB).
struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
};
Rgb class_color(const std::string& name);  // actor or mask class name

}  // namespace adgve
