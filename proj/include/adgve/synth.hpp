#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "adgve/scene_model.hpp"

namespace adgve {

enum class ViolationKind {
    flicker,           // 1.1 temporal instability: box geometry oscillates
    teleport,          // 2.1 agent behavior: single-frame position jump
    solid_cross,       // 2.1 agent behavior: excursions across the solid boundary
    off_center_drift,  // 2.3 ego impossibility: constant lateral offset
    non_yield,         // 2.1 agent behavior: speeding through occupied crosswalk
    sidewalk_drive,    // 2.1 agent behavior: vehicle on the sidewalk
    jerky_ego,         // 2.3 ego impossibility: alternating fast/slow ego motion
};

std::string to_string(ViolationKind k);
ViolationKind violation_kind_from_string(const std::string& s);
// Taxonomy label ("1.1", "2.1", "2.3") the kind realizes.
std::string taxonomy_label(ViolationKind k);

enum class Layout { straight, curve, crosswalk, two_lane };
std::string to_string(Layout l);
Layout layout_from_string(const std::string& s);

struct ViolationSpec {
    ViolationKind kind = ViolationKind::flicker;
    double magnitude = 0.0;  // 0 selects the kind's default
    int window_start = -1;   // -1 selects the kind's default window
    int window_len = -1;
    int encounters = 4;      // non_yield only: total ego-crosswalk encounters
};

struct ScenarioSpec {
    std::uint64_t seed = 0;
    Layout layout = Layout::straight;
    int frames = 60;
    std::vector<ViolationSpec> violations;
    int extra_agents = -1;  // -1: derived from seed (0..2)
};

struct Scenario {
    ScenePriors priors;
    GroundTruth truth;
};

// Deterministic, schema-conformant scene with exactly-known violation
// effects: truth.expected carries the exact s_solid and s_cross the lane
// module must reproduce.
Scenario gen_scenario(const ScenarioSpec& spec);

// Annotation document with the ground-truth sidecar appended.
std::string scenario_to_json(const Scenario& sc);

// Mixed batch for separation tests: the first n_bad specs carry injected
// violations cycling over every kind, the rest are clean.
std::vector<ScenarioSpec> batch_specs(std::uint64_t seed, int n, int n_bad);

// JSON spec file: a single object or an array of objects mirroring
// ScenarioSpec fields.
std::vector<ScenarioSpec> parse_scenario_specs(const std::string& bytes);

struct Instruction {
    std::string text;
    std::string environment, weather, behavior, dynamics;
    int template_id = 0;
};

struct FactorValue {
    std::string value;
    int weight = 1;  // 3 high, 2 medium, 1 low
};

// The four factor vocabularies with their sampling priors.
const std::vector<FactorValue>& environment_vocab();
const std::vector<FactorValue>& weather_vocab();
const std::vector<FactorValue>& behavior_vocab();
const std::vector<FactorValue>& dynamics_vocab();

// Contradictory (factor, factor) pairs that are rejected during sampling.
struct FactorConflict {
    std::string a_kind, a_value;  // e.g. "environment", "tunnel"
    std::string b_kind, b_value;
};
const std::vector<FactorConflict>& factor_conflicts();

// Slot-filled instructions sampled with 3:2:1 priors; contradictory combos
// and normalized exact duplicates are rejected and resampled.
std::vector<Instruction> gen_instructions(int n, std::uint64_t seed);

}  // namespace adgve
