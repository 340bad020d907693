#pragma once

#include <string>
#include <vector>

#include "adgve/config.hpp"
#include "adgve/kinematics.hpp"
#include "adgve/lane_geometry.hpp"
#include "adgve/scene_model.hpp"

namespace adgve {

constexpr int kPhiDim = 16;
constexpr int kEvidenceDim = 6;

// evidence_mask bit layout
enum EvidenceBit {
    kBitNoEgoTrack = 0,
    kBitCenterNoEvidence = 1,
    kBitSolidNoEvidence = 2,
    kBitCrossNoEvidence = 3,
    kBitVlmDegraded = 4,
    kBitGeometryFallback = 5,
};

struct FeatureBundle {
    Vec psi_frame;                // Group A probability blocks
    Vec psi_clip;                 // Group B + C probability blocks
    std::vector<double> s_clip;   // M per-clip scalars
    std::vector<Vec> r;           // M attention inputs [phi_mot_clip; s_clip_m]
    double s_lane = 1.0;
    Vec phi_obj, phi_sem, phi_mot;  // 16 slots each
    Vec evidence;                   // kEvidenceDim bits as 0/1
};

struct FusionHyper {
    double lr = 0.01;
    double lambda = 1.0;  // pairwise-loss weight
    int epochs = 2000;
    std::uint64_t seed = 7;
    double pair_margin = 0.05;
};

struct FusionModel {
    Vec u;  // attention vector, dim = kPhiDim + 1
    Vec w;  // regressor, dim = operand_dim()
    FusionHyper hyper;
    std::string catalog_checksum;

    static FusionModel zero();
    // Uncalibrated hand-set weights: positive on quality-aligned slots so
    // scoring works before any training.
    static FusionModel default_model();

    std::string serialize() const;
    static FusionModel deserialize(const std::string& text);
};

int operand_dim();  // psi_frame + psi_clip + 2 + 3*kPhiDim + kEvidenceDim

// Deterministic 16-slot descriptors standing in for pooled neural features.
struct PhiFeatures {
    Vec phi_obj, phi_sem, phi_mot;
};
PhiFeatures statistics_features(const ScenePriors& priors, const VideoGeometry& geom,
                                const std::vector<Kinematics>& kin, const SummaryScope& scope);

struct AttentionResult {
    Vec alpha;           // softmax weights, sum 1
    double s_clip = 0.0; // attention-weighted clip score
};
// alpha_m = softmax(u . r_m) with max subtraction; S_clip = sum alpha_m s_m.
AttentionResult attention_aggregate(const std::vector<Vec>& r,
                                    const std::vector<double>& s_clip, const Vec& u);

// Fixed operand layout:
// [psi_frame | psi_clip | S_clip | s_lane | phi_obj | phi_sem | phi_mot | evidence]
Vec assemble_operand(const FeatureBundle& bundle, double s_clip_agg);

// S_overall = sigma(w . operand). Throws DimensionError on mismatch.
double fuse(const FeatureBundle& bundle, const FusionModel& model);

struct TrainingExample {
    FeatureBundle bundle;
    double label = 0.0;  // human quality score in [0,1]
};

struct FusionGradients {
    Vec grad_u, grad_w;
    double loss = 0.0;
};
// Loss = mean |S - y| + lambda * mean over ordered pairs (y_i > y_j + margin)
// of -log sigma(S_i - S_j); analytic gradients through attention and fusion.
FusionGradients fusion_gradients(const std::vector<TrainingExample>& data,
                                 const FusionModel& model);
double fusion_loss(const std::vector<TrainingExample>& data, const FusionModel& model);

struct TrainResult {
    FusionModel model;
    double final_loss = 0.0;
    double holdout_srcc = 0.0;
    int holdout_size = 0;
};
// Full-batch gradient descent; every 5th example is held out for the SRCC
// report. Deterministic given data, seed, and hyper.
TrainResult train_fusion(const std::vector<TrainingExample>& data, const FusionHyper& hyper);

struct SrccResult {
    double value = 0.0;
    bool defined = true;  // false when an input is constant
};
// Pearson correlation of fractional (mid-)ranks; ties averaged.
SrccResult srcc(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace adgve
