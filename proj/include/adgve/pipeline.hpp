#pragma once

#include <optional>
#include <string>
#include <vector>

#include "adgve/config.hpp"
#include "adgve/fusion.hpp"
#include "adgve/lane_obedience.hpp"
#include "adgve/prompt_engine.hpp"
#include "adgve/vlm_client.hpp"

namespace adgve {

struct VideoEvaluation {
    std::string video_id;
    std::string path;
    FeatureBundle bundle;
    LaneScores lane;
    CheckOutputs checks;
    std::optional<double> human_score;
    std::string ego_source;       // "annotated" | "proxy"
    std::string boundary_source;  // "declared" | "derived" | "none"
    std::vector<std::string> warnings;
};

struct QualityReport {
    std::string video_id;
    double s_overall = 0.0;
    bool keep = false;  // s_overall > tau, strict
    double d_norm = 0.0;
    double s_center = 0.0, s_solid = 0.0, s_cross = 0.0, s_lane = 0.0;
    double s_clip_attention = 0.0;
    double psi_frame_mean = 0.0, psi_clip_mean = 0.0;
    std::vector<std::string> flags;
    int violation_count = 0;
    std::string ego_source, boundary_source;
    std::string config_checksum, catalog_checksum;
    std::string error;  // nonempty when the video failed to score

    std::string to_json_line() const;
    static QualityReport from_json_line(const std::string& line);
};

// Full per-video pipeline: parse -> split -> geometry -> lane scores ->
// summaries -> checks -> features. Throws typed errors on unusable input.
VideoEvaluation evaluate_video(const std::string& annotation_path, const Config& cfg,
                               VlmBackend& backend);

QualityReport make_report(const VideoEvaluation& eval, const FusionModel& model, double tau,
                          const Config& cfg);

QualityReport score_video(const std::string& annotation_path, const Config& cfg,
                          const FusionModel& model, VlmBackend& backend, double tau);

// Manifest: one relative annotation path per line.
std::vector<std::string> read_manifest(const std::string& manifest_path);

struct BatchResult {
    std::vector<QualityReport> reports;  // input order
    std::vector<std::string> kept;       // paths with s_overall > tau
    double coverage = 0.0;
    int errors = 0;
};

// Scores the whole manifest (parallel up to `jobs`); a failing video yields
// an error report line and counts as dropped.
BatchResult filter_manifest(const std::string& manifest_path, double tau, const Config& cfg,
                            const FusionModel& model, VlmBackend& backend, int jobs = 1);

struct AblationRow {
    std::string label;
    double coverage = -1.0;  // tau rows
    double srcc = 0.0;       // module-drop rows
    bool srcc_defined = false;
    int n = 0;
};

// Coverage per threshold plus SRCC-vs-labels per dropped module; dropping a
// module zeroes its operand block and evidence bits.
std::vector<AblationRow> ablate(const std::string& manifest_path,
                                const std::vector<double>& tau_grid,
                                const std::vector<std::string>& drop_modules,
                                const Config& cfg, const FusionModel& model,
                                VlmBackend& backend, int jobs = 1);

FeatureBundle drop_module(const FeatureBundle& bundle, const std::string& module);

struct ReportSummary {
    int total = 0;
    int kept = 0;
    int errors = 0;
    double mean_s_overall = 0.0;
    std::vector<int> histogram;  // 10 bins over [0,1]
    std::vector<std::pair<std::string, int>> flag_counts;

    std::string to_text() const;
    std::string histogram_tsv() const;
};

ReportSummary summarize_reports(const std::vector<QualityReport>& reports);

// --config path, else $ADGVE_CONFIG, else built-in defaults.
Config load_config(const std::string& cli_path);

}  // namespace adgve
