#include "adgve/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "adgve/clip_segmenter.hpp"
#include "adgve/kinematics.hpp"
#include "adgve/renderer.hpp"
#include "adgve/scene_model.hpp"

namespace adgve {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

constexpr int kRoiCap = 4;

struct RoiCandidate {
    double x, y, w, h;
    int frame;
    double area;
    std::string id;
};

void push_rois(EvidenceSet& ev, const std::string& check_id, std::vector<RoiCandidate> cands,
               const std::string& video_id, bool materialize, const ScenePriors& priors,
               const Config& cfg) {
    std::stable_sort(cands.begin(), cands.end(),
                     [](const RoiCandidate& a, const RoiCandidate& b) { return a.area > b.area; });
    if (int(cands.size()) > kRoiCap) cands.resize(kRoiCap);
    int tw = cfg.get_int("render.target_w", 448);
    int th = cfg.get_int("render.target_h", 448);
    for (const auto& c : cands) {
        EvidenceSet::RoiEvidence roi;
        roi.check_id = check_id;
        roi.payload_id = video_id + "/roi/" + check_id + "/" + c.id;
        if (materialize) {
            RasterImage bg = render_schematic(priors, c.frame);
            roi.data.push_back(encode_ppm(crop_roi(bg, c.x, c.y, c.w, c.h, 0.25, tw, th)));
        } else {
            roi.data.push_back("ref:roi:" + c.id);
        }
        ev.rois.push_back(std::move(roi));
    }
}

Tracklet clip_sub_track(const Tracklet& t, const ClipRange& c) {
    Tracklet sub;
    sub.track_id = t.track_id;
    sub.cls = t.cls;
    for (const auto& b : t.boxes)
        if (b.frame >= c.start && b.frame < c.end) sub.boxes.push_back(b);
    return sub;
}

}  // namespace

VideoEvaluation evaluate_video(const std::string& annotation_path, const Config& cfg,
                               VlmBackend& backend) {
    std::string bytes = read_file(annotation_path);
    ScenePriors priors = parse_annotation(bytes);
    std::optional<GroundTruth> truth = parse_ground_truth(bytes);

    VideoEvaluation eval;
    eval.video_id = priors.meta.video_id;
    eval.path = annotation_path;
    eval.human_score = priors.human_score;

    ValidationReport vr = validate_priors(priors);
    if (!vr.ok()) throw SchemaError("invalid priors: " + vr.hard_errors.front());
    eval.warnings = vr.warnings;

    const int M = cfg.get_int("pipeline.num_clips", 8);
    auto clips = split_clips(priors.meta.num_frames, M);
    VideoGeometry geom = compute_video_geometry(priors, clips, cfg);

    eval.lane = score_lane_obedience(priors, geom, cfg);
    eval.ego_source = priors.ego_track ? "annotated" : "proxy";
    bool any_declared = false;
    for (const auto& b : priors.boundaries)
        if (!b.frames.empty()) any_declared = true;
    eval.boundary_source =
        any_declared ? "declared" : (geom.any_derived_boundaries ? "derived" : "none");

    // kinematics: whole video and per clip
    std::vector<Kinematics> kin_video;
    for (const auto& t : priors.tracklets)
        kin_video.push_back(
            tracklet_kinematics(t, priors.meta.fps, geom.px_per_meter, &geom));
    if (priors.ego_track)
        kin_video.push_back(
            tracklet_kinematics(*priors.ego_track, priors.meta.fps, geom.px_per_meter, &geom));

    // summaries
    CheckSummaries summaries;
    for (const auto& c : clips) {
        SummaryScope fscope;
        fscope.kind = SummaryScope::Kind::frame;
        fscope.frame = c.key_frame;
        summaries.per_key_frame[c.key_frame] = build_summary(priors, geom, kin_video, fscope, cfg);
        SummaryScope cscope;
        cscope.kind = SummaryScope::Kind::clip;
        cscope.clip = c;
        summaries.per_clip[c.clip_index] = build_summary(priors, geom, kin_video, cscope, cfg);
    }
    SummaryScope vscope;
    vscope.kind = SummaryScope::Kind::clip;
    vscope.clip = ClipRange{0, 0, priors.meta.num_frames,
                            priors.meta.num_frames / 2};
    summaries.video = build_summary(priors, geom, kin_video, vscope, cfg);

    // evidence payloads; rasters are materialized only when a remote backend
    // actually consumes pixels
    bool materialize = cfg.get_string("vlm.mode", "hash_stub") == "remote" ||
                       cfg.get_int("render.materialize", 0) != 0;
    EvidenceSet ev;
    if (truth) ev.tags = truth->tags;
    int tw = cfg.get_int("render.target_w", 448);
    int th = cfg.get_int("render.target_h", 448);
    (void)tw;
    (void)th;
    for (const auto& c : clips) {
        EvidenceSet::KeyFrameEvidence kf;
        kf.frame = c.key_frame;
        kf.payload_id = eval.video_id + "/kf" + std::to_string(c.key_frame);
        if (materialize) {
            KeyframeTriplet trip = render_keyframe_triplet(priors, c.key_frame);
            kf.data = {encode_ppm(trip.raw), encode_ppm(trip.boxed), encode_ppm(trip.masked)};
        } else {
            kf.data = {"ref:kf:" + std::to_string(c.key_frame) + ":raw",
                       "ref:kf:" + std::to_string(c.key_frame) + ":boxed",
                       "ref:kf:" + std::to_string(c.key_frame) + ":masked"};
        }
        ev.key_frames.push_back(std::move(kf));

        EvidenceSet::ClipEvidence cp;
        cp.clip_index = c.clip_index;
        cp.payload_id = eval.video_id + "/clip" + std::to_string(c.clip_index) + "/pair";
        if (materialize) {
            ClipPair pair = render_clip_pair(priors, c, cfg.get_int("render.fade_window", 16));
            for (const auto& img : pair.raw) cp.data.push_back(encode_ppm(img));
            for (const auto& img : pair.overlaid) cp.data.push_back(encode_ppm(img));
        } else {
            cp.data = {"ref:clip:" + std::to_string(c.clip_index) + ":pair"};
        }
        ev.clip_pairs.push_back(std::move(cp));

        auto levels = sub_clips(c);
        for (size_t lv = 0; lv < levels.size(); ++lv) {
            EvidenceSet::SubClipEvidence sub;
            sub.clip_index = c.clip_index;
            sub.level = int(lv);
            sub.payload_id = eval.video_id + "/clip" + std::to_string(c.clip_index) + "/sub" +
                             std::to_string(lv);
            for (int f : levels[lv]) sub.data.push_back("ref:frame:" + std::to_string(f));
            ev.sub_clip_sets.push_back(std::move(sub));
        }
    }

    // Group C ROI selection (deterministic; capped per check)
    {
        std::vector<RoiCandidate> c1, c2, c7;
        for (const auto& c : clips) {
            auto add_boxes = [&](const Tracklet& t) {
                const Detection* d = t.box_at(c.key_frame);
                if (!d) return;
                RoiCandidate rc{d->x, d->y, d->w, d->h, c.key_frame, d->w * d->h,
                                std::to_string(t.track_id) + "@" +
                                    std::to_string(c.key_frame)};
                if (t.cls == ActorClass::vehicle) c1.push_back(rc);
                else c2.push_back(rc);
            };
            for (const auto& t : priors.tracklets) add_boxes(t);
            if (priors.ego_track) add_boxes(*priors.ego_track);
        }
        // stopped vehicles: total bottom-center travel under 2 px
        for (const auto& t : priors.tracklets) {
            if (t.cls != ActorClass::vehicle || t.boxes.size() < 2) continue;
            double travel = 0.0;
            for (size_t i = 0; i + 1 < t.boxes.size(); ++i)
                travel += norm(t.boxes[i + 1].bottom_center() - t.boxes[i].bottom_center());
            if (travel < 2.0) {
                const Detection& d = t.boxes[t.boxes.size() / 2];
                c7.push_back({d.x, d.y, d.w, d.h, d.frame, d.w * d.h,
                              std::to_string(t.track_id) + "@stopped"});
            }
        }
        push_rois(ev, "C1", c1, eval.video_id, materialize, priors, cfg);
        push_rois(ev, "C2", c2, eval.video_id, materialize, priors, cfg);
        push_rois(ev, "C7", c7, eval.video_id, materialize, priors, cfg);

        std::vector<RoiCandidate> c3, c4, c5, c6;
        for (const auto& c : clips) {
            const LaneGeometry& g = geom.at_key_frame(c.key_frame);
            double lo_x = 1e300, lo_y = 1e300, hi_x = -1e300, hi_y = -1e300;
            double slo_x = 1e300, slo_y = 1e300, shi_x = -1e300, shi_y = -1e300;
            bool any = false, any_solid = false;
            for (const auto& [line, style] : g.boundaries) {
                for (const auto& p : line) {
                    lo_x = std::min(lo_x, p.x);
                    lo_y = std::min(lo_y, p.y);
                    hi_x = std::max(hi_x, p.x);
                    hi_y = std::max(hi_y, p.y);
                    any = true;
                    if (style == BoundaryStyle::solid || style == BoundaryStyle::double_solid) {
                        slo_x = std::min(slo_x, p.x);
                        slo_y = std::min(slo_y, p.y);
                        shi_x = std::max(shi_x, p.x);
                        shi_y = std::max(shi_y, p.y);
                        any_solid = true;
                    }
                }
            }
            if (any)
                c3.push_back({lo_x, lo_y, std::max(1.0, hi_x - lo_x),
                              std::max(1.0, hi_y - lo_y), c.key_frame,
                              (hi_x - lo_x) * (hi_y - lo_y),
                              "lanes@" + std::to_string(c.key_frame)});
            if (any_solid)
                c6.push_back({slo_x, slo_y, std::max(1.0, shi_x - slo_x),
                              std::max(1.0, shi_y - slo_y), c.key_frame,
                              (shi_x - slo_x) * (shi_y - slo_y),
                              "solid@" + std::to_string(c.key_frame)});
            for (const auto& m : priors.masks) {
                const MaskFrame* f = m.frame_at(c.key_frame);
                if (!f) continue;
                double mlo_x = 1e300, mlo_y = 1e300, mhi_x = -1e300, mhi_y = -1e300;
                for (const auto& p : f->polygon) {
                    mlo_x = std::min(mlo_x, p.x);
                    mlo_y = std::min(mlo_y, p.y);
                    mhi_x = std::max(mhi_x, p.x);
                    mhi_y = std::max(mhi_y, p.y);
                }
                RoiCandidate rc{mlo_x, mlo_y, mhi_x - mlo_x, mhi_y - mlo_y, c.key_frame,
                                (mhi_x - mlo_x) * (mhi_y - mlo_y),
                                std::to_string(m.instance_id) + "@" +
                                    std::to_string(c.key_frame)};
                if (m.is_crosswalk()) c5.push_back(rc);
                if (m.cls == MaskClass::hard_object &&
                    (m.subtype == "signal" || m.subtype == "sign"))
                    c4.push_back(rc);
            }
        }
        push_rois(ev, "C3", c3, eval.video_id, materialize, priors, cfg);
        push_rois(ev, "C4", c4, eval.video_id, materialize, priors, cfg);
        push_rois(ev, "C5", c5, eval.video_id, materialize, priors, cfg);
        push_rois(ev, "C6", c6, eval.video_id, materialize, priors, cfg);
    }

    eval.checks = run_checks(ev, summaries, backend, cfg, M);

    // features
    FeatureBundle& b = eval.bundle;
    b.psi_frame = eval.checks.psi_frame;
    b.psi_clip = eval.checks.psi_clip;
    b.s_clip = eval.checks.s_clip;
    b.s_lane = eval.lane.s_lane;

    PhiFeatures video_phi = statistics_features(priors, geom, kin_video, vscope);
    b.phi_obj = video_phi.phi_obj;
    b.phi_sem = video_phi.phi_sem;
    b.phi_mot = video_phi.phi_mot;

    // externally supplied feature files override the statistics descriptors
    std::string feat_path = cfg.get_string("features.path");
    if (!feat_path.empty()) {
        std::ifstream in(feat_path);
        if (!in) throw IoError("cannot open features file: " + feat_path);
        std::string line;
        while (std::getline(in, line)) {
            std::istringstream ls(line);
            std::string vid;
            ls >> vid;
            if (vid != eval.video_id) continue;
            Vec all;
            double v;
            while (ls >> v) all.push_back(v);
            if (int(all.size()) != 3 * kPhiDim)
                throw SchemaError("features line for " + vid + " must carry " +
                                  std::to_string(3 * kPhiDim) + " values");
            b.phi_obj.assign(all.begin(), all.begin() + kPhiDim);
            b.phi_sem.assign(all.begin() + kPhiDim, all.begin() + 2 * kPhiDim);
            b.phi_mot.assign(all.begin() + 2 * kPhiDim, all.end());
        }
    }

    // per-clip attention inputs r_m = [phi_mot_clip; s_clip_m]
    for (const auto& c : clips) {
        std::vector<Kinematics> kin_clip;
        for (const auto& t : priors.tracklets) {
            Tracklet sub = clip_sub_track(t, c);
            if (!sub.boxes.empty())
                kin_clip.push_back(
                    tracklet_kinematics(sub, priors.meta.fps, geom.px_per_meter, &geom));
        }
        if (priors.ego_track) {
            Tracklet sub = clip_sub_track(*priors.ego_track, c);
            if (!sub.boxes.empty())
                kin_clip.push_back(
                    tracklet_kinematics(sub, priors.meta.fps, geom.px_per_meter, &geom));
        }
        SummaryScope cscope;
        cscope.kind = SummaryScope::Kind::clip;
        cscope.clip = c;
        PhiFeatures clip_phi = statistics_features(priors, geom, kin_clip, cscope);
        Vec r = clip_phi.phi_mot;
        r.push_back(b.s_clip[c.clip_index]);
        b.r.push_back(std::move(r));
    }

    b.evidence.assign(kEvidenceDim, 0.0);
    b.evidence[kBitNoEgoTrack] = priors.ego_track ? 0.0 : 1.0;
    b.evidence[kBitCenterNoEvidence] = eval.lane.center_no_evidence ? 1.0 : 0.0;
    b.evidence[kBitSolidNoEvidence] = eval.lane.solid_no_evidence ? 1.0 : 0.0;
    b.evidence[kBitCrossNoEvidence] = eval.lane.cross_no_evidence ? 1.0 : 0.0;
    b.evidence[kBitVlmDegraded] = eval.checks.degraded ? 1.0 : 0.0;
    b.evidence[kBitGeometryFallback] = geom.any_fallback ? 1.0 : 0.0;
    return eval;
}

namespace {

double mean_of(const Vec& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / v.size();
}

}  // namespace

QualityReport make_report(const VideoEvaluation& eval, const FusionModel& model, double tau,
                          const Config& cfg) {
    QualityReport r;
    r.video_id = eval.video_id;
    AttentionResult att = attention_aggregate(eval.bundle.r, eval.bundle.s_clip, model.u);
    r.s_clip_attention = att.s_clip;
    r.s_overall = fuse(eval.bundle, model);
    r.keep = r.s_overall > tau;
    r.d_norm = eval.lane.d_norm;
    r.s_center = eval.lane.s_center;
    r.s_solid = eval.lane.s_solid;
    r.s_cross = eval.lane.s_cross;
    r.s_lane = eval.lane.s_lane;
    r.psi_frame_mean = mean_of(eval.bundle.psi_frame);
    r.psi_clip_mean = mean_of(eval.bundle.psi_clip);
    if (eval.bundle.evidence[kBitNoEgoTrack] > 0) r.flags.push_back("no_ego_track");
    if (eval.bundle.evidence[kBitCenterNoEvidence] > 0) r.flags.push_back("center_no_evidence");
    if (eval.bundle.evidence[kBitSolidNoEvidence] > 0) r.flags.push_back("solid_no_evidence");
    if (eval.bundle.evidence[kBitCrossNoEvidence] > 0) r.flags.push_back("cross_no_evidence");
    if (eval.bundle.evidence[kBitVlmDegraded] > 0) r.flags.push_back("vlm_degraded");
    if (eval.bundle.evidence[kBitGeometryFallback] > 0) r.flags.push_back("geometry_fallback");
    r.violation_count = int(eval.lane.violations.size());
    r.ego_source = eval.ego_source;
    r.boundary_source = eval.boundary_source;
    r.config_checksum = cfg.checksum();
    r.catalog_checksum = catalog_checksum();
    return r;
}

QualityReport score_video(const std::string& annotation_path, const Config& cfg,
                          const FusionModel& model, VlmBackend& backend, double tau) {
    VideoEvaluation eval = evaluate_video(annotation_path, cfg, backend);
    return make_report(eval, model, tau, cfg);
}

std::string QualityReport::to_json_line() const {
    json j;
    j["video_id"] = video_id;
    if (!error.empty()) {
        j["error"] = error;
        j["decision"] = "drop";
        j["config_checksum"] = config_checksum;
        j["catalog_checksum"] = catalog_checksum;
        return j.dump();
    }
    j["s_overall"] = s_overall;
    j["decision"] = keep ? "keep" : "drop";
    j["d_norm"] = d_norm;
    j["s_center"] = s_center;
    j["s_solid"] = s_solid;
    j["s_cross"] = s_cross;
    j["s_lane"] = s_lane;
    j["s_clip"] = s_clip_attention;
    j["psi_frame_mean"] = psi_frame_mean;
    j["psi_clip_mean"] = psi_clip_mean;
    j["flags"] = flags;
    j["violations"] = violation_count;
    j["ego_source"] = ego_source;
    j["boundary_source"] = boundary_source;
    j["config_checksum"] = config_checksum;
    j["catalog_checksum"] = catalog_checksum;
    return j.dump();
}

QualityReport QualityReport::from_json_line(const std::string& line) {
    json j = json::parse(line);
    QualityReport r;
    r.video_id = j.value("video_id", "");
    r.error = j.value("error", "");
    if (!r.error.empty()) {
        r.keep = false;
        return r;
    }
    r.s_overall = j.value("s_overall", 0.0);
    r.keep = j.value("decision", "drop") == "keep";
    r.d_norm = j.value("d_norm", 0.0);
    r.s_center = j.value("s_center", 0.0);
    r.s_solid = j.value("s_solid", 0.0);
    r.s_cross = j.value("s_cross", 0.0);
    r.s_lane = j.value("s_lane", 0.0);
    r.s_clip_attention = j.value("s_clip", 0.0);
    r.psi_frame_mean = j.value("psi_frame_mean", 0.0);
    r.psi_clip_mean = j.value("psi_clip_mean", 0.0);
    if (j.contains("flags"))
        for (const auto& f : j.at("flags")) r.flags.push_back(f.get<std::string>());
    r.violation_count = j.value("violations", 0);
    r.ego_source = j.value("ego_source", "");
    r.boundary_source = j.value("boundary_source", "");
    r.config_checksum = j.value("config_checksum", "");
    r.catalog_checksum = j.value("catalog_checksum", "");
    return r;
}

std::vector<std::string> read_manifest(const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw IoError("cannot open manifest: " + manifest_path);
    fs::path base = fs::path(manifest_path).parent_path();
    std::vector<std::string> paths;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        fs::path p(line);
        paths.push_back(p.is_absolute() ? p.string() : (base / p).string());
    }
    return paths;
}

BatchResult filter_manifest(const std::string& manifest_path, double tau, const Config& cfg,
                            const FusionModel& model, VlmBackend& backend, int jobs) {
    std::vector<std::string> paths = read_manifest(manifest_path);
    BatchResult out;
    out.reports.resize(paths.size());

    std::atomic<size_t> cursor{0};
    auto worker = [&]() {
        for (;;) {
            size_t i = cursor.fetch_add(1);
            if (i >= paths.size()) return;
            try {
                out.reports[i] = score_video(paths[i], cfg, model, backend, tau);
            } catch (const std::exception& e) {
                QualityReport r;
                r.video_id = paths[i];
                r.error = e.what();
                r.config_checksum = cfg.checksum();
                r.catalog_checksum = catalog_checksum();
                out.reports[i] = std::move(r);
            }
        }
    };
    jobs = std::max(1, jobs);
    if (jobs == 1 || paths.size() < 2) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < std::min<int>(jobs, int(paths.size())); ++i)
            pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (size_t i = 0; i < paths.size(); ++i) {
        if (!out.reports[i].error.empty()) {
            ++out.errors;
            continue;
        }
        if (out.reports[i].keep) out.kept.push_back(paths[i]);
    }
    out.coverage = paths.empty() ? 0.0 : double(out.kept.size()) / double(paths.size());
    return out;
}

FeatureBundle drop_module(const FeatureBundle& bundle, const std::string& module) {
    FeatureBundle b = bundle;
    if (module == "lane") {
        b.s_lane = 0.0;
        b.evidence[kBitCenterNoEvidence] = 0.0;
        b.evidence[kBitSolidNoEvidence] = 0.0;
        b.evidence[kBitCrossNoEvidence] = 0.0;
    } else if (module == "vlm") {
        std::fill(b.psi_frame.begin(), b.psi_frame.end(), 0.0);
        std::fill(b.psi_clip.begin(), b.psi_clip.end(), 0.0);
        std::fill(b.s_clip.begin(), b.s_clip.end(), 0.0);
        for (auto& r : b.r) r.back() = 0.0;
        b.evidence[kBitVlmDegraded] = 0.0;
    } else if (module == "obj") {
        std::fill(b.phi_obj.begin(), b.phi_obj.end(), 0.0);
    } else if (module == "sem") {
        std::fill(b.phi_sem.begin(), b.phi_sem.end(), 0.0);
    } else if (module == "mot") {
        std::fill(b.phi_mot.begin(), b.phi_mot.end(), 0.0);
        for (auto& r : b.r) std::fill(r.begin(), r.end() - 1, 0.0);
    } else {
        throw SchemaError("unknown module '" + module + "' (lane|vlm|obj|sem|mot)");
    }
    return b;
}

std::vector<AblationRow> ablate(const std::string& manifest_path,
                                const std::vector<double>& tau_grid,
                                const std::vector<std::string>& drop_modules,
                                const Config& cfg, const FusionModel& model,
                                VlmBackend& backend, int jobs) {
    std::vector<std::string> paths = read_manifest(manifest_path);
    std::vector<std::optional<VideoEvaluation>> evals(paths.size());

    std::atomic<size_t> cursor{0};
    auto worker = [&]() {
        for (;;) {
            size_t i = cursor.fetch_add(1);
            if (i >= paths.size()) return;
            try {
                evals[i] = evaluate_video(paths[i], cfg, backend);
            } catch (const std::exception&) {
                evals[i] = std::nullopt;
            }
        }
    };
    jobs = std::max(1, jobs);
    if (jobs == 1 || paths.size() < 2) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < std::min<int>(jobs, int(paths.size())); ++i)
            pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    std::vector<AblationRow> rows;
    std::vector<double> scores;
    std::vector<double> labels;
    std::vector<double> labeled_scores;
    for (const auto& ev : evals) {
        if (!ev) continue;
        double s = fuse(ev->bundle, model);
        scores.push_back(s);
        if (ev->human_score) {
            labels.push_back(*ev->human_score);
            labeled_scores.push_back(s);
        }
    }

    for (double tau : tau_grid) {
        AblationRow row;
        row.label = "tau=" + std::to_string(tau).substr(0, 4);
        int kept = 0;
        for (double s : scores)
            if (s > tau) ++kept;
        row.coverage = paths.empty() ? 0.0 : double(kept) / double(paths.size());
        row.n = int(scores.size());
        rows.push_back(row);
    }

    if (labels.size() >= 2) {
        AblationRow full;
        full.label = "full";
        SrccResult sr = srcc(labeled_scores, labels);
        full.srcc = sr.value;
        full.srcc_defined = sr.defined;
        full.n = int(labels.size());
        rows.push_back(full);
    }

    for (const auto& module : drop_modules) {
        AblationRow row;
        row.label = "drop-" + module;
        std::vector<double> dropped_scores;
        std::vector<double> dropped_labels;
        for (const auto& ev : evals) {
            if (!ev || !ev->human_score) continue;
            dropped_scores.push_back(fuse(drop_module(ev->bundle, module), model));
            dropped_labels.push_back(*ev->human_score);
        }
        if (dropped_labels.size() >= 2) {
            SrccResult sr = srcc(dropped_scores, dropped_labels);
            row.srcc = sr.value;
            row.srcc_defined = sr.defined;
            row.n = int(dropped_labels.size());
        }
        rows.push_back(row);
    }
    return rows;
}

ReportSummary summarize_reports(const std::vector<QualityReport>& reports) {
    if (reports.empty()) throw EmptyInput("no report lines");
    ReportSummary s;
    s.histogram.assign(10, 0);
    std::map<std::string, int> flags;
    double sum = 0.0;
    int scored = 0;
    for (const auto& r : reports) {
        ++s.total;
        if (!r.error.empty()) {
            ++s.errors;
            continue;
        }
        ++scored;
        sum += r.s_overall;
        if (r.keep) ++s.kept;
        int bin = std::min(9, int(r.s_overall * 10.0));
        s.histogram[bin]++;
        for (const auto& f : r.flags) flags[f]++;
    }
    s.mean_s_overall = scored > 0 ? sum / scored : 0.0;
    s.flag_counts.assign(flags.begin(), flags.end());
    return s;
}

std::string ReportSummary::to_text() const {
    std::ostringstream out;
    out << "videos: " << total << "\n";
    out << "scored: " << total - errors << "\n";
    out << "errors: " << errors << "\n";
    out << "kept: " << kept << "\n";
    out << "mean_s_overall: " << mean_s_overall << "\n";
    out << "flags:\n";
    for (const auto& [f, n] : flag_counts) out << "  " << f << ": " << n << "\n";
    return out.str();
}

std::string ReportSummary::histogram_tsv() const {
    std::ostringstream out;
    out << "bin_lo\tbin_hi\tcount\n";
    for (size_t i = 0; i < histogram.size(); ++i)
        out << i / 10.0 << "\t" << (i + 1) / 10.0 << "\t" << histogram[i] << "\n";
    return out.str();
}

Config load_config(const std::string& cli_path) {
    if (!cli_path.empty()) return Config::from_file(cli_path);
    const char* env = std::getenv("ADGVE_CONFIG");
    if (env && *env) return Config::from_file(env);
    return Config();
}

}  // namespace adgve
