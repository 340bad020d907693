#include "adgve/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "adgve/catalog.hpp"

namespace adgve {

int operand_dim() {
    return psi_frame_dim() + psi_clip_dim() + 2 + 3 * kPhiDim + kEvidenceDim;
}

FusionModel FusionModel::zero() {
    FusionModel m;
    m.u.assign(kPhiDim + 1, 0.0);
    m.w.assign(operand_dim(), 0.0);
    m.catalog_checksum = catalog_checksum();
    return m;
}

FusionModel FusionModel::default_model() {
    FusionModel m = zero();
    // psi blocks: reward probability mass on high-value candidates,
    // zero-mean per check under a uniform distribution
    size_t k = 0;
    auto fill_block = [&](const CheckSpec& c) {
        double mean = 0.0;
        for (double v : c.values) mean += v;
        mean /= c.values.size();
        for (double v : c.values) m.w[k++] = 0.3 * (v - mean) * 2.0;
    };
    for (const auto& c : check_catalog())
        if (c.group == CheckGroup::frame) fill_block(c);
    for (const auto& c : check_catalog())
        if (c.group != CheckGroup::frame) fill_block(c);
    m.w[k++] = 2.0;  // S_clip
    m.w[k++] = 2.0;  // s_lane
    // phi and evidence slots stay zero until trained
    return m;
}

namespace {

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string FusionModel::serialize() const {
    std::string out = "adgve-fusion-model v1\n";
    out += "catalog " + catalog_checksum + "\n";
    out += "dims u " + std::to_string(u.size()) + " w " + std::to_string(w.size()) + "\n";
    out += "u";
    for (double v : u) out += " " + format_full(v);
    out += "\nw";
    for (double v : w) out += " " + format_full(v);
    out += "\nhyper lr " + format_full(hyper.lr) + " lambda " + format_full(hyper.lambda) +
           " epochs " + std::to_string(hyper.epochs) + " seed " + std::to_string(hyper.seed) +
           " margin " + format_full(hyper.pair_margin) + "\n";
    return out;
}

FusionModel FusionModel::deserialize(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "adgve-fusion-model v1")
        throw SchemaError("not a fusion model file");
    FusionModel m;
    size_t nu = 0, nw = 0;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string head;
        ls >> head;
        if (head == "catalog") {
            ls >> m.catalog_checksum;
        } else if (head == "dims") {
            std::string tag;
            ls >> tag >> nu >> tag >> nw;
        } else if (head == "u") {
            double v;
            while (ls >> v) m.u.push_back(v);
        } else if (head == "w") {
            double v;
            while (ls >> v) m.w.push_back(v);
        } else if (head == "hyper") {
            std::string tag;
            while (ls >> tag) {
                if (tag == "lr") ls >> m.hyper.lr;
                else if (tag == "lambda") ls >> m.hyper.lambda;
                else if (tag == "epochs") ls >> m.hyper.epochs;
                else if (tag == "seed") ls >> m.hyper.seed;
                else if (tag == "margin") ls >> m.hyper.pair_margin;
            }
        }
    }
    if (m.u.size() != nu || m.w.size() != nw)
        throw SchemaError("fusion model dims do not match payload");
    return m;
}

namespace {

double polygon_area(const std::vector<Pt>& poly) {
    double a = 0.0;
    for (size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++)
        a += poly[j].x * poly[i].y - poly[i].x * poly[j].y;
    return std::abs(a) / 2.0;
}

double cap1(double v) { return v > 1.0 ? 1.0 : (v < 0.0 ? 0.0 : v); }

const Detection* scope_box(const Tracklet& t, const SummaryScope& scope) {
    if (scope.kind == SummaryScope::Kind::frame) return t.box_at(scope.frame);
    if (const Detection* d = t.box_at(scope.clip.key_frame)) return d;
    for (const auto& b : t.boxes)
        if (b.frame >= scope.clip.start && b.frame < scope.clip.end) return &b;
    return nullptr;
}

double iou(const Detection& a, const Detection& b) {
    double x0 = std::max(a.x, b.x), y0 = std::max(a.y, b.y);
    double x1 = std::min(a.x + a.w, b.x + b.w), y1 = std::min(a.y + a.h, b.y + b.h);
    if (x1 <= x0 || y1 <= y0) return 0.0;
    double inter = (x1 - x0) * (y1 - y0);
    return inter / (a.w * a.h + b.w * b.h - inter);
}

}  // namespace

PhiFeatures statistics_features(const ScenePriors& priors, const VideoGeometry& geom,
                                const std::vector<Kinematics>& kin,
                                const SummaryScope& scope) {
    PhiFeatures phi;
    phi.phi_obj.assign(kPhiDim, 0.0);
    phi.phi_sem.assign(kPhiDim, 0.0);
    phi.phi_mot.assign(kPhiDim, 0.0);
    const double W = priors.meta.width, H = priors.meta.height;
    int scope_frame =
        scope.kind == SummaryScope::Kind::frame ? scope.frame : scope.clip.key_frame;

    // ---- phi_obj: visible boxes ----
    std::vector<const Detection*> boxes;
    std::vector<int> visible_ids;
    int class_counts[3] = {0, 0, 0};
    for (const auto& t : priors.tracklets) {
        const Detection* d = scope_box(t, scope);
        if (!d) continue;
        boxes.push_back(d);
        visible_ids.push_back(t.track_id);
        class_counts[int(t.cls)]++;
    }
    phi.phi_obj[0] = cap1(class_counts[0] / 10.0);
    phi.phi_obj[1] = cap1(class_counts[1] / 10.0);
    phi.phi_obj[2] = cap1(class_counts[2] / 10.0);
    if (!boxes.empty()) {
        double mean_area = 0.0, mean_conf = 0.0, mean_aspect = 0.0;
        for (const Detection* d : boxes) {
            mean_area += d->w * d->h / (W * H);
            mean_conf += d->conf;
            mean_aspect += d->w / d->h;
        }
        mean_area /= boxes.size();
        mean_conf /= boxes.size();
        mean_aspect /= boxes.size();
        double var_area = 0.0;
        for (const Detection* d : boxes) {
            double a = d->w * d->h / (W * H) - mean_area;
            var_area += a * a;
        }
        var_area /= boxes.size();
        int overlapping = 0;
        for (size_t i = 0; i < boxes.size(); ++i) {
            for (size_t j = 0; j < boxes.size(); ++j) {
                if (i != j && iou(*boxes[i], *boxes[j]) > 0.3) {
                    ++overlapping;
                    break;
                }
            }
        }
        phi.phi_obj[3] = cap1(mean_area);
        phi.phi_obj[4] = cap1(var_area * 100.0);
        phi.phi_obj[5] = mean_conf;
        phi.phi_obj[6] = cap1(mean_aspect / 5.0);
        phi.phi_obj[7] = double(overlapping) / boxes.size();
    }

    // ---- phi_sem: mask areas (shoelace) and boundary density ----
    double class_area[6] = {};
    int lane_instances = 0;
    for (const auto& m : priors.masks) {
        const MaskFrame* f = m.frame_at(scope_frame);
        if (!f) continue;
        class_area[int(m.cls)] += polygon_area(f->polygon) / (W * H);
        if (m.cls == MaskClass::ego_lane || m.cls == MaskClass::other_lane) ++lane_instances;
    }
    for (int c = 0; c < 6; ++c) phi.phi_sem[c] = cap1(class_area[c]);
    const LaneGeometry& g = geom.for_frame(scope_frame);
    double boundary_len = 0.0;
    for (const auto& [line, style] : g.boundaries)
        for (size_t i = 0; i + 1 < line.size(); ++i) boundary_len += norm(line[i + 1] - line[i]);
    phi.phi_sem[6] = cap1(boundary_len / (2.0 * (W + H)));
    phi.phi_sem[7] = cap1(lane_instances / 8.0);

    // ---- phi_mot: kinematics of visible tracks ----
    std::vector<const Kinematics*> used;
    for (const auto& k : kin)
        if (std::find(visible_ids.begin(), visible_ids.end(), k.track_id) != visible_ids.end())
            used.push_back(&k);
    if (!used.empty()) {
        double ms = 0.0, mh = 0.0, maxh = 0.0, md = 0.0, msm = 0.0;
        for (const Kinematics* k : used) {
            ms += k->mean_speed;
            mh += k->max_heading_change;
            maxh = std::max(maxh, k->max_heading_change);
            md += std::abs(k->lateral_drift);
            msm += k->smoothness;
        }
        size_t n = used.size();
        double var_s = 0.0;
        for (const Kinematics* k : used) {
            double d = k->mean_speed - ms / n;
            var_s += d * d;
        }
        phi.phi_mot[0] = cap1(ms / n / 30.0);
        phi.phi_mot[1] = cap1(var_s / n / 100.0);
        phi.phi_mot[2] = cap1(mh / n / 3.14159265358979323846);
        phi.phi_mot[3] = cap1(maxh / 3.14159265358979323846);
        phi.phi_mot[4] = cap1(md / n);
        phi.phi_mot[5] = cap1(msm / n / 10.0);
        phi.phi_mot[7] = cap1(double(n) / 10.0);
    }
    double mean_len = 0.0;
    int n_tracks = 0;
    for (const auto& t : priors.tracklets) {
        if (!scope_box(t, scope)) continue;
        mean_len += double(t.boxes.size());
        ++n_tracks;
    }
    if (n_tracks > 0) phi.phi_mot[6] = cap1(mean_len / n_tracks / priors.meta.num_frames);
    return phi;
}

AttentionResult attention_aggregate(const std::vector<Vec>& r,
                                    const std::vector<double>& s_clip, const Vec& u) {
    if (r.empty() || r.size() != s_clip.size())
        throw DimensionError("attention needs matching nonempty r and s_clip");
    for (const auto& v : r)
        if (v.size() != u.size())
            throw DimensionError("attention input dim " + std::to_string(v.size()) +
                                 " does not match u dim " + std::to_string(u.size()));
    size_t M = r.size();
    Vec logits(M, 0.0);
    double max_logit = -1e300;
    for (size_t m = 0; m < M; ++m) {
        double l = 0.0;
        for (size_t k = 0; k < u.size(); ++k) l += u[k] * r[m][k];
        logits[m] = l;
        max_logit = std::max(max_logit, l);
    }
    AttentionResult out;
    out.alpha.assign(M, 0.0);
    double z = 0.0;
    for (size_t m = 0; m < M; ++m) {
        out.alpha[m] = std::exp(logits[m] - max_logit);
        z += out.alpha[m];
    }
    for (size_t m = 0; m < M; ++m) {
        out.alpha[m] /= z;
        out.s_clip += out.alpha[m] * s_clip[m];
    }
    return out;
}

Vec assemble_operand(const FeatureBundle& bundle, double s_clip_agg) {
    if (int(bundle.psi_frame.size()) != psi_frame_dim() ||
        int(bundle.psi_clip.size()) != psi_clip_dim() ||
        int(bundle.phi_obj.size()) != kPhiDim || int(bundle.phi_sem.size()) != kPhiDim ||
        int(bundle.phi_mot.size()) != kPhiDim || int(bundle.evidence.size()) != kEvidenceDim)
        throw DimensionError("feature bundle does not match the catalog layout");
    Vec z;
    z.reserve(operand_dim());
    z.insert(z.end(), bundle.psi_frame.begin(), bundle.psi_frame.end());
    z.insert(z.end(), bundle.psi_clip.begin(), bundle.psi_clip.end());
    z.push_back(s_clip_agg);
    z.push_back(bundle.s_lane);
    z.insert(z.end(), bundle.phi_obj.begin(), bundle.phi_obj.end());
    z.insert(z.end(), bundle.phi_sem.begin(), bundle.phi_sem.end());
    z.insert(z.end(), bundle.phi_mot.begin(), bundle.phi_mot.end());
    z.insert(z.end(), bundle.evidence.begin(), bundle.evidence.end());
    return z;
}

double fuse(const FeatureBundle& bundle, const FusionModel& model) {
    if (int(model.w.size()) != operand_dim())
        throw DimensionError("model w dim " + std::to_string(model.w.size()) +
                             " != operand dim " + std::to_string(operand_dim()));
    AttentionResult att = attention_aggregate(bundle.r, bundle.s_clip, model.u);
    Vec z = assemble_operand(bundle, att.s_clip);
    double dotp = 0.0;
    for (size_t i = 0; i < z.size(); ++i) dotp += model.w[i] * z[i];
    return logistic(dotp);
}

namespace {

constexpr int kSClipSlotOffsetFromPsi = 0;  // S_clip sits right after the psi blocks

int s_clip_slot() { return psi_frame_dim() + psi_clip_dim() + kSClipSlotOffsetFromPsi; }

struct ForwardState {
    Vec alpha;
    double s_clip_agg = 0.0;
    Vec z;
    double s = 0.0;  // sigma(w.z)
};

ForwardState forward_one(const FeatureBundle& b, const FusionModel& m) {
    ForwardState f;
    AttentionResult att = attention_aggregate(b.r, b.s_clip, m.u);
    f.alpha = std::move(att.alpha);
    f.s_clip_agg = att.s_clip;
    f.z = assemble_operand(b, f.s_clip_agg);
    double dotp = 0.0;
    for (size_t i = 0; i < f.z.size(); ++i) dotp += m.w[i] * f.z[i];
    f.s = logistic(dotp);
    return f;
}

}  // namespace

FusionGradients fusion_gradients(const std::vector<TrainingExample>& data,
                                 const FusionModel& model) {
    if (data.size() < 2) throw InsufficientData("need at least 2 labeled examples");
    const size_t N = data.size();
    std::vector<ForwardState> fwd;
    fwd.reserve(N);
    for (const auto& ex : data) fwd.push_back(forward_one(ex.bundle, model));

    FusionGradients g;
    g.grad_u.assign(model.u.size(), 0.0);
    g.grad_w.assign(model.w.size(), 0.0);

    // dL/dS_i accumulated over the MAE and pairwise terms
    Vec gs(N, 0.0);
    double mae = 0.0;
    for (size_t i = 0; i < N; ++i) {
        double diff = fwd[i].s - data[i].label;
        mae += std::abs(diff);
        gs[i] += (diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0)) / double(N);
    }
    mae /= double(N);

    double pair_loss = 0.0;
    size_t pairs = 0;
    for (size_t i = 0; i < N; ++i)
        for (size_t j = 0; j < N; ++j)
            if (data[i].label > data[j].label + model.hyper.pair_margin) ++pairs;
    if (pairs > 0 && model.hyper.lambda != 0.0) {
        for (size_t i = 0; i < N; ++i) {
            for (size_t j = 0; j < N; ++j) {
                if (!(data[i].label > data[j].label + model.hyper.pair_margin)) continue;
                double p = logistic(fwd[i].s - fwd[j].s);
                pair_loss += -std::log(std::max(p, 1e-300));
                double coeff = model.hyper.lambda * (p - 1.0) / double(pairs);
                gs[i] += coeff;
                gs[j] -= coeff;
            }
        }
        pair_loss /= double(pairs);
    }
    g.loss = mae + model.hyper.lambda * pair_loss;
    if (!std::isfinite(g.loss)) throw NonFiniteLoss("loss diverged; lower the learning rate");

    const int sclip_slot = s_clip_slot();
    for (size_t i = 0; i < N; ++i) {
        if (gs[i] == 0.0) continue;
        double sp = fwd[i].s * (1.0 - fwd[i].s);  // sigma'
        double coeff = gs[i] * sp;
        for (size_t k = 0; k < model.w.size(); ++k) g.grad_w[k] += coeff * fwd[i].z[k];
        // u path: dS_clip/du = sum_m alpha_m (s_m - S_clip) r_m
        double w_sclip = model.w[sclip_slot];
        if (w_sclip != 0.0) {
            const auto& b = data[i].bundle;
            for (size_t m = 0; m < b.r.size(); ++m) {
                double c = coeff * w_sclip * fwd[i].alpha[m] *
                           (b.s_clip[m] - fwd[i].s_clip_agg);
                for (size_t k = 0; k < model.u.size(); ++k) g.grad_u[k] += c * b.r[m][k];
            }
        }
    }
    return g;
}

double fusion_loss(const std::vector<TrainingExample>& data, const FusionModel& model) {
    if (data.size() < 2) throw InsufficientData("need at least 2 labeled examples");
    const size_t N = data.size();
    std::vector<double> s(N);
    for (size_t i = 0; i < N; ++i) s[i] = forward_one(data[i].bundle, model).s;
    double mae = 0.0;
    for (size_t i = 0; i < N; ++i) mae += std::abs(s[i] - data[i].label);
    mae /= double(N);
    double pair_loss = 0.0;
    size_t pairs = 0;
    for (size_t i = 0; i < N; ++i)
        for (size_t j = 0; j < N; ++j)
            if (data[i].label > data[j].label + model.hyper.pair_margin) {
                pair_loss += -std::log(std::max(logistic(s[i] - s[j]), 1e-300));
                ++pairs;
            }
    if (pairs > 0) pair_loss /= double(pairs);
    return mae + model.hyper.lambda * pair_loss;
}

TrainResult train_fusion(const std::vector<TrainingExample>& data, const FusionHyper& hyper) {
    if (data.size() < 2) throw InsufficientData("need at least 2 labeled videos");
    for (const auto& ex : data)
        if (!(ex.label >= 0.0 && ex.label <= 1.0))
            throw InsufficientData("labels must lie in [0,1]");

    // every 5th example held out for the SRCC report
    std::vector<TrainingExample> train, holdout;
    for (size_t i = 0; i < data.size(); ++i)
        (i % 5 == 4 ? holdout : train).push_back(data[i]);
    if (train.size() < 2) {
        train = data;
        holdout.clear();
    }

    FusionModel model = FusionModel::zero();
    model.hyper = hyper;
    SplitMix64 rng(hyper.seed);
    for (auto& v : model.u) v = rng.uniform(-0.01, 0.01);
    for (auto& v : model.w) v = rng.uniform(-0.01, 0.01);

    TrainResult result;
    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        FusionGradients g = fusion_gradients(train, model);
        result.final_loss = g.loss;
        for (size_t k = 0; k < model.u.size(); ++k) model.u[k] -= hyper.lr * g.grad_u[k];
        for (size_t k = 0; k < model.w.size(); ++k) model.w[k] -= hyper.lr * g.grad_w[k];
        for (double v : model.w)
            if (!std::isfinite(v)) throw NonFiniteLoss("parameters diverged");
    }

    result.model = model;
    result.holdout_size = int(holdout.size());
    if (holdout.size() >= 2) {
        std::vector<double> pred, truth;
        for (const auto& ex : holdout) {
            pred.push_back(fuse(ex.bundle, model));
            truth.push_back(ex.label);
        }
        result.holdout_srcc = srcc(pred, truth).value;
    }
    return result;
}

SrccResult srcc(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        throw DimensionError("srcc needs two equal-length lists of size >= 2");
    auto midranks = [](const std::vector<double>& v) {
        size_t n = v.size();
        std::vector<size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::sort(idx.begin(), idx.end(), [&](size_t i, size_t j) { return v[i] < v[j]; });
        std::vector<double> ranks(n, 0.0);
        size_t i = 0;
        while (i < n) {
            size_t j = i;
            while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
            double r = 0.5 * (double(i) + double(j)) + 1.0;  // average of 1-based ranks
            for (size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
            i = j + 1;
        }
        return ranks;
    };
    bool a_const = std::all_of(a.begin(), a.end(), [&](double v) { return v == a[0]; });
    bool b_const = std::all_of(b.begin(), b.end(), [&](double v) { return v == b[0]; });
    if (a_const || b_const) return {0.0, false};

    std::vector<double> ra = midranks(a), rb = midranks(b);
    double ma = 0.0, mb = 0.0;
    for (size_t i = 0; i < ra.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= ra.size();
    mb /= rb.size();
    double num = 0.0, da = 0.0, db = 0.0;
    for (size_t i = 0; i < ra.size(); ++i) {
        num += (ra[i] - ma) * (rb[i] - mb);
        da += (ra[i] - ma) * (ra[i] - ma);
        db += (rb[i] - mb) * (rb[i] - mb);
    }
    return {num / std::sqrt(da * db), true};
}

}  // namespace adgve
