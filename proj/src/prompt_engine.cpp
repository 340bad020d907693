#include "adgve/prompt_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <regex>
#include <thread>

namespace adgve {

std::vector<std::pair<std::string, std::string>> instantiate_prompts(
    const CheckSpec& spec, const SceneSummary& summary) {
    const std::string token = "[ANSWER]";
    size_t first = spec.template_text.find(token);
    if (first == std::string::npos)
        throw TemplateError("template of " + spec.check_id + " has no [ANSWER] token");
    if (spec.template_text.find(token, first + 1) != std::string::npos)
        throw TemplateError("template of " + spec.check_id + " has multiple [ANSWER] tokens");

    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(spec.candidates.size());
    for (const auto& cand : spec.candidates) {
        std::string question = spec.template_text;
        question.replace(first, token.size(), cand);
        out.emplace_back(cand, global_instruction() + "\n\n" + summary.rendered_text + "\n\n" +
                                   question);
    }
    return out;
}

VlmAnswer parse_response(const std::string& text) {
    static const std::regex pattern(
        R"(\{\s*'answer'\s*:\s*'?(yes|no)'?\s*,\s*'confidence'\s*:\s*([+-]?[0-9]*\.?[0-9]+(?:[eE][+-]?[0-9]+)?)\s*\})",
        std::regex::icase);
    std::smatch m;
    if (!std::regex_search(text, m, pattern))
        throw ParseError("no answer pattern in response: " +
                         text.substr(0, std::min<size_t>(text.size(), 80)));
    VlmAnswer a;
    std::string ans = m[1].str();
    for (auto& ch : ans) ch = char(std::tolower(static_cast<unsigned char>(ch)));
    a.yes = ans == "yes";
    double conf = std::stod(m[2].str());
    if (!std::isfinite(conf)) throw ParseError("non-finite confidence");
    a.confidence = clamp01(conf);
    return a;
}

Vec normalize_confidences(const Vec& conf) {
    if (conf.size() < 2) throw DimensionError("need at least 2 candidate confidences");
    double sum = 0.0;
    for (double c : conf) {
        if (c < 0.0 || c > 1.0 || !std::isfinite(c))
            throw RangeError("confidence outside [0,1]");
        sum += c;
    }
    Vec probs(conf.size());
    if (sum <= 0.0) {
        std::fill(probs.begin(), probs.end(), 1.0 / conf.size());
        return probs;
    }
    for (size_t i = 0; i < conf.size(); ++i) probs[i] = conf[i] / sum;
    return probs;
}

double check_to_scalar(const Vec& probs, const CheckSpec& spec) {
    if (probs.size() != spec.values.size())
        throw DimensionError("probs size does not match candidates of " + spec.check_id);
    double s = 0.0;
    for (size_t i = 0; i < probs.size(); ++i) s += probs[i] * spec.values[i];
    return s;
}

namespace {

struct QueryJob {
    QueryPayload payload;
    size_t instance = 0;   // which check instance this candidate belongs to
    size_t candidate = 0;
};

struct InstanceResult {
    const CheckSpec* spec = nullptr;
    int clip_index = -1;  // Group B only
    Vec conf;             // per-candidate yes-confidence
    std::vector<bool> ok;
    std::string evidence_ref;
};

}  // namespace

CheckOutputs run_checks(const EvidenceSet& evidence, const CheckSummaries& summaries,
                        VlmBackend& backend, const Config& cfg, int num_clips) {
    const int retries = cfg.get_int("vlm.retries", 2);
    const int max_inflight = std::max(1, cfg.get_int("vlm.max_inflight", 4));

    std::vector<InstanceResult> instances;
    std::vector<QueryJob> jobs;

    auto add_instance = [&](const CheckSpec& spec, const SceneSummary& summary,
                            const std::string& payload_id,
                            const std::vector<std::string>& data, PayloadKind kind,
                            int clip_index) {
        InstanceResult inst;
        inst.spec = &spec;
        inst.clip_index = clip_index;
        inst.conf.assign(spec.candidates.size(), 0.0);
        inst.ok.assign(spec.candidates.size(), false);
        inst.evidence_ref = payload_id;
        size_t index = instances.size();
        instances.push_back(std::move(inst));

        auto prompts = instantiate_prompts(spec, summary);
        for (size_t c = 0; c < prompts.size(); ++c) {
            QueryJob job;
            job.payload.payload_id = payload_id + "/" + spec.check_id + "/" +
                                     std::to_string(c);
            job.payload.kind = kind;
            job.payload.data = data;
            job.payload.prompt = prompts[c].second;
            job.payload.check_id = spec.check_id;
            job.payload.candidate_index = int(c);
            job.payload.tags = evidence.tags;
            job.instance = index;
            job.candidate = c;
            jobs.push_back(std::move(job));
        }
    };

    // Group A on key frames
    for (const auto& c : check_catalog()) {
        if (c.group != CheckGroup::frame) continue;
        for (const auto& kf : evidence.key_frames) {
            auto it = summaries.per_key_frame.find(kf.frame);
            const SceneSummary& s =
                it != summaries.per_key_frame.end() ? it->second : summaries.video;
            add_instance(c, s, kf.payload_id, kf.data, PayloadKind::image, -1);
        }
    }
    // Group B on clip pairs / sub-clips
    for (const auto& c : check_catalog()) {
        if (c.group != CheckGroup::clip) continue;
        if (c.evidence == EvidenceKind::clip_pair) {
            for (const auto& cp : evidence.clip_pairs) {
                auto it = summaries.per_clip.find(cp.clip_index);
                const SceneSummary& s =
                    it != summaries.per_clip.end() ? it->second : summaries.video;
                add_instance(c, s, cp.payload_id, cp.data, PayloadKind::clip, cp.clip_index);
            }
        } else {
            for (const auto& sub : evidence.sub_clip_sets) {
                auto it = summaries.per_clip.find(sub.clip_index);
                const SceneSummary& s =
                    it != summaries.per_clip.end() ? it->second : summaries.video;
                add_instance(c, s, sub.payload_id, sub.data, PayloadKind::clip,
                             sub.clip_index);
            }
        }
    }
    // Group C on ROIs
    for (const auto& c : check_catalog()) {
        if (c.group != CheckGroup::roi) continue;
        for (const auto& roi : evidence.rois) {
            if (roi.check_id != c.check_id) continue;
            add_instance(c, summaries.video, roi.payload_id, roi.data, PayloadKind::image, -1);
        }
    }

    // deterministic parallel execution: results land by job index
    std::vector<double> results(jobs.size(), -1.0);
    std::vector<char> failed(jobs.size(), 0);
    std::atomic<size_t> cursor{0};
    auto worker = [&]() {
        for (;;) {
            size_t i = cursor.fetch_add(1);
            if (i >= jobs.size()) return;
            const QueryJob& job = jobs[i];
            bool done = false;
            for (int attempt = 0; attempt <= retries && !done; ++attempt) {
                try {
                    VlmAnswer a = parse_response(backend.query(job.payload));
                    results[i] = yes_confidence(a);
                    done = true;
                } catch (const Error&) {
                    // retry; fall through to uniform after the budget
                }
            }
            if (!done) failed[i] = 1;
        }
    };
    if (max_inflight == 1 || jobs.size() < 2) {
        worker();
    } else {
        std::vector<std::thread> pool;
        int n = std::min<int>(max_inflight, int(jobs.size()));
        for (int i = 0; i < n; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    CheckOutputs out;
    out.queries_issued = int(jobs.size());
    for (size_t i = 0; i < jobs.size(); ++i) {
        if (failed[i]) {
            ++out.queries_failed;
            continue;
        }
        InstanceResult& inst = instances[jobs[i].instance];
        inst.conf[jobs[i].candidate] = results[i];
        inst.ok[jobs[i].candidate] = true;
    }
    if (out.queries_issued > 0 && out.queries_failed * 2 > out.queries_issued)
        throw BackendUnavailable(std::to_string(out.queries_failed) + " of " +
                                 std::to_string(out.queries_issued) +
                                 " queries failed after retries");

    // per-instance probability vectors; any failed candidate degrades the
    // whole instance to uniform
    std::vector<Vec> probs(instances.size());
    for (size_t i = 0; i < instances.size(); ++i) {
        const InstanceResult& inst = instances[i];
        bool all_ok = std::all_of(inst.ok.begin(), inst.ok.end(), [](bool b) { return b; });
        if (!all_ok) {
            probs[i].assign(inst.conf.size(), 1.0 / inst.conf.size());
            out.degraded = true;
        } else {
            probs[i] = normalize_confidences(inst.conf);
        }
    }

    // assemble psi_frame / psi_clip / s_clip in catalog order
    auto average_block = [&](const CheckSpec& spec, auto&& filter) {
        Vec acc(spec.candidates.size(), 0.0);
        int n = 0;
        for (size_t i = 0; i < instances.size(); ++i) {
            if (instances[i].spec != &spec) continue;
            if (!filter(instances[i])) continue;
            for (size_t k = 0; k < acc.size(); ++k) acc[k] += probs[i][k];
            ++n;
        }
        if (n == 0) {
            std::fill(acc.begin(), acc.end(), 1.0 / acc.size());
        } else {
            for (auto& v : acc) v /= n;
        }
        return acc;
    };

    for (const auto& c : check_catalog()) {
        if (c.group != CheckGroup::frame) continue;
        Vec block = average_block(c, [](const InstanceResult&) { return true; });
        out.psi_frame.insert(out.psi_frame.end(), block.begin(), block.end());
    }
    for (const auto& c : check_catalog()) {
        if (c.group == CheckGroup::frame) continue;
        Vec block = average_block(c, [](const InstanceResult&) { return true; });
        out.psi_clip.insert(out.psi_clip.end(), block.begin(), block.end());
    }

    out.s_clip.assign(size_t(num_clips), 0.0);
    std::vector<int> counts(size_t(num_clips), 0);
    for (size_t i = 0; i < instances.size(); ++i) {
        const InstanceResult& inst = instances[i];
        if (inst.spec->group != CheckGroup::clip) continue;
        if (inst.clip_index < 0 || inst.clip_index >= num_clips) continue;
        out.s_clip[inst.clip_index] += check_to_scalar(probs[i], *inst.spec);
        counts[inst.clip_index] += 1;
    }
    for (int m = 0; m < num_clips; ++m) {
        if (counts[m] > 0)
            out.s_clip[m] /= counts[m];
        else
            out.s_clip[m] = 0.5;  // no clip evidence: neutral scalar
    }
    return out;
}

}  // namespace adgve
