#include "adgve/vlm_client.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include <httplib.h>
#include <json.hpp>

#include "adgve/catalog.hpp"

namespace adgve {

namespace {

std::string format_answer(bool yes, double confidence) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "{'answer': %s, 'confidence': %.2f}", yes ? "Yes" : "No",
                  confidence);
    return buf;
}

}  // namespace

std::string transcript_key(const QueryPayload& payload) {
    return payload.payload_id + "\t" + hex64(fnv1a(payload.prompt));
}

std::string HashStubBackend::query(const QueryPayload& payload) {
    std::uint64_t h = fnv1a(payload.prompt, fnv1a(payload.payload_id, seed_ ^ 0x9e3779b97f4a7c15ull));
    double conf = double(h >> 11) * 0x1.0p-53;
    bool yes = (h & 1) != 0;
    return format_answer(yes, 0.05 + 0.9 * conf);
}

std::string OracleStubBackend::query(const QueryPayload& payload) {
    if (payload.check_id.empty() || payload.candidate_index < 0)
        throw BackendError("oracle stub needs check metadata on the payload");
    const CheckSpec& spec = check_by_id(payload.check_id);
    const auto& mapping = violation_check_mapping();

    // violations tagged on this payload that this check detects
    int bad_candidate = -1;
    for (const auto& tag : payload.tags) {
        auto it = mapping.find(tag);
        if (it != mapping.end() && it->second.check_id == payload.check_id) {
            bad_candidate = int(it->second.bad_candidate);
            break;
        }
    }
    size_t hit = bad_candidate >= 0 ? size_t(bad_candidate) : spec.best_index();
    bool yes = size_t(payload.candidate_index) == hit;
    return format_answer(yes, 0.95);
}

RemoteBackend::RemoteBackend(std::string endpoint) {
    // accepted forms: http://host:port/path, host:port/path, host/path
    std::string rest = endpoint;
    auto scheme = rest.find("://");
    if (scheme != std::string::npos) rest = rest.substr(scheme + 3);
    auto slash = rest.find('/');
    path_ = slash == std::string::npos ? "/query" : rest.substr(slash);
    std::string hostport = slash == std::string::npos ? rest : rest.substr(0, slash);
    auto colon = hostport.find(':');
    if (colon == std::string::npos) {
        host_ = hostport;
    } else {
        host_ = hostport.substr(0, colon);
        port_ = std::stoi(hostport.substr(colon + 1));
    }
    if (host_.empty()) throw TransportError("empty VLM endpoint host");
}

std::string RemoteBackend::query(const QueryPayload& payload) {
    nlohmann::json body;
    body["payload_id"] = payload.payload_id;
    body["kind"] = payload.kind == PayloadKind::image ? "image" : "clip";
    body["prompt"] = payload.prompt;
    body["data"] = payload.data;

    httplib::Client client(host_, port_);
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(30, 0);
    auto res = client.Post(path_, body.dump(), "application/json");
    if (!res) throw TransportError("VLM endpoint unreachable: " + host_);
    if (res->status < 200 || res->status >= 300)
        throw BackendError("VLM endpoint returned status " + std::to_string(res->status));
    return res->body;
}

ReplayBackend::ReplayBackend(const std::string& transcript_path) {
    std::ifstream in(transcript_path);
    if (!in) throw IoError("cannot open transcript: " + transcript_path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto t1 = line.find('\t');
        auto t2 = line.find('\t', t1 + 1);
        if (t1 == std::string::npos || t2 == std::string::npos)
            throw SchemaError("malformed transcript line");
        responses_[line.substr(0, t2)] = line.substr(t2 + 1);
    }
}

std::string ReplayBackend::query(const QueryPayload& payload) {
    auto it = responses_.find(transcript_key(payload));
    if (it == responses_.end())
        throw BackendError("transcript has no response for payload " + payload.payload_id);
    return it->second;
}

TranscriptRecorder::TranscriptRecorder(std::unique_ptr<VlmBackend> inner, std::string path)
    : inner_(std::move(inner)), path_(std::move(path)) {}

TranscriptRecorder::~TranscriptRecorder() {
    // sorted flush keeps transcripts byte-identical under concurrency
    std::sort(lines_.begin(), lines_.end());
    std::ofstream out(path_);
    for (const auto& l : lines_) out << l << '\n';
}

std::string TranscriptRecorder::query(const QueryPayload& payload) {
    std::string response = inner_->query(payload);
    std::lock_guard<std::mutex> lock(mu_);
    lines_.push_back(transcript_key(payload) + "\t" + response);
    return response;
}

std::string TranscriptRecorder::mode_name() const { return inner_->mode_name(); }

std::unique_ptr<VlmBackend> make_backend(const Config& cfg) {
    std::string mode = cfg.get_string("vlm.mode", "hash_stub");
    std::unique_ptr<VlmBackend> backend;
    if (mode == "hash_stub") {
        backend = std::make_unique<HashStubBackend>(
            std::uint64_t(cfg.get_int("vlm.seed", 0)));
    } else if (mode == "oracle_stub") {
        backend = std::make_unique<OracleStubBackend>();
    } else if (mode == "remote") {
        std::string ep = cfg.get_string("vlm.endpoint");
        if (ep.empty()) throw TransportError("vlm.mode=remote requires vlm.endpoint");
        backend = std::make_unique<RemoteBackend>(ep);
    } else if (mode == "replay") {
        std::string path = cfg.get_string("vlm.transcript_path");
        if (path.empty()) throw IoError("vlm.mode=replay requires vlm.transcript_path");
        return std::make_unique<ReplayBackend>(path);
    } else {
        throw SchemaError("unknown vlm.mode '" + mode + "'");
    }
    std::string record = cfg.get_string("vlm.transcript_path");
    if (!record.empty())
        return std::make_unique<TranscriptRecorder>(std::move(backend), record);
    return backend;
}

}  // namespace adgve
