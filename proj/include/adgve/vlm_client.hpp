#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "adgve/common.hpp"
#include "adgve/config.hpp"

namespace adgve {

enum class PayloadKind { image, clip };

struct QueryPayload {
    std::string payload_id;  // unique per run
    PayloadKind kind = PayloadKind::image;
    std::vector<std::string> data;  // encoded rasters or file references
    std::string prompt;
    // stub metadata: the check/candidate this prompt instantiates and the
    // ground-truth violation tags of the source video (oracle mode)
    std::string check_id;
    int candidate_index = -1;
    std::vector<std::string> tags;
};

class VlmBackend {
public:
    virtual ~VlmBackend() = default;
    // Returns the raw response text. Throws TransportError / BackendError.
    virtual std::string query(const QueryPayload& payload) = 0;
    virtual std::string mode_name() const = 0;
};

// confidence = stable hash of (seed, payload_id, prompt) mapped to [0,1].
class HashStubBackend : public VlmBackend {
public:
    explicit HashStubBackend(std::uint64_t seed) : seed_(seed) {}
    std::string query(const QueryPayload& payload) override;
    std::string mode_name() const override { return "hash_stub"; }

private:
    std::uint64_t seed_;
};

// Answers from ground-truth violation tags: a tagged violation puts
// confidence 0.95 on its mapped bad candidate, otherwise the best candidate
// gets 0.95.
class OracleStubBackend : public VlmBackend {
public:
    std::string query(const QueryPayload& payload) override;
    std::string mode_name() const override { return "oracle_stub"; }
};

// Generic visual-question POST to a configured endpoint; the response body
// is returned verbatim.
class RemoteBackend : public VlmBackend {
public:
    explicit RemoteBackend(std::string endpoint);
    std::string query(const QueryPayload& payload) override;
    std::string mode_name() const override { return "remote"; }

private:
    std::string host_;
    int port_ = 80;
    std::string path_;
};

// Replays a recorded transcript keyed by (payload_id, prompt hash).
class ReplayBackend : public VlmBackend {
public:
    explicit ReplayBackend(const std::string& transcript_path);
    std::string query(const QueryPayload& payload) override;
    std::string mode_name() const override { return "replay"; }

private:
    std::map<std::string, std::string> responses_;
};

// Wraps a backend and appends one record per query:
// payload_id <TAB> prompt-hash <TAB> response
class TranscriptRecorder : public VlmBackend {
public:
    TranscriptRecorder(std::unique_ptr<VlmBackend> inner, std::string path);
    ~TranscriptRecorder() override;
    std::string query(const QueryPayload& payload) override;
    std::string mode_name() const override;

private:
    std::unique_ptr<VlmBackend> inner_;
    std::string path_;
    std::mutex mu_;
    std::vector<std::string> lines_;
};

// Builds the backend selected by vlm.mode (remote | hash_stub | oracle_stub
// | replay), wrapped in a recorder when vlm.transcript_path is set and the
// mode is not replay.
std::unique_ptr<VlmBackend> make_backend(const Config& cfg);

std::string transcript_key(const QueryPayload& payload);

}  // namespace adgve
