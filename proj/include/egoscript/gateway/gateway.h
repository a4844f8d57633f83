#pragma once

#include <array>
#include <memory>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "egoscript/core/error.h"
#include "egoscript/domain/json_reader.h"

namespace egoscript {

enum class BackendKind { Text, Image, Video, Vlm, Judge };

inline constexpr BackendKind kAllBackendKinds[] = {BackendKind::Text, BackendKind::Image,
                                                   BackendKind::Video, BackendKind::Vlm,
                                                   BackendKind::Judge};

std::string_view to_string(BackendKind k);
std::optional<BackendKind> parse_backend_kind(std::string_view s);

struct BackendConfig {
    BackendKind kind = BackendKind::Text;
    /// "stub://[?options]" selects the deterministic offline backend;
    /// "http(s)://..." selects the JSON-over-HTTP adapter.
    std::string endpoint_url = "stub://";
    std::string model_name = "stub";
    /// Name of the environment variable holding the credential; empty = none.
    std::string auth_env_var;
    double timeout_s = 60.0;
    int max_retries = 2;
    int max_concurrency = 4;
};

Violations validate_backend_config(const BackendConfig& cfg);

/// Output schemas a structured request may name.
namespace schema_id {
inline constexpr const char* kStep1 = "step1_interventions";
inline constexpr const char* kStep2 = "step2_user_actions";
inline constexpr const char* kStep3 = "step3_signals";
inline constexpr const char* kStep4 = "step4_mode_binding";
inline constexpr const char* kStep5 = "step5_script";
inline constexpr const char* kVlmAnalysis = "vlm_analysis";
inline constexpr const char* kJudgeVerdict = "judge_verdict";
inline constexpr const char* kAlignment = "alignment_score";
}  // namespace schema_id

bool is_registered_schema(std::string_view id);

struct StructuredRequest {
    std::string prompt;
    std::string schema_id;
    /// Structured variables the prompt was rendered from; part of the request
    /// bytes, so the stub can answer from them deterministically.
    Json context = Json::object();
    std::optional<double> temperature;
};

struct JobStatus {
    enum class State { Pending, Done, Failed };
    State state = State::Pending;
    std::string video_handle;
    std::string error;
};

/// Handles are opaque, non-empty, printable and whitespace-free.
bool is_well_formed_handle(std::string_view handle);

// =============================================================================
// Transport
// =============================================================================

/// Moves one request to a backend and returns its raw response text. Throws
/// TransportError / TimeoutError for retryable failures and InputError for
/// requests the backend rejects outright.
class Transport {
public:
    virtual ~Transport() = default;
    virtual std::string send(const BackendConfig& cfg, const std::optional<std::string>& credential,
                             std::string_view operation, const Json& body) = 0;
};

/// Picks the stub or HTTP transport from the endpoint scheme.
std::shared_ptr<Transport> transport_for(const BackendConfig& cfg);

// =============================================================================
// Clients
// =============================================================================

/// Client for one backend. Stateless apart from the credential captured at
/// construction and a concurrency limiter; safe to share between threads.
class BackendClient {
public:
    explicit BackendClient(BackendConfig cfg, std::shared_ptr<Transport> transport = nullptr);

    const BackendConfig& config() const { return cfg_; }

    /// Text kind. Returns the backend's payload verbatim; validation is the caller's job.
    std::string complete_structured(const StructuredRequest& req);
    /// Image kind. Returns a media handle.
    std::string generate_image(std::string_view prompt);
    /// Video kind. Exactly four segment prompts; returns a job handle.
    std::string generate_video(std::string_view first_frame, std::span<const std::string> prompts);
    JobStatus poll_job(std::string_view job);
    /// VLM kind. Raw payload to be parsed as a VLM analysis.
    std::string analyze_video(std::string_view video, std::string_view analysis_prompt);
    /// VLM kind. Raw payload holding a single alignment score in [0,1].
    std::string rate_alignment(std::string_view video, std::span<const std::string> segment_texts);
    /// Judge kind. `judge_input` is a serialized judge input; must carry vlm_outputs.
    std::string judge(const Json& judge_input);

private:
    void require_kind(BackendKind kind, std::string_view op) const;
    std::string call(std::string_view operation, const Json& body);

    BackendConfig cfg_;
    std::shared_ptr<Transport> transport_;
    std::optional<std::string> credential_;
    std::unique_ptr<std::counting_semaphore<64>> slots_;
};

/// One client per backend kind.
class Gateway {
public:
    /// Missing kinds fall back to the stub backend.
    explicit Gateway(const std::vector<BackendConfig>& configs = {},
                     std::shared_ptr<Transport> transport = nullptr);

    BackendClient& client(BackendKind kind) { return *clients_[static_cast<std::size_t>(kind)]; }
    BackendClient& text() { return client(BackendKind::Text); }
    BackendClient& image() { return client(BackendKind::Image); }
    BackendClient& video() { return client(BackendKind::Video); }
    BackendClient& vlm() { return client(BackendKind::Vlm); }
    BackendClient& judge() { return client(BackendKind::Judge); }

private:
    std::array<std::unique_ptr<BackendClient>, 5> clients_;
};

}  // namespace egoscript
