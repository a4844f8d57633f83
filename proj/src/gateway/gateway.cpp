#include "egoscript/gateway/gateway.h"

#include <algorithm>
#include <cctype>
#include <cstdlib>

#include <fmt/format.h>

#include "egoscript/gateway/stub_backend.h"

namespace egoscript {

namespace {

constexpr std::array<std::pair<BackendKind, std::string_view>, 5> kKinds{{
    {BackendKind::Text, "text"},
    {BackendKind::Image, "image"},
    {BackendKind::Video, "video"},
    {BackendKind::Vlm, "vlm"},
    {BackendKind::Judge, "judge"},
}};

constexpr std::array<std::string_view, 8> kSchemas{
    schema_id::kStep1, schema_id::kStep2,       schema_id::kStep3,         schema_id::kStep4,
    schema_id::kStep5, schema_id::kVlmAnalysis, schema_id::kJudgeVerdict, schema_id::kAlignment,
};

/// RAII slot in a backend's concurrency limiter.
class Slot {
public:
    explicit Slot(std::counting_semaphore<64>& s) : s_(s) { s_.acquire(); }
    ~Slot() { s_.release(); }
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;

private:
    std::counting_semaphore<64>& s_;
};

}  // namespace

std::string_view to_string(BackendKind k) {
    for (const auto& [kind, name] : kKinds) {
        if (kind == k) return name;
    }
    return "unknown";
}

std::optional<BackendKind> parse_backend_kind(std::string_view s) {
    for (const auto& [kind, name] : kKinds) {
        if (name == s) return kind;
    }
    return std::nullopt;
}

bool is_registered_schema(std::string_view id) {
    return std::find(kSchemas.begin(), kSchemas.end(), id) != kSchemas.end();
}

bool is_well_formed_handle(std::string_view handle) {
    if (handle.empty() || handle.size() > 512) return false;
    return std::all_of(handle.begin(), handle.end(), [](unsigned char c) {
        return std::isprint(c) != 0 && std::isspace(c) == 0;
    });
}

Violations validate_backend_config(const BackendConfig& cfg) {
    Violations out;
    if (!(cfg.timeout_s > 0.0)) {
        out.push_back({violation_code::kOutOfRange, "timeout_s", "timeout_s must be > 0"});
    }
    if (cfg.max_retries < 0 || cfg.max_retries > 10) {
        out.push_back({violation_code::kOutOfRange, "max_retries", "max_retries must be in 0..10"});
    }
    if (cfg.max_concurrency < 1 || cfg.max_concurrency > 64) {
        out.push_back(
            {violation_code::kOutOfRange, "max_concurrency", "max_concurrency must be in 1..64"});
    }
    if (cfg.endpoint_url.empty()) {
        out.push_back({violation_code::kEmptyField, "endpoint_url", "endpoint_url is required"});
    }
    return out;
}

std::shared_ptr<Transport> transport_for(const BackendConfig& cfg) {
    if (cfg.endpoint_url.rfind("stub:", 0) == 0) return std::make_shared<StubTransport>();
    if (cfg.endpoint_url.rfind("http://", 0) == 0 || cfg.endpoint_url.rfind("https://", 0) == 0) {
        return std::make_shared<HttpTransport>();
    }
    throw ConfigError("unsupported backend endpoint '" + cfg.endpoint_url + "'");
}

// =============================================================================
// BackendClient
// =============================================================================

BackendClient::BackendClient(BackendConfig cfg, std::shared_ptr<Transport> transport)
    : cfg_(std::move(cfg)), transport_(std::move(transport)) {
    if (auto v = validate_backend_config(cfg_); !v.empty()) {
        throw ConfigError(fmt::format("backend '{}': {}", to_string(cfg_.kind), v.front().message));
    }
    if (!transport_) transport_ = transport_for(cfg_);
    if (!cfg_.auth_env_var.empty()) {
        if (const char* value = std::getenv(cfg_.auth_env_var.c_str())) credential_ = value;
    }
    slots_ = std::make_unique<std::counting_semaphore<64>>(cfg_.max_concurrency);
}

void BackendClient::require_kind(BackendKind kind, std::string_view op) const {
    if (cfg_.kind != kind) {
        throw ConfigError(fmt::format("{} requires a {} backend, configured kind is {}", op,
                                      to_string(kind), to_string(cfg_.kind)));
    }
}

std::string BackendClient::call(std::string_view operation, const Json& body) {
    if (!cfg_.auth_env_var.empty() && !credential_) {
        throw ConfigError("credential variable " + cfg_.auth_env_var + " is not set");
    }
    Slot slot(*slots_);
    const int max_attempts = cfg_.max_retries + 1;
    for (int attempt = 1;; ++attempt) {
        try {
            return transport_->send(cfg_, credential_, operation, body);
        } catch (const TimeoutError& e) {
            if (attempt >= max_attempts) throw TimeoutError(e.what(), attempt);
        } catch (const TransportError& e) {
            if (attempt >= max_attempts) throw TransportError(e.what(), attempt);
        }
    }
}

std::string BackendClient::complete_structured(const StructuredRequest& req) {
    require_kind(BackendKind::Text, "complete_structured");
    if (!is_registered_schema(req.schema_id)) {
        throw InputError("unregistered schema '" + req.schema_id + "'");
    }
    Json body{{"prompt", req.prompt}, {"schema_id", req.schema_id}, {"context", req.context}};
    if (req.temperature) body["temperature"] = *req.temperature;
    return call("complete", body);
}

std::string BackendClient::generate_image(std::string_view prompt) {
    require_kind(BackendKind::Image, "generate_image");
    if (prompt.empty()) throw InputError("image prompt is empty");
    return call("image", Json{{"prompt", prompt}});
}

std::string BackendClient::generate_video(std::string_view first_frame,
                                          std::span<const std::string> prompts) {
    require_kind(BackendKind::Video, "generate_video");
    if (prompts.size() != 4) {
        throw InputError(fmt::format("expected 4 segment prompts, got {}", prompts.size()));
    }
    if (!is_well_formed_handle(first_frame)) throw InputError("malformed first-frame handle");
    return call("video", Json{{"first_frame", first_frame},
                              {"prompts", std::vector<std::string>(prompts.begin(), prompts.end())}});
}

JobStatus BackendClient::poll_job(std::string_view job) {
    require_kind(BackendKind::Video, "poll_job");
    if (!is_well_formed_handle(job)) throw InputError("malformed job handle");
    Violations v;
    auto parsed = parse_json_payload(call("poll", Json{{"job", job}}), v);
    if (!parsed || !parsed->is_object()) throw TransportError("unreadable job status");
    JobStatus status;
    const auto state = parsed->value("status", std::string());
    if (state == "done") {
        status.state = JobStatus::State::Done;
        status.video_handle = parsed->value("video", std::string());
        if (!is_well_formed_handle(status.video_handle)) {
            throw TransportError("job finished without a usable video handle");
        }
    } else if (state == "failed") {
        status.state = JobStatus::State::Failed;
        status.error = parsed->value("error", std::string("video job failed"));
    } else if (state == "pending") {
        status.state = JobStatus::State::Pending;
    } else {
        throw TransportError("unknown job status '" + state + "'");
    }
    return status;
}

std::string BackendClient::analyze_video(std::string_view video, std::string_view analysis_prompt) {
    require_kind(BackendKind::Vlm, "analyze_video");
    if (!is_well_formed_handle(video)) throw InputError("malformed video handle");
    return call("analyze", Json{{"video", video}, {"prompt", analysis_prompt}});
}

std::string BackendClient::rate_alignment(std::string_view video,
                                          std::span<const std::string> segment_texts) {
    require_kind(BackendKind::Vlm, "rate_alignment");
    if (!is_well_formed_handle(video)) throw InputError("malformed video handle");
    return call("alignment",
                Json{{"video", video},
                     {"segments", std::vector<std::string>(segment_texts.begin(), segment_texts.end())}});
}

std::string BackendClient::judge(const Json& judge_input) {
    require_kind(BackendKind::Judge, "judge");
    if (!judge_input.is_object() || !judge_input.contains("vlm_outputs") ||
        judge_input["vlm_outputs"].is_null()) {
        throw InputError("judge input lacks vlm_outputs");
    }
    return call("judge", judge_input);
}

// =============================================================================
// Gateway
// =============================================================================

Gateway::Gateway(const std::vector<BackendConfig>& configs, std::shared_ptr<Transport> transport) {
    for (auto kind : kAllBackendKinds) {
        BackendConfig cfg;
        cfg.kind = kind;
        for (const auto& c : configs) {
            if (c.kind == kind) cfg = c;
        }
        clients_[static_cast<std::size_t>(kind)] = std::make_unique<BackendClient>(cfg, transport);
    }
}

}  // namespace egoscript
