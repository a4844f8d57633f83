#pragma once

#include <map>
#include <optional>
#include <string>

#include "egoscript/gateway/gateway.h"

namespace egoscript {

/// Fault-injection and fixture switches parsed from a stub endpoint URL,
/// e.g. "stub://?malformed=1&onset=12.5".
struct StubOptions {
    /// First N attempts of the first item of every structured step are malformed JSON.
    int malformed = 0;
    /// First N attempts of the first step-3 item carry modality "smell".
    int bad_modality = 0;
    /// Step-5 payloads carry this hazard onset.
    std::optional<double> onset;
    /// Alignment score returned by the VLM alignment call.
    double alignment = 0.9;
    /// Every call to this backend fails at the transport level.
    bool fail = false;
    /// Over-alert flag forced on judge payloads.
    std::optional<bool> over_alert;
};

StubOptions parse_stub_options(std::string_view endpoint_url);

/// Deterministic offline backend: every response is a pure function of
/// (kind, operation, request bytes).
class StubTransport final : public Transport {
public:
    std::string send(const BackendConfig& cfg, const std::optional<std::string>& credential,
                     std::string_view operation, const Json& body) override;
};

/// JSON-over-HTTP adapter. POSTs {"model", "input"} to <endpoint>/<operation>
/// and reads the "output" member of the JSON reply.
class HttpTransport final : public Transport {
public:
    std::string send(const BackendConfig& cfg, const std::optional<std::string>& credential,
                     std::string_view operation, const Json& body) override;
};

}  // namespace egoscript
