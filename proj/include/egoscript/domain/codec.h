#pragma once

#include <span>
#include <string>
#include <vector>

#include "egoscript/core/error.h"
#include "egoscript/domain/json_reader.h"
#include "egoscript/domain/types.h"

namespace egoscript {

// Canonical JSON form of every artifact; field names are snake_case.
Json to_json(const ScenarioSpec& x);
Json to_json(const InterventionCandidate& x);
Json to_json(const UserActionCandidate& x);
Json to_json(const SignalSpec& x);
Json to_json(const StructuredSeed& x);
Json to_json(const Segment& x);
Json to_json(const ScriptContract& x);
Json to_json(const VideoRecord& x);

template <class T>
Json to_json_list(std::span<const T> items) {
    Json arr = Json::array();
    for (const auto& x : items) arr.push_back(to_json(x));
    return arr;
}

/// Decodes one artifact, collecting every structural violation. Paths are
/// prefixed with `prefix` when given.
template <class T>
Checked<T> decode(const Json& j, const std::string& prefix = "");

template <>
Checked<ScenarioSpec> decode<ScenarioSpec>(const Json& j, const std::string& prefix);
template <>
Checked<InterventionCandidate> decode<InterventionCandidate>(const Json& j,
                                                             const std::string& prefix);
template <>
Checked<UserActionCandidate> decode<UserActionCandidate>(const Json& j, const std::string& prefix);
template <>
Checked<SignalSpec> decode<SignalSpec>(const Json& j, const std::string& prefix);
template <>
Checked<StructuredSeed> decode<StructuredSeed>(const Json& j, const std::string& prefix);
template <>
Checked<ScriptContract> decode<ScriptContract>(const Json& j, const std::string& prefix);
template <>
Checked<VideoRecord> decode<VideoRecord>(const Json& j, const std::string& prefix);

/// Decodes a JSON array of artifacts; violation paths are "<list>[i].field".
template <class T>
Checked<std::vector<T>> decode_list(const Json& arr, const std::string& list_name) {
    Violations out;
    std::vector<T> items;
    if (!arr.is_array()) {
        out.push_back({violation_code::kWrongType, list_name, "expected an array"});
        return out;
    }
    for (std::size_t i = 0; i < arr.size(); ++i) {
        auto item = decode<T>(arr[i], list_name + "[" + std::to_string(i) + "]");
        if (item) {
            items.push_back(std::move(item).value());
        } else {
            out.insert(out.end(), item.violations().begin(), item.violations().end());
        }
    }
    if (!out.empty()) return out;
    return items;
}

// =============================================================================
// YAML script form
// =============================================================================

/// One contract as a YAML mapping document.
std::string script_to_yaml(const ScriptContract& contract);

/// The project's script.yaml: a top-level `scripts:` sequence.
std::string scripts_to_yaml(std::span<const ScriptContract> contracts);

/// Accepts either a single contract mapping or a `scripts:` sequence.
Checked<std::vector<ScriptContract>> scripts_from_yaml(const std::string& text);

/// Parses YAML text into the equivalent JSON tree (quoted scalars stay
/// strings, plain scalars become numbers/booleans when they parse as such).
/// Throws InputError on malformed YAML.
Json yaml_text_to_json(const std::string& text);

/// Shortest decimal text that round-trips `value` exactly.
std::string format_real(double value);

}  // namespace egoscript
