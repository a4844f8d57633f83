#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "egoscript/core/error.h"

namespace egoscript {

using Json = nlohmann::json;

/// Reads typed fields out of a JSON object, recording one violation per
/// missing or mistyped field instead of throwing. Accessors return a default
/// value after recording a violation so decoding always runs to completion.
class JsonReader {
public:
    JsonReader(const Json& object, std::string prefix, Violations& sink);

    /// False (with a violation recorded) when the node is not an object.
    bool is_object() const { return object_ != nullptr; }

    bool has(const char* key) const;
    std::string str(const char* key);
    std::optional<std::string> opt_str(const char* key);
    double number(const char* key);
    std::optional<double> opt_number(const char* key);
    bool boolean(const char* key);
    std::vector<std::string> str_list(const char* key);

    /// Child array or object; nullptr (with a violation) when absent or mistyped.
    const Json* array(const char* key);
    const Json* opt_array(const char* key);
    const Json* object(const char* key);

    template <class E>
    E enumeration(const char* key, std::optional<E> (*parse)(std::string_view), E fallback) {
        auto raw = str(key);
        if (!has(key) || !(*object_)[key].is_string()) return fallback;
        auto parsed = parse(raw);
        if (!parsed) {
            unknown_enum(key, raw);
            return fallback;
        }
        return *parsed;
    }

    std::string path(const char* key) const;
    void add(const char* code, const char* key, std::string message);

private:
    void missing(const char* key);
    void wrong_type(const char* key, const char* expected);
    void unknown_enum(const char* key, const std::string& raw);

    const Json* object_;
    std::string prefix_;
    Violations& sink_;
};

/// Parses `text` as JSON, tolerating a surrounding markdown code fence.
/// Returns nullopt and records a malformed_payload violation on failure.
std::optional<Json> parse_json_payload(std::string_view text, Violations& sink);

}  // namespace egoscript
