#include "egoscript/domain/json_reader.h"

#include <fmt/format.h>

namespace egoscript {

namespace vc = violation_code;

JsonReader::JsonReader(const Json& object, std::string prefix, Violations& sink)
    : object_(object.is_object() ? &object : nullptr), prefix_(std::move(prefix)), sink_(sink) {
    if (object_ == nullptr) {
        sink_.push_back({vc::kWrongType, prefix_, "expected a JSON object"});
    }
}

std::string JsonReader::path(const char* key) const {
    return prefix_.empty() ? std::string(key) : prefix_ + "." + key;
}

void JsonReader::add(const char* code, const char* key, std::string message) {
    sink_.push_back({code, path(key), std::move(message)});
}

void JsonReader::missing(const char* key) {
    add(vc::kMissingField, key, fmt::format("missing field '{}'", key));
}

void JsonReader::wrong_type(const char* key, const char* expected) {
    add(vc::kWrongType, key, fmt::format("field '{}' must be {}", key, expected));
}

void JsonReader::unknown_enum(const char* key, const std::string& raw) {
    add(vc::kUnknownEnum, key, fmt::format("'{}' is not an allowed value for '{}'", raw, key));
}

bool JsonReader::has(const char* key) const {
    return object_ != nullptr && object_->contains(key) && !(*object_)[key].is_null();
}

std::string JsonReader::str(const char* key) {
    if (object_ == nullptr) return {};
    if (!has(key)) {
        missing(key);
        return {};
    }
    const auto& v = (*object_)[key];
    if (!v.is_string()) {
        wrong_type(key, "a string");
        return {};
    }
    return v.get<std::string>();
}

std::optional<std::string> JsonReader::opt_str(const char* key) {
    if (!has(key)) return std::nullopt;
    const auto& v = (*object_)[key];
    if (!v.is_string()) {
        wrong_type(key, "a string");
        return std::nullopt;
    }
    return v.get<std::string>();
}

double JsonReader::number(const char* key) {
    if (object_ == nullptr) return 0.0;
    if (!has(key)) {
        missing(key);
        return 0.0;
    }
    const auto& v = (*object_)[key];
    if (!v.is_number()) {
        wrong_type(key, "a number");
        return 0.0;
    }
    return v.get<double>();
}

std::optional<double> JsonReader::opt_number(const char* key) {
    if (!has(key)) return std::nullopt;
    const auto& v = (*object_)[key];
    if (!v.is_number()) {
        wrong_type(key, "a number");
        return std::nullopt;
    }
    return v.get<double>();
}

bool JsonReader::boolean(const char* key) {
    if (object_ == nullptr) return false;
    if (!has(key)) {
        missing(key);
        return false;
    }
    const auto& v = (*object_)[key];
    if (!v.is_boolean()) {
        wrong_type(key, "a boolean");
        return false;
    }
    return v.get<bool>();
}

std::vector<std::string> JsonReader::str_list(const char* key) {
    std::vector<std::string> out;
    const Json* arr = array(key);
    if (arr == nullptr) return out;
    for (std::size_t i = 0; i < arr->size(); ++i) {
        const auto& v = (*arr)[i];
        if (!v.is_string()) {
            sink_.push_back({vc::kWrongType, fmt::format("{}[{}]", path(key), i),
                             "list entries must be strings"});
            continue;
        }
        out.push_back(v.get<std::string>());
    }
    return out;
}

const Json* JsonReader::array(const char* key) {
    if (object_ == nullptr) return nullptr;
    if (!has(key)) {
        missing(key);
        return nullptr;
    }
    return opt_array(key);
}

const Json* JsonReader::opt_array(const char* key) {
    if (!has(key)) return nullptr;
    const auto& v = (*object_)[key];
    if (!v.is_array()) {
        wrong_type(key, "an array");
        return nullptr;
    }
    return &v;
}

const Json* JsonReader::object(const char* key) {
    if (object_ == nullptr) return nullptr;
    if (!has(key)) {
        missing(key);
        return nullptr;
    }
    const auto& v = (*object_)[key];
    if (!v.is_object()) {
        wrong_type(key, "an object");
        return nullptr;
    }
    return &v;
}

std::optional<Json> parse_json_payload(std::string_view text, Violations& sink) {
    std::string_view body = text;
    // Strip a ```json ... ``` fence if the backend wrapped its answer in one.
    if (auto open = body.find("```"); open != std::string_view::npos) {
        auto line_end = body.find('\n', open);
        auto close = body.rfind("```");
        if (line_end != std::string_view::npos && close > line_end) {
            body = body.substr(line_end + 1, close - line_end - 1);
        }
    }
    auto parsed = Json::parse(body, nullptr, /*allow_exceptions=*/false);
    if (parsed.is_discarded()) {
        sink.push_back({vc::kMalformedPayload, "", "payload is not valid JSON"});
        return std::nullopt;
    }
    return parsed;
}

}  // namespace egoscript
