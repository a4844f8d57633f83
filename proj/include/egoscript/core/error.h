#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace egoscript {

/// One broken invariant. `code` is a stable machine name (see violation_code),
/// `path` points at the offending field in snake_case dotted form.
struct Violation {
    std::string code;
    std::string path;
    std::string message;

    bool operator==(const Violation&) const = default;
};

using Violations = std::vector<Violation>;

namespace violation_code {
inline constexpr const char* kMissingField = "missing_field";
inline constexpr const char* kWrongType = "wrong_type";
inline constexpr const char* kEmptyField = "empty_field";
inline constexpr const char* kUnknownEnum = "unknown_enum_value";
inline constexpr const char* kOutOfRange = "out_of_range";
inline constexpr const char* kMalformedPayload = "malformed_payload";
inline constexpr const char* kDuplicateId = "duplicate_id";
inline constexpr const char* kDanglingReference = "dangling_reference";
inline constexpr const char* kBrokenCausalChain = "broken_causal_chain";
inline constexpr const char* kModeUtteranceMismatch = "mode_utterance_mismatch";
inline constexpr const char* kModeAwarenessMismatch = "mode_awareness_mismatch";
inline constexpr const char* kEmptySignalList = "empty_signal_list";
inline constexpr const char* kMissingSegmentKind = "missing_segment_kind";
inline constexpr const char* kSegmentOrder = "segment_order";
inline constexpr const char* kSegmentTiming = "segment_timing";
inline constexpr const char* kSegmentOverlapOrGap = "segment_overlap_or_gap";
inline constexpr const char* kOnsetOutsideTrigger = "onset_outside_trigger";
inline constexpr const char* kEmptyCameraOrLighting = "empty_camera_or_lighting";
inline constexpr const char* kUrgencyRange = "urgency_range";
inline constexpr const char* kEventBeyondDuration = "event_beyond_duration";
inline constexpr const char* kScoreRange = "score_range";
inline constexpr const char* kCardinality = "cardinality";
inline constexpr const char* kModeCoverage = "mode_coverage";
}  // namespace violation_code

/// Either a validated value or the complete list of violations found.
template <class T>
class Checked {
public:
    Checked(T value) : state_(std::move(value)) {}
    Checked(Violations violations) : state_(std::move(violations)) {}

    bool ok() const { return std::holds_alternative<T>(state_); }
    explicit operator bool() const { return ok(); }

    const T& value() const& { return std::get<T>(state_); }
    T&& value() && { return std::get<T>(std::move(state_)); }
    const Violations& violations() const { return std::get<Violations>(state_); }

private:
    std::variant<T, Violations> state_;
};

bool has_violation(const Violations& v, std::string_view code);

// =============================================================================
// Exceptions
// =============================================================================

class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

/// Bad caller-supplied input (degenerate prompt, corrupt handle, malformed trace).
class InputError : public Error {
public:
    explicit InputError(const std::string& what) : Error("input_error", what) {}
};

/// Missing credentials, invalid backend or pipeline configuration.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config_error", what) {}
};

class TransportError : public Error {
public:
    TransportError(const std::string& what, int attempts = 1)
        : Error("transport_error", what), attempts_(attempts) {}
    int attempts() const { return attempts_; }

protected:
    TransportError(std::string code, const std::string& what, int attempts)
        : Error(std::move(code), what), attempts_(attempts) {}

private:
    int attempts_;
};

class TimeoutError : public TransportError {
public:
    TimeoutError(const std::string& what, int attempts = 1)
        : TransportError("timeout", what, attempts) {}
};

/// A value or artifact failed validation; carries the full violation list.
class ValidationError : public Error {
public:
    ValidationError(const std::string& what, Violations violations)
        : Error("validation_failed", what), violations_(std::move(violations)) {}
    const Violations& violations() const { return violations_; }

private:
    Violations violations_;
};

/// Out-of-order step execution against an artifact store.
class OrderError : public Error {
public:
    explicit OrderError(const std::string& what) : Error("out_of_order", what) {}
};

class IntegrityError : public Error {
public:
    explicit IntegrityError(const std::string& what) : Error("integrity_error", what) {}
};

class NotFoundError : public Error {
public:
    explicit NotFoundError(const std::string& what) : Error("not_found", what) {}
};

/// A pipeline step exhausted its schema-retry budget.
class StepFailure : public Error {
public:
    StepFailure(int step, const std::string& what, std::vector<std::string> raw_payloads,
                Violations last_violations)
        : Error("step_failure", what),
          step_(step),
          raw_payloads_(std::move(raw_payloads)),
          last_violations_(std::move(last_violations)) {}

    int step() const { return step_; }
    const std::vector<std::string>& raw_payloads() const { return raw_payloads_; }
    const Violations& last_violations() const { return last_violations_; }

private:
    int step_;
    std::vector<std::string> raw_payloads_;
    Violations last_violations_;
};

}  // namespace egoscript
