#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace egoscript {

/// Built-in prompt text for a template id, or nullopt if unknown.
std::optional<std::string> builtin_template(const std::string& id);

/// Loads `<dir>/<id>.txt` when present, otherwise the built-in text.
/// Throws ConfigError for an id that is neither.
std::string load_template(const std::string& id,
                          const std::optional<std::filesystem::path>& dir);

/// Replaces every `{{name}}` with vars[name]; unknown names are left as-is.
std::string render_template(const std::string& text, const std::map<std::string, std::string>& vars);

}  // namespace egoscript
