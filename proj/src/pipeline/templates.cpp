#include "egoscript/pipeline/templates.h"

#include "egoscript/core/error.h"
#include "egoscript/pipeline/store.h"

namespace egoscript {

namespace {

// Few-shot exemplars below are placeholders; replace them by dropping an
// edited copy into the project's templates/ directory.
const std::map<std::string, std::string>& builtins() {
    static const std::map<std::string, std::string> kTemplates{
        {"step1_interventions", R"(You design evaluation scenarios for an egocentric AI assistant.

Scenario: {{scenario_title}}
Environment: {{environment}}
Hazard category: {{hazard_category}}
Description: {{scenario_description}}

Brainstorm {{count}} distinct situations in which the assistant should intervene.
Cover several kinds: safety_warning, proactive_help, social_adherence, command_response.
Avoid generic commands such as "chop the vegetables"; prefer nuanced safety-critical
or social situations.

Example (placeholder):
  {"description": "warn the user about the hot pan", "intervention_kind": "safety_warning",
   "rationale": "A pan fresh off the burner causes burns."}

Respond with JSON: {"interventions": [{"description", "intervention_kind", "rationale"}]}
)"},
        {"step2_user_actions", R"(Intervention needed: {{intervention}}
Kind: {{intervention_kind}}

Work backward from this intervention need. Propose {{count}} different user actions
(or inactions) that would plausibly lead to it, each with a causal explanation of why
the action creates the need.

Example (placeholder): for "warn the user about the hot pan" ->
  "reaching for the pan handle without a mitt"

Respond with JSON: {"user_actions": [{"description", "causal_explanation"}]}
)"},
        {"step3_signals", R"(Intervention: {{intervention}}
User action: {{user_action}}

List the visual or audio signals an egocentric assistant could perceive that reveal
this action before it becomes a crisis. modality must be "visual" or "audio".

Example (placeholder): {"modality": "visual", "cue": "steam rising rapidly",
  "trigger_description": "steam billows as the hand nears the handle"}

Respond with JSON: {"signals": [{"modality", "cue", "trigger_description"}]}
)"},
        {"step4_mode_binding", R"(Intervention: {{intervention}}
User action: {{user_action}}
Signals: {{signals}}

Bind this chain to each assistance mode and write the user's utterance:
- reactive: the user directly asks the assistant (addressed_to_agent = true, user_aware = true)
- explicit_proactive: the user is aware of the need but does not ask the assistant
  (addressed_to_agent = false, user_aware = true)
- implicit_proactive: the user is unaware; no utterance (user_utterance = null,
  addressed_to_agent = false, user_aware = false)

Respond with JSON: {"seeds": [{"mode", "user_utterance", "addressed_to_agent", "user_aware"}]}
)"},
        {"step5_script", R"(Write the video script for this seed.
Mode: {{mode}}
Scenario: {{scenario_description}}
User action: {{user_action}}
Signals: {{signals}}
Utterance: {{utterance}}
Segment durations (s): {{durations}}

Produce exactly four segments in order: scene_setup, user_action, intervention_trigger,
exit_state. The intervention_trigger prompt must state the exact signal. Include a
camera_angle (e.g. "egocentric, eye-level") and lighting. Optionally give
expected_hazard_onset_s inside the intervention_trigger window.

Respond with JSON: {"camera_angle", "lighting", "segments": [{"kind", "prompt"}],
  "expected_hazard_onset_s"?}
)"},
    };
    return kTemplates;
}

}  // namespace

std::optional<std::string> builtin_template(const std::string& id) {
    const auto& t = builtins();
    if (auto it = t.find(id); it != t.end()) return it->second;
    return std::nullopt;
}

std::string load_template(const std::string& id, const std::optional<std::filesystem::path>& dir) {
    if (dir) {
        const auto path = *dir / (id + ".txt");
        if (std::filesystem::exists(path)) return read_text_file(path);
    }
    if (auto text = builtin_template(id)) return *text;
    throw ConfigError("unknown prompt template '" + id + "'");
}

std::string render_template(const std::string& text, const std::map<std::string, std::string>& vars) {
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto open = text.find("{{", pos);
        if (open == std::string::npos) break;
        auto close = text.find("}}", open + 2);
        if (close == std::string::npos) break;
        out.append(text, pos, open - pos);
        const auto name = text.substr(open + 2, close - open - 2);
        if (auto it = vars.find(name); it != vars.end()) {
            out += it->second;
        } else {
            out.append(text, open, close + 2 - open);
        }
        pos = close + 2;
    }
    out.append(text, pos, std::string::npos);
    return out;
}

}  // namespace egoscript
