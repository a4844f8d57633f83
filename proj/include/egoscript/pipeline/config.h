#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>

#include "egoscript/core/error.h"

namespace egoscript {

struct PipelineConfig {
    int k_interventions = 5;
    int m_actions = 3;
    int schema_retry_limit = 3;
    /// Step 4 binds modes for the first intervention/action chain only; when
    /// set, every chain produced by steps 1-3 is bound.
    bool bind_all_chains = false;
    /// scene_setup, user_action, intervention_trigger, exit_state.
    std::array<double, 4> default_segment_durations_s{3.0, 4.0, 3.0, 2.0};
    std::array<std::string, 5> prompt_template_ids{
        "step1_interventions", "step2_user_actions", "step3_signals", "step4_mode_binding",
        "step5_script"};
    /// Directory searched for "<template id>.txt" overrides.
    std::optional<std::filesystem::path> template_dir;
};

Violations validate_pipeline_config(const PipelineConfig& cfg);

}  // namespace egoscript
