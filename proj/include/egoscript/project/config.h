#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "egoscript/fusion/fusion.h"
#include "egoscript/gateway/gateway.h"
#include "egoscript/pipeline/config.h"
#include "egoscript/signals/signals.h"
#include "egoscript/synthesis/synthesis.h"

namespace egoscript {

/// Everything a project run needs. Loaded from YAML:
///
///   pipeline:  {k_interventions, m_actions, schema_retry_limit,
///               segment_durations_s: [4 reals], template_dir}
///   backends:  {text|image|video|vlm|judge: {endpoint_url, model_name,
///               auth_env_var, timeout_s, max_retries, max_concurrency}}
///   signals:   {smoothing_window, activity_confidence_threshold,
///               proximity_scale, aggregator: max|mean}
///   fusion:    {weights: {w_h, w_t, w_lat, w_sc, w_obs, p_over_alert},
///               observability_lookback_s,
///               windows: {<mode>: {tau_lo, tau_hi, rho_early, rho_late}},
///               hazard_windows: [{mode, hazard_category, tau_lo, ...}]}
///   synthesis: {max_polls, poll_interval_s}
///
/// Every section and key is optional; missing values keep their defaults.
struct ProjectConfig {
    PipelineConfig pipeline;
    std::vector<BackendConfig> backends;
    FusionConfig fusion;
    SynthesisConfig synthesis;
};

/// Throws ConfigError with every problem found.
ProjectConfig parse_config(const Json& doc, const std::filesystem::path& base_dir = {});
ProjectConfig load_config(const std::filesystem::path& path);
ProjectConfig load_config_text(const std::string& yaml_text);

/// Range checks across every section, including the fusion weight audit.
Violations validate_config(const ProjectConfig& cfg);

}  // namespace egoscript
