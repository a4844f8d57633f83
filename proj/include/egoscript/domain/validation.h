#pragma once

#include <span>

#include "egoscript/core/error.h"
#include "egoscript/domain/types.h"

namespace egoscript {

/// Absolute tolerance for segment contiguity, in seconds.
inline constexpr double kContiguityTolerance_s = 1e-6;

/// Checks every StructuredSeed invariant against `store`. Reports all
/// violations, never stops at the first.
Checked<StructuredSeed> validate_seed(const StructuredSeed& seed, const ArtifactSet& store);

/// Field constraints implied by the seed's mode alone (no reference checks).
Violations mode_violations(const StructuredSeed& seed);

/// Checks every ScriptContract invariant.
Checked<ScriptContract> validate_script(const ScriptContract& contract);

Violations validate_scenario(const ScenarioSpec& scenario);

// Per-step artifact lists, resolved against the upstream artifacts in `store`.
Violations validate_interventions(std::span<const InterventionCandidate> items,
                                  const ArtifactSet& store);
Violations validate_user_actions(std::span<const UserActionCandidate> items,
                                 const ArtifactSet& store);
Violations validate_signals(std::span<const SignalSpec> items, const ArtifactSet& store);
Violations validate_seeds(std::span<const StructuredSeed> items, const ArtifactSet& store);

/// Scripts must validate individually and reference a seed in `store` with a
/// matching mode.
Violations validate_scripts(std::span<const ScriptContract> items, const ArtifactSet& store);

Violations validate_video_record(const VideoRecord& record);

}  // namespace egoscript
