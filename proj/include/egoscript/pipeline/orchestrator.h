#pragma once

#include <span>
#include <vector>

#include "egoscript/domain/types.h"
#include "egoscript/gateway/gateway.h"
#include "egoscript/pipeline/config.h"
#include "egoscript/pipeline/store.h"

namespace egoscript {

/// Output of one step plus the number of schema-invalid payloads it took.
template <class T>
struct StepResult {
    T value;
    int invalid_payloads = 0;
};

struct RunSummary {
    std::vector<int> executed_steps;
    RetryLog retry_log;
};

/// Runs the five generation steps against a text backend. Every backend
/// payload is schema-checked; an invalid payload is regenerated in full up to
/// `schema_retry_limit` times. Identifiers are assigned here as content hashes;
/// ids and references supplied by the backend are ignored.
class Orchestrator {
public:
    Orchestrator(BackendClient& text, PipelineConfig cfg);

    const PipelineConfig& config() const { return cfg_; }

    StepResult<std::vector<InterventionCandidate>> step1_generate_interventions(
        const ScenarioSpec& scenario, int item_index = 0);

    StepResult<std::vector<UserActionCandidate>> step2_derive_user_actions(
        const InterventionCandidate& intervention, int item_index = 0);

    StepResult<std::vector<SignalSpec>> step3_specify_signals(const UserActionCandidate& action,
                                                              const InterventionCandidate& intervention,
                                                              int item_index = 0);

    /// Exactly three seeds, ordered reactive, explicit_proactive, implicit_proactive.
    StepResult<std::vector<StructuredSeed>> step4_bind_modes(const InterventionCandidate& intervention,
                                                             const UserActionCandidate& action,
                                                             std::span<const SignalSpec> signals,
                                                             int item_index = 0);

    /// `context` must hold the seed's scenario, intervention, action and signals.
    StepResult<ScriptContract> step5_generate_script(const StructuredSeed& seed,
                                                     const ArtifactSet& context, int item_index = 0);

    /// Runs every missing step in order, resuming after the last completed one.
    /// Completed step files are never rewritten. On a step failure the store is
    /// left at the last completed step and the exception propagates.
    RunSummary run_pipeline(const ScenarioSpec& scenario, ArtifactStore& store);

    /// Runs exactly one step against the store (OrderError if out of order).
    /// Replaces that step's file and removes any downstream files.
    int run_step(int step, ArtifactStore& store);

private:
    void execute_step(int step, ArtifactStore& store, RetryLog& log);

    BackendClient& text_;
    PipelineConfig cfg_;
};

/// Content-hash id helpers shared with editing paths.
std::string intervention_id_for(const InterventionCandidate& x, int index);
std::string user_action_id_for(const UserActionCandidate& x, int index);
std::string signal_id_for(const SignalSpec& x, int index);
std::string seed_id_for(const StructuredSeed& x);
std::string script_id_for(const ScriptContract& x);

}  // namespace egoscript
