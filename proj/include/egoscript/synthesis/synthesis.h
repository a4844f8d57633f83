#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "egoscript/domain/types.h"
#include "egoscript/gateway/gateway.h"

namespace egoscript {

/// Scene setup prompt plus camera, lighting and egocentric markers.
/// Throws InputError when the script lacks a scene setup, camera or lighting.
std::string build_first_frame_prompt(const ScriptContract& script);

/// One prompt per segment in contract order. The trigger prompt embeds the
/// cue text of every trigger signal found in `signals`.
std::array<std::string, 4> build_video_prompts(const ScriptContract& script,
                                               std::span<const SignalSpec> signals = {});

/// Record id derived from the script's content.
std::string video_record_id(const ScriptContract& script);

struct SynthesisConfig {
    int max_polls = 120;
    double poll_interval_s = 0.0;
};

/// Persists VideoRecords under <root>/videos and media sidecars under <root>/media.
class VideoStore {
public:
    explicit VideoStore(std::filesystem::path root);

    std::filesystem::path record_path(const std::string& id) const;
    bool has(const std::string& id) const;
    std::optional<VideoRecord> load(const std::string& id) const;
    void save(const VideoRecord& record);
    /// Every record, sorted by id.
    std::vector<VideoRecord> list() const;

    void save_media_sidecar(const std::string& handle, const Json& meta);

private:
    std::filesystem::path root_;
};

/// First frame, then the video job, then the alignment rating. Backend
/// failures end up on the returned record and are never thrown. A script
/// whose record is already rendered is returned unchanged.
VideoRecord synthesize(const ScriptContract& script, std::span<const SignalSpec> signals, Gateway& gateway,
                       VideoStore& store, const SynthesisConfig& cfg = {});

}  // namespace egoscript
