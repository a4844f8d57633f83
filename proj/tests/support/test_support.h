#pragma once

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include "egoscript/domain/types.h"
#include "egoscript/signals/signals.h"

#ifndef EGOSCRIPT_FIXTURE_DIR
#define EGOSCRIPT_FIXTURE_DIR "tests/fixtures"
#endif

namespace egoscript::testing {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        auto tmpl = (std::filesystem::temp_directory_path() / "egoscript-XXXXXX").string();
        if (::mkdtemp(tmpl.data()) == nullptr) throw std::runtime_error("mkdtemp failed");
        path_ = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline std::filesystem::path fixture_path(const std::string& name) {
    return std::filesystem::path(EGOSCRIPT_FIXTURE_DIR) / name;
}

inline ScenarioSpec kitchen_scenario() {
    return {"kitchen-hot-pan", "Hot pan on the stove", "A user cooks pasta while a pan heats on the stove.",
            "kitchen", "burn"};
}

inline ScenarioSpec benign_scenario() {
    return {"living-room-reading", "Reading on the sofa", "A user reads a book on the sofa.", "living room",
            "none"};
}

/// A valid four-segment contract: 0-3, 3-7, 7-10, 10-12 s, onset 8.5 s.
inline ScriptContract sample_script(AssistanceMode mode = AssistanceMode::Reactive) {
    ScriptContract s;
    s.seed_id = "seed-000000000001";
    s.mode = mode;
    s.camera_angle = "egocentric, eye-level";
    s.lighting = "bright overhead kitchen lighting";
    s.segments = {{SegmentKind::SceneSetup, 0.0, 3.0, "A kitchen with a pan heating on the stove."},
                  {SegmentKind::UserAction, 3.0, 4.0, "The user reaches for the pan handle without a mitt."},
                  {SegmentKind::InterventionTrigger, 7.0, 3.0, "Steam rises rapidly from the pan."},
                  {SegmentKind::ExitState, 10.0, 2.0, "The user pauses with the hand near the handle."}};
    s.expected_hazard_onset_s = 8.5;
    s.trigger_signal_ids = {"sig-000000000001"};
    return s;
}

/// Random trace of `frames` frames with up to `max_hazards` hazards each.
/// Timestamps strictly increase; the hand is sometimes untracked.
inline Trace random_trace(std::mt19937_64& rng, int frames, int max_hazards) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> step(0.01, 0.5);
    std::uniform_int_distribution<int> count(0, max_hazards);
    Trace t;
    double ts = unit(rng) * 2.0;
    for (int i = 0; i < frames; ++i) {
        FrameObservation f;
        f.frame_index = i;
        f.timestamp = ts;
        ts += step(rng);
        if (unit(rng) < 0.8) f.hand_centroid = Point2{unit(rng), unit(rng)};
        const int n = count(rng);
        for (int h = 0; h < n; ++h) {
            f.hazards.push_back({"hazard-" + std::to_string(h), unit(rng), unit(rng) * 0.6,
                                 Point2{unit(rng), unit(rng)}});
        }
        t.push_back(std::move(f));
    }
    return t;
}

}  // namespace egoscript::testing
