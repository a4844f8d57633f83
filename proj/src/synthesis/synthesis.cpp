#include "egoscript/synthesis/synthesis.h"

#include <algorithm>
#include <chrono>
#include <thread>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "egoscript/core/hash.h"
#include "egoscript/domain/codec.h"
#include "egoscript/pipeline/store.h"

namespace egoscript {

namespace fs = std::filesystem;

namespace {

const Segment& require_segment(const ScriptContract& script, SegmentKind kind) {
    const auto* s = script.segment(kind);
    if (s == nullptr) throw InputError(fmt::format("script has no {} segment", to_string(kind)));
    return *s;
}

/// `text` ending in exactly one sentence terminator.
std::string as_sentence(std::string_view text) {
    std::string out(text);
    while (!out.empty() && (out.back() == ' ' || out.back() == '.')) out.pop_back();
    if (out.empty() || (out.back() != '!' && out.back() != '?')) out += '.';
    return out;
}

std::string cue_sentence(const ScriptContract& script, std::span<const SignalSpec> signals) {
    std::vector<std::string> cues;
    for (const auto& id : script.trigger_signal_ids) {
        auto it = std::find_if(signals.begin(), signals.end(), [&](const SignalSpec& s) { return s.id == id; });
        if (it != signals.end()) cues.push_back(fmt::format("{} ({})", it->cue, to_string(it->modality)));
    }
    if (cues.empty()) return {};
    return fmt::format(" Clearly show the cue: {}.", fmt::join(cues, "; "));
}

double parse_alignment(const std::string& raw) {
    Violations v;
    auto j = parse_json_payload(raw, v);
    if (!j || !j->is_object() || !j->contains("alignment_score") || !(*j)["alignment_score"].is_number()) {
        throw InputError("alignment payload has no numeric alignment_score");
    }
    const double x = (*j)["alignment_score"].get<double>();
    if (!(x >= 0.0 && x <= 1.0)) throw InputError(fmt::format("alignment_score {} outside [0,1]", x));
    return x;
}

}  // namespace

// =============================================================================
// Prompt building
// =============================================================================

std::string build_first_frame_prompt(const ScriptContract& script) {
    if (script.camera_angle.empty()) throw InputError("script camera_angle is empty");
    if (script.lighting.empty()) throw InputError("script lighting is empty");
    const auto& setup = require_segment(script, SegmentKind::SceneSetup);
    return fmt::format("{} Camera: {}. Lighting: {}. First-person view with visible hands, eye-level view.",
                       as_sentence(setup.prompt), script.camera_angle, script.lighting);
}

std::array<std::string, 4> build_video_prompts(const ScriptContract& script,
                                               std::span<const SignalSpec> signals) {
    std::array<std::string, 4> out;
    for (std::size_t i = 0; i < 4; ++i) {
        const auto kind = kSegmentOrder[i];
        const auto& seg = require_segment(script, kind);
        out[i] = fmt::format("[{:.1f}s-{:.1f}s] {} Camera: {}; steady egocentric motion with visible hands.",
                             seg.start_offset_s, seg.end_s(), as_sentence(seg.prompt), script.camera_angle);
        if (kind == SegmentKind::InterventionTrigger) out[i] += cue_sentence(script, signals);
    }
    return out;
}

std::string video_record_id(const ScriptContract& script) {
    return content_id("video", script_to_yaml(script));
}

// =============================================================================
// Store
// =============================================================================

VideoStore::VideoStore(fs::path root) : root_(std::move(root)) {}

fs::path VideoStore::record_path(const std::string& id) const { return root_ / "videos" / (id + ".json"); }

bool VideoStore::has(const std::string& id) const { return fs::exists(record_path(id)); }

std::optional<VideoRecord> VideoStore::load(const std::string& id) const {
    if (!has(id)) return std::nullopt;
    auto rec = decode<VideoRecord>(Json::parse(read_text_file(record_path(id))));
    if (!rec) throw ValidationError("stored video record " + id + " is invalid", rec.violations());
    return std::move(rec).value();
}

void VideoStore::save(const VideoRecord& record) {
    fs::create_directories(root_ / "videos");
    write_file_atomic(record_path(record.id), to_json(record).dump(2) + "\n");
}

std::vector<VideoRecord> VideoStore::list() const {
    std::vector<VideoRecord> out;
    const auto dir = root_ / "videos";
    if (!fs::exists(dir)) return out;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& p : files) {
        if (auto r = load(p.stem().string())) out.push_back(std::move(*r));
    }
    return out;
}

void VideoStore::save_media_sidecar(const std::string& handle, const Json& meta) {
    if (!is_well_formed_handle(handle)) throw InputError("malformed media handle: " + handle);
    fs::create_directories(root_ / "media");
    write_file_atomic(root_ / "media" / (handle + ".json"), meta.dump(2) + "\n");
}

// =============================================================================
// Synthesis
// =============================================================================

VideoRecord synthesize(const ScriptContract& script, std::span<const SignalSpec> signals, Gateway& gateway,
                       VideoStore& store, const SynthesisConfig& cfg) {
    const auto first_frame_prompt = build_first_frame_prompt(script);
    const auto prompts = build_video_prompts(script, signals);

    VideoRecord rec;
    rec.id = video_record_id(script);
    std::lock_guard lock(store_lock(store.record_path(rec.id)));
    if (auto existing = store.load(rec.id); existing && existing->status == VideoStatus::Rendered) {
        return *existing;
    }
    rec.script_ref = script.seed_id;
    rec.duration_s = script.total_duration_s();
    rec.status = VideoStatus::Pending;
    store.save(rec);

    const auto fail = [&](const std::string& stage, const std::exception& e) {
        rec.status = VideoStatus::Failed;
        rec.error = fmt::format("{}: {}", stage, e.what());
        store.save(rec);
        return rec;
    };

    try {
        rec.first_frame_ref = gateway.image().generate_image(first_frame_prompt);
        store.save_media_sidecar(rec.first_frame_ref, {{"handle", rec.first_frame_ref},
                                                       {"kind", "image"},
                                                       {"record_id", rec.id},
                                                       {"prompt", first_frame_prompt}});
    } catch (const std::exception& e) {
        return fail("first_frame", e);
    }
    store.save(rec);

    try {
        const std::vector<std::string> list(prompts.begin(), prompts.end());
        const auto job = gateway.video().generate_video(rec.first_frame_ref, list);
        JobStatus st;
        for (int i = 0; i < cfg.max_polls; ++i) {
            st = gateway.video().poll_job(job);
            if (st.state != JobStatus::State::Pending) break;
            if (cfg.poll_interval_s > 0) {
                std::this_thread::sleep_for(std::chrono::duration<double>(cfg.poll_interval_s));
            }
        }
        if (st.state == JobStatus::State::Pending) throw TimeoutError("video job still pending", cfg.max_polls);
        if (st.state == JobStatus::State::Failed) throw TransportError("video job failed: " + st.error, 1);
        rec.video_ref = st.video_handle;
        store.save_media_sidecar(rec.video_ref, {{"handle", rec.video_ref},
                                                 {"kind", "video"},
                                                 {"record_id", rec.id},
                                                 {"job", job},
                                                 {"first_frame", rec.first_frame_ref},
                                                 {"prompts", list}});
    } catch (const std::exception& e) {
        return fail("video", e);
    }
    rec.status = VideoStatus::Rendered;

    try {
        const std::vector<std::string> texts(prompts.begin(), prompts.end());
        rec.alignment_score = parse_alignment(gateway.vlm().rate_alignment(rec.video_ref, texts));
    } catch (const std::exception& e) {
        rec.error = fmt::format("alignment: {}", e.what());
    }
    store.save(rec);
    return rec;
}

}  // namespace egoscript
