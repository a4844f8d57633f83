#include "egoscript/gateway/stub_backend.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <regex>
#include <span>

#include <fmt/format.h>

#include "egoscript/core/hash.h"

namespace egoscript {

// =============================================================================
// Options
// =============================================================================

StubOptions parse_stub_options(std::string_view endpoint_url) {
    StubOptions opts;
    auto q = endpoint_url.find('?');
    if (q == std::string_view::npos) return opts;
    std::string_view rest = endpoint_url.substr(q + 1);
    while (!rest.empty()) {
        auto amp = rest.find('&');
        std::string_view pair = rest.substr(0, amp);
        rest = amp == std::string_view::npos ? std::string_view{} : rest.substr(amp + 1);
        auto eq = pair.find('=');
        std::string_view key = pair.substr(0, eq);
        std::string value(eq == std::string_view::npos ? "1" : pair.substr(eq + 1));
        auto as_double = [&] {
            double d = 0.0;
            auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), d);
            if (ec != std::errc() || p != value.data() + value.size()) {
                throw ConfigError("bad stub option " + std::string(pair));
            }
            return d;
        };
        if (key == "malformed") {
            opts.malformed = static_cast<int>(as_double());
        } else if (key == "bad_modality") {
            opts.bad_modality = static_cast<int>(as_double());
        } else if (key == "onset") {
            opts.onset = as_double();
        } else if (key == "alignment") {
            opts.alignment = as_double();
        } else if (key == "fail") {
            opts.fail = value != "0";
        } else if (key == "over_alert") {
            opts.over_alert = value != "0" && value != "false";
        } else {
            throw ConfigError("unknown stub option '" + std::string(key) + "'");
        }
    }
    return opts;
}

namespace {

// =============================================================================
// Fixture library
// =============================================================================

struct SignalFixture {
    const char* modality;
    const char* cue;
    const char* trigger;
};

struct ActionFixture {
    const char* description;
    const char* causal;
    std::array<SignalFixture, 2> signals;
};

struct InterventionFixture {
    const char* description;
    const char* kind;
    const char* rationale;
    const char* reactive_utterance;
    const char* explicit_utterance;
    std::array<ActionFixture, 3> actions;
};

// clang-format off
const InterventionFixture kKitchen[] = {
    {"warn the user about the hot pan", "safety_warning",
     "A pan fresh off the burner causes burns when handled bare-handed.",
     "Is it safe to grab this pan now?", "Ugh, where did I leave the oven mitt?",
     {{{"reaching for the pan handle without a mitt",
        "A bare hand on a handle that has been over the flame is the direct path to a burn, so the warning is needed right before contact.",
        {{{"visual", "steam rising rapidly", "steam billows from the pan as the hand approaches the handle"},
          {"audio", "oil sizzling loudly", "oil in the pan crackles and spits"}}}},
       {"placing a plastic utensil near the burner",
        "Plastic left beside an active burner melts and can ignite, which is what the warning pre-empts.",
        {{{"visual", "plastic spatula edge starting to warp", "the spatula tip curls next to the flame"},
          {"visual", "smoke curling from the burner edge", "thin smoke rises where the plastic touches the grate"}}}},
       {"turning away from the stove while the pan heats",
        "An unattended pan overheats quickly, so the user needs a reminder before the oil smokes.",
        {{{"visual", "steam rising rapidly", "steam thickens while the user faces the counter"},
          {"audio", "oil popping in the pan", "popping grows louder behind the user"}}}}}}},
    {"help the user find the salt they misplaced", "proactive_help",
     "The user keeps interrupting cooking to search for a seasoning that is in view of the camera.",
     "Can you help me find the salt?", "Hmm... Where did I put it?",
     {{{"searching through the spice drawer in frustration",
        "Repeated searching shows the need for help locating the salt that was left elsewhere.",
        {{{"visual", "drawer repeatedly opened and closed", "the same drawer is opened for the third time"},
          {"audio", "user sighing", "an audible frustrated sigh"}}}},
       {"moving the salt behind the cutting board while cleaning",
        "Hiding the salt during cleanup is what later makes the user lose track of it.",
        {{{"visual", "salt shaker disappearing behind the cutting board", "the board is propped against the shaker"},
          {"visual", "user scanning the counter", "the camera sweeps the counter twice"}}}},
       {"checking the same cupboard twice",
        "Looking in the same place again signals the user no longer remembers where the salt is.",
        {{{"visual", "cupboard door reopened", "the user reopens the cupboard they just closed"},
          {"audio", "muttering about the salt", "the user mutters while looking around"}}}}}}},
    {"warn the user about a drink placed near the edge of the table above a power strip", "safety_warning",
     "A spill onto a live power strip is an electrical hazard the user has not noticed.",
     "Could you check if anything here is unsafe?", "Hmm, this counter is getting crowded.",
     {{{"setting a glass down at the edge of the counter above a power strip",
        "A glass at the edge can be knocked over and spill onto the strip below, so the warning has to precede the knock.",
        {{{"visual", "glass wobbling at the counter edge", "the glass rocks as the user's elbow passes"},
          {"visual", "power strip directly below the glass", "the strip's lit switch is visible under the rim"}}}},
       {"pouring boiling water into a cold glass",
        "Thermal shock cracks cold glass, spilling hot water toward the outlet below.",
        {{{"audio", "sound of glass cracking", "a sharp crack as the hot water hits the glass"},
          {"visual", "hairline crack spreading", "a crack line runs up the side of the glass"}}}},
       {"reaching across the glass for the kettle",
        "An arm sweeping across the counter edge is how the drink gets knocked onto the strip.",
        {{{"visual", "sleeve brushing the glass", "the sleeve grazes the rim of the glass"},
          {"audio", "glass scraping on the counter", "the glass slides a few centimetres"}}}}}}},
    {"remind the user to wash their hands after handling raw chicken", "social_adherence",
     "Touching shared food with unwashed hands after raw poultry breaks basic kitchen hygiene norms.",
     "Do I need to wash up before plating?", "Okay, bread next... wait, did I rinse?",
     {{{"reaching for the bread basket right after trimming raw chicken",
        "Raw-poultry residue transfers to food others will eat, which the reminder prevents.",
        {{{"visual", "hand moving from the cutting board to the bread", "the hand leaves the raw chicken and heads to the basket"},
          {"visual", "glistening residue on the fingers", "the fingers shine with residue"}}}},
       {"wiping hands on a shared dish towel",
        "A shared towel spreads contamination to the next person who uses it.",
        {{{"visual", "towel grabbed with wet hands", "the shared towel is pulled from the oven handle"},
          {"visual", "towel returned to the oven handle", "the towel is hung back for others"}}}},
       {"opening the fridge with unwashed hands",
        "The fridge handle is touched by everyone, so contamination there is a social hygiene issue.",
        {{{"visual", "hand closing on the fridge handle", "the fingers wrap around the handle"},
          {"audio", "fridge door seal opening", "the door seal pops open"}}}}}}},
    {"respond to the user's request to set a timer for the pasta", "command_response",
     "The user needs a timer started while both hands are busy.",
     "Can you set a timer for ten minutes?", "I really need to keep track of this pasta.",
     {{{"dropping pasta into boiling water",
        "Pasta overcooks without a timer, so the command has to be served right when it goes in.",
        {{{"visual", "pasta sinking into the pot", "the strands soften and sink"},
          {"audio", "water returning to a boil", "the bubbling grows louder"}}}},
       {"stirring the pot with both hands occupied",
        "Busy hands mean the user cannot set a timer manually.",
        {{{"visual", "both hands on the pot and spoon", "the user steadies the pot while stirring"},
          {"audio", "spoon clinking on the pot", "rhythmic clinking of the spoon"}}}},
       {"glancing at the wall clock repeatedly",
        "Checking the clock shows the user is trying to track time unaided.",
        {{{"visual", "camera tilting up to the wall clock", "the view jumps to the clock twice"},
          {"audio", "user counting minutes aloud", "the user counts under their breath"}}}}}}},
};

const InterventionFixture kGeneric[] = {
    {"warn the user about a hazard developing in the {env}", "safety_warning",
     "An unnoticed hazard in the {env} escalates unless flagged early.",
     "Is anything around me unsafe right now?", "Hmm, something feels off here.",
     {{{"reaching toward an unstable object",
        "An unstable object near the hand is the immediate cause of the hazard the warning addresses.",
        {{{"visual", "unsteady hand movement", "the object shifts as the hand approaches"},
          {"audio", "object rattling", "a rattle as the object tips"}}}},
       {"leaving an item balanced on a ledge",
        "A balanced item falls with the next bump, creating the need for the warning.",
        {{{"visual", "item overhanging the ledge", "the item's edge extends past the ledge"},
          {"visual", "ledge vibrating", "the ledge trembles when touched"}}}},
       {"moving quickly without looking down",
        "Not watching the floor is what turns clutter into a fall risk.",
        {{{"visual", "cluttered floor ahead", "objects lie in the walking path"},
          {"audio", "footsteps speeding up", "hurried footsteps"}}}}}}},
    {"offer help locating an item the user keeps looking for", "proactive_help",
     "Repeated searching in the {env} wastes time the assistant can save.",
     "Can you help me find my keys?", "Hmm... Where did I put them?",
     {{{"searching the same shelf repeatedly",
        "Repeating a search shows the user has lost track of the item.",
        {{{"visual", "shelf scanned twice", "the camera sweeps the same shelf again"},
          {"audio", "user sighing", "an audible sigh"}}}},
       {"setting the item down under a pile of papers",
        "Covering the item is what makes it hard to find later.",
        {{{"visual", "item disappearing under papers", "papers slide over the item"},
          {"visual", "papers stacked on the desk", "a tall stack on the desk"}}}},
       {"patting pockets while turning around",
        "Patting pockets shows the user does not know where the item is.",
        {{{"visual", "hands patting pockets", "both hands pat the jacket pockets"},
          {"audio", "muttering", "the user mutters to themself"}}}}}}},
    {"remind the user of a courtesy expected in the {env}", "social_adherence",
     "Shared spaces in the {env} come with norms the user is about to break.",
     "Is it okay if I do this here?", "I wonder if anyone minds...",
     {{{"starting a loud phone call near others",
        "A loud call disturbs people nearby, which the reminder prevents.",
        {{{"visual", "phone raised to the ear", "the phone comes up as people sit nearby"},
          {"audio", "voice rising in volume", "the user's voice gets louder"}}}},
       {"leaving belongings on a shared seat",
        "Occupying a shared seat with bags blocks others.",
        {{{"visual", "bag placed on the adjacent seat", "the bag lands on the empty seat"},
          {"visual", "person looking for a seat", "someone nearby scans for seats"}}}},
       {"cutting in front of a waiting line",
        "Skipping the line violates the queue norm others follow.",
        {{{"visual", "queue of people ahead", "a line forms at the counter"},
          {"audio", "murmurs from the line", "people in line murmur"}}}}}}},
    {"carry out the user's spoken request promptly", "command_response",
     "The user asks for something while their hands are busy in the {env}.",
     "Can you remind me in five minutes?", "I need to remember to check on this.",
     {{{"starting a task that needs a reminder",
        "A timed task needs the reminder set at its start.",
        {{{"visual", "task started", "the user begins the task"},
          {"audio", "user speaking to the assistant", "the user addresses the assistant"}}}},
       {"holding items in both hands",
        "Full hands prevent the user from acting themself.",
        {{{"visual", "both hands full", "the user carries items in both hands"},
          {"audio", "items clinking", "items clink together"}}}},
       {"checking the time repeatedly",
        "Repeated time checks show the user wants help tracking time.",
        {{{"visual", "watch glanced at", "the wrist comes up into view"},
          {"audio", "user counting aloud", "counting under the breath"}}}}}}},
    {"point out an object about to fall near the user's hand", "safety_warning",
     "A falling object in the {env} can injure the user or break.",
     "Is that going to fall?", "Whoa, that looks wobbly.",
     {{{"bumping the table with an elbow",
        "The bump destabilises the object that the warning is about.",
        {{{"visual", "object sliding toward the edge", "the object slides after the bump"},
          {"audio", "sound of glass cracking", "a crack as the object hits the edge"}}}},
       {"stacking items too high",
        "A tall stack is what eventually topples.",
        {{{"visual", "stack leaning", "the stack leans to one side"},
          {"audio", "items shifting", "a scraping sound from the stack"}}}},
       {"pulling an item from the bottom of a pile",
        "Removing the base makes the pile collapse.",
        {{{"visual", "pile shifting", "the pile sags as the item is pulled"},
          {"audio", "items tumbling", "the sound of items tumbling"}}}}}}},
};
// clang-format on

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string fill(const char* text, const std::string& env) {
    std::string out(text);
    for (auto pos = out.find("{env}"); pos != std::string::npos; pos = out.find("{env}")) {
        out.replace(pos, 5, env);
    }
    return out;
}

bool is_kitchen(const Json& scenario) {
    const auto text = lower(scenario.value("environment", "") + " " + scenario.value("title", "") +
                            " " + scenario.value("description", ""));
    return text.find("kitchen") != std::string::npos || text.find("cook") != std::string::npos;
}

std::span<const InterventionFixture> library_for(bool kitchen) {
    if (kitchen) return kKitchen;
    return kGeneric;
}

std::string environment_of(const Json& scenario) {
    auto env = scenario.value("environment", std::string());
    return env.empty() ? std::string("room") : lower(env);
}

std::string variant_suffix(std::size_t index, std::size_t size) {
    if (index < size) return {};
    return fmt::format(" (variant {})", index / size + 1);
}

/// Finds the fixture an upstream description came from (variant suffixes and
/// {env} substitution included).
const InterventionFixture* match_intervention(const std::string& description) {
    for (auto lib : {std::span<const InterventionFixture>(kKitchen),
                     std::span<const InterventionFixture>(kGeneric)}) {
        for (const auto& f : lib) {
            std::string head(f.description);
            auto cut = head.find("{env}");
            if (cut != std::string::npos) head = head.substr(0, cut);
            if (description.rfind(head, 0) == 0) return &f;
        }
    }
    return nullptr;
}

const ActionFixture* match_action(const std::string& description) {
    for (auto lib : {std::span<const InterventionFixture>(kKitchen),
                     std::span<const InterventionFixture>(kGeneric)}) {
        for (const auto& f : lib) {
            for (const auto& a : f.actions) {
                if (description.rfind(a.description, 0) == 0) return &a;
            }
        }
    }
    return nullptr;
}

// =============================================================================
// Structured steps
// =============================================================================

bool inject_malformed(const StubOptions& opts, const Json& ctx) {
    return ctx.value("item_index", 0) == 0 && ctx.value("attempt", 0) < opts.malformed;
}

Json step1(const Json& ctx) {
    const Json& scenario = ctx.at("scenario");
    const auto lib = library_for(is_kitchen(scenario));
    const auto env = environment_of(scenario);
    const auto count = static_cast<std::size_t>(ctx.value("count", 5));
    Json items = Json::array();
    for (std::size_t i = 0; i < count; ++i) {
        const auto& f = lib[i % lib.size()];
        items.push_back({{"id", fmt::format("I{}", i + 1)},
                         {"scenario_id", lower(scenario.value("id", ""))},
                         {"description", fill(f.description, env) + variant_suffix(i, lib.size())},
                         {"intervention_kind", f.kind},
                         {"rationale", fill(f.rationale, env)}});
    }
    return Json{{"interventions", items}};
}

Json step2(const Json& ctx) {
    const Json& intervention = ctx.at("intervention");
    const auto description = intervention.value("description", std::string());
    const auto* f = match_intervention(description);
    const auto count = static_cast<std::size_t>(ctx.value("count", 3));
    Json items = Json::array();
    for (std::size_t i = 0; i < count; ++i) {
        Json item{{"id", fmt::format("A{}", i + 1)}, {"intervention_id", "intervention"}};
        if (f != nullptr) {
            const auto& a = f->actions[i % f->actions.size()];
            item["description"] = std::string(a.description) + variant_suffix(i, f->actions.size());
            item["causal_explanation"] = a.causal;
        } else {
            item["description"] = fmt::format("doing something that leads to the need to {}",
                                              description) + variant_suffix(i, 1);
            item["causal_explanation"] =
                fmt::format("Working backward from '{}', this action creates the need.", description);
        }
        items.push_back(std::move(item));
    }
    return Json{{"user_actions", items}};
}

Json step3(const StubOptions& opts, const Json& ctx) {
    const Json& action = ctx.at("user_action");
    const auto* f = match_action(action.value("description", std::string()));
    Json items = Json::array();
    if (f != nullptr) {
        for (std::size_t i = 0; i < f->signals.size(); ++i) {
            const auto& s = f->signals[i];
            items.push_back({{"id", fmt::format("S{}", i + 1)},
                             {"user_action_id", "action"},
                             {"modality", s.modality},
                             {"cue", s.cue},
                             {"trigger_description", s.trigger}});
        }
    } else {
        items.push_back({{"id", "S1"},
                         {"user_action_id", "action"},
                         {"modality", "visual"},
                         {"cue", "unsteady hand movement"},
                         {"trigger_description", "the hand hesitates over the object"}});
    }
    if (ctx.value("item_index", 0) == 0 && ctx.value("attempt", 0) < opts.bad_modality) {
        items[0]["modality"] = "smell";
    }
    return Json{{"signals", items}};
}

Json step4(const Json& ctx) {
    const Json& intervention = ctx.at("intervention");
    const auto* f = match_intervention(intervention.value("description", std::string()));
    const std::string reactive = f ? f->reactive_utterance : "Can you help me with this?";
    const std::string explicit_utt = f ? f->explicit_utterance : "Hmm... what should I do here?";
    Json seeds = Json::array();
    seeds.push_back({{"mode", "reactive"},
                     {"user_utterance", reactive},
                     {"addressed_to_agent", true},
                     {"user_aware", true},
                     {"intervention_id", "mangled-id"}});
    seeds.push_back({{"mode", "explicit_proactive"},
                     {"user_utterance", explicit_utt},
                     {"addressed_to_agent", false},
                     {"user_aware", true}});
    seeds.push_back({{"mode", "implicit_proactive"},
                     {"user_utterance", nullptr},
                     {"addressed_to_agent", false},
                     {"user_aware", false}});
    return Json{{"seeds", seeds}};
}

Json step5(const StubOptions& opts, const Json& ctx) {
    const Json& seed = ctx.at("seed");
    const Json& scenario = ctx.at("scenario");
    const Json& action = ctx.at("user_action");
    const Json& signals = ctx.at("signals");
    const auto env = environment_of(scenario);
    const auto mode = seed.value("mode", std::string("reactive"));

    std::string cues;
    std::string trigger_detail;
    for (const auto& s : signals) {
        if (!cues.empty()) cues += "; ";
        cues += s.value("cue", std::string());
        if (trigger_detail.empty()) trigger_detail = s.value("trigger_description", std::string());
    }

    std::string exit_state;
    if (mode == "reactive") {
        exit_state = fmt::format("The user asks the assistant: \"{}\" and pauses, waiting for help.",
                                 seed.value("user_utterance", std::string()));
    } else if (mode == "explicit_proactive") {
        exit_state = fmt::format("The user says to themself: \"{}\" and hesitates.",
                                 seed.value("user_utterance", std::string()));
    } else {
        exit_state = "The user continues without noticing; the scene holds on the developing hazard.";
    }

    Json segs = Json::array();
    segs.push_back({{"kind", "scene_setup"},
                    {"prompt", fmt::format("Egocentric view of a {}. {}", env,
                                           scenario.value("description", std::string()))}});
    segs.push_back({{"kind", "user_action"},
                    {"prompt", fmt::format("The user is {}; the camera follows the user's hands.",
                                           action.value("description", std::string()))}});
    segs.push_back({{"kind", "intervention_trigger"},
                    {"prompt", fmt::format("{}: {}.", cues, trigger_detail)}});
    segs.push_back({{"kind", "exit_state"}, {"prompt", exit_state}});

    Json out{{"camera_angle", "egocentric, eye-level"},
             {"lighting", is_kitchen(scenario) ? "bright overhead kitchen lighting"
                                               : "soft indoor daylight"},
             {"segments", segs}};
    if (opts.onset) out["expected_hazard_onset_s"] = *opts.onset;
    return out;
}

// =============================================================================
// Media and evaluation
// =============================================================================

const std::regex kStubVideo("vid-[0-9a-f]{12}");
const std::regex kStubJob("job-[0-9a-f]{12}");

Json vlm_analysis(const Json& body) {
    const auto video = body.value("video", std::string());
    if (!std::regex_match(video, kStubVideo)) throw InputError("corrupt media handle '" + video + "'");
    return Json{{"identified_hazard", "hot pan handle within reach of a bare hand"},
                {"proposed_intervention", "Careful, that pan is hot. Use the oven mitt on your left."},
                {"intervention_urgency", 3},
                {"events", Json::array({
                               {{"timestamp_s", 8.0},
                                {"event_type", "signal_detected"},
                                {"description", "steam rising rapidly from the pan"}},
                               {{"timestamp_s", 9.0},
                                {"event_type", "hazard_detected"},
                                {"description", "bare hand approaching the hot handle"}},
                           })}};
}

Json judge_verdict(const StubOptions& opts, const Json& input) {
    const Json& vlm = input.at("vlm_outputs");
    const auto hazard = lower(input.value("script_context", Json::object())
                                  .value("hazard_expectation", std::string()));
    const bool benign = hazard.empty() || hazard == "none";
    bool over_alert = benign && vlm.value("intervention_urgency", 1) >= 3;
    if (opts.over_alert) over_alert = *opts.over_alert;
    return Json{{"helpfulness_score", over_alert ? 0.3 : 0.8},
                {"tone_score", over_alert ? 0.5 : 0.9},
                {"over_alert_flag", over_alert},
                {"reasoning", over_alert ? "Warning is not supported by scene evidence."
                                         : "Actionable, urgency-calibrated warning."}};
}

}  // namespace

// =============================================================================
// StubTransport
// =============================================================================

std::string StubTransport::send(const BackendConfig& cfg, const std::optional<std::string>&,
                                std::string_view operation, const Json& body) {
    const auto opts = parse_stub_options(cfg.endpoint_url);
    if (opts.fail) {
        throw TransportError(fmt::format("stub {} backend configured to fail", to_string(cfg.kind)));
    }
    const std::string bytes = fmt::format("{}|{}|{}", to_string(cfg.kind), operation, body.dump());
    const std::string h = hash12(bytes);

    if (operation == "complete") {
        const auto schema = body.value("schema_id", std::string());
        const Json& ctx = body.at("context");
        if (inject_malformed(opts, ctx)) return "{\"truncated\": [1, 2,";
        Json out;
        if (schema == schema_id::kStep1) out = step1(ctx);
        else if (schema == schema_id::kStep2) out = step2(ctx);
        else if (schema == schema_id::kStep3) out = step3(opts, ctx);
        else if (schema == schema_id::kStep4) out = step4(ctx);
        else if (schema == schema_id::kStep5) out = step5(opts, ctx);
        else throw InputError("stub has no fixture for schema '" + schema + "'");
        return out.dump(2);
    }
    if (operation == "image") return "img-" + h;
    if (operation == "video") return "job-" + h;
    if (operation == "poll") {
        const auto job = body.value("job", std::string());
        if (!std::regex_match(job, kStubJob)) throw InputError("corrupt job handle '" + job + "'");
        return Json{{"status", "done"}, {"video", "vid-" + job.substr(4)}}.dump();
    }
    if (operation == "analyze") return vlm_analysis(body).dump(2);
    if (operation == "alignment") {
        const auto video = body.value("video", std::string());
        if (!std::regex_match(video, kStubVideo)) throw InputError("corrupt media handle '" + video + "'");
        return Json{{"alignment_score", opts.alignment}}.dump();
    }
    if (operation == "judge") return judge_verdict(opts, body).dump(2);
    throw InputError("stub does not support operation '" + std::string(operation) + "'");
}

}  // namespace egoscript
