#include "egoscript/project/config.h"

#include <fmt/format.h>

#include "egoscript/domain/codec.h"
#include "egoscript/pipeline/store.h"

namespace egoscript {

namespace fs = std::filesystem;
namespace vc = violation_code;

namespace {

void read_real(JsonReader& r, const char* key, double& out) {
    if (auto v = r.opt_number(key)) out = *v;
}

void read_int(JsonReader& r, const char* key, int& out) {
    if (auto v = r.opt_number(key)) out = static_cast<int>(*v);
}

const Json* section(const Json& doc, const char* key, Violations& v) {
    if (!doc.contains(key) || doc[key].is_null()) return nullptr;
    if (!doc[key].is_object()) {
        v.push_back({vc::kWrongType, key, fmt::format("section '{}' must be a mapping", key)});
        return nullptr;
    }
    return &doc[key];
}

ToleranceWindow read_window(JsonReader& r, ToleranceWindow w) {
    read_real(r, "tau_lo", w.tau_lo);
    read_real(r, "tau_hi", w.tau_hi);
    read_real(r, "rho_early", w.rho_early);
    read_real(r, "rho_late", w.rho_late);
    return w;
}

std::optional<SafetyAggregator> parse_aggregator(std::string_view s) {
    if (s == "max") return SafetyAggregator::Max;
    if (s == "mean") return SafetyAggregator::Mean;
    return std::nullopt;
}

}  // namespace

ProjectConfig parse_config(const Json& doc, const fs::path& base_dir) {
    Violations v;
    ProjectConfig cfg;
    if (!doc.is_null() && !doc.is_object()) throw ConfigError("config must be a YAML mapping");

    if (const Json* p = section(doc, "pipeline", v)) {
        JsonReader r(*p, "pipeline", v);
        read_int(r, "k_interventions", cfg.pipeline.k_interventions);
        read_int(r, "m_actions", cfg.pipeline.m_actions);
        read_int(r, "schema_retry_limit", cfg.pipeline.schema_retry_limit);
        if (r.has("bind_all_chains")) cfg.pipeline.bind_all_chains = r.boolean("bind_all_chains");
        if (const Json* d = r.opt_array("segment_durations_s")) {
            if (d->size() != 4) {
                r.add(vc::kCardinality, "segment_durations_s", "exactly four durations are required");
            } else {
                for (std::size_t i = 0; i < 4; ++i) {
                    if ((*d)[i].is_number()) cfg.pipeline.default_segment_durations_s[i] = (*d)[i].get<double>();
                }
            }
        }
        if (auto dir = r.opt_str("template_dir")) {
            fs::path t(*dir);
            cfg.pipeline.template_dir = t.is_relative() && !base_dir.empty() ? base_dir / t : t;
        }
    }

    if (const Json* b = section(doc, "backends", v)) {
        for (const auto& [name, body] : b->items()) {
            auto kind = parse_backend_kind(name);
            if (!kind) {
                v.push_back({vc::kUnknownEnum, "backends." + name, "unknown backend kind '" + name + "'"});
                continue;
            }
            BackendConfig bc;
            bc.kind = *kind;
            JsonReader r(body, "backends." + name, v);
            if (auto s = r.opt_str("endpoint_url")) bc.endpoint_url = *s;
            if (auto s = r.opt_str("model_name")) bc.model_name = *s;
            if (auto s = r.opt_str("auth_env_var")) bc.auth_env_var = *s;
            read_real(r, "timeout_s", bc.timeout_s);
            read_int(r, "max_retries", bc.max_retries);
            read_int(r, "max_concurrency", bc.max_concurrency);
            cfg.backends.push_back(std::move(bc));
        }
    }

    if (const Json* s = section(doc, "signals", v)) {
        JsonReader r(*s, "signals", v);
        auto& sc = cfg.fusion.signals;
        read_int(r, "smoothing_window", sc.smoothing_window);
        read_real(r, "activity_confidence_threshold", sc.activity_confidence_threshold);
        read_real(r, "proximity_scale", sc.proximity_scale);
        if (r.has("aggregator")) sc.aggregator = r.enumeration("aggregator", &parse_aggregator, sc.aggregator);
    }

    if (const Json* f = section(doc, "fusion", v)) {
        JsonReader r(*f, "fusion", v);
        read_real(r, "observability_lookback_s", cfg.fusion.observability_lookback_s);
        if (r.has("weights")) {
            if (const Json* w = r.object("weights")) {
                JsonReader wr(*w, "fusion.weights", v);
                auto& fw = cfg.fusion.weights;
                read_real(wr, "w_h", fw.w_h);
                read_real(wr, "w_t", fw.w_t);
                read_real(wr, "w_lat", fw.w_lat);
                read_real(wr, "w_sc", fw.w_sc);
                read_real(wr, "w_obs", fw.w_obs);
                read_real(wr, "p_over_alert", fw.p_over_alert);
            }
        }
        if (r.has("windows")) {
            if (const Json* w = r.object("windows")) {
                for (const auto& [name, body] : w->items()) {
                    auto mode = parse_assistance_mode(name);
                    if (!mode) {
                        v.push_back({vc::kUnknownEnum, "fusion.windows." + name, "unknown mode '" + name + "'"});
                        continue;
                    }
                    JsonReader wr(body, "fusion.windows." + name, v);
                    cfg.fusion.windows.set(*mode, read_window(wr, cfg.fusion.windows.lookup(*mode)));
                }
            }
        }
        if (const Json* hw = r.opt_array("hazard_windows")) {
            for (std::size_t i = 0; i < hw->size(); ++i) {
                JsonReader wr((*hw)[i], fmt::format("fusion.hazard_windows[{}]", i), v);
                auto mode = wr.enumeration("mode", &parse_assistance_mode, AssistanceMode::Reactive);
                auto category = wr.str("hazard_category");
                if (!v.empty()) continue;
                cfg.fusion.windows.set(mode, category, read_window(wr, cfg.fusion.windows.lookup(mode)));
            }
        }
    }

    if (const Json* s = section(doc, "synthesis", v)) {
        JsonReader r(*s, "synthesis", v);
        read_int(r, "max_polls", cfg.synthesis.max_polls);
        read_real(r, "poll_interval_s", cfg.synthesis.poll_interval_s);
    }

    auto range = validate_config(cfg);
    v.insert(v.end(), range.begin(), range.end());
    if (!v.empty()) {
        std::string msg = "invalid config:";
        for (const auto& x : v) msg += fmt::format(" [{}] {}: {};", x.code, x.path, x.message);
        throw ConfigError(msg);
    }
    return cfg;
}

ProjectConfig load_config_text(const std::string& yaml_text) {
    try {
        return parse_config(yaml_text_to_json(yaml_text));
    } catch (const InputError& e) {
        throw ConfigError(std::string("config is not valid YAML: ") + e.what());
    }
}

ProjectConfig load_config(const fs::path& path) {
    if (!fs::exists(path)) throw ConfigError("config file not found: " + path.string());
    Json doc;
    try {
        doc = yaml_text_to_json(read_text_file(path));
    } catch (const InputError& e) {
        throw ConfigError(std::string("config is not valid YAML: ") + e.what());
    }
    return parse_config(doc, path.parent_path());
}

Violations validate_config(const ProjectConfig& cfg) {
    Violations out = validate_pipeline_config(cfg.pipeline);
    for (const auto& b : cfg.backends) {
        for (auto x : validate_backend_config(b)) {
            x.path = fmt::format("backends.{}.{}", to_string(b.kind), x.path);
            out.push_back(std::move(x));
        }
    }
    for (auto x : validate_signal_config(cfg.fusion.signals)) {
        x.path = "signals." + x.path;
        out.push_back(std::move(x));
    }
    for (auto x : cfg.fusion.windows.validate()) {
        x.path = "fusion." + x.path;
        out.push_back(std::move(x));
    }
    try {
        audit_weights(cfg.fusion.weights);
    } catch (const ConfigError& e) {
        out.push_back({vc::kOutOfRange, "fusion.weights", e.what()});
    }
    if (!(cfg.fusion.observability_lookback_s >= 0.0)) {
        out.push_back({vc::kOutOfRange, "fusion.observability_lookback_s", "lookback must be >= 0"});
    }
    if (cfg.synthesis.max_polls < 1) {
        out.push_back({vc::kOutOfRange, "synthesis.max_polls", "max_polls must be >= 1"});
    }
    return out;
}

}  // namespace egoscript
